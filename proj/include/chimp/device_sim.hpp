#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "chimp/oracle.hpp"

namespace chimp {

// Model-load failures, by category: malformed/missing fields, dangling
// references, and overlapping transition rules.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RefError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AmbiguityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using SimValue = std::variant<long long, std::string, bool>;

enum class WidgetFlag { Clickable, LongClickable, Editable, Scrollable, Displayed };

const char* widget_flag_name(WidgetFlag f);

// ---------------------------------------------------------------------------
// Static app description
// ---------------------------------------------------------------------------

struct WidgetSpec {
    int id = 0;
    std::string text;
    XyPair xy;
    int width = 60, height = 30; // positive
    bool clickable = false;
    bool long_clickable = false;
    bool editable = false;
    bool scrollable = false;
    bool displayed = true;
    bool is_dialog = false;
};

struct ScreenSpec {
    std::string name;
    std::vector<WidgetSpec> widgets;
    std::optional<std::string> back; // target screen of the back button
};

// Boolean expression language for transition guards and model predicates:
// conjunctions of comparisons over variables, widget state, the current
// screen, and positional arguments $0, $1, ...
struct PredTerm {
    enum class Kind { Literal, Var, WidgetText, WidgetFlagRef, Screen, Arg };
    Kind kind = Kind::Literal;
    SimValue literal;
    std::string var_name;
    int widget_id = 0;
    WidgetFlag flag = WidgetFlag::Displayed;
    int arg_index = 0;

    bool operator==(const PredTerm&) const = default;
};

struct PredCmp {
    enum class Op { Eq, Ne, Lt, Le };
    PredTerm lhs;
    Op op = Op::Eq;
    PredTerm rhs;
};

struct PredExpr {
    std::vector<PredCmp> conjuncts;
    std::string source; // original expression text
};

struct GotoScreen {
    std::string screen;
};
struct SetVar {
    std::string name;
    SimValue value;
    bool is_delta = false; // add to an integer variable
};
struct SetWidgetText {
    int id = 0;
    std::string text_template; // {var} placeholders expand from variables
};
struct SetFlag {
    int id = 0;
    WidgetFlag flag = WidgetFlag::Displayed;
    bool value = true;
};
struct CrashEffect {
    std::string message;
    std::vector<std::string> frames; // non-empty
};
struct ScheduleTask {
    int task_index = 0;
};
struct AppendTyped {
    int id = 0; // appends the triggering Type event's text
};

using Effect = std::variant<GotoScreen, SetVar, SetWidgetText, SetFlag,
                            CrashEffect, ScheduleTask, AppendTyped>;

struct EventPattern {
    enum class Kind { Click, LongClick, Type, Swipe };
    Kind kind = Kind::Click;
    std::optional<int> target; // nullopt matches any widget
};

struct TransitionRule {
    std::string screen;
    EventPattern on;
    std::optional<PredExpr> when;
    std::vector<Effect> effects;
};

struct AsyncTask {
    long long delay_ms = 0;
    std::vector<Effect> effects;
};

struct Lifecycle {
    std::set<int> rotate_volatile;  // widget state reset on Rotate
    std::set<int> suspend_volatile; // widget state reset on suspend
    // Effects fired per screen; the key "*" applies on every screen.
    std::map<std::string, std::vector<Effect>> on_rotate;
    std::map<std::string, std::vector<Effect>> on_resume;
};

struct PredicateDef {
    int arity = 0;
    PredExpr expr;
};

struct AppModel {
    std::string name;
    std::string initial_screen;
    std::map<std::string, ScreenSpec> screens;
    std::map<std::string, SimValue> variables;
    std::vector<TransitionRule> transitions;
    Lifecycle lifecycle;
    std::vector<AsyncTask> async_tasks;
    std::map<std::string, PredicateDef> predicates;
    long long idle_work = 1; // settle budget consumed per executed effect
    std::map<std::string, int> names; // #name table for scripts

    const ScreenSpec* screen(const std::string& n) const;
    const WidgetSpec* widget_spec(int id) const; // across all screens
};

// Parses and fully validates a model document. Throws SchemaError, RefError
// or AmbiguityError.
AppModel load_model_text(const std::string& json_text);
AppModel load_model_file(const std::string& path);

// ---------------------------------------------------------------------------
// Simulated device
// ---------------------------------------------------------------------------

// A deterministic app/device backend: screens, widget state, lifecycle,
// virtual time, an async effect queue, and seedable bugs, all behind the
// Oracle interface. One instance is confined to one driver run at a time.
class DeviceSim final : public Oracle {
public:
    explicit DeviceSim(std::shared_ptr<const AppModel> model,
                       std::uint64_t seed = 0, long long settle_budget = 1000);

    void reset(); // back to the freshly-installed state

    bool try_apply(const UiEvent& event) override;
    std::optional<CrashReport> settle() override;
    bool holds(const Prop& p) override;
    std::vector<UiId> enumerate_candidates(const AppEvent& e) override;
    bool ensure_foreground() override;

    const AppModel& model() const { return *model_; }
    const std::string& current_screen() const { return screen_; }
    bool crashed() const { return crashed_.has_value(); }
    long long clock_ms() const { return clock_ms_; }
    int applied_events() const { return applied_events_; }
    std::optional<SimValue> variable(const std::string& name) const;
    std::optional<std::string> widget_text(int id) const;

    // Canonical JSON dump of the full device state; equal strings mean equal
    // states.
    std::string serialize() const;

private:
    struct WidgetState {
        std::string text;
        bool clickable = false, long_clickable = false, editable = false,
             scrollable = false, displayed = false;
    };
    struct PendingTask {
        long long due_ms = 0;
        long long seq = 0; // insertion order within equal due times
        std::vector<Effect> effects;
    };
    struct QueuedEffect {
        Effect effect;
        std::optional<std::string> typed; // payload for AppendTyped
    };

    static WidgetState from_spec(const WidgetSpec& spec);
    const ScreenSpec& cur_screen_spec() const;
    bool on_current_screen(int id) const;
    WidgetState* state_of(int id);
    const WidgetState* state_of(int id) const;
    bool flag_value(const WidgetState& w, WidgetFlag f) const;

    // Target resolution for concrete app events; nullopt = no such target.
    struct Resolved {
        int id = 0;
        bool dead_space = false; // coordinate tap that hit nothing
    };
    std::optional<Resolved> resolve_target(const UiId& id, WidgetFlag needed) const;

    void enqueue(const Effect& e, const std::optional<std::string>& typed);
    void enqueue_list(const std::vector<Effect>& es,
                      const std::optional<std::string>& typed = std::nullopt);
    void enqueue_lifecycle(
        const std::map<std::string, std::vector<Effect>>& table);
    void apply_widget_event(EventPattern::Kind kind, int widget_id,
                            const std::optional<std::string>& typed);
    void reset_volatile(const std::set<int>& volatile_ids);
    void move_due_tasks();
    std::optional<CrashReport> execute_effect(const QueuedEffect& qe);
    CrashReport make_crash(std::string message,
                           std::vector<std::string> frames) const;
    std::string expand_template(const std::string& tmpl) const;

    SimValue eval_term(const PredTerm& t,
                       const std::vector<PredArg>& args) const;
    bool eval_cmp(const PredCmp& c, const std::vector<PredArg>& args) const;
    bool eval_expr(const PredExpr& e, const std::vector<PredArg>& args) const;
    bool eval_builtin(const std::string& name,
                      const std::vector<PredArg>& args, bool& handled) const;
    bool eval_prop(const Prop& p) const;

    std::shared_ptr<const AppModel> model_;
    std::uint64_t init_seed_;
    long long settle_budget_;

    std::string screen_;
    std::map<int, WidgetState> widgets_;
    std::map<std::string, SimValue> vars_;
    long long clock_ms_ = 0;
    bool landscape_ = false;
    bool foreground_ = true;
    std::vector<PendingTask> pending_; // sorted by (due_ms, seq)
    std::deque<QueuedEffect> ready_;
    std::optional<CrashReport> crashed_;
    std::uint64_t rng_state_ = 0; // reserved stream for stochastic effects
    int applied_events_ = 0;
    long long sched_seq_ = 0;
};

} // namespace chimp
