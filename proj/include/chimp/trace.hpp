#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace chimp {

// ---------------------------------------------------------------------------
// UI identifiers and events
// ---------------------------------------------------------------------------

struct XyPair {
    int x = 0;
    int y = 0;
    bool operator==(const XyPair&) const = default;
};

struct NumId {
    int value = 0;
    bool operator==(const NumId&) const = default;
};

struct TextId {
    std::string value;
    bool operator==(const TextId&) const = default;
};

// A widget reference: numeric id, exact display text, or a screen point.
// Screen-point ids are non-negative; use xy_id() to construct them checked.
using UiId = std::variant<NumId, TextId, XyPair>;

UiId num_id(int value);
UiId text_id(std::string value);
UiId xy_id(int x, int y); // throws std::invalid_argument on negative coords

// Either a concrete UiId or the wildcard, resolved at run time against the
// current view hierarchy.
struct IdSpec {
    std::optional<UiId> id; // nullopt = wildcard

    static IdSpec wildcard() { return IdSpec{}; }
    static IdSpec of(UiId v) { return IdSpec{std::move(v)}; }
    bool is_wildcard() const { return !id.has_value(); }
    bool operator==(const IdSpec&) const = default;
};

struct ClickEvent {
    IdSpec target;
    bool operator==(const ClickEvent&) const = default;
};
struct LongClickEvent {
    IdSpec target;
    bool operator==(const LongClickEvent&) const = default;
};
// delta is a directional offset in px; it may be negative.
struct SwipeEvent {
    IdSpec target;
    XyPair delta;
    bool operator==(const SwipeEvent&) const = default;
};
struct TypeEvent {
    IdSpec target;
    std::string text;
    bool operator==(const TypeEvent&) const = default;
};
struct PinchEvent {
    XyPair from;
    XyPair to;
    bool operator==(const PinchEvent&) const = default;
};
struct SleepEvent {
    int millis = 0; // virtual time, >= 0
    bool operator==(const SleepEvent&) const = default;
};
struct SkipEvent {
    bool operator==(const SkipEvent&) const = default;
};

using AppEvent = std::variant<ClickEvent, LongClickEvent, SwipeEvent,
                              TypeEvent, PinchEvent, SleepEvent, SkipEvent>;

enum class DeviceEvent { ClickBack, ClickHome, ClickMenu, Settings, Rotate };

using UiEvent = std::variant<AppEvent, DeviceEvent>;

// True for the three device events that suspend the app (Rotate recreates the
// screen but does not leave the app).
bool suspends_app(const UiEvent& event);

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

class Prop;
using PropPtr = std::shared_ptr<const Prop>;

using PredArg = std::variant<std::int64_t, std::string>;

// Propositional formulas over named predicates. Immutable; share freely.
class Prop {
public:
    struct Pred {
        std::string name;
        std::vector<PredArg> args;
    };
    struct Not {
        PropPtr inner;
    };
    struct Implies {
        PropPtr lhs, rhs;
    };
    struct And {
        PropPtr lhs, rhs;
    };
    struct Or {
        PropPtr lhs, rhs;
    };
    using Node = std::variant<Pred, Not, Implies, And, Or>;

    explicit Prop(Node n) : node(std::move(n)) {}
    Node node;

    // Predicate names must match [A-Za-z][A-Za-z0-9_]*.
    static PropPtr pred(std::string name, std::vector<PredArg> args = {});
    static PropPtr negate(PropPtr inner);
    static PropPtr implies(PropPtr lhs, PropPtr rhs);
    static PropPtr conj(PropPtr lhs, PropPtr rhs);
    static PropPtr disj(PropPtr lhs, PropPtr rhs);
};

bool prop_equal(const Prop& a, const Prop& b);

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

class Trace;
using TracePtr = std::shared_ptr<const Trace>;

// The executable test script: a finite tree of UI events, assertions,
// try/then wrappers and sequencing, with unit as the empty script.
class Trace {
public:
    struct Event {
        UiEvent event;
    };
    struct Seq {
        TracePtr first, second;
    };
    struct Assert {
        PropPtr prop;
    };
    struct Try {
        TracePtr body;
    };
    struct Then {
        PropPtr guard;
        TracePtr body;
    };
    struct Unit {};
    using Node = std::variant<Event, Seq, Assert, Try, Then, Unit>;

    explicit Trace(Node n) : node(std::move(n)) {}
    Node node;

    static TracePtr event(UiEvent e);
    static TracePtr seq(TracePtr first, TracePtr second);
    static TracePtr assertion(PropPtr p);
    static TracePtr attempt(TracePtr body);            // τ ?
    static TracePtr guarded(PropPtr guard, TracePtr body); // P then τ
    static TracePtr unit();

    bool is_unit() const { return std::holds_alternative<Unit>(node); }
};

bool trace_equal(const Trace& a, const Trace& b);

// ---------------------------------------------------------------------------
// Execution results
// ---------------------------------------------------------------------------

// One executed step: either a concrete UI event or a silent transition.
struct ExecEvent {
    std::optional<UiEvent> event; // nullopt = silent

    static ExecEvent silent() { return ExecEvent{}; }
    static ExecEvent of(UiEvent e) { return ExecEvent{std::move(e)}; }
    bool is_silent() const { return !event.has_value(); }
    bool operator==(const ExecEvent&) const = default;
};

using ExecTrace = std::vector<ExecEvent>;

struct CrashReport {
    std::string message;
    std::string screen;
    std::vector<std::string> frames; // non-empty
    int event_index = 0;             // applied-event count at crash time
    bool operator==(const CrashReport&) const = default;
};

// Terminal result of a run: success, crash, failed assertion, or a blocked
// event that could not be applied.
class Outcome {
public:
    struct Succ {};
    struct Crash {
        CrashReport report;
    };
    struct Fail {
        PropPtr prop;
    };
    struct Block {
        UiEvent event;
    };
    using Node = std::variant<Succ, Crash, Fail, Block>;

    Node node;

    static Outcome succ() { return {Succ{}}; }
    static Outcome crash(CrashReport r) { return {Crash{std::move(r)}}; }
    static Outcome fail(PropPtr p) { return {Fail{std::move(p)}}; }
    static Outcome block(UiEvent e) { return {Block{std::move(e)}}; }

    bool is_succ() const { return std::holds_alternative<Succ>(node); }
    bool is_crash() const { return std::holds_alternative<Crash>(node); }
    bool is_fail() const { return std::holds_alternative<Fail>(node); }
    bool is_block() const { return std::holds_alternative<Block>(node); }
};

bool outcome_equal(const Outcome& a, const Outcome& b);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct NoWildcardError : std::logic_error {
    using std::logic_error::logic_error;
};

// True iff no IdSpec in the event is the wildcard. Device events are always
// concrete.
bool is_concrete(const AppEvent& e);
bool is_concrete(const UiEvent& e);

// Replaces every wildcard in e with id. Throws NoWildcardError if e is
// already concrete.
AppEvent substitute_wildcard(const AppEvent& e, const UiId& id);

// Canonical form modulo the (Seq, Unit) monoid laws: Seq re-associated to the
// right, units dropped, Try/Then bodies normalized recursively. Execution
// never normalizes; this exists for membership checking and structural
// comparison.
TracePtr normalize(const TracePtr& t);

// The atom sequence of normalize(t): events, asserts, try-blocks and
// then-blocks in order. Unit flattens to the empty sequence.
std::vector<TracePtr> flatten(const TracePtr& t);

// Structural equality after normalize.
bool normal_equal(const TracePtr& a, const TracePtr& b);

// True iff every event in the trace (including Try/Then bodies) is concrete.
bool trace_is_concrete(const Trace& t);

// ---------------------------------------------------------------------------
// Rendering (the textual syntax shared with the script parser)
// ---------------------------------------------------------------------------

std::string render(const UiId& id);
std::string render(const IdSpec& spec);
std::string render(const UiEvent& event);
std::string render(const Prop& p);
std::string render(const Trace& t);
std::string render(const ExecTrace& exec); // drops silent entries

std::string quote_string(const std::string& s);

} // namespace chimp
