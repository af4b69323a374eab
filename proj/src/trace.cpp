#include "chimp/trace.hpp"

#include <sstream>

namespace chimp {

// ---------------------------------------------------------------------------
// Identifier factories
// ---------------------------------------------------------------------------

UiId num_id(int value) { return NumId{value}; }

UiId text_id(std::string value) { return TextId{std::move(value)}; }

UiId xy_id(int x, int y) {
    if (x < 0 || y < 0)
        throw std::invalid_argument("xy identifier coordinates must be non-negative");
    return XyPair{x, y};
}

bool suspends_app(const UiEvent& event) {
    const auto* d = std::get_if<DeviceEvent>(&event);
    return d && (*d == DeviceEvent::ClickHome || *d == DeviceEvent::ClickMenu ||
                 *d == DeviceEvent::Settings);
}

// ---------------------------------------------------------------------------
// Prop factories and equality
// ---------------------------------------------------------------------------

static bool valid_pred_name(const std::string& name) {
    if (name.empty()) return false;
    auto alpha = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    };
    if (!alpha(name[0])) return false;
    for (char c : name)
        if (!alpha(c) && !(c >= '0' && c <= '9') && c != '_') return false;
    return true;
}

PropPtr Prop::pred(std::string name, std::vector<PredArg> args) {
    if (!valid_pred_name(name))
        throw std::invalid_argument("invalid predicate name: '" + name + "'");
    return std::make_shared<Prop>(Node{Pred{std::move(name), std::move(args)}});
}

PropPtr Prop::negate(PropPtr inner) {
    return std::make_shared<Prop>(Node{Not{std::move(inner)}});
}

PropPtr Prop::implies(PropPtr lhs, PropPtr rhs) {
    return std::make_shared<Prop>(Node{Implies{std::move(lhs), std::move(rhs)}});
}

PropPtr Prop::conj(PropPtr lhs, PropPtr rhs) {
    return std::make_shared<Prop>(Node{And{std::move(lhs), std::move(rhs)}});
}

PropPtr Prop::disj(PropPtr lhs, PropPtr rhs) {
    return std::make_shared<Prop>(Node{Or{std::move(lhs), std::move(rhs)}});
}

bool prop_equal(const Prop& a, const Prop& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Prop::Pred>) {
                return na.name == nb.name && na.args == nb.args;
            } else if constexpr (std::is_same_v<T, Prop::Not>) {
                return prop_equal(*na.inner, *nb.inner);
            } else {
                return prop_equal(*na.lhs, *nb.lhs) && prop_equal(*na.rhs, *nb.rhs);
            }
        },
        a.node);
}

// ---------------------------------------------------------------------------
// Trace factories and equality
// ---------------------------------------------------------------------------

TracePtr Trace::event(UiEvent e) {
    return std::make_shared<Trace>(Node{Event{std::move(e)}});
}
TracePtr Trace::seq(TracePtr first, TracePtr second) {
    return std::make_shared<Trace>(Node{Seq{std::move(first), std::move(second)}});
}
TracePtr Trace::assertion(PropPtr p) {
    return std::make_shared<Trace>(Node{Assert{std::move(p)}});
}
TracePtr Trace::attempt(TracePtr body) {
    return std::make_shared<Trace>(Node{Try{std::move(body)}});
}
TracePtr Trace::guarded(PropPtr guard, TracePtr body) {
    return std::make_shared<Trace>(Node{Then{std::move(guard), std::move(body)}});
}
TracePtr Trace::unit() {
    static const TracePtr u = std::make_shared<Trace>(Node{Unit{}});
    return u;
}

bool trace_equal(const Trace& a, const Trace& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Trace::Event>) {
                return na.event == nb.event;
            } else if constexpr (std::is_same_v<T, Trace::Seq>) {
                return trace_equal(*na.first, *nb.first) &&
                       trace_equal(*na.second, *nb.second);
            } else if constexpr (std::is_same_v<T, Trace::Assert>) {
                return prop_equal(*na.prop, *nb.prop);
            } else if constexpr (std::is_same_v<T, Trace::Try>) {
                return trace_equal(*na.body, *nb.body);
            } else if constexpr (std::is_same_v<T, Trace::Then>) {
                return prop_equal(*na.guard, *nb.guard) &&
                       trace_equal(*na.body, *nb.body);
            } else {
                return true; // Unit
            }
        },
        a.node);
}

bool outcome_equal(const Outcome& a, const Outcome& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Outcome::Crash>) {
                return na.report == nb.report;
            } else if constexpr (std::is_same_v<T, Outcome::Fail>) {
                return prop_equal(*na.prop, *nb.prop);
            } else if constexpr (std::is_same_v<T, Outcome::Block>) {
                return na.event == nb.event;
            } else {
                return true; // Succ
            }
        },
        a.node);
}

// ---------------------------------------------------------------------------
// Concreteness and wildcard substitution
// ---------------------------------------------------------------------------

namespace {

const IdSpec* event_id_spec(const AppEvent& e) {
    return std::visit(
        [](const auto& ev) -> const IdSpec* {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, ClickEvent> ||
                          std::is_same_v<T, LongClickEvent> ||
                          std::is_same_v<T, SwipeEvent> ||
                          std::is_same_v<T, TypeEvent>) {
                return &ev.target;
            } else {
                return nullptr;
            }
        },
        e);
}

} // namespace

bool is_concrete(const AppEvent& e) {
    const IdSpec* spec = event_id_spec(e);
    return spec == nullptr || !spec->is_wildcard();
}

bool is_concrete(const UiEvent& e) {
    const auto* a = std::get_if<AppEvent>(&e);
    return a == nullptr || is_concrete(*a);
}

AppEvent substitute_wildcard(const AppEvent& e, const UiId& id) {
    if (is_concrete(e))
        throw NoWildcardError("substitute_wildcard: event has no wildcard");
    AppEvent out = e;
    std::visit(
        [&](auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, ClickEvent> ||
                          std::is_same_v<T, LongClickEvent> ||
                          std::is_same_v<T, SwipeEvent> ||
                          std::is_same_v<T, TypeEvent>) {
                if (ev.target.is_wildcard()) ev.target = IdSpec::of(id);
            }
        },
        out);
    return out;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace {

void flatten_into(const TracePtr& t, std::vector<TracePtr>& atoms) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Trace::Unit>) {
                // unit is the identity of sequencing
            } else if constexpr (std::is_same_v<T, Trace::Seq>) {
                flatten_into(n.first, atoms);
                flatten_into(n.second, atoms);
            } else if constexpr (std::is_same_v<T, Trace::Try>) {
                atoms.push_back(Trace::attempt(normalize(n.body)));
            } else if constexpr (std::is_same_v<T, Trace::Then>) {
                atoms.push_back(Trace::guarded(n.guard, normalize(n.body)));
            } else {
                atoms.push_back(std::make_shared<Trace>(Trace::Node{n}));
            }
        },
        t->node);
}

} // namespace

std::vector<TracePtr> flatten(const TracePtr& t) {
    std::vector<TracePtr> atoms;
    flatten_into(t, atoms);
    return atoms;
}

TracePtr normalize(const TracePtr& t) {
    std::vector<TracePtr> atoms = flatten(t);
    if (atoms.empty()) return Trace::unit();
    TracePtr result = atoms.back();
    for (std::size_t i = atoms.size() - 1; i-- > 0;)
        result = Trace::seq(atoms[i], result);
    return result;
}

bool normal_equal(const TracePtr& a, const TracePtr& b) {
    return trace_equal(*normalize(a), *normalize(b));
}

bool trace_is_concrete(const Trace& t) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Trace::Event>) {
                return is_concrete(n.event);
            } else if constexpr (std::is_same_v<T, Trace::Seq>) {
                return trace_is_concrete(*n.first) && trace_is_concrete(*n.second);
            } else if constexpr (std::is_same_v<T, Trace::Try>) {
                return trace_is_concrete(*n.body);
            } else if constexpr (std::is_same_v<T, Trace::Then>) {
                return trace_is_concrete(*n.body);
            } else {
                return true; // Assert, Unit
            }
        },
        t.node);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string render(const UiId& id) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NumId>) {
                return std::to_string(v.value);
            } else if constexpr (std::is_same_v<T, TextId>) {
                return quote_string(v.value);
            } else {
                return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")";
            }
        },
        id);
}

std::string render(const IdSpec& spec) {
    return spec.is_wildcard() ? "*" : render(*spec.id);
}

static std::string render_xy(const XyPair& p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

std::string render(const UiEvent& event) {
    if (const auto* d = std::get_if<DeviceEvent>(&event)) {
        switch (*d) {
        case DeviceEvent::ClickBack: return "ClickBack";
        case DeviceEvent::ClickHome: return "ClickHome";
        case DeviceEvent::ClickMenu: return "ClickMenu";
        case DeviceEvent::Settings: return "Settings";
        case DeviceEvent::Rotate: return "Rotate";
        }
    }
    const auto& a = std::get<AppEvent>(event);
    return std::visit(
        [](const auto& ev) -> std::string {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, ClickEvent>) {
                return "Click(" + render(ev.target) + ")";
            } else if constexpr (std::is_same_v<T, LongClickEvent>) {
                return "LongClick(" + render(ev.target) + ")";
            } else if constexpr (std::is_same_v<T, SwipeEvent>) {
                return "Swipe(" + render(ev.target) + "," + render_xy(ev.delta) + ")";
            } else if constexpr (std::is_same_v<T, TypeEvent>) {
                return "Type(" + render(ev.target) + "," + quote_string(ev.text) + ")";
            } else if constexpr (std::is_same_v<T, PinchEvent>) {
                return "Pinch(" + render_xy(ev.from) + "," + render_xy(ev.to) + ")";
            } else if constexpr (std::is_same_v<T, SleepEvent>) {
                return "Sleep(" + std::to_string(ev.millis) + ")";
            } else {
                return "Skip";
            }
        },
        a);
}

namespace {

// Property precedence, loosest to tightest: => , \/ , /\ , ! , atom.
enum PropLevel { kImpl = 0, kOr, kAnd, kNot, kPropAtom };

std::string render_prop(const Prop& p, int min_level);

std::string wrap_prop(const Prop& p, int natural, int min_level,
                      const std::string& text) {
    (void)p;
    if (natural < min_level) return "(" + text + ")";
    return text;
}

std::string render_prop(const Prop& p, int min_level) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Prop::Pred>) {
                std::string out = n.name;
                if (!n.args.empty()) {
                    out += "(";
                    for (std::size_t i = 0; i < n.args.size(); ++i) {
                        if (i) out += ",";
                        if (const auto* s = std::get_if<std::string>(&n.args[i]))
                            out += quote_string(*s);
                        else
                            out += std::to_string(std::get<std::int64_t>(n.args[i]));
                    }
                    out += ")";
                }
                return out;
            } else if constexpr (std::is_same_v<T, Prop::Not>) {
                return wrap_prop(p, kNot, min_level,
                                 "!" + render_prop(*n.inner, kNot));
            } else if constexpr (std::is_same_v<T, Prop::And>) {
                return wrap_prop(p, kAnd, min_level,
                                 render_prop(*n.lhs, kAnd + 1) + " /\\ " +
                                     render_prop(*n.rhs, kAnd));
            } else if constexpr (std::is_same_v<T, Prop::Or>) {
                return wrap_prop(p, kOr, min_level,
                                 render_prop(*n.lhs, kOr + 1) + " \\/ " +
                                     render_prop(*n.rhs, kOr));
            } else {
                return wrap_prop(p, kImpl, min_level,
                                 render_prop(*n.lhs, kImpl + 1) + " => " +
                                     render_prop(*n.rhs, kImpl));
            }
        },
        p.node);
}

// Trace precedence, loosest to tightest: then, :>>, postfix ?, atom.
enum TraceLevel { kThen = 0, kSeq, kPostfix, kTraceAtom };

std::string render_trace(const Trace& t, int min_level);

std::string brace_trace(int natural, int min_level, const std::string& text) {
    if (natural < min_level) return "{ " + text + " }";
    return text;
}

std::string render_trace(const Trace& t, int min_level) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Trace::Unit>) {
                return "unit";
            } else if constexpr (std::is_same_v<T, Trace::Event>) {
                return render(n.event);
            } else if constexpr (std::is_same_v<T, Trace::Assert>) {
                return brace_trace(kTraceAtom, min_level,
                                   "assert " + render_prop(*n.prop, 0));
            } else if constexpr (std::is_same_v<T, Trace::Seq>) {
                return brace_trace(kSeq, min_level,
                                   render_trace(*n.first, kPostfix) + " :>> " +
                                       render_trace(*n.second, kSeq));
            } else if constexpr (std::is_same_v<T, Trace::Try>) {
                return brace_trace(kPostfix, min_level,
                                   render_trace(*n.body, kPostfix) + " ?");
            } else {
                return brace_trace(kThen, min_level,
                                   render_prop(*n.guard, 0) + " then " +
                                       render_trace(*n.body, kThen));
            }
        },
        t.node);
}

} // namespace

std::string render(const Prop& p) { return render_prop(p, 0); }

std::string render(const Trace& t) { return render_trace(t, 0); }

std::string render(const ExecTrace& exec) {
    std::string out;
    for (const ExecEvent& e : exec) {
        if (e.is_silent()) continue;
        if (!out.empty()) out += " :>> ";
        out += render(*e.event);
    }
    return out;
}

} // namespace chimp
