#include "chimp/device_sim.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chimp/rng.hpp"

namespace chimp {

using nlohmann::json;

const char* widget_flag_name(WidgetFlag f) {
    switch (f) {
    case WidgetFlag::Clickable: return "clickable";
    case WidgetFlag::LongClickable: return "long_clickable";
    case WidgetFlag::Editable: return "editable";
    case WidgetFlag::Scrollable: return "scrollable";
    case WidgetFlag::Displayed: return "displayed";
    }
    return "?";
}

const ScreenSpec* AppModel::screen(const std::string& n) const {
    auto it = screens.find(n);
    return it == screens.end() ? nullptr : &it->second;
}

const WidgetSpec* AppModel::widget_spec(int id) const {
    for (const auto& [name, scr] : screens)
        for (const WidgetSpec& w : scr.widgets)
            if (w.id == id) return &w;
    return nullptr;
}

// ===========================================================================
// Predicate expression parsing
// ===========================================================================

namespace {

[[noreturn]] void schema_fail(const std::string& msg) {
    throw SchemaError("model schema: " + msg);
}
[[noreturn]] void ref_fail(const std::string& msg) {
    throw RefError("model reference: " + msg);
}

// expr := cmp { "&&" cmp }
// cmp  := term ("=="|"="|"!="|"<"|"<=") term
// term := "vars" "." ident | "widget" "(" (int|name) ")" "." field
//       | "screen" | "$" digits | int | "string" | "true" | "false"
class ExprParser {
public:
    ExprParser(const std::string& src, const std::map<std::string, int>& names,
               const std::string& context)
        : src_(src), names_(names), context_(context) {}

    PredExpr parse() {
        PredExpr expr;
        expr.source = src_;
        expr.conjuncts.push_back(parse_cmp());
        skip_ws();
        while (match("&&")) {
            expr.conjuncts.push_back(parse_cmp());
            skip_ws();
        }
        if (pos_ != src_.size()) fail("trailing input in expression");
        return expr;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        schema_fail(context_ + ": " + msg + " in \"" + src_ + "\"");
    }

    void skip_ws() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool match(const std::string& s) {
        skip_ws();
        if (src_.compare(pos_, s.size(), s) == 0) {
            pos_ += s.size();
            return true;
        }
        return false;
    }

    std::string ident() {
        skip_ws();
        std::string out;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
            out += src_[pos_++];
        }
        if (out.empty()) fail("expected identifier");
        return out;
    }

    PredCmp parse_cmp() {
        PredCmp cmp;
        cmp.lhs = parse_term();
        skip_ws();
        if (match("==") || match("=")) {
            cmp.op = PredCmp::Op::Eq;
        } else if (match("!=")) {
            cmp.op = PredCmp::Op::Ne;
        } else if (match("<=")) {
            cmp.op = PredCmp::Op::Le;
        } else if (match("<")) {
            cmp.op = PredCmp::Op::Lt;
        } else {
            fail("expected comparison operator");
        }
        cmp.rhs = parse_term();
        return cmp;
    }

    PredTerm parse_term() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expected term");
        PredTerm t;
        const char c = src_[pos_];
        if (c == '$') {
            ++pos_;
            std::string digits;
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_])))
                digits += src_[pos_++];
            if (digits.empty()) fail("expected argument index after '$'");
            t.kind = PredTerm::Kind::Arg;
            t.arg_index = std::stoi(digits);
            return t;
        }
        if (c == '"') {
            ++pos_;
            std::string s;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
                s += src_[pos_++];
            }
            if (pos_ >= src_.size()) fail("unterminated string");
            ++pos_;
            t.kind = PredTerm::Kind::Literal;
            t.literal = s;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
            std::string num;
            if (c == '-') num += src_[pos_++];
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_])))
                num += src_[pos_++];
            if (num.empty() || num == "-") fail("expected number");
            t.kind = PredTerm::Kind::Literal;
            t.literal = static_cast<long long>(std::stoll(num));
            return t;
        }
        const std::string word = ident();
        if (word == "true" || word == "false") {
            t.kind = PredTerm::Kind::Literal;
            t.literal = (word == "true");
            return t;
        }
        if (word == "screen") {
            t.kind = PredTerm::Kind::Screen;
            return t;
        }
        if (word == "vars") {
            if (!match(".")) fail("expected '.' after 'vars'");
            t.kind = PredTerm::Kind::Var;
            t.var_name = ident();
            return t;
        }
        if (word == "widget") {
            if (!match("(")) fail("expected '(' after 'widget'");
            skip_ws();
            int id = 0;
            if (pos_ < src_.size() &&
                (std::isdigit(static_cast<unsigned char>(src_[pos_])))) {
                std::string num;
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    num += src_[pos_++];
                id = std::stoi(num);
            } else {
                const std::string name = ident();
                auto it = names_.find(name);
                if (it == names_.end())
                    ref_fail(context_ + ": unknown widget name '" + name +
                             "' in \"" + src_ + "\"");
                id = it->second;
            }
            if (!match(")")) fail("expected ')'");
            if (!match(".")) fail("expected '.' after widget(...)");
            const std::string field = ident();
            if (field == "text") {
                t.kind = PredTerm::Kind::WidgetText;
                t.widget_id = id;
                return t;
            }
            t.kind = PredTerm::Kind::WidgetFlagRef;
            t.widget_id = id;
            if (field == "clickable") t.flag = WidgetFlag::Clickable;
            else if (field == "long_clickable") t.flag = WidgetFlag::LongClickable;
            else if (field == "editable") t.flag = WidgetFlag::Editable;
            else if (field == "scrollable") t.flag = WidgetFlag::Scrollable;
            else if (field == "displayed") t.flag = WidgetFlag::Displayed;
            else fail("unknown widget field '" + field + "'");
            return t;
        }
        fail("unknown term '" + word + "'");
    }

    const std::string& src_;
    const std::map<std::string, int>& names_;
    const std::string context_;
    std::size_t pos_ = 0;
};

int expr_arity(const PredExpr& e) {
    int max_index = -1;
    for (const PredCmp& c : e.conjuncts)
        for (const PredTerm* t : {&c.lhs, &c.rhs})
            if (t->kind == PredTerm::Kind::Arg)
                max_index = std::max(max_index, t->arg_index);
    return max_index + 1;
}

bool expr_uses_args(const PredExpr& e) { return expr_arity(e) > 0; }

// ===========================================================================
// Transition-overlap analysis
// ===========================================================================

struct OrientedAtom {
    PredTerm term;
    PredCmp::Op op;
    SimValue lit;
};

std::optional<OrientedAtom> orient(const PredCmp& c) {
    const bool l = c.lhs.kind == PredTerm::Kind::Literal;
    const bool r = c.rhs.kind == PredTerm::Kind::Literal;
    if (r && !l) return OrientedAtom{c.lhs, c.op, c.rhs.literal};
    if (l && !r) {
        // literal on the left flips < and <= into forms we do not track
        if (c.op == PredCmp::Op::Eq || c.op == PredCmp::Op::Ne)
            return OrientedAtom{c.rhs, c.op, c.lhs.literal};
    }
    return std::nullopt;
}

bool value_lt(const SimValue& a, const SimValue& b) {
    if (const auto* ia = std::get_if<long long>(&a))
        return *ia < std::get<long long>(b);
    if (const auto* sa = std::get_if<std::string>(&a))
        return *sa < std::get<std::string>(b);
    return std::get<bool>(a) < std::get<bool>(b);
}

bool atoms_contradict(const OrientedAtom& a, const OrientedAtom& b) {
    if (!(a.term == b.term)) return false;
    using Op = PredCmp::Op;
    if (a.lit.index() != b.lit.index()) {
        // a term holds one dynamically-typed value; it cannot equal two
        // literals of different types
        return a.op == Op::Eq && b.op == Op::Eq;
    }
    const SimValue& va = a.lit;
    const SimValue& vb = b.lit;
    auto eq = [&](const SimValue& x, const SimValue& y) {
        return !value_lt(x, y) && !value_lt(y, x);
    };
    if (a.op == Op::Eq && b.op == Op::Eq) return !eq(va, vb);
    if (a.op == Op::Eq && b.op == Op::Ne) return eq(va, vb);
    if (a.op == Op::Ne && b.op == Op::Eq) return eq(va, vb);
    if (a.op == Op::Eq && b.op == Op::Lt) return !value_lt(va, vb);
    if (a.op == Op::Lt && b.op == Op::Eq) return !value_lt(vb, va);
    if (a.op == Op::Eq && b.op == Op::Le) return value_lt(vb, va);
    if (a.op == Op::Le && b.op == Op::Eq) return value_lt(va, vb);
    return false;
}

bool provably_disjoint(const PredExpr& a, const PredExpr& b) {
    for (const PredCmp& ca : a.conjuncts) {
        const auto oa = orient(ca);
        if (!oa) continue;
        for (const PredCmp& cb : b.conjuncts) {
            const auto ob = orient(cb);
            if (ob && atoms_contradict(*oa, *ob)) return true;
        }
    }
    return false;
}

// ===========================================================================
// JSON loading
// ===========================================================================

const json& require(const json& obj, const char* key, const std::string& ctx) {
    if (!obj.is_object()) schema_fail(ctx + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(ctx + " missing field '" + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_string()) schema_fail(ctx + " field '" + key + "' must be a string");
    return v.get<std::string>();
}

long long require_int(const json& obj, const char* key, const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_number_integer())
        schema_fail(ctx + " field '" + key + "' must be an integer");
    return v.get<long long>();
}

bool opt_bool(const json& obj, const char* key, bool fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) schema_fail(std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
}

SimValue json_to_value(const json& v, const std::string& ctx) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>();
    schema_fail(ctx + ": values must be integers, strings or booleans");
}

int widget_ref(const json& v, const std::map<std::string, int>& names,
               const std::string& ctx) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
        auto it = names.find(v.get<std::string>());
        if (it == names.end())
            ref_fail(ctx + ": unknown widget name '" + v.get<std::string>() + "'");
        return it->second;
    }
    schema_fail(ctx + ": widget reference must be an id or a name");
}

WidgetFlag parse_flag_name(const std::string& s, const std::string& ctx) {
    if (s == "clickable") return WidgetFlag::Clickable;
    if (s == "long_clickable") return WidgetFlag::LongClickable;
    if (s == "editable") return WidgetFlag::Editable;
    if (s == "scrollable") return WidgetFlag::Scrollable;
    if (s == "displayed") return WidgetFlag::Displayed;
    schema_fail(ctx + ": unknown flag '" + s + "'");
}

Effect parse_effect(const json& e, const std::map<std::string, int>& names,
                    const std::string& ctx) {
    const std::string op = require_string(e, "op", ctx);
    if (op == "goto") return GotoScreen{require_string(e, "screen", ctx)};
    if (op == "set_var") {
        SetVar s;
        s.name = require_string(e, "name", ctx);
        if (e.contains("add")) {
            s.is_delta = true;
            if (!e.at("add").is_number_integer())
                schema_fail(ctx + ": 'add' must be an integer");
            s.value = e.at("add").get<long long>();
        } else {
            s.value = json_to_value(require(e, "value", ctx), ctx);
        }
        return s;
    }
    if (op == "set_widget_text")
        return SetWidgetText{widget_ref(require(e, "id", ctx), names, ctx),
                             require_string(e, "text", ctx)};
    if (op == "set_flag")
        return SetFlag{widget_ref(require(e, "id", ctx), names, ctx),
                       parse_flag_name(require_string(e, "flag", ctx), ctx),
                       require(e, "value", ctx).get<bool>()};
    if (op == "crash") {
        CrashEffect c;
        c.message = require_string(e, "message", ctx);
        const json& frames = require(e, "frames", ctx);
        if (!frames.is_array() || frames.empty())
            schema_fail(ctx + ": crash frames must be a non-empty array");
        for (const json& f : frames) c.frames.push_back(f.get<std::string>());
        return c;
    }
    if (op == "schedule")
        return ScheduleTask{static_cast<int>(require_int(e, "task", ctx))};
    if (op == "append_typed")
        return AppendTyped{widget_ref(require(e, "id", ctx), names, ctx)};
    schema_fail(ctx + ": unknown effect op '" + op + "'");
}

std::vector<Effect> parse_effect_list(const json& list,
                                      const std::map<std::string, int>& names,
                                      const std::string& ctx) {
    if (!list.is_array()) schema_fail(ctx + ": effects must be an array");
    std::vector<Effect> out;
    for (const json& e : list) out.push_back(parse_effect(e, names, ctx));
    return out;
}

// Validates every reference inside an effect list against the loaded model.
void validate_effects(const std::vector<Effect>& effects, const AppModel& m,
                      const std::string& ctx) {
    for (const Effect& e : effects) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, GotoScreen>) {
                    if (!m.screen(n.screen))
                        ref_fail(ctx + ": unknown screen '" + n.screen + "'");
                } else if constexpr (std::is_same_v<T, SetVar>) {
                    auto it = m.variables.find(n.name);
                    if (it == m.variables.end())
                        ref_fail(ctx + ": unknown variable '" + n.name + "'");
                    if (n.is_delta &&
                        !std::holds_alternative<long long>(it->second))
                        schema_fail(ctx + ": 'add' on non-integer variable '" +
                                    n.name + "'");
                } else if constexpr (std::is_same_v<T, SetWidgetText>) {
                    if (!m.widget_spec(n.id))
                        ref_fail(ctx + ": unknown widget id " +
                                 std::to_string(n.id));
                    // template placeholders must name declared variables
                    const std::string& t = n.text_template;
                    for (std::size_t i = 0; i < t.size(); ++i) {
                        if (t[i] != '{') continue;
                        const auto close = t.find('}', i);
                        if (close == std::string::npos)
                            schema_fail(ctx + ": unterminated '{' in template");
                        const std::string var = t.substr(i + 1, close - i - 1);
                        if (!m.variables.count(var))
                            ref_fail(ctx + ": template references unknown variable '" +
                                     var + "'");
                        i = close;
                    }
                } else if constexpr (std::is_same_v<T, SetFlag> ||
                                     std::is_same_v<T, AppendTyped>) {
                    if (!m.widget_spec(n.id))
                        ref_fail(ctx + ": unknown widget id " +
                                 std::to_string(n.id));
                } else if constexpr (std::is_same_v<T, ScheduleTask>) {
                    if (n.task_index < 0 ||
                        static_cast<std::size_t>(n.task_index) >=
                            m.async_tasks.size())
                        ref_fail(ctx + ": schedule references unknown task " +
                                 std::to_string(n.task_index));
                }
            },
            e);
    }
}

void validate_expr_refs(const PredExpr& e, const AppModel& m,
                        const std::string& ctx) {
    for (const PredCmp& c : e.conjuncts) {
        for (const PredTerm* t : {&c.lhs, &c.rhs}) {
            if (t->kind == PredTerm::Kind::Var && !m.variables.count(t->var_name))
                ref_fail(ctx + ": unknown variable '" + t->var_name + "'");
            if ((t->kind == PredTerm::Kind::WidgetText ||
                 t->kind == PredTerm::Kind::WidgetFlagRef) &&
                !m.widget_spec(t->widget_id))
                ref_fail(ctx + ": unknown widget id " +
                         std::to_string(t->widget_id));
        }
    }
}

} // namespace

AppModel load_model_text(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        schema_fail(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) schema_fail("document must be a JSON object");

    AppModel m;
    m.name = doc.value("name", "");
    m.initial_screen = require_string(doc, "initial_screen", "model");

    if (doc.contains("idle_work")) {
        m.idle_work = require_int(doc, "idle_work", "model");
        if (m.idle_work < 1) schema_fail("idle_work must be >= 1");
    }

    if (doc.contains("variables")) {
        const json& vars = doc.at("variables");
        if (!vars.is_object()) schema_fail("variables must be an object");
        for (auto it = vars.begin(); it != vars.end(); ++it)
            m.variables[it.key()] = json_to_value(it.value(), "variable " + it.key());
    }

    // screens and widgets
    const json& screens = require(doc, "screens", "model");
    if (!screens.is_object() || screens.empty())
        schema_fail("screens must be a non-empty object");
    std::set<int> widget_ids;
    for (auto it = screens.begin(); it != screens.end(); ++it) {
        ScreenSpec scr;
        scr.name = it.key();
        const json& body = it.value();
        const std::string ctx = "screen '" + scr.name + "'";
        const json& widgets = require(body, "widgets", ctx);
        if (!widgets.is_array()) schema_fail(ctx + ": widgets must be an array");
        for (const json& w : widgets) {
            WidgetSpec spec;
            spec.id = static_cast<int>(require_int(w, "id", ctx));
            if (!widget_ids.insert(spec.id).second)
                schema_fail(ctx + ": duplicate widget id " +
                            std::to_string(spec.id));
            spec.text = w.value("text", "");
            if (w.contains("xy")) {
                const json& xy = w.at("xy");
                if (!xy.is_array() || xy.size() != 2)
                    schema_fail(ctx + ": xy must be [x,y]");
                spec.xy = XyPair{xy[0].get<int>(), xy[1].get<int>()};
                if (spec.xy.x < 0 || spec.xy.y < 0)
                    schema_fail(ctx + ": widget position must be non-negative");
            }
            if (w.contains("size")) {
                const json& size = w.at("size");
                if (!size.is_array() || size.size() != 2)
                    schema_fail(ctx + ": size must be [w,h]");
                spec.width = size[0].get<int>();
                spec.height = size[1].get<int>();
            }
            if (spec.width <= 0 || spec.height <= 0)
                schema_fail(ctx + ": widget bounds must be positive");
            spec.clickable = opt_bool(w, "clickable", false);
            spec.long_clickable = opt_bool(w, "long_clickable", false);
            spec.editable = opt_bool(w, "editable", false);
            spec.scrollable = opt_bool(w, "scrollable", false);
            spec.displayed = opt_bool(w, "displayed", true);
            spec.is_dialog = opt_bool(w, "is_dialog", false);
            scr.widgets.push_back(std::move(spec));
        }
        std::sort(scr.widgets.begin(), scr.widgets.end(),
                  [](const WidgetSpec& a, const WidgetSpec& b) {
                      return a.id < b.id;
                  });
        if (body.contains("back") && !body.at("back").is_null())
            scr.back = body.at("back").get<std::string>();
        m.screens.emplace(scr.name, std::move(scr));
    }

    if (!m.screen(m.initial_screen))
        ref_fail("initial_screen '" + m.initial_screen + "' is not a screen");
    for (const auto& [name, scr] : m.screens)
        if (scr.back && !m.screen(*scr.back))
            ref_fail("screen '" + name + "' back target '" + *scr.back +
                     "' is not a screen");

    // symbolic names
    if (doc.contains("names")) {
        const json& names = doc.at("names");
        if (!names.is_object()) schema_fail("names must be an object");
        for (auto it = names.begin(); it != names.end(); ++it) {
            if (!it.value().is_number_integer())
                schema_fail("names values must be widget ids");
            const int id = it.value().get<int>();
            if (!widget_ids.count(id))
                ref_fail("name '" + it.key() + "' references unknown widget " +
                         std::to_string(id));
            m.names[it.key()] = id;
        }
    }

    // async tasks (parsed before effects that may schedule them)
    if (doc.contains("async_tasks")) {
        const json& tasks = doc.at("async_tasks");
        if (!tasks.is_array()) schema_fail("async_tasks must be an array");
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const std::string ctx = "async task " + std::to_string(i);
            AsyncTask t;
            t.delay_ms = require_int(tasks[i], "delay_ms", ctx);
            if (t.delay_ms < 0) schema_fail(ctx + ": delay must be >= 0");
            t.effects = parse_effect_list(require(tasks[i], "effects", ctx),
                                          m.names, ctx);
            m.async_tasks.push_back(std::move(t));
        }
    }

    // transitions
    if (doc.contains("transitions")) {
        const json& rules = doc.at("transitions");
        if (!rules.is_array()) schema_fail("transitions must be an array");
        for (std::size_t i = 0; i < rules.size(); ++i) {
            const std::string ctx = "transition " + std::to_string(i);
            const json& r = rules[i];
            TransitionRule rule;
            rule.screen = require_string(r, "screen", ctx);
            if (!m.screen(rule.screen))
                ref_fail(ctx + ": unknown screen '" + rule.screen + "'");
            const json& on = require(r, "on", ctx);
            const std::string kind = require_string(on, "kind", ctx);
            if (kind == "click") rule.on.kind = EventPattern::Kind::Click;
            else if (kind == "long_click") rule.on.kind = EventPattern::Kind::LongClick;
            else if (kind == "type") rule.on.kind = EventPattern::Kind::Type;
            else if (kind == "swipe") rule.on.kind = EventPattern::Kind::Swipe;
            else schema_fail(ctx + ": unknown event kind '" + kind + "'");
            if (on.contains("target") && !on.at("target").is_null()) {
                rule.on.target = widget_ref(on.at("target"), m.names, ctx);
                if (!widget_ids.count(*rule.on.target))
                    ref_fail(ctx + ": unknown target widget " +
                             std::to_string(*rule.on.target));
            }
            if (r.contains("when") && !r.at("when").is_null()) {
                rule.when = ExprParser(r.at("when").get<std::string>(), m.names,
                                       ctx).parse();
                if (expr_uses_args(*rule.when))
                    schema_fail(ctx + ": transition guards cannot use $ arguments");
            }
            rule.effects =
                parse_effect_list(require(r, "effects", ctx), m.names, ctx);
            m.transitions.push_back(std::move(rule));
        }
    }

    // lifecycle
    if (doc.contains("lifecycle")) {
        const json& lc = doc.at("lifecycle");
        if (!lc.is_object()) schema_fail("lifecycle must be an object");
        auto read_ids = [&](const char* key, std::set<int>& out) {
            if (!lc.contains(key)) return;
            for (const json& v : lc.at(key)) {
                const int id = widget_ref(v, m.names, std::string("lifecycle ") + key);
                if (!widget_ids.count(id))
                    ref_fail(std::string("lifecycle ") + key +
                             ": unknown widget " + std::to_string(id));
                out.insert(id);
            }
        };
        read_ids("rotate_volatile", m.lifecycle.rotate_volatile);
        read_ids("suspend_volatile", m.lifecycle.suspend_volatile);
        auto read_effects =
            [&](const char* key, std::map<std::string, std::vector<Effect>>& out) {
                if (!lc.contains(key)) return;
                const json& table = lc.at(key);
                if (!table.is_object())
                    schema_fail(std::string("lifecycle ") + key +
                                " must map screens to effect lists");
                for (auto it = table.begin(); it != table.end(); ++it) {
                    if (it.key() != "*" && !m.screen(it.key()))
                        ref_fail(std::string("lifecycle ") + key +
                                 ": unknown screen '" + it.key() + "'");
                    out[it.key()] = parse_effect_list(
                        it.value(), m.names, std::string("lifecycle ") + key);
                }
            };
        read_effects("on_rotate", m.lifecycle.on_rotate);
        read_effects("on_resume", m.lifecycle.on_resume);
    }

    // predicates
    if (doc.contains("predicates")) {
        const json& preds = doc.at("predicates");
        if (!preds.is_object()) schema_fail("predicates must be an object");
        for (auto it = preds.begin(); it != preds.end(); ++it) {
            if (!it.value().is_string())
                schema_fail("predicate '" + it.key() + "' must be an expression string");
            PredicateDef def;
            def.expr = ExprParser(it.value().get<std::string>(), m.names,
                                  "predicate '" + it.key() + "'").parse();
            def.arity = expr_arity(def.expr);
            m.predicates.emplace(it.key(), std::move(def));
        }
    }

    // cross-reference validation
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        const std::string ctx = "transition " + std::to_string(i);
        validate_effects(m.transitions[i].effects, m, ctx);
        if (m.transitions[i].when) validate_expr_refs(*m.transitions[i].when, m, ctx);
    }
    for (std::size_t i = 0; i < m.async_tasks.size(); ++i)
        validate_effects(m.async_tasks[i].effects, m,
                         "async task " + std::to_string(i));
    for (const auto& [scr, effects] : m.lifecycle.on_rotate)
        validate_effects(effects, m, "lifecycle on_rotate");
    for (const auto& [scr, effects] : m.lifecycle.on_resume)
        validate_effects(effects, m, "lifecycle on_resume");
    for (const auto& [name, def] : m.predicates)
        validate_expr_refs(def.expr, m, "predicate '" + name + "'");

    // overlapping transitions are a load error unless their guards are
    // provably mutually exclusive
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        for (std::size_t j = i + 1; j < m.transitions.size(); ++j) {
            const TransitionRule& a = m.transitions[i];
            const TransitionRule& b = m.transitions[j];
            if (a.screen != b.screen || a.on.kind != b.on.kind) continue;
            const bool overlap =
                !a.on.target || !b.on.target || *a.on.target == *b.on.target;
            if (!overlap) continue;
            if (a.when && b.when && provably_disjoint(*a.when, *b.when)) continue;
            throw AmbiguityError(
                "transitions " + std::to_string(i) + " and " + std::to_string(j) +
                " on screen '" + a.screen + "' overlap; guards do not exclude each other");
        }
    }

    return m;
}

AppModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_model_text(buf.str());
}

// ===========================================================================
// DeviceSim
// ===========================================================================

DeviceSim::DeviceSim(std::shared_ptr<const AppModel> model, std::uint64_t seed,
                     long long settle_budget)
    : model_(std::move(model)), init_seed_(seed), settle_budget_(settle_budget) {
    reset();
}

void DeviceSim::reset() {
    screen_ = model_->initial_screen;
    widgets_.clear();
    for (const auto& [name, scr] : model_->screens)
        for (const WidgetSpec& w : scr.widgets) widgets_[w.id] = from_spec(w);
    vars_ = model_->variables;
    clock_ms_ = 0;
    landscape_ = false;
    foreground_ = true;
    pending_.clear();
    ready_.clear();
    crashed_.reset();
    rng_state_ = Rng::mix(init_seed_);
    applied_events_ = 0;
    sched_seq_ = 0;
}

DeviceSim::WidgetState DeviceSim::from_spec(const WidgetSpec& spec) {
    WidgetState s;
    s.text = spec.text;
    s.clickable = spec.clickable;
    s.long_clickable = spec.long_clickable;
    s.editable = spec.editable;
    s.scrollable = spec.scrollable;
    s.displayed = spec.displayed;
    return s;
}

const ScreenSpec& DeviceSim::cur_screen_spec() const {
    return *model_->screen(screen_);
}

bool DeviceSim::on_current_screen(int id) const {
    for (const WidgetSpec& w : cur_screen_spec().widgets)
        if (w.id == id) return true;
    return false;
}

DeviceSim::WidgetState* DeviceSim::state_of(int id) {
    auto it = widgets_.find(id);
    return it == widgets_.end() ? nullptr : &it->second;
}

const DeviceSim::WidgetState* DeviceSim::state_of(int id) const {
    auto it = widgets_.find(id);
    return it == widgets_.end() ? nullptr : &it->second;
}

bool DeviceSim::flag_value(const WidgetState& w, WidgetFlag f) const {
    switch (f) {
    case WidgetFlag::Clickable: return w.clickable;
    case WidgetFlag::LongClickable: return w.long_clickable;
    case WidgetFlag::Editable: return w.editable;
    case WidgetFlag::Scrollable: return w.scrollable;
    case WidgetFlag::Displayed: return w.displayed;
    }
    return false;
}

std::optional<DeviceSim::Resolved> DeviceSim::resolve_target(
    const UiId& id, WidgetFlag needed) const {
    if (const auto* num = std::get_if<NumId>(&id)) {
        if (!on_current_screen(num->value)) return std::nullopt;
        const WidgetState* w = state_of(num->value);
        if (!w || !w->displayed || !flag_value(*w, needed)) return std::nullopt;
        return Resolved{num->value, false};
    }
    if (const auto* text = std::get_if<TextId>(&id)) {
        // exact, case-sensitive match on displayed text; ambiguity disables
        int found = 0, match = 0;
        for (const WidgetSpec& spec : cur_screen_spec().widgets) {
            const WidgetState* w = state_of(spec.id);
            if (w && w->displayed && w->text == text->value) {
                ++found;
                match = spec.id;
            }
        }
        if (found != 1) return std::nullopt;
        const WidgetState* w = state_of(match);
        if (!flag_value(*w, needed)) return std::nullopt;
        return Resolved{match, false};
    }
    // coordinate tap: hit-test capable displayed widgets, dialogs on top,
    // later widgets above earlier ones; a miss lands on dead space
    const XyPair& p = std::get<XyPair>(id);
    std::optional<Resolved> best;
    bool best_dialog = false;
    for (const WidgetSpec& spec : cur_screen_spec().widgets) {
        const WidgetState* w = state_of(spec.id);
        if (!w || !w->displayed || !flag_value(*w, needed)) continue;
        if (p.x < spec.xy.x || p.x >= spec.xy.x + spec.width) continue;
        if (p.y < spec.xy.y || p.y >= spec.xy.y + spec.height) continue;
        if (!best || (spec.is_dialog && !best_dialog) ||
            (spec.is_dialog == best_dialog && spec.id > best->id)) {
            best = Resolved{spec.id, false};
            best_dialog = spec.is_dialog;
        }
    }
    if (best) return best;
    return Resolved{0, true};
}

void DeviceSim::enqueue(const Effect& e, const std::optional<std::string>& typed) {
    ready_.push_back(QueuedEffect{e, typed});
}

void DeviceSim::enqueue_list(const std::vector<Effect>& es,
                             const std::optional<std::string>& typed) {
    for (const Effect& e : es) enqueue(e, typed);
}

void DeviceSim::enqueue_lifecycle(
    const std::map<std::string, std::vector<Effect>>& table) {
    auto it = table.find(screen_);
    if (it != table.end()) enqueue_list(it->second);
    it = table.find("*");
    if (it != table.end()) enqueue_list(it->second);
}

void DeviceSim::apply_widget_event(EventPattern::Kind kind, int widget_id,
                                   const std::optional<std::string>& typed) {
    if (kind == EventPattern::Kind::Type && typed)
        enqueue(AppendTyped{widget_id}, typed);
    for (const TransitionRule& rule : model_->transitions) {
        if (rule.screen != screen_ || rule.on.kind != kind) continue;
        if (rule.on.target && *rule.on.target != widget_id) continue;
        if (rule.when && !eval_expr(*rule.when, {})) continue;
        enqueue_list(rule.effects, typed);
        break; // load-time analysis guarantees at most one live match
    }
}

void DeviceSim::reset_volatile(const std::set<int>& volatile_ids) {
    for (const WidgetSpec& spec : cur_screen_spec().widgets)
        if (volatile_ids.count(spec.id)) widgets_[spec.id] = from_spec(spec);
}

void DeviceSim::move_due_tasks() {
    std::size_t moved = 0;
    while (moved < pending_.size() && pending_[moved].due_ms <= clock_ms_)
        ++moved;
    for (std::size_t i = 0; i < moved; ++i)
        for (const Effect& e : pending_[i].effects) enqueue(e, std::nullopt);
    pending_.erase(pending_.begin(), pending_.begin() + moved);
}

bool DeviceSim::try_apply(const UiEvent& event) {
    if (crashed_) return false;

    if (const auto* d = std::get_if<DeviceEvent>(&event)) {
        switch (*d) {
        case DeviceEvent::Rotate:
            landscape_ = !landscape_;
            reset_volatile(model_->lifecycle.rotate_volatile);
            enqueue_lifecycle(model_->lifecycle.on_rotate);
            ++applied_events_;
            return true;
        case DeviceEvent::ClickHome:
        case DeviceEvent::ClickMenu:
        case DeviceEvent::Settings:
            foreground_ = false;
            reset_volatile(model_->lifecycle.suspend_volatile);
            ++applied_events_;
            return true;
        case DeviceEvent::ClickBack: {
            bool dismissed = false;
            for (const WidgetSpec& spec : cur_screen_spec().widgets) {
                WidgetState* w = state_of(spec.id);
                if (spec.is_dialog && w && w->displayed) {
                    w->displayed = false;
                    dismissed = true;
                }
            }
            if (dismissed) {
                ++applied_events_;
                return true;
            }
            if (cur_screen_spec().back) {
                enqueue(GotoScreen{*cur_screen_spec().back}, std::nullopt);
                ++applied_events_;
                return true;
            }
            return false;
        }
        }
    }

    if (!foreground_) return false;
    const AppEvent& app = std::get<AppEvent>(event);
    return std::visit(
        [&](const auto& ev) -> bool {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, SkipEvent>) {
                ++applied_events_;
                return true;
            } else if constexpr (std::is_same_v<T, SleepEvent>) {
                clock_ms_ += std::max(0, ev.millis);
                move_due_tasks();
                ++applied_events_;
                return true;
            } else if constexpr (std::is_same_v<T, PinchEvent>) {
                ++applied_events_; // gesture with no widget semantics
                return true;
            } else {
                WidgetFlag needed = WidgetFlag::Clickable;
                EventPattern::Kind kind = EventPattern::Kind::Click;
                std::optional<std::string> typed;
                if constexpr (std::is_same_v<T, LongClickEvent>) {
                    needed = WidgetFlag::LongClickable;
                    kind = EventPattern::Kind::LongClick;
                } else if constexpr (std::is_same_v<T, TypeEvent>) {
                    needed = WidgetFlag::Editable;
                    kind = EventPattern::Kind::Type;
                    typed = ev.text;
                } else if constexpr (std::is_same_v<T, SwipeEvent>) {
                    needed = WidgetFlag::Scrollable;
                    kind = EventPattern::Kind::Swipe;
                }
                const auto target = resolve_target(*ev.target.id, needed);
                if (!target) return false;
                ++applied_events_;
                if (!target->dead_space)
                    apply_widget_event(kind, target->id, typed);
                return true;
            }
        },
        app);
}

std::optional<CrashReport> DeviceSim::settle() {
    if (crashed_) return crashed_; // crash absorption
    long long consumed = 0;
    for (;;) {
        move_due_tasks();
        if (ready_.empty()) return std::nullopt;
        const QueuedEffect qe = std::move(ready_.front());
        ready_.pop_front();
        consumed += model_->idle_work;
        if (consumed > settle_budget_)
            throw SettleBudgetError("settle exceeded its mutate budget");
        if (auto crash = execute_effect(qe)) {
            crashed_ = std::move(crash);
            ready_.clear();
            return crashed_;
        }
    }
}

CrashReport DeviceSim::make_crash(std::string message,
                                  std::vector<std::string> frames) const {
    CrashReport r;
    r.message = std::move(message);
    r.screen = screen_;
    r.frames = std::move(frames);
    r.event_index = applied_events_;
    return r;
}

std::string DeviceSim::expand_template(const std::string& tmpl) const {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] != '{') {
            out += tmpl[i];
            continue;
        }
        const auto close = tmpl.find('}', i);
        const std::string name = tmpl.substr(i + 1, close - i - 1);
        auto it = vars_.find(name);
        if (it != vars_.end()) {
            if (const auto* n = std::get_if<long long>(&it->second))
                out += std::to_string(*n);
            else if (const auto* s = std::get_if<std::string>(&it->second))
                out += *s;
            else
                out += std::get<bool>(it->second) ? "true" : "false";
        }
        i = close;
    }
    return out;
}

std::optional<CrashReport> DeviceSim::execute_effect(const QueuedEffect& qe) {
    return std::visit(
        [&](const auto& e) -> std::optional<CrashReport> {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, GotoScreen>) {
                screen_ = e.screen;
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, SetVar>) {
                if (e.is_delta) {
                    auto& v = vars_[e.name];
                    v = std::get<long long>(v) + std::get<long long>(e.value);
                } else {
                    vars_[e.name] = e.value;
                }
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, SetWidgetText>) {
                if (!on_current_screen(e.id))
                    return make_crash(
                        "NullPointerException: widget " + std::to_string(e.id) +
                            " is not attached to screen '" + screen_ + "'",
                        {"Widget.require_attached", "Widget.set_text",
                         "EffectQueue.drain"});
                state_of(e.id)->text = expand_template(e.text_template);
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, SetFlag>) {
                if (!on_current_screen(e.id))
                    return make_crash(
                        "NullPointerException: widget " + std::to_string(e.id) +
                            " is not attached to screen '" + screen_ + "'",
                        {"Widget.require_attached", "Widget.set_flag",
                         "EffectQueue.drain"});
                WidgetState* w = state_of(e.id);
                switch (e.flag) {
                case WidgetFlag::Clickable: w->clickable = e.value; break;
                case WidgetFlag::LongClickable: w->long_clickable = e.value; break;
                case WidgetFlag::Editable: w->editable = e.value; break;
                case WidgetFlag::Scrollable: w->scrollable = e.value; break;
                case WidgetFlag::Displayed: w->displayed = e.value; break;
                }
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, CrashEffect>) {
                return make_crash(e.message, e.frames);
            } else if constexpr (std::is_same_v<T, ScheduleTask>) {
                const AsyncTask& task =
                    model_->async_tasks[static_cast<std::size_t>(e.task_index)];
                PendingTask p;
                p.due_ms = clock_ms_ + task.delay_ms;
                p.seq = sched_seq_++;
                p.effects = task.effects;
                const auto at = std::upper_bound(
                    pending_.begin(), pending_.end(), p,
                    [](const PendingTask& a, const PendingTask& b) {
                        return std::tie(a.due_ms, a.seq) < std::tie(b.due_ms, b.seq);
                    });
                pending_.insert(at, std::move(p));
                return std::nullopt;
            } else { // AppendTyped
                if (!on_current_screen(e.id))
                    return make_crash(
                        "NullPointerException: widget " + std::to_string(e.id) +
                            " is not attached to screen '" + screen_ + "'",
                        {"Widget.require_attached", "Widget.append_text",
                         "EffectQueue.drain"});
                if (qe.typed) state_of(e.id)->text += *qe.typed;
                return std::nullopt;
            }
        },
        qe.effect);
}

bool DeviceSim::ensure_foreground() {
    if (foreground_) return false;
    foreground_ = true;
    enqueue_lifecycle(model_->lifecycle.on_resume);
    return true;
}

std::vector<UiId> DeviceSim::enumerate_candidates(const AppEvent& e) {
    WidgetFlag needed = WidgetFlag::Clickable;
    if (std::holds_alternative<LongClickEvent>(e))
        needed = WidgetFlag::LongClickable;
    else if (std::holds_alternative<TypeEvent>(e))
        needed = WidgetFlag::Editable;
    else if (std::holds_alternative<SwipeEvent>(e))
        needed = WidgetFlag::Scrollable;

    std::vector<UiId> out;
    if (crashed_ || !foreground_) return out;
    for (const WidgetSpec& spec : cur_screen_spec().widgets) {
        const WidgetState* w = state_of(spec.id);
        if (w && w->displayed && flag_value(*w, needed))
            out.push_back(num_id(spec.id)); // spec list is sorted by id
    }
    return out;
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

SimValue DeviceSim::eval_term(const PredTerm& t,
                              const std::vector<PredArg>& args) const {
    switch (t.kind) {
    case PredTerm::Kind::Literal: return t.literal;
    case PredTerm::Kind::Var: return vars_.at(t.var_name);
    case PredTerm::Kind::Screen: return screen_;
    case PredTerm::Kind::Arg: {
        const PredArg& a = args.at(static_cast<std::size_t>(t.arg_index));
        if (const auto* n = std::get_if<std::int64_t>(&a))
            return static_cast<long long>(*n);
        return std::get<std::string>(a);
    }
    case PredTerm::Kind::WidgetText:
    case PredTerm::Kind::WidgetFlagRef:
        break; // handled in eval_cmp, which needs the off-screen case
    }
    return false;
}

bool DeviceSim::eval_cmp(const PredCmp& c,
                         const std::vector<PredArg>& args) const {
    // widget references off the current screen make the comparison false
    auto resolve = [&](const PredTerm& t) -> std::optional<SimValue> {
        if (t.kind == PredTerm::Kind::WidgetText) {
            if (!on_current_screen(t.widget_id)) return std::nullopt;
            return state_of(t.widget_id)->text;
        }
        if (t.kind == PredTerm::Kind::WidgetFlagRef) {
            if (!on_current_screen(t.widget_id)) return std::nullopt;
            return flag_value(*state_of(t.widget_id), t.flag);
        }
        return eval_term(t, args);
    };
    const auto lhs = resolve(c.lhs);
    const auto rhs = resolve(c.rhs);
    if (!lhs || !rhs) return false;
    if (lhs->index() != rhs->index())
        return c.op == PredCmp::Op::Ne; // values of different types differ
    const bool lt = value_lt(*lhs, *rhs);
    const bool gt = value_lt(*rhs, *lhs);
    switch (c.op) {
    case PredCmp::Op::Eq: return !lt && !gt;
    case PredCmp::Op::Ne: return lt || gt;
    case PredCmp::Op::Lt: return lt;
    case PredCmp::Op::Le: return !gt;
    }
    return false;
}

bool DeviceSim::eval_expr(const PredExpr& e,
                          const std::vector<PredArg>& args) const {
    for (const PredCmp& c : e.conjuncts)
        if (!eval_cmp(c, args)) return false;
    return true;
}

bool DeviceSim::eval_builtin(const std::string& name,
                             const std::vector<PredArg>& args,
                             bool& handled) const {
    handled = true;

    // resolves the id|text argument of the view-matcher builtins
    auto each_matching = [&](const PredArg& arg, auto&& pred) -> bool {
        if (const auto* id = std::get_if<std::int64_t>(&arg)) {
            if (!on_current_screen(static_cast<int>(*id))) return false;
            const WidgetState* w = state_of(static_cast<int>(*id));
            return w && pred(*w);
        }
        const auto& text = std::get<std::string>(arg);
        for (const WidgetSpec& spec : cur_screen_spec().widgets) {
            const WidgetState* w = state_of(spec.id);
            if (w && w->displayed && w->text == text && pred(*w)) return true;
        }
        return false;
    };

    if (name == "isDisplayed" || name == "isClickable" || name == "isEnabled") {
        if (args.size() != 1)
            throw UnknownPredicateError(name + " expects one argument");
        if (name == "isDisplayed")
            return each_matching(args[0],
                                 [](const WidgetState& w) { return w.displayed; });
        if (name == "isClickable")
            return each_matching(args[0],
                                 [](const WidgetState& w) { return w.clickable; });
        return each_matching(args[0], [](const WidgetState& w) {
            return w.displayed && (w.clickable || w.long_clickable ||
                                   w.editable || w.scrollable);
        });
    }
    if (name == "hasText") {
        if (args.size() != 2 ||
            !std::holds_alternative<std::int64_t>(args[0]) ||
            !std::holds_alternative<std::string>(args[1]))
            throw UnknownPredicateError("hasText expects (widget id, string)");
        const int id = static_cast<int>(std::get<std::int64_t>(args[0]));
        if (!on_current_screen(id)) return false;
        const WidgetState* w = state_of(id);
        return w && w->text == std::get<std::string>(args[1]);
    }
    handled = false;
    return false;
}

bool DeviceSim::eval_prop(const Prop& p) const {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Prop::Pred>) {
                bool handled = false;
                const bool builtin = eval_builtin(n.name, n.args, handled);
                if (handled) return builtin;
                auto it = model_->predicates.find(n.name);
                if (it == model_->predicates.end())
                    throw UnknownPredicateError("unknown predicate '" + n.name + "'");
                if (static_cast<int>(n.args.size()) != it->second.arity)
                    throw UnknownPredicateError(
                        "predicate '" + n.name + "' expects " +
                        std::to_string(it->second.arity) + " argument(s)");
                return eval_expr(it->second.expr, n.args);
            } else if constexpr (std::is_same_v<T, Prop::Not>) {
                return !eval_prop(*n.inner);
            } else if constexpr (std::is_same_v<T, Prop::Implies>) {
                return !eval_prop(*n.lhs) || eval_prop(*n.rhs);
            } else if constexpr (std::is_same_v<T, Prop::And>) {
                return eval_prop(*n.lhs) && eval_prop(*n.rhs);
            } else {
                return eval_prop(*n.lhs) || eval_prop(*n.rhs);
            }
        },
        p.node);
}

bool DeviceSim::holds(const Prop& p) { return eval_prop(p); }

std::optional<SimValue> DeviceSim::variable(const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> DeviceSim::widget_text(int id) const {
    const WidgetState* w = state_of(id);
    if (!w) return std::nullopt;
    return w->text;
}

// ---------------------------------------------------------------------------
// State serialization
// ---------------------------------------------------------------------------

namespace {

json value_to_json(const SimValue& v) {
    if (const auto* n = std::get_if<long long>(&v)) return *n;
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    return std::get<bool>(v);
}

std::string effect_tag(const Effect& e) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, GotoScreen>) {
                return "goto:" + n.screen;
            } else if constexpr (std::is_same_v<T, SetVar>) {
                return "set_var:" + n.name;
            } else if constexpr (std::is_same_v<T, SetWidgetText>) {
                return "set_text:" + std::to_string(n.id) + ":" + n.text_template;
            } else if constexpr (std::is_same_v<T, SetFlag>) {
                return "set_flag:" + std::to_string(n.id) + ":" +
                       widget_flag_name(n.flag) + ":" + (n.value ? "1" : "0");
            } else if constexpr (std::is_same_v<T, CrashEffect>) {
                return "crash:" + n.message;
            } else if constexpr (std::is_same_v<T, ScheduleTask>) {
                return "schedule:" + std::to_string(n.task_index);
            } else {
                return "append:" + std::to_string(n.id);
            }
        },
        e);
}

} // namespace

std::string DeviceSim::serialize() const {
    json doc;
    doc["screen"] = screen_;
    doc["clock_ms"] = clock_ms_;
    doc["landscape"] = landscape_;
    doc["foreground"] = foreground_;
    doc["applied_events"] = applied_events_;
    doc["rng"] = rng_state_;
    doc["sched_seq"] = sched_seq_;

    json widgets = json::object();
    for (const auto& [id, w] : widgets_) {
        widgets[std::to_string(id)] = {
            {"text", w.text},           {"clickable", w.clickable},
            {"long_clickable", w.long_clickable}, {"editable", w.editable},
            {"scrollable", w.scrollable}, {"displayed", w.displayed},
        };
    }
    doc["widgets"] = std::move(widgets);

    json vars = json::object();
    for (const auto& [name, v] : vars_) vars[name] = value_to_json(v);
    doc["vars"] = std::move(vars);

    json pending = json::array();
    for (const PendingTask& p : pending_) {
        json tags = json::array();
        for (const Effect& e : p.effects) tags.push_back(effect_tag(e));
        pending.push_back({{"due", p.due_ms}, {"seq", p.seq}, {"effects", tags}});
    }
    doc["pending"] = std::move(pending);

    json ready = json::array();
    for (const QueuedEffect& qe : ready_) {
        json entry = {{"effect", effect_tag(qe.effect)}};
        entry["typed"] = qe.typed ? json(*qe.typed) : json(nullptr);
        ready.push_back(std::move(entry));
    }
    doc["ready"] = std::move(ready);

    if (crashed_) {
        doc["crashed"] = {{"message", crashed_->message},
                          {"screen", crashed_->screen},
                          {"frames", crashed_->frames},
                          {"event_index", crashed_->event_index}};
    } else {
        doc["crashed"] = nullptr;
    }
    return doc.dump();
}

} // namespace chimp
