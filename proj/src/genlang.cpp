#include "chimp/genlang.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "chimp/rng.hpp"

namespace chimp {

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

namespace {
GenPtr make(Gen::Node n) { return std::make_shared<Gen>(std::move(n)); }
} // namespace

GenPtr Gen::click(IdGen id) { return make(EvClick{std::move(id)}); }
GenPtr Gen::long_click(IdGen id) { return make(EvLongClick{std::move(id)}); }
GenPtr Gen::type_text(IdGen id, StrGen text) {
    return make(EvType{std::move(id), std::move(text)});
}
GenPtr Gen::swipe(IdGen id, XyGen delta) {
    return make(EvSwipe{std::move(id), std::move(delta)});
}
GenPtr Gen::pinch(XyGen from, XyGen to) {
    return make(EvPinch{std::move(from), std::move(to)});
}
GenPtr Gen::sleep(IntGen millis) { return make(EvSleep{std::move(millis)}); }
GenPtr Gen::skip() { return make(SkipG{}); }
GenPtr Gen::device(DeviceEvent d) { return make(DeviceG{d}); }
GenPtr Gen::seq(GenPtr first, GenPtr second) {
    return make(SeqG{std::move(first), std::move(second)});
}
GenPtr Gen::choice(GenPtr left, GenPtr right) {
    return make(ChoiceG{std::move(left), std::move(right)});
}
GenPtr Gen::attempt(GenPtr body) { return make(TryG{std::move(body)}); }
GenPtr Gen::guarded(PropPtr guard, GenPtr body) {
    return make(ThenG{std::move(guard), std::move(body)});
}
GenPtr Gen::repeat(int bound, GenPtr body) {
    if (bound < 1) throw std::invalid_argument("repeat bound must be >= 1");
    return make(RepeatG{bound, std::move(body)});
}
GenPtr Gen::assertion(PropPtr p) { return make(AssertG{std::move(p)}); }
GenPtr Gen::unit() {
    static const GenPtr u = make(UnitG{});
    return u;
}

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

bool gen_equal(const Gen& a, const Gen& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Gen::EvClick> ||
                          std::is_same_v<T, Gen::EvLongClick>) {
                return na.id == nb.id;
            } else if constexpr (std::is_same_v<T, Gen::EvType>) {
                return na.id == nb.id && na.text == nb.text;
            } else if constexpr (std::is_same_v<T, Gen::EvSwipe>) {
                return na.id == nb.id && na.delta == nb.delta;
            } else if constexpr (std::is_same_v<T, Gen::EvPinch>) {
                return na.from == nb.from && na.to == nb.to;
            } else if constexpr (std::is_same_v<T, Gen::EvSleep>) {
                return na.millis == nb.millis;
            } else if constexpr (std::is_same_v<T, Gen::DeviceG>) {
                return na.event == nb.event;
            } else if constexpr (std::is_same_v<T, Gen::SeqG>) {
                return gen_equal(*na.first, *nb.first) &&
                       gen_equal(*na.second, *nb.second);
            } else if constexpr (std::is_same_v<T, Gen::ChoiceG>) {
                return gen_equal(*na.left, *nb.left) &&
                       gen_equal(*na.right, *nb.right);
            } else if constexpr (std::is_same_v<T, Gen::TryG>) {
                return gen_equal(*na.body, *nb.body);
            } else if constexpr (std::is_same_v<T, Gen::ThenG>) {
                return prop_equal(*na.guard, *nb.guard) &&
                       gen_equal(*na.body, *nb.body);
            } else if constexpr (std::is_same_v<T, Gen::RepeatG>) {
                return na.bound == nb.bound && gen_equal(*na.body, *nb.body);
            } else if constexpr (std::is_same_v<T, Gen::AssertG>) {
                return prop_equal(*na.prop, *nb.prop);
            } else {
                return true; // SkipG, UnitG
            }
        },
        a.node);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

long long sample_int(const IntGen& g, Rng& rng) {
    return std::visit(
        [&](const auto& v) -> long long {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IntConst>) {
                return v.value;
            } else if constexpr (std::is_same_v<T, IntChoose>) {
                if (v.lo > v.hi) throw std::invalid_argument("choose lo > hi");
                return rng.range(v.lo, v.hi);
            } else {
                if (v.values.empty()) throw std::invalid_argument("oneOf of nothing");
                return v.values[rng.below(v.values.size())];
            }
        },
        g);
}

std::string sample_str(const StrGen& g, Rng& rng) {
    return std::visit(
        [&](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StrConst>) {
                return v.value;
            } else if constexpr (std::is_same_v<T, StrOneOf>) {
                if (v.values.empty()) throw std::invalid_argument("oneOf of nothing");
                return v.values[rng.below(v.values.size())];
            } else {
                if (v.max_len < 0) throw std::invalid_argument("alphaStr length < 0");
                const std::size_t len = rng.below(static_cast<std::uint64_t>(v.max_len) + 1);
                std::string s;
                s.reserve(len);
                for (std::size_t i = 0; i < len; ++i)
                    s += static_cast<char>('a' + rng.below(26));
                return s;
            }
        },
        g);
}

XyPair sample_xy(const XyGen& g, Rng& rng) {
    return std::visit(
        [&](const auto& v) -> XyPair {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, XyConst>) {
                return v.value;
            } else {
                if (v.x_lo > v.x_hi || v.y_lo > v.y_hi)
                    throw std::invalid_argument("rect lo > hi");
                const int x = static_cast<int>(rng.range(v.x_lo, v.x_hi));
                const int y = static_cast<int>(rng.range(v.y_lo, v.y_hi));
                return XyPair{x, y};
            }
        },
        g);
}

IdSpec sample_id(const IdGen& g, Rng& rng) {
    return std::visit(
        [&](const auto& v) -> IdSpec {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IdConcrete>) {
                return IdSpec::of(v.id);
            } else if constexpr (std::is_same_v<T, IdWildcard>) {
                return IdSpec::wildcard();
            } else if constexpr (std::is_same_v<T, IdOneOf>) {
                if (v.ids.empty()) throw std::invalid_argument("oneOf of nothing");
                return IdSpec::of(v.ids[rng.below(v.ids.size())]);
            } else {
                const XyPair p = sample_xy(v.xy, rng);
                return IdSpec::of(xy_id(p.x, p.y));
            }
        },
        g);
}

TracePtr sample_rec(const Gen& g, Rng& rng) {
    return std::visit(
        [&](const auto& n) -> TracePtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Gen::EvClick>) {
                return Trace::event(AppEvent{ClickEvent{sample_id(n.id, rng)}});
            } else if constexpr (std::is_same_v<T, Gen::EvLongClick>) {
                return Trace::event(AppEvent{LongClickEvent{sample_id(n.id, rng)}});
            } else if constexpr (std::is_same_v<T, Gen::EvType>) {
                IdSpec id = sample_id(n.id, rng);
                return Trace::event(
                    AppEvent{TypeEvent{std::move(id), sample_str(n.text, rng)}});
            } else if constexpr (std::is_same_v<T, Gen::EvSwipe>) {
                IdSpec id = sample_id(n.id, rng);
                return Trace::event(
                    AppEvent{SwipeEvent{std::move(id), sample_xy(n.delta, rng)}});
            } else if constexpr (std::is_same_v<T, Gen::EvPinch>) {
                XyPair from = sample_xy(n.from, rng);
                return Trace::event(
                    AppEvent{PinchEvent{from, sample_xy(n.to, rng)}});
            } else if constexpr (std::is_same_v<T, Gen::EvSleep>) {
                return Trace::event(AppEvent{
                    SleepEvent{static_cast<int>(sample_int(n.millis, rng))}});
            } else if constexpr (std::is_same_v<T, Gen::SkipG>) {
                return Trace::event(AppEvent{SkipEvent{}});
            } else if constexpr (std::is_same_v<T, Gen::DeviceG>) {
                return Trace::event(n.event);
            } else if constexpr (std::is_same_v<T, Gen::SeqG>) {
                TracePtr first = sample_rec(*n.first, rng);
                return Trace::seq(std::move(first), sample_rec(*n.second, rng));
            } else if constexpr (std::is_same_v<T, Gen::ChoiceG>) {
                return rng.coin() ? sample_rec(*n.right, rng)
                                  : sample_rec(*n.left, rng);
            } else if constexpr (std::is_same_v<T, Gen::TryG>) {
                return Trace::attempt(sample_rec(*n.body, rng));
            } else if constexpr (std::is_same_v<T, Gen::ThenG>) {
                return Trace::guarded(n.guard, sample_rec(*n.body, rng));
            } else if constexpr (std::is_same_v<T, Gen::RepeatG>) {
                const int m = 1 + static_cast<int>(rng.below(n.bound));
                std::vector<TracePtr> parts;
                parts.reserve(m);
                for (int i = 0; i < m; ++i) parts.push_back(sample_rec(*n.body, rng));
                TracePtr result = parts.back();
                for (std::size_t i = parts.size() - 1; i-- > 0;)
                    result = Trace::seq(parts[i], result);
                return result;
            } else if constexpr (std::is_same_v<T, Gen::AssertG>) {
                return Trace::assertion(n.prop);
            } else {
                return Trace::unit();
            }
        },
        g.node);
}

} // namespace

TracePtr sample(const Gen& g, const SampleCfg& cfg) {
    Rng rng(cfg.rng_seed);
    return sample_rec(g, rng);
}

// ---------------------------------------------------------------------------
// Membership: NFA over trace atoms
// ---------------------------------------------------------------------------

namespace {

bool int_member(const IntGen& g, long long v) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntConst>) {
                return v == n.value;
            } else if constexpr (std::is_same_v<T, IntChoose>) {
                return n.lo <= v && v <= n.hi;
            } else {
                return std::find(n.values.begin(), n.values.end(), v) !=
                       n.values.end();
            }
        },
        g);
}

bool str_member(const StrGen& g, const std::string& s) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, StrConst>) {
                return s == n.value;
            } else if constexpr (std::is_same_v<T, StrOneOf>) {
                return std::find(n.values.begin(), n.values.end(), s) !=
                       n.values.end();
            } else {
                if (s.size() > static_cast<std::size_t>(n.max_len)) return false;
                return std::all_of(s.begin(), s.end(),
                                   [](char c) { return c >= 'a' && c <= 'z'; });
            }
        },
        g);
}

bool xy_member(const XyGen& g, const XyPair& p) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, XyConst>) {
                return p == n.value;
            } else {
                return n.x_lo <= p.x && p.x <= n.x_hi && n.y_lo <= p.y &&
                       p.y <= n.y_hi;
            }
        },
        g);
}

bool id_member(const IdGen& g, const IdSpec& spec) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IdConcrete>) {
                return !spec.is_wildcard() && *spec.id == n.id;
            } else if constexpr (std::is_same_v<T, IdWildcard>) {
                return spec.is_wildcard();
            } else if constexpr (std::is_same_v<T, IdOneOf>) {
                return !spec.is_wildcard() &&
                       std::find(n.ids.begin(), n.ids.end(), *spec.id) !=
                           n.ids.end();
            } else {
                if (spec.is_wildcard()) return false;
                const auto* p = std::get_if<XyPair>(&*spec.id);
                return p && xy_member(n.xy, *p);
            }
        },
        g);
}

using AtomMatcher = std::function<bool(const Trace&)>;

// Matches one trace atom against one leaf generator node.
template <typename EventT, typename Pred>
AtomMatcher event_matcher(Pred pred) {
    return [pred](const Trace& atom) -> bool {
        const auto* ev = std::get_if<Trace::Event>(&atom.node);
        if (!ev) return false;
        const auto* app = std::get_if<AppEvent>(&ev->event);
        if (!app) return false;
        const auto* e = std::get_if<EventT>(app);
        return e && pred(*e);
    };
}

struct Nfa {
    std::vector<std::vector<std::pair<int, int>>> eps_or_edge; // unused
    std::vector<std::vector<int>> eps;                  // state -> states
    std::vector<std::vector<std::pair<int, int>>> step; // state -> (matcher, to)
    std::vector<AtomMatcher> matchers;
    int start = 0, accept = 0;

    int add_state() {
        eps.emplace_back();
        step.emplace_back();
        return static_cast<int>(eps.size()) - 1;
    }
    void add_eps(int from, int to) { eps[from].push_back(to); }
    void add_match(int from, int to, AtomMatcher m) {
        matchers.push_back(std::move(m));
        step[from].push_back({static_cast<int>(matchers.size()) - 1, to});
    }
};

struct Fragment {
    int start, end;
};

Fragment build_nfa(const Gen& g, Nfa& nfa);

Fragment leaf(Nfa& nfa, AtomMatcher m) {
    Fragment f{nfa.add_state(), nfa.add_state()};
    nfa.add_match(f.start, f.end, std::move(m));
    return f;
}

Fragment build_nfa(const Gen& g, Nfa& nfa) {
    return std::visit(
        [&](const auto& n) -> Fragment {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Gen::EvClick>) {
                return leaf(nfa, event_matcher<ClickEvent>([&n](const ClickEvent& e) {
                                return id_member(n.id, e.target);
                            }));
            } else if constexpr (std::is_same_v<T, Gen::EvLongClick>) {
                return leaf(nfa,
                            event_matcher<LongClickEvent>([&n](const LongClickEvent& e) {
                                return id_member(n.id, e.target);
                            }));
            } else if constexpr (std::is_same_v<T, Gen::EvType>) {
                return leaf(nfa, event_matcher<TypeEvent>([&n](const TypeEvent& e) {
                                return id_member(n.id, e.target) &&
                                       str_member(n.text, e.text);
                            }));
            } else if constexpr (std::is_same_v<T, Gen::EvSwipe>) {
                return leaf(nfa, event_matcher<SwipeEvent>([&n](const SwipeEvent& e) {
                                return id_member(n.id, e.target) &&
                                       xy_member(n.delta, e.delta);
                            }));
            } else if constexpr (std::is_same_v<T, Gen::EvPinch>) {
                return leaf(nfa, event_matcher<PinchEvent>([&n](const PinchEvent& e) {
                                return xy_member(n.from, e.from) &&
                                       xy_member(n.to, e.to);
                            }));
            } else if constexpr (std::is_same_v<T, Gen::EvSleep>) {
                return leaf(nfa, event_matcher<SleepEvent>([&n](const SleepEvent& e) {
                                return int_member(n.millis, e.millis);
                            }));
            } else if constexpr (std::is_same_v<T, Gen::SkipG>) {
                return leaf(nfa, event_matcher<SkipEvent>(
                                     [](const SkipEvent&) { return true; }));
            } else if constexpr (std::is_same_v<T, Gen::DeviceG>) {
                const DeviceEvent want = n.event;
                return leaf(nfa, [want](const Trace& atom) {
                    const auto* ev = std::get_if<Trace::Event>(&atom.node);
                    if (!ev) return false;
                    const auto* d = std::get_if<DeviceEvent>(&ev->event);
                    return d && *d == want;
                });
            } else if constexpr (std::is_same_v<T, Gen::AssertG>) {
                const PropPtr want = n.prop;
                return leaf(nfa, [want](const Trace& atom) {
                    const auto* a = std::get_if<Trace::Assert>(&atom.node);
                    return a && prop_equal(*a->prop, *want);
                });
            } else if constexpr (std::is_same_v<T, Gen::TryG>) {
                const GenPtr body = n.body;
                return leaf(nfa, [body](const Trace& atom) {
                    const auto* t = std::get_if<Trace::Try>(&atom.node);
                    return t && denotes(*body, t->body);
                });
            } else if constexpr (std::is_same_v<T, Gen::ThenG>) {
                const GenPtr body = n.body;
                const PropPtr guard = n.guard;
                return leaf(nfa, [body, guard](const Trace& atom) {
                    const auto* t = std::get_if<Trace::Then>(&atom.node);
                    return t && prop_equal(*t->guard, *guard) &&
                           denotes(*body, t->body);
                });
            } else if constexpr (std::is_same_v<T, Gen::UnitG>) {
                Fragment f{nfa.add_state(), nfa.add_state()};
                nfa.add_eps(f.start, f.end);
                return f;
            } else if constexpr (std::is_same_v<T, Gen::SeqG>) {
                Fragment a = build_nfa(*n.first, nfa);
                Fragment b = build_nfa(*n.second, nfa);
                nfa.add_eps(a.end, b.start);
                return {a.start, b.end};
            } else if constexpr (std::is_same_v<T, Gen::ChoiceG>) {
                Fragment a = build_nfa(*n.left, nfa);
                Fragment b = build_nfa(*n.right, nfa);
                Fragment f{nfa.add_state(), nfa.add_state()};
                nfa.add_eps(f.start, a.start);
                nfa.add_eps(f.start, b.start);
                nfa.add_eps(a.end, f.end);
                nfa.add_eps(b.end, f.end);
                return f;
            } else { // RepeatG: 1..bound copies of the body, chained
                const int end = nfa.add_state();
                Fragment first = build_nfa(*n.body, nfa);
                nfa.add_eps(first.end, end);
                int prev_end = first.end;
                for (int i = 1; i < n.bound; ++i) {
                    Fragment next = build_nfa(*n.body, nfa);
                    nfa.add_eps(prev_end, next.start);
                    nfa.add_eps(next.end, end);
                    prev_end = next.end;
                }
                return {first.start, end};
            }
        },
        g.node);
}

void eps_closure(const Nfa& nfa, std::vector<char>& active) {
    std::vector<int> work;
    for (std::size_t s = 0; s < active.size(); ++s)
        if (active[s]) work.push_back(static_cast<int>(s));
    while (!work.empty()) {
        const int s = work.back();
        work.pop_back();
        for (int to : nfa.eps[s]) {
            if (!active[to]) {
                active[to] = 1;
                work.push_back(to);
            }
        }
    }
}

} // namespace

bool denotes(const Gen& g, const TracePtr& t) {
    const std::vector<TracePtr> atoms = flatten(t);

    Nfa nfa;
    const Fragment f = build_nfa(g, nfa);
    nfa.start = f.start;
    nfa.accept = f.end;

    std::vector<char> active(nfa.eps.size(), 0);
    active[nfa.start] = 1;
    eps_closure(nfa, active);

    for (const TracePtr& atom : atoms) {
        std::vector<char> next(nfa.eps.size(), 0);
        bool any = false;
        for (std::size_t s = 0; s < active.size(); ++s) {
            if (!active[s]) continue;
            for (const auto& [m, to] : nfa.step[s]) {
                if (!next[to] && nfa.matchers[m](*atom)) {
                    next[to] = 1;
                    any = true;
                }
            }
        }
        if (!any) return false;
        eps_closure(nfa, next);
        active.swap(next);
    }
    return active[nfa.accept] != 0;
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

namespace {

// Members keyed by rendered form; rendering of normalized traces is injective
// (render/parse round trip), so the key doubles as the set identity.
using TraceSet = std::map<std::string, TracePtr>;

void set_add(TraceSet& set, TracePtr t, std::size_t limit) {
    std::string key = render(*t);
    set.emplace(std::move(key), std::move(t));
    if (set.size() > limit)
        throw TooLargeError("generator denotes more than " +
                            std::to_string(limit) + " traces");
}

constexpr long long kMaxRangeWidth = 16;

std::vector<long long> int_domain(const IntGen& g) {
    return std::visit(
        [](const auto& n) -> std::vector<long long> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntConst>) {
                return {n.value};
            } else if constexpr (std::is_same_v<T, IntChoose>) {
                if (n.hi - n.lo > kMaxRangeWidth)
                    throw UnboundedError("choose range wider than 16");
                std::vector<long long> out;
                for (long long v = n.lo; v <= n.hi; ++v) out.push_back(v);
                return out;
            } else {
                std::vector<long long> out = n.values;
                std::sort(out.begin(), out.end());
                out.erase(std::unique(out.begin(), out.end()), out.end());
                return out;
            }
        },
        g);
}

std::vector<std::string> str_domain(const StrGen& g) {
    return std::visit(
        [](const auto& n) -> std::vector<std::string> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, StrConst>) {
                return {n.value};
            } else if constexpr (std::is_same_v<T, StrOneOf>) {
                std::vector<std::string> out = n.values;
                std::sort(out.begin(), out.end());
                out.erase(std::unique(out.begin(), out.end()), out.end());
                return out;
            } else {
                throw UnboundedError("alphaStr is not enumerable");
            }
        },
        g);
}

std::vector<XyPair> xy_domain(const XyGen& g) {
    return std::visit(
        [](const auto& n) -> std::vector<XyPair> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, XyConst>) {
                return {n.value};
            } else {
                if (n.x_hi - n.x_lo > kMaxRangeWidth ||
                    n.y_hi - n.y_lo > kMaxRangeWidth)
                    throw UnboundedError("rect range wider than 16");
                std::vector<XyPair> out;
                for (int x = n.x_lo; x <= n.x_hi; ++x)
                    for (int y = n.y_lo; y <= n.y_hi; ++y)
                        out.push_back(XyPair{x, y});
                return out;
            }
        },
        g);
}

std::vector<IdSpec> id_domain(const IdGen& g) {
    return std::visit(
        [](const auto& n) -> std::vector<IdSpec> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IdConcrete>) {
                return {IdSpec::of(n.id)};
            } else if constexpr (std::is_same_v<T, IdWildcard>) {
                return {IdSpec::wildcard()};
            } else if constexpr (std::is_same_v<T, IdOneOf>) {
                std::vector<IdSpec> out;
                for (const UiId& id : n.ids) {
                    IdSpec spec = IdSpec::of(id);
                    if (std::find(out.begin(), out.end(), spec) == out.end())
                        out.push_back(std::move(spec));
                }
                return out;
            } else {
                std::vector<IdSpec> out;
                for (const XyPair& p : xy_domain(n.xy))
                    out.push_back(IdSpec::of(xy_id(p.x, p.y)));
                return out;
            }
        },
        g);
}

TraceSet enum_rec(const Gen& g, std::size_t limit) {
    TraceSet out;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Gen::EvClick>) {
                for (IdSpec& id : id_domain(n.id))
                    set_add(out, Trace::event(AppEvent{ClickEvent{std::move(id)}}),
                            limit);
            } else if constexpr (std::is_same_v<T, Gen::EvLongClick>) {
                for (IdSpec& id : id_domain(n.id))
                    set_add(out,
                            Trace::event(AppEvent{LongClickEvent{std::move(id)}}),
                            limit);
            } else if constexpr (std::is_same_v<T, Gen::EvType>) {
                for (const IdSpec& id : id_domain(n.id))
                    for (const std::string& s : str_domain(n.text))
                        set_add(out, Trace::event(AppEvent{TypeEvent{id, s}}),
                                limit);
            } else if constexpr (std::is_same_v<T, Gen::EvSwipe>) {
                for (const IdSpec& id : id_domain(n.id))
                    for (const XyPair& d : xy_domain(n.delta))
                        set_add(out, Trace::event(AppEvent{SwipeEvent{id, d}}),
                                limit);
            } else if constexpr (std::is_same_v<T, Gen::EvPinch>) {
                for (const XyPair& a : xy_domain(n.from))
                    for (const XyPair& b : xy_domain(n.to))
                        set_add(out, Trace::event(AppEvent{PinchEvent{a, b}}),
                                limit);
            } else if constexpr (std::is_same_v<T, Gen::EvSleep>) {
                for (long long v : int_domain(n.millis))
                    set_add(out,
                            Trace::event(
                                AppEvent{SleepEvent{static_cast<int>(v)}}),
                            limit);
            } else if constexpr (std::is_same_v<T, Gen::SkipG>) {
                set_add(out, Trace::event(AppEvent{SkipEvent{}}), limit);
            } else if constexpr (std::is_same_v<T, Gen::DeviceG>) {
                set_add(out, Trace::event(n.event), limit);
            } else if constexpr (std::is_same_v<T, Gen::AssertG>) {
                set_add(out, Trace::assertion(n.prop), limit);
            } else if constexpr (std::is_same_v<T, Gen::UnitG>) {
                set_add(out, Trace::unit(), limit);
            } else if constexpr (std::is_same_v<T, Gen::TryG>) {
                for (const auto& [k, m] : enum_rec(*n.body, limit))
                    set_add(out, Trace::attempt(m), limit);
            } else if constexpr (std::is_same_v<T, Gen::ThenG>) {
                for (const auto& [k, m] : enum_rec(*n.body, limit))
                    set_add(out, Trace::guarded(n.guard, m), limit);
            } else if constexpr (std::is_same_v<T, Gen::SeqG>) {
                const TraceSet lhs = enum_rec(*n.first, limit);
                const TraceSet rhs = enum_rec(*n.second, limit);
                for (const auto& [ka, a] : lhs)
                    for (const auto& [kb, b] : rhs)
                        set_add(out, normalize(Trace::seq(a, b)), limit);
            } else if constexpr (std::is_same_v<T, Gen::ChoiceG>) {
                for (const auto& [k, m] : enum_rec(*n.left, limit))
                    set_add(out, m, limit);
                for (const auto& [k, m] : enum_rec(*n.right, limit))
                    set_add(out, m, limit);
            } else { // RepeatG
                const TraceSet body = enum_rec(*n.body, limit);
                TraceSet level = body;
                for (const auto& [k, m] : level) set_add(out, m, limit);
                for (int m_count = 2; m_count <= n.bound; ++m_count) {
                    TraceSet next;
                    for (const auto& [ka, a] : body)
                        for (const auto& [kb, b] : level)
                            set_add(next, normalize(Trace::seq(a, b)), limit);
                    for (const auto& [k, m] : next) set_add(out, m, limit);
                    level.swap(next);
                }
            }
        },
        g.node);
    return out;
}

} // namespace

std::vector<TracePtr> enumerate_traces(const Gen& g, std::size_t limit) {
    TraceSet set = enum_rec(g, limit);
    std::vector<TracePtr> out;
    out.reserve(set.size());
    for (auto& [k, t] : set) out.push_back(std::move(t));
    return out;
}

// ---------------------------------------------------------------------------
// Derived combinators
// ---------------------------------------------------------------------------

namespace {

GenPtr choice_chain(std::vector<GenPtr> parts) {
    GenPtr out = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;)
        out = Gen::choice(parts[i], out);
    return out;
}

GenPtr coordinate_pool(const MonkeyPools& pools) {
    const IdGen at = IdFromXy{pools.xy};
    return choice_chain({
        Gen::attempt(Gen::click(at)),
        Gen::attempt(Gen::long_click(at)),
        Gen::attempt(Gen::type_text(at, pools.text)),
        Gen::attempt(Gen::swipe(at, pools.xy)),
        Gen::attempt(Gen::pinch(pools.xy, pools.xy)),
        Gen::attempt(Gen::sleep(pools.sleep_ms)),
    });
}

GenPtr wildcard_pool(const MonkeyPools& pools) {
    const IdGen any = IdWildcard{};
    return choice_chain({
        Gen::attempt(Gen::click(any)),
        Gen::attempt(Gen::long_click(any)),
        Gen::attempt(Gen::type_text(any, pools.text)),
        Gen::attempt(Gen::swipe(any, pools.xy)),
        Gen::attempt(Gen::pinch(pools.xy, pools.xy)),
        Gen::attempt(Gen::sleep(pools.sleep_ms)),
    });
}

} // namespace

GenPtr interrupt_gen() {
    return choice_chain({
        Gen::device(DeviceEvent::ClickHome),
        Gen::device(DeviceEvent::ClickMenu),
        Gen::device(DeviceEvent::Settings),
        Gen::device(DeviceEvent::Rotate),
    });
}

GenPtr optional_gen(GenPtr g) { return Gen::choice(std::move(g), Gen::skip()); }

GenPtr interruptible_seq(GenPtr g1, GenPtr g2, int m) {
    if (m < 1) throw std::invalid_argument("interrupt bound must be >= 1");
    return Gen::seq(std::move(g1),
                    Gen::seq(Gen::repeat(m, interrupt_gen()), std::move(g2)));
}

GenPtr preserves(GenPtr g, PropPtr p) {
    return Gen::seq(Gen::assertion(p),
                    Gen::seq(std::move(g), Gen::assertion(p)));
}

GenPtr monkey(int n, const MonkeyPools& pools) {
    return Gen::repeat(n, Gen::choice(coordinate_pool(pools), interrupt_gen()));
}

GenPtr relevant_monkey(int n, const MonkeyPools& pools) {
    return Gen::repeat(n, Gen::choice(wildcard_pool(pools), interrupt_gen()));
}

GenPtr gorilla(int n, GenPtr inject, bool coordinate_pool_flag,
               const MonkeyPools& pools) {
    GenPtr pool =
        coordinate_pool_flag ? coordinate_pool(pools) : wildcard_pool(pools);
    return Gen::repeat(
        n, Gen::seq(std::move(inject),
                    Gen::choice(std::move(pool), interrupt_gen())));
}

} // namespace chimp
