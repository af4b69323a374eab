#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "chimp/coordinator.hpp"
#include "chimp/device_sim.hpp"
#include "chimp/genlang.hpp"
#include "chimp/rng.hpp"
#include "chimp/script.hpp"

namespace chimp::test {

inline std::string fixture_path(const std::string& rel) {
    return std::string(CHIMP_SOURCE_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::shared_ptr<const AppModel> fixture_model(const std::string& name) {
    return std::make_shared<AppModel>(
        load_model_file(fixture_path("models/" + name)));
}

// --- shorthand builders -----------------------------------------------------

inline TracePtr ev(AppEvent e) { return Trace::event(UiEvent{std::move(e)}); }
inline TracePtr ev(DeviceEvent d) { return Trace::event(UiEvent{d}); }
inline AppEvent click(int id) { return ClickEvent{IdSpec::of(num_id(id))}; }
inline AppEvent click(const std::string& text) {
    return ClickEvent{IdSpec::of(text_id(text))};
}
inline AppEvent click_any() { return ClickEvent{IdSpec::wildcard()}; }
inline AppEvent type_into(int id, std::string s) {
    return TypeEvent{IdSpec::of(num_id(id)), std::move(s)};
}
inline AppEvent long_click(int id) {
    return LongClickEvent{IdSpec::of(num_id(id))};
}
inline AppEvent sleep_ms(int ms) { return SleepEvent{ms}; }

inline TracePtr seq_of(std::vector<TracePtr> parts) {
    if (parts.empty()) return Trace::unit();
    TracePtr out = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;)
        out = Trace::seq(parts[i], out);
    return out;
}

// --- random structural generators -------------------------------------------

inline PropPtr random_prop(Rng& rng) {
    switch (rng.below(4)) {
    case 0: return Prop::pred("p");
    case 1: return Prop::pred("q", {std::int64_t{1}});
    case 2: return Prop::pred("r", {std::string("a")});
    default:
        return Prop::implies(Prop::pred("p"), Prop::negate(Prop::pred("q", {std::int64_t{1}})));
    }
}

inline IdGen random_id_gen(Rng& rng) {
    switch (rng.below(5)) {
    case 0: return IdConcrete{num_id(static_cast<int>(rng.below(5)))};
    case 1: return IdConcrete{text_id(rng.coin() ? "a" : "b")};
    case 2: return IdWildcard{};
    case 3: {
        std::vector<UiId> ids;
        const std::size_t n = 2 + rng.below(2);
        for (std::size_t i = 0; i < n; ++i)
            ids.push_back(num_id(static_cast<int>(rng.below(6))));
        return IdOneOf{std::move(ids)};
    }
    default: {
        const int x = static_cast<int>(rng.below(4));
        const int y = static_cast<int>(rng.below(4));
        return IdFromXy{XyRect{x, x + static_cast<int>(rng.below(3)), y,
                               y + static_cast<int>(rng.below(3))}};
    }
    }
}

inline StrGen random_str_gen(Rng& rng) {
    switch (rng.below(3)) {
    case 0: return StrConst{rng.coin() ? "x" : "y"};
    case 1: return StrOneOf{{"a", "b"}};
    default: return AlphaStr{static_cast<int>(rng.below(4))};
    }
}

inline IntGen random_int_gen(Rng& rng) {
    switch (rng.below(3)) {
    case 0: return IntConst{static_cast<long long>(rng.below(6))};
    case 1: {
        const long long lo = static_cast<long long>(rng.below(4));
        return IntChoose{lo, lo + static_cast<long long>(rng.below(5))};
    }
    default: return IntOneOf{{1, 2, 3}};
    }
}

inline XyGen random_xy_gen(Rng& rng) {
    if (rng.coin())
        return XyConst{XyPair{static_cast<int>(rng.below(5)),
                              static_cast<int>(rng.below(5))}};
    const int x = static_cast<int>(rng.below(4));
    const int y = static_cast<int>(rng.below(4));
    return XyRect{x, x + static_cast<int>(rng.below(3)), y,
                  y + static_cast<int>(rng.below(3))};
}

inline GenPtr random_leaf_gen(Rng& rng, bool finite) {
    switch (rng.below(9)) {
    case 0: return Gen::click(random_id_gen(rng));
    case 1: return Gen::long_click(random_id_gen(rng));
    case 2:
        return Gen::type_text(random_id_gen(rng),
                              finite ? StrGen{StrOneOf{{"a", "b"}}}
                                     : random_str_gen(rng));
    case 3: return Gen::swipe(random_id_gen(rng), random_xy_gen(rng));
    case 4: return Gen::pinch(random_xy_gen(rng), random_xy_gen(rng));
    case 5: return Gen::sleep(random_int_gen(rng));
    case 6: return Gen::skip();
    case 7: return Gen::device(static_cast<DeviceEvent>(rng.below(5)));
    default: return Gen::assertion(random_prop(rng));
    }
}

// Random generator tree. With finite=true the result meets the enumerate
// preconditions (no AlphaStr, narrow ranges, repeat bounds <= 3).
inline GenPtr random_gen(Rng& rng, int depth, bool finite = false) {
    if (depth <= 0 || rng.below(3) == 0) return random_leaf_gen(rng, finite);
    switch (rng.below(6)) {
    case 0:
        return Gen::seq(random_gen(rng, depth - 1, finite),
                        random_gen(rng, depth - 1, finite));
    case 1:
        return Gen::choice(random_gen(rng, depth - 1, finite),
                           random_gen(rng, depth - 1, finite));
    case 2: return Gen::attempt(random_gen(rng, depth - 1, finite));
    case 3: return Gen::guarded(random_prop(rng), random_gen(rng, depth - 1, finite));
    case 4:
        return Gen::repeat(1 + static_cast<int>(rng.below(3)),
                           random_gen(rng, depth - 1, finite));
    default: return rng.coin() ? Gen::unit() : random_leaf_gen(rng, finite);
    }
}

// --- structured trace mutations ----------------------------------------------

inline TracePtr perturb_atom(const TracePtr& atom, Rng& rng) {
    if (const auto* e = std::get_if<Trace::Event>(&atom->node)) {
        if (const auto* d = std::get_if<DeviceEvent>(&e->event)) {
            const auto next = static_cast<DeviceEvent>(
                (static_cast<int>(*d) + 1) % 5);
            return ev(next);
        }
        AppEvent app = std::get<AppEvent>(e->event);
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ClickEvent> ||
                              std::is_same_v<T, LongClickEvent>) {
                    n.target = IdSpec::of(num_id(90 + static_cast<int>(rng.below(5))));
                } else if constexpr (std::is_same_v<T, TypeEvent>) {
                    n.text += "z";
                } else if constexpr (std::is_same_v<T, SleepEvent>) {
                    n.millis += 1000;
                } else if constexpr (std::is_same_v<T, SwipeEvent>) {
                    n.delta.x += 50;
                } else if constexpr (std::is_same_v<T, PinchEvent>) {
                    n.from.x += 50;
                }
            },
            app);
        return ev(app);
    }
    if (std::holds_alternative<Trace::Assert>(atom->node))
        return Trace::assertion(Prop::pred("mutated"));
    return Trace::attempt(atom); // wrap try/then blocks once more
}

// Produces a nearby trace: members mutate into likely non-members and
// occasionally back into members.
inline TracePtr mutate_trace(const TracePtr& t, Rng& rng) {
    std::vector<TracePtr> atoms = flatten(t);
    const std::uint64_t kind = rng.below(5);
    if (atoms.empty() || kind == 0) {
        atoms.push_back(rng.coin() ? ev(DeviceEvent::Rotate)
                                   : ev(click(static_cast<int>(rng.below(5)))));
    } else if (kind == 1) {
        atoms.erase(atoms.begin() + static_cast<long>(rng.below(atoms.size())));
    } else if (kind == 2) {
        const std::size_t i = rng.below(atoms.size());
        atoms.insert(atoms.begin() + static_cast<long>(i), atoms[i]);
    } else if (kind == 3) {
        const std::size_t i = rng.below(atoms.size());
        const std::size_t j = rng.below(atoms.size());
        std::swap(atoms[i], atoms[j]);
    } else {
        const std::size_t i = rng.below(atoms.size());
        atoms[i] = perturb_atom(atoms[i], rng);
    }
    return seq_of(std::move(atoms));
}

} // namespace chimp::test
