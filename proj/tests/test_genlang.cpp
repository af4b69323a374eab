#include <doctest.h>

#include <algorithm>
#include <set>

#include "chimp/genlang.hpp"

#include "helpers.hpp"

using namespace chimp;
using namespace chimp::test;

namespace {

std::set<std::string> enum_keys(const GenPtr& g, std::size_t limit = 10000) {
    std::set<std::string> keys;
    for (const TracePtr& t : enumerate_traces(*g, limit)) keys.insert(render(*t));
    return keys;
}

// Small pools make the monkey family enumerable.
MonkeyPools tiny_pools() {
    MonkeyPools pools;
    pools.xy = XyRect{0, 1, 0, 1};
    pools.text = StrOneOf{{"a"}};
    pools.sleep_ms = IntChoose{0, 1};
    return pools;
}

} // namespace

TEST_CASE("sample: singleton generators") {
    CHECK(trace_equal(*sample(*Gen::skip(), {0}), *ev(AppEvent{SkipEvent{}})));
    CHECK(sample(*Gen::unit(), {0})->is_unit());
    CHECK(trace_equal(*sample(*Gen::device(DeviceEvent::Rotate), {9}),
                      *ev(DeviceEvent::Rotate)));
}

TEST_CASE("sample: choice draws one branch and stays in the denotation") {
    const GenPtr g = Gen::choice(Gen::device(DeviceEvent::Rotate), Gen::skip());
    bool saw_rotate = false, saw_skip = false;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const TracePtr t = sample(*g, {seed});
        CHECK(denotes(*g, t));
        if (trace_equal(*t, *ev(DeviceEvent::Rotate))) saw_rotate = true;
        if (trace_equal(*t, *ev(AppEvent{SkipEvent{}}))) saw_skip = true;
    }
    CHECK(saw_rotate);
    CHECK(saw_skip);
}

TEST_CASE("sample: repeat draws 1..n bodies") {
    const GenPtr g = Gen::repeat(2, Gen::device(DeviceEvent::Rotate));
    const std::set<std::string> members = enum_keys(g);
    CHECK(members == std::set<std::string>{"Rotate", "Rotate :>> Rotate"});
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 40; ++seed)
        seen.insert(render(*normalize(sample(*g, {seed}))));
    CHECK(seen == members); // both lengths occur and nothing else
}

TEST_CASE("sample: seed determinism") {
    Rng meta(5150);
    for (int i = 0; i < 100; ++i) {
        const GenPtr g = random_gen(meta, 6);
        const std::uint64_t seed = meta.next();
        CHECK(trace_equal(*sample(*g, {seed}), *sample(*g, {seed})));
    }
}

TEST_CASE("denotes: argument membership") {
    const GenPtr g = Gen::click(IdOneOf{{num_id(1), num_id(2)}});
    CHECK(denotes(*g, ev(click(2))));
    CHECK_FALSE(denotes(*g, ev(click(3))));
    CHECK_FALSE(denotes(*g, ev(click_any())));

    const GenPtr wild = Gen::click(IdWildcard{});
    CHECK(denotes(*wild, ev(click_any())));
    CHECK_FALSE(denotes(*wild, ev(click(1))));

    const GenPtr coord = Gen::click(IdFromXy{XyRect{0, 10, 0, 10}});
    CHECK(denotes(*coord, ev(AppEvent{ClickEvent{IdSpec::of(xy_id(5, 5))}})));
    CHECK_FALSE(denotes(*coord, ev(AppEvent{ClickEvent{IdSpec::of(xy_id(11, 5))}})));

    const GenPtr alpha = Gen::type_text(IdWildcard{}, AlphaStr{3});
    CHECK(denotes(*alpha, ev(AppEvent{TypeEvent{IdSpec::wildcard(), "abc"}})));
    CHECK(denotes(*alpha, ev(AppEvent{TypeEvent{IdSpec::wildcard(), ""}})));
    CHECK_FALSE(denotes(*alpha, ev(AppEvent{TypeEvent{IdSpec::wildcard(), "abcd"}})));
    CHECK_FALSE(denotes(*alpha, ev(AppEvent{TypeEvent{IdSpec::wildcard(), "aBc"}})));
}

TEST_CASE("denotes: bounded repetition and sequencing") {
    const GenPtr rep = Gen::repeat(2, Gen::device(DeviceEvent::Rotate));
    CHECK(denotes(*rep, ev(DeviceEvent::Rotate)));
    CHECK(denotes(*rep, seq_of({ev(DeviceEvent::Rotate), ev(DeviceEvent::Rotate)})));
    CHECK_FALSE(denotes(*rep, seq_of({ev(DeviceEvent::Rotate),
                                      ev(DeviceEvent::Rotate),
                                      ev(DeviceEvent::Rotate)})));
    CHECK_FALSE(denotes(*rep, Trace::unit()));

    // every member of Skip ; assert P contains the Skip atom
    const PropPtr p = Prop::pred("p");
    const GenPtr g = Gen::seq(Gen::skip(), Gen::assertion(p));
    CHECK_FALSE(denotes(*g, Trace::assertion(p)));
    CHECK(denotes(*g, seq_of({ev(AppEvent{SkipEvent{}}), Trace::assertion(p)})));
}

TEST_CASE("denotes: membership is modulo the sequencing monoid") {
    const GenPtr g = Gen::seq(Gen::unit(), Gen::seq(Gen::skip(), Gen::unit()));
    CHECK(denotes(*g, ev(AppEvent{SkipEvent{}})));
    CHECK(denotes(*Gen::seq(Gen::unit(), Gen::unit()), Trace::unit()));
    CHECK_FALSE(denotes(*Gen::skip(), Trace::unit()));
}

TEST_CASE("denotes: try and then blocks match recursively") {
    const PropPtr p = Prop::pred("p");
    const GenPtr g = Gen::attempt(Gen::repeat(2, Gen::skip()));
    CHECK(denotes(*g, Trace::attempt(ev(AppEvent{SkipEvent{}}))));
    CHECK(denotes(*g, Trace::attempt(seq_of({ev(AppEvent{SkipEvent{}}),
                                             ev(AppEvent{SkipEvent{}})}))));
    CHECK_FALSE(denotes(*g, ev(AppEvent{SkipEvent{}}))); // unwrapped
    CHECK_FALSE(denotes(*g, Trace::attempt(ev(DeviceEvent::Rotate))));

    const GenPtr guarded = Gen::guarded(p, Gen::skip());
    CHECK(denotes(*guarded, Trace::guarded(p, ev(AppEvent{SkipEvent{}}))));
    CHECK_FALSE(denotes(*guarded,
                        Trace::guarded(Prop::pred("q"), ev(AppEvent{SkipEvent{}}))));
}

TEST_CASE("enumerate: spec denotations") {
    CHECK(enum_keys(optional_gen(Gen::device(DeviceEvent::Rotate))) ==
          std::set<std::string>{"Rotate", "Skip"});

    const GenPtr two = Gen::repeat(
        2, Gen::choice(Gen::skip(), Gen::device(DeviceEvent::Rotate)));
    CHECK(enum_keys(two) ==
          std::set<std::string>{"Skip", "Rotate", "Skip :>> Skip",
                                "Skip :>> Rotate", "Rotate :>> Skip",
                                "Rotate :>> Rotate"});

    CHECK(enum_keys(Gen::unit()) == std::set<std::string>{"unit"});
}

TEST_CASE("enumerate: errors") {
    CHECK_THROWS_AS(enumerate_traces(*Gen::type_text(IdWildcard{}, AlphaStr{2}), 100),
                    UnboundedError);
    CHECK_THROWS_AS(enumerate_traces(*Gen::sleep(IntChoose{0, 5000}), 100000),
                    UnboundedError);
    CHECK_THROWS_AS(enumerate_traces(*Gen::sleep(IntChoose{0, 10}), 5),
                    TooLargeError);
}

TEST_CASE("choice denotation is set union") {
    Rng meta(808);
    for (int i = 0; i < 60; ++i) {
        const GenPtr a = random_gen(meta, 3, /*finite=*/true);
        const GenPtr b = random_gen(meta, 3, /*finite=*/true);
        std::set<std::string> lhs, want;
        try {
            lhs = enum_keys(Gen::choice(a, b), 3000);
            want = enum_keys(a, 3000);
            for (const std::string& k : enum_keys(b, 3000)) want.insert(k);
        } catch (const TooLargeError&) {
            continue;
        }
        CHECK(lhs == want);
    }
}

TEST_CASE("repeat members flatten to 1..n bodies worth of atoms") {
    const GenPtr body = Gen::choice(
        Gen::skip(), Gen::seq(Gen::device(DeviceEvent::Rotate), Gen::skip()));
    const int bound = 3;
    const GenPtr rep = Gen::repeat(bound, body);
    for (const TracePtr& t : enumerate_traces(*rep, 10000)) {
        const std::size_t atoms = flatten(t).size();
        CHECK(atoms >= 1);       // at least one body, each with >= 1 atom
        CHECK(atoms <= 2 * 3);   // at most n bodies of maximal length 2
    }
}

TEST_CASE("sampler soundness on random generators") {
    Rng meta(31337);
    for (int i = 0; i < 250; ++i) {
        const GenPtr g = random_gen(meta, 6);
        const std::uint64_t seed = meta.next();
        const TracePtr t = sample(*g, {seed});
        CAPTURE(render_gen(*g));
        CAPTURE(render(*t));
        CHECK(denotes(*g, t));
    }
}

TEST_CASE("denotes agrees with the enumeration oracle") {
    Rng meta(90210);
    int checked = 0;
    while (checked < 40) {
        const GenPtr g = random_gen(meta, 4, /*finite=*/true);
        std::vector<TracePtr> members;
        try {
            members = enumerate_traces(*g, 2000);
        } catch (const TooLargeError&) {
            continue;
        }
        std::set<std::string> keys;
        for (const TracePtr& m : members) keys.insert(render(*m));

        for (const TracePtr& m : members) {
            CAPTURE(render_gen(*g));
            CAPTURE(render(*m));
            CHECK(denotes(*g, m));
        }
        for (int k = 0; k < 25; ++k) {
            const TracePtr& base = members[meta.below(members.size())];
            const TracePtr mutant = mutate_trace(base, meta);
            const bool in_set = keys.count(render(*normalize(mutant))) > 0;
            CAPTURE(render_gen(*g));
            CAPTURE(render(*mutant));
            CHECK(denotes(*g, mutant) == in_set);
        }
        ++checked;
    }
}

TEST_CASE("interruptible sequencing inserts 1..m interrupts") {
    const GenPtr g = interruptible_seq(Gen::skip(), Gen::skip(), 1);
    const std::set<std::string> members = enum_keys(g);
    CHECK(members == std::set<std::string>{
                         "Skip :>> ClickHome :>> Skip", "Skip :>> ClickMenu :>> Skip",
                         "Skip :>> Settings :>> Skip", "Skip :>> Rotate :>> Skip"});

    // default bound is 3
    const GenPtr dflt = interruptible_seq(Gen::skip(), Gen::skip());
    CHECK(gen_equal(*dflt, *interruptible_seq(Gen::skip(), Gen::skip(), 3)));
    for (const TracePtr& t : enumerate_traces(*dflt, 10000)) {
        const std::size_t atoms = flatten(t).size();
        CHECK(atoms >= 3);
        CHECK(atoms <= 5);
    }

    // sampler soundness by construction
    for (std::uint64_t seed = 0; seed < 50; ++seed)
        CHECK(denotes(*dflt, sample(*dflt, {seed})));
    CHECK_THROWS_AS(interruptible_seq(Gen::skip(), Gen::skip(), 0),
                    std::invalid_argument);
}

TEST_CASE("preserves asserts the property around the generator") {
    const PropPtr p = Prop::pred("p");
    CHECK(enum_keys(preserves(Gen::device(DeviceEvent::Rotate), p)) ==
          std::set<std::string>{"assert p :>> Rotate :>> assert p"});
}

TEST_CASE("monkey: try-wrapped coordinate events or bare interrupts") {
    const GenPtr g = monkey(5);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const TracePtr t = sample(*g, {seed});
        CHECK(denotes(*g, t));
        const auto atoms = flatten(t);
        CHECK(atoms.size() >= 1);
        CHECK(atoms.size() <= 5);
        for (const TracePtr& atom : atoms) {
            if (const auto* e = std::get_if<Trace::Event>(&atom->node)) {
                // bare atoms must be interrupt device events
                const auto* d = std::get_if<DeviceEvent>(&e->event);
                REQUIRE(d != nullptr);
                CHECK(*d != DeviceEvent::ClickBack);
            } else {
                // everything else is a try-wrapped app event
                const auto* tr = std::get_if<Trace::Try>(&atom->node);
                REQUIRE(tr != nullptr);
                const auto* inner = std::get_if<Trace::Event>(&tr->body->node);
                REQUIRE(inner != nullptr);
                const auto* app = std::get_if<AppEvent>(&inner->event);
                REQUIRE(app != nullptr);
                // coordinate pool: sleeps bounded by the default range
                if (const auto* s = std::get_if<SleepEvent>(app)) {
                    CHECK(s->millis >= 0);
                    CHECK(s->millis <= 5000);
                }
                // click targets are coordinates, never the wildcard
                if (const auto* c = std::get_if<ClickEvent>(app)) {
                    REQUIRE_FALSE(c->target.is_wildcard());
                    CHECK(std::holds_alternative<XyPair>(*c->target.id));
                }
            }
        }
    }
}

TEST_CASE("relevantMonkey targets the wildcard") {
    const GenPtr g = relevant_monkey(4);
    bool saw_wildcard = false;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const TracePtr t = sample(*g, {seed});
        CHECK(denotes(*g, t));
        for (const TracePtr& atom : flatten(t)) {
            const auto* tr = std::get_if<Trace::Try>(&atom->node);
            if (!tr) continue;
            const auto& event =
                std::get<AppEvent>(std::get<Trace::Event>(tr->body->node).event);
            if (const auto* c = std::get_if<ClickEvent>(&event)) {
                CHECK(c->target.is_wildcard());
                saw_wildcard = true;
            }
            if (const auto* ty = std::get_if<TypeEvent>(&event))
                CHECK(ty->target.is_wildcard());
            if (const auto* lc = std::get_if<LongClickEvent>(&event))
                CHECK(lc->target.is_wildcard());
            if (const auto* sw = std::get_if<SwipeEvent>(&event))
                CHECK(sw->target.is_wildcard());
        }
    }
    CHECK(saw_wildcard);
}

TEST_CASE("gorilla over the coordinate pool degenerates to monkey") {
    const MonkeyPools pools = tiny_pools();
    CHECK(enum_keys(gorilla(1, Gen::unit(), /*coordinate_pool=*/true, pools),
                    20000) == enum_keys(monkey(1, pools), 20000));
}

TEST_CASE("gorilla interleaves the injected generator before each atom") {
    const GenPtr inject = Gen::device(DeviceEvent::ClickBack);
    const GenPtr g = gorilla(3, inject);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const TracePtr t = sample(*g, {seed});
        CHECK(denotes(*g, t));
        const auto atoms = flatten(t);
        REQUIRE(atoms.size() % 2 == 0); // inject, random, inject, random, ...
        for (std::size_t i = 0; i < atoms.size(); i += 2) {
            const auto* e = std::get_if<Trace::Event>(&atoms[i]->node);
            REQUIRE(e != nullptr);
            CHECK(std::get<DeviceEvent>(e->event) == DeviceEvent::ClickBack);
        }
    }
}

TEST_CASE("factory validation") {
    CHECK_THROWS_AS(Gen::repeat(0, Gen::skip()), std::invalid_argument);
    CHECK_THROWS_AS(sample(*Gen::sleep(IntChoose{5, 1}), {0}),
                    std::invalid_argument);
}
