#include <doctest.h>

#include "chimp/script.hpp"
#include "chimp/trace.hpp"

#include "helpers.hpp"

using namespace chimp;
using namespace chimp::test;

TEST_CASE("is_concrete") {
    CHECK_FALSE(is_concrete(UiEvent{click_any()}));
    CHECK(is_concrete(UiEvent{DeviceEvent::Rotate}));
    CHECK(is_concrete(UiEvent{AppEvent{
        TypeEvent{IdSpec::of(text_id("user")), "test"}}}));
    CHECK(is_concrete(UiEvent{AppEvent{SkipEvent{}}}));
    CHECK_FALSE(is_concrete(AppEvent{SwipeEvent{IdSpec::wildcard(), {0, -300}}}));
}

TEST_CASE("substitute_wildcard") {
    const AppEvent resolved = substitute_wildcard(click_any(), num_id(7));
    CHECK(resolved == click(7));

    const AppEvent typed = substitute_wildcard(
        AppEvent{TypeEvent{IdSpec::wildcard(), "hi"}}, text_id("box"));
    CHECK(typed == AppEvent{TypeEvent{IdSpec::of(text_id("box")), "hi"}});
    CHECK(is_concrete(typed));

    CHECK_THROWS_AS(substitute_wildcard(click(1), num_id(2)), NoWildcardError);
}

TEST_CASE("xy identifiers are non-negative") {
    CHECK_THROWS_AS(xy_id(-1, 2), std::invalid_argument);
    CHECK_THROWS_AS(xy_id(0, -5), std::invalid_argument);
    CHECK(xy_id(0, 0) == UiId{XyPair{0, 0}});
}

TEST_CASE("predicate names are validated") {
    CHECK_THROWS_AS(Prop::pred(""), std::invalid_argument);
    CHECK_THROWS_AS(Prop::pred("9lives"), std::invalid_argument);
    CHECK_THROWS_AS(Prop::pred("has space"), std::invalid_argument);
    CHECK_NOTHROW(Prop::pred("mediaPlayerIsPlaying"));
    CHECK_NOTHROW(Prop::pred("count_2"));
}

TEST_CASE("normalize: monoid laws") {
    const TracePtr a = ev(click(1));
    const TracePtr b = ev(DeviceEvent::Rotate);
    const TracePtr c = Trace::assertion(Prop::pred("p"));

    CHECK(trace_equal(*normalize(Trace::seq(Trace::seq(a, b), c)),
                      *normalize(Trace::seq(a, Trace::seq(b, c)))));
    CHECK(trace_equal(*normalize(Trace::seq(Trace::unit(), c)), *c));
    CHECK(trace_equal(*normalize(Trace::seq(c, Trace::unit())), *c));
    CHECK(normalize(Trace::unit())->is_unit());
    CHECK(normalize(Trace::seq(Trace::unit(), Trace::unit()))->is_unit());
}

TEST_CASE("normalize recurses into try/then bodies") {
    const TracePtr messy = Trace::attempt(
        Trace::seq(Trace::unit(), Trace::seq(ev(click(1)), Trace::unit())));
    const TracePtr tidy = Trace::attempt(ev(click(1)));
    CHECK(trace_equal(*normalize(messy), *normalize(tidy)));
}

TEST_CASE("normalize properties over random traces") {
    Rng meta(2024);
    for (int i = 0; i < 300; ++i) {
        const GenPtr g = random_gen(meta, 5);
        const TracePtr t = sample(*g, SampleCfg{meta.next()});
        const TracePtr n1 = normalize(t);
        // idempotent
        CHECK(trace_equal(*n1, *normalize(n1)));
        // preserves the flattened atom sequence
        const auto before = flatten(t);
        const auto after = flatten(n1);
        REQUIRE(before.size() == after.size());
        for (std::size_t k = 0; k < before.size(); ++k)
            CHECK(trace_equal(*before[k], *after[k]));
    }
}

TEST_CASE("render: report syntax") {
    CHECK(render(*Trace::seq(ev(click(5)), ev(DeviceEvent::Rotate))) ==
          "Click(5) :>> Rotate");
    CHECK(render(*Trace::assertion(
              Prop::pred("isDisplayed", {std::string("Welcome")}))) ==
          "assert isDisplayed(\"Welcome\")");

    const ExecTrace exec{ExecEvent::silent(),
                         ExecEvent::of(UiEvent{DeviceEvent::Rotate}),
                         ExecEvent::silent()};
    CHECK(render(exec) == "Rotate");
    CHECK(render(ExecTrace{ExecEvent::silent()}).empty());
}

TEST_CASE("render: events") {
    CHECK(render(UiEvent{click_any()}) == "Click(*)");
    CHECK(render(UiEvent{AppEvent{SwipeEvent{IdSpec::of(num_id(3)), {0, -300}}}}) ==
          "Swipe(3,(0,-300))");
    CHECK(render(UiEvent{AppEvent{PinchEvent{{1, 2}, {3, 4}}}}) ==
          "Pinch((1,2),(3,4))");
    CHECK(render(UiEvent{AppEvent{TypeEvent{IdSpec::of(text_id("box")), "a\"b"}}}) ==
          "Type(\"box\",\"a\\\"b\")");
    CHECK(render(UiEvent{AppEvent{SleepEvent{150}}}) == "Sleep(150)");
    CHECK(render(UiEvent{AppEvent{SkipEvent{}}}) == "Skip");
}

TEST_CASE("render: property precedence") {
    const PropPtr p = Prop::pred("p");
    const PropPtr q = Prop::pred("q");
    const PropPtr r = Prop::pred("r");
    CHECK(render(*Prop::implies(Prop::conj(p, q), r)) == "p /\\ q => r");
    CHECK(render(*Prop::conj(p, Prop::disj(q, r))) == "p /\\ (q \\/ r)");
    CHECK(render(*Prop::negate(Prop::conj(p, q))) == "!(p /\\ q)");
    CHECK(render(*Prop::disj(Prop::disj(p, q), r)) == "(p \\/ q) \\/ r");
}

TEST_CASE("render/parse round trip on random traces") {
    Rng meta(77);
    for (int i = 0; i < 500; ++i) {
        const GenPtr g = random_gen(meta, 5);
        const TracePtr t = sample(*g, SampleCfg{meta.next()});
        const std::string text = render(*t);
        CAPTURE(text);
        const TracePtr back = parse_trace_text(text);
        CHECK(normal_equal(back, t));
    }
}

TEST_CASE("trace_is_concrete descends into wrappers") {
    CHECK(trace_is_concrete(*seq_of({ev(click(1)), ev(DeviceEvent::Rotate)})));
    CHECK_FALSE(trace_is_concrete(*Trace::attempt(ev(click_any()))));
    CHECK_FALSE(trace_is_concrete(
        *Trace::guarded(Prop::pred("p"), ev(click_any()))));
    CHECK(trace_is_concrete(*Trace::unit()));
}

TEST_CASE("outcome equality") {
    CHECK(outcome_equal(Outcome::succ(), Outcome::succ()));
    CHECK_FALSE(outcome_equal(Outcome::succ(),
                              Outcome::block(UiEvent{DeviceEvent::Rotate})));
    CHECK(outcome_equal(Outcome::fail(Prop::pred("p")),
                        Outcome::fail(Prop::pred("p"))));
    CHECK_FALSE(outcome_equal(Outcome::fail(Prop::pred("p")),
                              Outcome::fail(Prop::pred("q"))));
}
