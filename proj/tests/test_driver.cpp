#include <doctest.h>

#include <set>

#include "chimp/driver.hpp"

#include "helpers.hpp"

using namespace chimp;
using namespace chimp::test;

namespace {

// Fully scripted backend: events apply iff their rendered form is listed,
// properties hold iff listed, settle can crash at a chosen call index.
class ScriptedOracle final : public Oracle {
public:
    std::set<std::string> enabled;
    std::set<std::string> true_props;
    std::vector<UiId> candidates;
    int crash_at_settle = -1;
    bool blow_budget = false;
    CrashReport report{"boom", "main", {"Frame.top"}, 0};

    int settle_calls = 0;
    int foreground_calls = 0;
    std::vector<std::string> applied;

    bool try_apply(const UiEvent& e) override {
        if (enabled.count(render(e))) {
            applied.push_back(render(e));
            return true;
        }
        return false;
    }
    std::optional<CrashReport> settle() override {
        if (blow_budget) throw SettleBudgetError("scripted budget blow-up");
        if (settle_calls++ == crash_at_settle) return report;
        return std::nullopt;
    }
    bool holds(const Prop& p) override { return true_props.count(render(p)) > 0; }
    std::vector<UiId> enumerate_candidates(const AppEvent&) override {
        return candidates;
    }
    bool ensure_foreground() override {
        ++foreground_calls;
        return true;
    }
};

StepResult one_step(const TracePtr& t, ScriptedOracle& oracle,
                    std::uint64_t seed = 0) {
    Rng rng(seed);
    RuleCounters rules;
    return step(t, oracle, rng, rules);
}

} // namespace

TEST_CASE("step: (Enabled) applies a concrete event") {
    ScriptedOracle oracle;
    oracle.enabled = {"Click(1)"};
    const StepResult r = one_step(ev(click(1)), oracle);
    REQUIRE_FALSE(r.done);
    CHECK(r.next->is_unit());
    CHECK(r.emitted == ExecEvent::of(UiEvent{click(1)}));
    CHECK(oracle.settle_calls == 1); // event handling settles eagerly
}

TEST_CASE("step: (Block-1) on a disabled concrete event") {
    ScriptedOracle oracle;
    const StepResult r = one_step(ev(click(1)), oracle);
    REQUIRE(r.done);
    CHECK(outcome_equal(r.outcome, Outcome::block(UiEvent{click(1)})));
    CHECK(r.emitted.is_silent());
}

TEST_CASE("step: (No-Op) finishes with success") {
    ScriptedOracle oracle;
    const StepResult r = one_step(Trace::unit(), oracle);
    REQUIRE(r.done);
    CHECK(r.outcome.is_succ());
}

TEST_CASE("step: (Inferred) resolves the wildcard to an enabled candidate") {
    ScriptedOracle oracle;
    oracle.candidates = {num_id(1), num_id(2), num_id(3)};
    oracle.enabled = {"Click(2)"};
    const StepResult r = one_step(ev(click_any()), oracle);
    REQUIRE_FALSE(r.done);
    CHECK(r.emitted == ExecEvent::of(UiEvent{click(2)}));
}

TEST_CASE("step: (Block-2) when every candidate is disabled") {
    ScriptedOracle oracle;
    oracle.candidates = {num_id(1), num_id(2)};
    const StepResult r = one_step(ev(click_any()), oracle);
    REQUIRE(r.done);
    CHECK(outcome_equal(r.outcome, Outcome::block(UiEvent{click_any()})));

    oracle.candidates.clear(); // empty hierarchy also blocks
    const StepResult r2 = one_step(ev(click_any()), oracle);
    REQUIRE(r2.done);
    CHECK(r2.outcome.is_block());
}

TEST_CASE("step: try absorbs blocks, propagates crashes and failures") {
    ScriptedOracle oracle;
    // blocked inside try: continue (spec example: absent widget 99)
    const StepResult r = one_step(Trace::attempt(ev(click(99))), oracle);
    REQUIRE_FALSE(r.done);
    CHECK(r.next->is_unit());
    CHECK(r.emitted.is_silent());

    // failed assert inside try: terminal
    const StepResult f =
        one_step(Trace::attempt(Trace::assertion(Prop::pred("p"))), oracle);
    REQUIRE(f.done);
    CHECK(f.outcome.is_fail());

    // crash inside try: terminal, event kept in the log
    ScriptedOracle crashing;
    crashing.enabled = {"Click(1)"};
    crashing.crash_at_settle = 0;
    const StepResult c = one_step(Trace::attempt(ev(click(1))), crashing);
    REQUIRE(c.done);
    CHECK(c.outcome.is_crash());
    CHECK(c.emitted == ExecEvent::of(UiEvent{click(1)}));
}

TEST_CASE("step: assert and then consult the property oracle after settling") {
    ScriptedOracle oracle;
    oracle.true_props = {"p"};

    CHECK_FALSE(one_step(Trace::assertion(Prop::pred("p")), oracle).done);
    const StepResult fail = one_step(Trace::assertion(Prop::pred("q")), oracle);
    REQUIRE(fail.done);
    CHECK(outcome_equal(fail.outcome, Outcome::fail(Prop::pred("q"))));

    const TracePtr body = ev(click(7));
    const StepResult qual =
        one_step(Trace::guarded(Prop::pred("p"), body), oracle);
    REQUIRE_FALSE(qual.done);
    CHECK(trace_equal(*qual.next, *body)); // (Qualified) enters the body
    const StepResult unqual =
        one_step(Trace::guarded(Prop::pred("q"), body), oracle);
    REQUIRE_FALSE(unqual.done);
    CHECK(unqual.next->is_unit()); // (Unqualified) skips it
    CHECK(oracle.settle_calls == 4);
}

TEST_CASE("step: sequencing recurses and propagates failures") {
    ScriptedOracle oracle;
    oracle.enabled = {"Click(1)"};
    const TracePtr t = Trace::seq(ev(click(1)), ev(click(2)));
    const StepResult r = one_step(t, oracle);
    REQUIRE_FALSE(r.done); // (Seq-1)
    // (Seq-3): blocked prefix ends the whole sequence
    const StepResult b = one_step(Trace::seq(ev(click(9)), ev(click(1))), oracle);
    REQUIRE(b.done);
    CHECK(outcome_equal(b.outcome, Outcome::block(UiEvent{click(9)})));
    // (Seq-2): unit prefix settles and moves on
    const StepResult s = one_step(Trace::seq(Trace::unit(), ev(click(1))), oracle);
    REQUIRE_FALSE(s.done);
    CHECK(trace_equal(*s.next, *ev(click(1))));
}

TEST_CASE("run: counter-style trace succeeds with one event per click") {
    ScriptedOracle oracle;
    oracle.enabled = {"Click(1)"};
    oracle.true_props = {"count(0)", "count(1)"};
    const TracePtr t = seq_of({
        Trace::assertion(Prop::pred("count", {std::int64_t{0}})),
        ev(click(1)),
        Trace::assertion(Prop::pred("count", {std::int64_t{1}})),
    });
    const RunResult r = run(t, oracle, {});
    CHECK(r.outcome.is_succ());
    int events = 0;
    for (const ExecEvent& e : r.exec)
        if (!e.is_silent()) ++events;
    CHECK(events == 1);
}

TEST_CASE("run: unit trace") {
    ScriptedOracle oracle;
    const RunResult r = run(Trace::unit(), oracle, {});
    CHECK(r.outcome.is_succ());
    CHECK(r.steps == 1);
    REQUIRE(r.exec.size() == 1);
    CHECK(r.exec[0].is_silent());
    CHECK(r.rules[Rule::NoOp] == 1);
    CHECK(r.rules[Rule::End] == 1);
    CHECK(r.rules[Rule::Trans] == 0);
}

TEST_CASE("run: determinism of outcome, exec and steps") {
    auto scenario = [] {
        ScriptedOracle o;
        o.candidates = {num_id(1), num_id(2), num_id(3), num_id(4)};
        o.enabled = {"Click(1)", "Click(3)", "Rotate"};
        return o;
    };
    const TracePtr t = seq_of({ev(click_any()), ev(DeviceEvent::Rotate),
                               ev(click_any())});
    DriverConfig cfg;
    cfg.rng_seed = 99;
    ScriptedOracle a = scenario();
    ScriptedOracle b = scenario();
    const RunResult ra = run(t, a, cfg);
    const RunResult rb = run(t, b, cfg);
    CHECK(outcome_equal(ra.outcome, rb.outcome));
    CHECK(ra.exec == rb.exec);
    CHECK(ra.steps == rb.steps);
}

TEST_CASE("run: wildcard candidates are tried in a seeded random order") {
    // all candidates enabled: the chosen one varies with the seed
    std::set<std::string> chosen;
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        ScriptedOracle o;
        o.candidates = {num_id(1), num_id(2), num_id(3)};
        o.enabled = {"Click(1)", "Click(2)", "Click(3)"};
        DriverConfig cfg;
        cfg.rng_seed = seed;
        const RunResult r = run(ev(click_any()), o, cfg);
        REQUIRE(r.outcome.is_succ());
        for (const ExecEvent& e : r.exec) {
            if (e.is_silent()) continue;
            CHECK(is_concrete(*e.event)); // (Inferred) substitutes before emitting
            chosen.insert(render(*e.event));
        }
    }
    CHECK(chosen.size() == 3);
}

TEST_CASE("run: prefix soundness and block fidelity via the call log") {
    ScriptedOracle oracle;
    oracle.enabled = {"Click(1)", "Rotate"};
    DriverConfig cfg;
    cfg.log_calls = true;
    const TracePtr t = seq_of({ev(click(1)), ev(DeviceEvent::Rotate), ev(click(5))});
    const RunResult r = run(t, oracle, cfg);
    REQUIRE(outcome_equal(r.outcome, Outcome::block(UiEvent{click(5)})));

    // every exec event has a matching applied try_apply, in order
    std::vector<std::string> applies;
    for (const std::string& line : r.call_log)
        if (line.rfind("try_apply ", 0) == 0 &&
            line.find("-> applied") != std::string::npos)
            applies.push_back(line);
    std::size_t next = 0;
    for (const ExecEvent& e : r.exec) {
        if (e.is_silent()) continue;
        REQUIRE(next < applies.size());
        CHECK(applies[next].find(render(*e.event)) != std::string::npos);
        ++next;
    }
    CHECK(next == applies.size());

    // the final call is the disabled attempt on the blocked event
    REQUIRE_FALSE(r.call_log.empty());
    CHECK(r.call_log.back() == "try_apply Click(5) -> disabled");
}

TEST_CASE("run: block fidelity for wildcards covers every candidate") {
    ScriptedOracle oracle;
    oracle.candidates = {num_id(7), num_id(8)};
    DriverConfig cfg;
    cfg.log_calls = true;
    const RunResult r = run(ev(click_any()), oracle, cfg);
    REQUIRE(r.outcome.is_block());
    int disabled = 0;
    for (const std::string& line : r.call_log)
        if (line.find("-> disabled") != std::string::npos) ++disabled;
    CHECK(disabled == 2);
}

TEST_CASE("run: try absorption keeps the exec prefix") {
    ScriptedOracle a;
    a.enabled = {"Click(1)", "Rotate"};
    const TracePtr blocking = seq_of({ev(click(1)), ev(click(9))});
    const RunResult blocked = run(blocking, a, {});
    REQUIRE(blocked.outcome.is_block());

    ScriptedOracle b;
    b.enabled = {"Click(1)", "Rotate"};
    const TracePtr wrapped =
        Trace::seq(Trace::attempt(blocking), ev(DeviceEvent::Rotate));
    const RunResult cont = run(wrapped, b, {});
    REQUIRE(cont.outcome.is_succ());

    // same applied prefix, then the continuation event
    std::vector<std::string> pre, post;
    for (const ExecEvent& e : blocked.exec)
        if (!e.is_silent()) pre.push_back(render(*e.event));
    for (const ExecEvent& e : cont.exec)
        if (!e.is_silent()) post.push_back(render(*e.event));
    REQUIRE(post.size() == pre.size() + 1);
    for (std::size_t i = 0; i < pre.size(); ++i) CHECK(post[i] == pre[i]);
    CHECK(post.back() == "Rotate");
}

TEST_CASE("run: normalization is semantics-preserving") {
    // the same events apply and the same outcome falls out whether or not the
    // trace was normalized first (unit steps only add silent transitions)
    Rng meta(6060);
    for (int i = 0; i < 120; ++i) {
        const GenPtr g = random_gen(meta, 5);
        const TracePtr t = sample(*g, SampleCfg{meta.next()});
        const std::uint64_t driver_seed = meta.next();

        auto scenario = [] {
            ScriptedOracle o;
            o.enabled = {"Click(1)", "Click(2)", "Rotate", "Skip", "ClickHome",
                         "Type(1,\"x\")", "Sleep(0)", "Sleep(1)"};
            o.true_props = {"p", "q(1)"};
            o.candidates = {num_id(1), num_id(2), num_id(3)};
            return o;
        };
        DriverConfig cfg;
        cfg.rng_seed = driver_seed;
        ScriptedOracle a = scenario();
        ScriptedOracle b = scenario();
        const RunResult plain = run(t, a, cfg);
        const RunResult normal = run(normalize(t), b, cfg);

        CAPTURE(render(*t));
        CHECK(outcome_equal(plain.outcome, normal.outcome));
        CHECK(render(plain.exec) == render(normal.exec)); // same applied events
    }
}

TEST_CASE("run: suspending events trigger the kick-back resume") {
    ScriptedOracle oracle;
    oracle.enabled = {"ClickHome", "Rotate", "Settings", "ClickMenu"};
    const TracePtr t = seq_of({ev(DeviceEvent::ClickHome), ev(DeviceEvent::Rotate),
                               ev(DeviceEvent::Settings), ev(DeviceEvent::ClickMenu)});
    const RunResult r = run(t, oracle, {});
    REQUIRE(r.outcome.is_succ());
    CHECK(oracle.foreground_calls == 3); // Rotate does not suspend
}

TEST_CASE("run: step budget reports a synthetic blocked event") {
    ScriptedOracle oracle;
    oracle.enabled = {"Skip"};
    // a long chain of skips exceeds a tiny step budget
    std::vector<TracePtr> parts(50, ev(AppEvent{SkipEvent{}}));
    DriverConfig cfg;
    cfg.max_steps = 10;
    const RunResult r = run(seq_of(parts), oracle, cfg);
    REQUIRE(r.outcome.is_block());
    CHECK(outcome_equal(r.outcome, Outcome::block(budget_exceeded_event())));
    CHECK(r.steps == 10);
}

TEST_CASE("run: settle budget exhaustion also blocks") {
    ScriptedOracle oracle;
    oracle.enabled = {"Click(1)"};
    oracle.blow_budget = true;
    const RunResult r = run(ev(click(1)), oracle, {});
    REQUIRE(outcome_equal(r.outcome, Outcome::block(budget_exceeded_event())));
    // the applied event stays in the log
    REQUIRE(r.exec.size() == 1);
    CHECK(r.exec[0] == ExecEvent::of(UiEvent{click(1)}));
}

TEST_CASE("run: crash surfaced by settle ends the run with the event logged") {
    ScriptedOracle oracle;
    oracle.enabled = {"Click(1)"};
    oracle.crash_at_settle = 0;
    const RunResult r = run(ev(click(1)), oracle, {});
    REQUIRE(r.outcome.is_crash());
    CHECK(std::get<Outcome::Crash>(r.outcome.node).report.message == "boom");
    REQUIRE(r.exec.size() == 1);
    CHECK(r.exec[0] == ExecEvent::of(UiEvent{click(1)}));
    CHECK(r.rules[Rule::Crash] == 1);
}
