#include "chimp/driver.hpp"

#include <algorithm>

namespace chimp {

const char* rule_name(Rule r) {
    switch (r) {
    case Rule::Enabled: return "Enabled";
    case Rule::Block1: return "Block-1";
    case Rule::Inferred: return "Inferred";
    case Rule::Block2: return "Block-2";
    case Rule::Seq1: return "Seq-1";
    case Rule::Seq2: return "Seq-2";
    case Rule::Seq3: return "Seq-3";
    case Rule::AssertPass: return "Assert-Pass";
    case Rule::AssertFail: return "Assert-Fail";
    case Rule::Try1: return "Try-1";
    case Rule::Try2: return "Try-2";
    case Rule::Try3: return "Try-3";
    case Rule::Qualified: return "Qualified";
    case Rule::Unqualified: return "Unqualified";
    case Rule::NoOp: return "No-Op";
    case Rule::Crash: return "Crash";
    case Rule::Trans: return "Trans";
    case Rule::End: return "End";
    }
    return "?";
}

UiEvent budget_exceeded_event() {
    return AppEvent{ClickEvent{IdSpec::of(text_id("<budget exceeded>"))}};
}

namespace {

// settle() folded into one deterministic result.
struct SettleOutcome {
    enum Kind { Ok, Crashed, Budget } kind = Ok;
    CrashReport report;
};

SettleOutcome checked_settle(Oracle& oracle) {
    try {
        if (auto crash = oracle.settle())
            return {SettleOutcome::Crashed, std::move(*crash)};
        return {};
    } catch (const SettleBudgetError&) {
        return {SettleOutcome::Budget, {}};
    }
}

StepResult done(Outcome outcome, ExecEvent emitted) {
    StepResult r;
    r.done = true;
    r.outcome = std::move(outcome);
    r.emitted = std::move(emitted);
    return r;
}

StepResult cont(TracePtr next, ExecEvent emitted) {
    StepResult r;
    r.next = std::move(next);
    r.emitted = std::move(emitted);
    return r;
}

// Runs settle right after an applied event; the event stays in the log even
// when handling it crashes the app.
StepResult after_apply(Oracle& oracle, RuleCounters& rules, UiEvent applied) {
    if (suspends_app(applied)) oracle.ensure_foreground();
    const SettleOutcome s = checked_settle(oracle);
    if (s.kind == SettleOutcome::Crashed) {
        rules.hit(Rule::Crash);
        return done(Outcome::crash(s.report), ExecEvent::of(std::move(applied)));
    }
    if (s.kind == SettleOutcome::Budget)
        return done(Outcome::block(budget_exceeded_event()),
                    ExecEvent::of(std::move(applied)));
    return cont(Trace::unit(), ExecEvent::of(std::move(applied)));
}

} // namespace

StepResult step(const TracePtr& t, Oracle& oracle, Rng& rng,
                RuleCounters& rules) {
    return std::visit(
        [&](const auto& n) -> StepResult {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Trace::Unit>) {
                rules.hit(Rule::NoOp);
                return done(Outcome::succ(), ExecEvent::silent());
            } else if constexpr (std::is_same_v<T, Trace::Event>) {
                if (is_concrete(n.event)) {
                    if (!oracle.try_apply(n.event)) {
                        rules.hit(Rule::Block1);
                        return done(Outcome::block(n.event), ExecEvent::silent());
                    }
                    rules.hit(Rule::Enabled);
                    return after_apply(oracle, rules, n.event);
                }
                // wildcard: resolve against the view hierarchy, trying
                // candidates in a seed-determined uniform random order
                const AppEvent& a = std::get<AppEvent>(n.event);
                std::vector<UiId> candidates = oracle.enumerate_candidates(a);
                for (std::size_t i = candidates.size(); i > 1; --i)
                    std::swap(candidates[i - 1], candidates[rng.below(i)]);
                for (const UiId& id : candidates) {
                    const UiEvent resolved{substitute_wildcard(a, id)};
                    if (oracle.try_apply(resolved)) {
                        rules.hit(Rule::Inferred);
                        return after_apply(oracle, rules, resolved);
                    }
                }
                rules.hit(Rule::Block2);
                return done(Outcome::block(n.event), ExecEvent::silent());
            } else if constexpr (std::is_same_v<T, Trace::Seq>) {
                if (n.first->is_unit()) {
                    const SettleOutcome s = checked_settle(oracle);
                    if (s.kind == SettleOutcome::Crashed) {
                        rules.hit(Rule::Crash);
                        return done(Outcome::crash(s.report), ExecEvent::silent());
                    }
                    if (s.kind == SettleOutcome::Budget)
                        return done(Outcome::block(budget_exceeded_event()),
                                    ExecEvent::silent());
                    rules.hit(Rule::Seq2);
                    return cont(n.second, ExecEvent::silent());
                }
                StepResult inner = step(n.first, oracle, rng, rules);
                if (!inner.done) {
                    rules.hit(Rule::Seq1);
                    return cont(Trace::seq(inner.next, n.second),
                                std::move(inner.emitted));
                }
                // the unit prefix is handled above, so ω ≠ succ here
                rules.hit(Rule::Seq3);
                return done(std::move(inner.outcome), std::move(inner.emitted));
            } else if constexpr (std::is_same_v<T, Trace::Assert>) {
                const SettleOutcome s = checked_settle(oracle);
                if (s.kind == SettleOutcome::Crashed) {
                    rules.hit(Rule::Crash);
                    return done(Outcome::crash(s.report), ExecEvent::silent());
                }
                if (s.kind == SettleOutcome::Budget)
                    return done(Outcome::block(budget_exceeded_event()),
                                ExecEvent::silent());
                if (oracle.holds(*n.prop)) {
                    rules.hit(Rule::AssertPass);
                    return cont(Trace::unit(), ExecEvent::silent());
                }
                rules.hit(Rule::AssertFail);
                return done(Outcome::fail(n.prop), ExecEvent::silent());
            } else if constexpr (std::is_same_v<T, Trace::Try>) {
                StepResult inner = step(n.body, oracle, rng, rules);
                if (!inner.done) {
                    rules.hit(Rule::Try1);
                    return cont(Trace::attempt(inner.next),
                                std::move(inner.emitted));
                }
                if (inner.outcome.is_succ() || inner.outcome.is_block()) {
                    rules.hit(Rule::Try2);
                    return cont(Trace::unit(), std::move(inner.emitted));
                }
                rules.hit(Rule::Try3);
                return done(std::move(inner.outcome), std::move(inner.emitted));
            } else { // Then
                const SettleOutcome s = checked_settle(oracle);
                if (s.kind == SettleOutcome::Crashed) {
                    rules.hit(Rule::Crash);
                    return done(Outcome::crash(s.report), ExecEvent::silent());
                }
                if (s.kind == SettleOutcome::Budget)
                    return done(Outcome::block(budget_exceeded_event()),
                                ExecEvent::silent());
                if (oracle.holds(*n.guard)) {
                    rules.hit(Rule::Qualified);
                    return cont(n.body, ExecEvent::silent());
                }
                rules.hit(Rule::Unqualified);
                return cont(Trace::unit(), ExecEvent::silent());
            }
        },
        t->node);
}

namespace {

class LoggingOracle final : public Oracle {
public:
    explicit LoggingOracle(Oracle& inner) : inner_(inner) {}

    std::vector<std::string> log;

    bool try_apply(const UiEvent& event) override {
        const bool applied = inner_.try_apply(event);
        log.push_back("try_apply " + render(event) +
                      (applied ? " -> applied" : " -> disabled"));
        return applied;
    }

    std::optional<CrashReport> settle() override {
        auto crash = inner_.settle();
        log.push_back(crash ? "settle -> crashed: " + crash->message
                            : "settle -> settled");
        return crash;
    }

    bool holds(const Prop& p) override {
        const bool r = inner_.holds(p);
        log.push_back("holds " + render(p) + (r ? " -> true" : " -> false"));
        return r;
    }

    std::vector<UiId> enumerate_candidates(const AppEvent& e) override {
        auto ids = inner_.enumerate_candidates(e);
        std::string line = "enumerate " + render(UiEvent{e}) + " -> [";
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i) line += ",";
            line += render(ids[i]);
        }
        log.push_back(line + "]");
        return ids;
    }

    bool ensure_foreground() override {
        const bool resumed = inner_.ensure_foreground();
        log.push_back(resumed ? "ensure_foreground -> resumed"
                              : "ensure_foreground -> already foreground");
        return resumed;
    }

private:
    Oracle& inner_;
};

} // namespace

RunResult run(const TracePtr& t, Oracle& oracle, const DriverConfig& cfg) {
    RunResult result;
    Rng rng(cfg.rng_seed);

    LoggingOracle logging(oracle);
    Oracle& backend = cfg.log_calls ? static_cast<Oracle&>(logging) : oracle;

    TracePtr current = t;
    for (;;) {
        if (result.steps >= cfg.max_steps) {
            result.outcome = Outcome::block(budget_exceeded_event());
            break;
        }
        StepResult s = step(current, backend, rng, result.rules);
        ++result.steps;
        result.exec.push_back(s.emitted);
        if (s.done) {
            result.rules.hit(Rule::End);
            result.outcome = std::move(s.outcome);
            break;
        }
        result.rules.hit(Rule::Trans);
        current = std::move(s.next);
    }
    if (cfg.log_calls) result.call_log = std::move(logging.log);
    return result;
}

} // namespace chimp
