#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "chimp/oracle.hpp"
#include "chimp/rng.hpp"
#include "chimp/trace.hpp"

namespace chimp {

// Small-step and big-step transition rules. Every rule the interpreter can
// fire is counted, which lets tests assert full rule coverage.
enum class Rule {
    Enabled,
    Block1,
    Inferred,
    Block2,
    Seq1,
    Seq2,
    Seq3,
    AssertPass,
    AssertFail,
    Try1,
    Try2,
    Try3,
    Qualified,
    Unqualified,
    NoOp,
    Crash, // crash surfaced by settle
    Trans,
    End,
};

constexpr std::size_t kRuleCount = static_cast<std::size_t>(Rule::End) + 1;

const char* rule_name(Rule r);

struct RuleCounters {
    std::array<std::uint64_t, kRuleCount> counts{};

    void hit(Rule r) { ++counts[static_cast<std::size_t>(r)]; }
    std::uint64_t operator[](Rule r) const {
        return counts[static_cast<std::size_t>(r)];
    }
    void merge(const RuleCounters& other) {
        for (std::size_t i = 0; i < kRuleCount; ++i)
            counts[i] += other.counts[i];
    }
    bool all_covered() const {
        for (std::uint64_t c : counts)
            if (c == 0) return false;
        return true;
    }
};

struct DriverConfig {
    int max_steps = 10'000;      // step budget before a run counts as diverging
    std::uint64_t rng_seed = 0;  // drives wildcard candidate ordering
    int mutate_budget = 1'000;   // settle iterations per call (backend budget)
    bool log_calls = false;      // record every oracle invocation
};

struct RunResult {
    Outcome outcome = Outcome::succ();
    ExecTrace exec;
    int steps = 0;
    RuleCounters rules;
    std::vector<std::string> call_log; // populated when log_calls is set
};

// The synthetic event reported when the step or settle budget is exhausted.
UiEvent budget_exceeded_event();

// One small-step transition. Returns the follow-up trace (intermediate) or
// the terminal outcome, along with the executed event for the step.
struct StepResult {
    bool done = false;
    TracePtr next;   // set when !done
    Outcome outcome = Outcome::succ(); // set when done
    ExecEvent emitted = ExecEvent::silent();
};

StepResult step(const TracePtr& t, Oracle& oracle, Rng& rng,
                RuleCounters& rules);

// Iterates step to a terminal outcome. Deterministic given the trace, the
// initial backend state and cfg.rng_seed.
RunResult run(const TracePtr& t, Oracle& oracle, const DriverConfig& cfg);

} // namespace chimp
