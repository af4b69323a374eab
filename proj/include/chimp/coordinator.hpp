#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chimp/device_sim.hpp"
#include "chimp/driver.hpp"
#include "chimp/genlang.hpp"

namespace chimp {

struct SuiteConfig {
    int samples = 100;
    std::uint64_t seed = 0;
    int pool_size = 0; // 0 = available parallelism
    enum class Reset { Reinstall, Keep } reset = Reset::Reinstall;
    std::optional<PropPtr> property; // runs τ :>> assert P when present
    DriverConfig driver;
};

struct RunReport {
    int index = 0;
    std::uint64_t sample_seed = 0;
    Outcome outcome = Outcome::succ();
    ExecTrace exec;
    int steps = 0;
    TracePtr trace; // the sampled script (without the appended property assert)
};

struct SuiteSummary {
    int passed = 0, crashed = 0, failed = 0, blocked = 0;
    std::optional<RunReport> first_failure; // lowest-index crash or fail
};

struct SuiteResult {
    SuiteSummary summary;
    std::vector<RunReport> reports; // ordered by index
};

// Runs `samples` sampled traces against a pool of simulator instances.
// Sample i uses seed child_seed(cfg.seed, i) so any run is reproducible in
// isolation. Under Reinstall (the default) the output is byte-identical for
// any pool size; under Keep each pool slot chains device state across the
// runs it owns (deterministic per pool size via static slot assignment).
SuiteResult run_suite(const GenPtr& g, std::shared_ptr<const AppModel> model,
                      const SuiteConfig& cfg);

// One run at the given index with the full seed derivation of run_suite,
// always from a fresh device state.
RunReport run_sample(const GenPtr& g, std::shared_ptr<const AppModel> model,
                     const SuiteConfig& cfg, int index);

// Paper-format report line(s): "OK after:", "Crashed after:" + stack trace,
// "Failed assert P after:", "Blocked after:".
std::string render_report(const RunReport& r);

std::string render_summary(const SuiteSummary& s);

// The concrete trace that reproduces the report's outcome on a fresh device:
// the executed events, plus the failed assert or the blocked event when the
// outcome needs them.
TracePtr replay_trace(const RunReport& r);

// One-line JSON record per report, and its inverse.
std::string report_to_jsonl(const RunReport& r);
RunReport report_from_jsonl(const std::string& line);
bool report_equal(const RunReport& a, const RunReport& b);

} // namespace chimp
