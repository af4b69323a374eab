#include "chimp/coordinator.hpp"

#include <thread>

#include <json.hpp>

#include "chimp/rng.hpp"
#include "chimp/script.hpp"

namespace chimp {

using nlohmann::json;

namespace {

RunReport execute_one(const Gen& g, DeviceSim& sim, const SuiteConfig& cfg,
                      int index) {
    RunReport report;
    report.index = index;
    report.sample_seed = Rng::child_seed(cfg.seed, static_cast<std::uint64_t>(index));
    report.trace = sample(g, SampleCfg{report.sample_seed});

    TracePtr script = report.trace;
    if (cfg.property)
        script = Trace::seq(script, Trace::assertion(*cfg.property));

    DriverConfig dcfg = cfg.driver;
    dcfg.rng_seed = Rng::child_seed(report.sample_seed, 1);

    try {
        RunResult rr = run(script, sim, dcfg);
        report.outcome = std::move(rr.outcome);
        report.exec = std::move(rr.exec);
        report.steps = rr.steps;
    } catch (const std::exception& e) {
        // driver/model errors become crash-shaped reports; the suite goes on
        report.outcome = Outcome::crash(
            CrashReport{e.what(), "<driver>", {"<driver error>"}, 0});
    }
    return report;
}

} // namespace

RunReport run_sample(const GenPtr& g, std::shared_ptr<const AppModel> model,
                     const SuiteConfig& cfg, int index) {
    DeviceSim sim(std::move(model), 0, cfg.driver.mutate_budget);
    return execute_one(*g, sim, cfg, index);
}

SuiteResult run_suite(const GenPtr& g, std::shared_ptr<const AppModel> model,
                      const SuiteConfig& cfg) {
    if (cfg.samples < 1) throw std::invalid_argument("samples must be >= 1");
    int pool = cfg.pool_size;
    if (pool <= 0) pool = static_cast<int>(std::thread::hardware_concurrency());
    if (pool < 1) pool = 1;
    if (pool > cfg.samples) pool = cfg.samples;

    SuiteResult result;
    result.reports.resize(static_cast<std::size_t>(cfg.samples));

    // Slot s owns run indices s, s+pool, s+2*pool, ... — the assignment is
    // static so scheduling is observationally irrelevant.
    auto slot_worker = [&](int slot) {
        DeviceSim sim(model, 0, cfg.driver.mutate_budget);
        for (int i = slot; i < cfg.samples; i += pool) {
            if (cfg.reset == SuiteConfig::Reset::Reinstall && i != slot)
                sim.reset();
            result.reports[static_cast<std::size_t>(i)] =
                execute_one(*g, sim, cfg, i);
        }
    };

    if (pool == 1) {
        slot_worker(0);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(pool));
        for (int s = 0; s < pool; ++s) workers.emplace_back(slot_worker, s);
        for (std::thread& t : workers) t.join();
    }

    for (const RunReport& r : result.reports) {
        if (r.outcome.is_succ()) ++result.summary.passed;
        else if (r.outcome.is_crash()) ++result.summary.crashed;
        else if (r.outcome.is_fail()) ++result.summary.failed;
        else ++result.summary.blocked;
        if (!result.summary.first_failure &&
            (r.outcome.is_crash() || r.outcome.is_fail()))
            result.summary.first_failure = r;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace {

std::string after_clause(const char* head, const ExecTrace& exec) {
    const std::string ex = render(exec);
    std::string out = head;
    out += " after:";
    if (!ex.empty()) out += " " + ex;
    return out;
}

} // namespace

std::string render_report(const RunReport& r) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Outcome::Succ>) {
                return after_clause("OK", r.exec);
            } else if constexpr (std::is_same_v<T, Outcome::Crash>) {
                std::string out = after_clause("Crashed", r.exec);
                out += "\nStack trace: " + n.report.message;
                for (const std::string& f : n.report.frames) out += "\n" + f;
                return out;
            } else if constexpr (std::is_same_v<T, Outcome::Fail>) {
                return "Failed assert " + render(*n.prop) + " " +
                       after_clause("", r.exec).substr(1);
            } else {
                return after_clause("Blocked", r.exec);
            }
        },
        r.outcome.node);
}

std::string render_summary(const SuiteSummary& s) {
    return "passed: " + std::to_string(s.passed) +
           "  crashed: " + std::to_string(s.crashed) +
           "  failed: " + std::to_string(s.failed) +
           "  blocked: " + std::to_string(s.blocked);
}

TracePtr replay_trace(const RunReport& r) {
    std::vector<TracePtr> atoms;
    for (const ExecEvent& e : r.exec)
        if (!e.is_silent()) atoms.push_back(Trace::event(*e.event));
    if (const auto* fail = std::get_if<Outcome::Fail>(&r.outcome.node))
        atoms.push_back(Trace::assertion(fail->prop));
    else if (const auto* block = std::get_if<Outcome::Block>(&r.outcome.node))
        atoms.push_back(Trace::event(block->event));
    if (atoms.empty()) return Trace::unit();
    TracePtr out = atoms.back();
    for (std::size_t i = atoms.size() - 1; i-- > 0;)
        out = Trace::seq(atoms[i], out);
    return out;
}

// ---------------------------------------------------------------------------
// JSONL records
// ---------------------------------------------------------------------------

std::string report_to_jsonl(const RunReport& r) {
    json doc;
    doc["index"] = r.index;
    doc["sample_seed"] = r.sample_seed;
    doc["steps"] = r.steps;
    doc["trace"] = render(*r.trace);

    json exec = json::array();
    for (const ExecEvent& e : r.exec) {
        if (e.is_silent()) exec.push_back(nullptr);
        else exec.push_back(render(*e.event));
    }
    doc["exec"] = std::move(exec);

    json outcome;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Outcome::Succ>) {
                outcome["kind"] = "succ";
            } else if constexpr (std::is_same_v<T, Outcome::Crash>) {
                outcome["kind"] = "crash";
                outcome["report"] = {{"message", n.report.message},
                                     {"screen", n.report.screen},
                                     {"frames", n.report.frames},
                                     {"event_index", n.report.event_index}};
            } else if constexpr (std::is_same_v<T, Outcome::Fail>) {
                outcome["kind"] = "fail";
                outcome["prop"] = render(*n.prop);
            } else {
                outcome["kind"] = "block";
                outcome["event"] = render(n.event);
            }
        },
        r.outcome.node);
    doc["outcome"] = std::move(outcome);
    return doc.dump();
}

namespace {

UiEvent parse_event_text(const std::string& s) {
    TracePtr t = parse_trace_text(s);
    const auto* ev = std::get_if<Trace::Event>(&t->node);
    if (!ev) throw std::runtime_error("not a single event: " + s);
    return ev->event;
}

} // namespace

RunReport report_from_jsonl(const std::string& line) {
    const json doc = json::parse(line);
    RunReport r;
    r.index = doc.at("index").get<int>();
    r.sample_seed = doc.at("sample_seed").get<std::uint64_t>();
    r.steps = doc.at("steps").get<int>();
    r.trace = parse_trace_text(doc.at("trace").get<std::string>());
    for (const json& e : doc.at("exec")) {
        if (e.is_null()) r.exec.push_back(ExecEvent::silent());
        else r.exec.push_back(ExecEvent::of(parse_event_text(e.get<std::string>())));
    }
    const json& o = doc.at("outcome");
    const std::string kind = o.at("kind").get<std::string>();
    if (kind == "succ") {
        r.outcome = Outcome::succ();
    } else if (kind == "crash") {
        const json& rep = o.at("report");
        CrashReport cr;
        cr.message = rep.at("message").get<std::string>();
        cr.screen = rep.at("screen").get<std::string>();
        for (const json& f : rep.at("frames"))
            cr.frames.push_back(f.get<std::string>());
        cr.event_index = rep.at("event_index").get<int>();
        r.outcome = Outcome::crash(std::move(cr));
    } else if (kind == "fail") {
        r.outcome = Outcome::fail(parse_prop_text(o.at("prop").get<std::string>()));
    } else if (kind == "block") {
        r.outcome = Outcome::block(parse_event_text(o.at("event").get<std::string>()));
    } else {
        throw std::runtime_error("unknown outcome kind: " + kind);
    }
    return r;
}

bool report_equal(const RunReport& a, const RunReport& b) {
    return a.index == b.index && a.sample_seed == b.sample_seed &&
           a.steps == b.steps && outcome_equal(a.outcome, b.outcome) &&
           a.exec == b.exec && trace_equal(*a.trace, *b.trace);
}

} // namespace chimp
