#include "chimp/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chimp/coordinator.hpp"
#include "chimp/rng.hpp"
#include "chimp/script.hpp"

namespace chimp::cli {

namespace {

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("CHIMP_SEED");
    if (!v || !*v) return std::nullopt;
    try {
        return static_cast<std::uint64_t>(std::stoull(v));
    } catch (...) {
        return std::nullopt;
    }
}

std::uint64_t pick_seed(const std::optional<std::uint64_t>& flag,
                        const std::optional<std::uint64_t>& script) {
    if (flag) return *flag;
    if (script) return *script;
    if (auto env = env_seed()) return *env;
    return 0;
}

struct LoadedScript {
    std::shared_ptr<const AppModel> model; // may be null (no model given)
    Script script;
};

// Loads model (optional) and script, translating failures into exit code 2.
std::optional<LoadedScript> load_inputs(
    const std::optional<std::string>& model_path,
    const std::string& script_path, std::ostream& err) {
    LoadedScript out;
    if (model_path) {
        try {
            out.model = std::make_shared<AppModel>(load_model_file(*model_path));
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return std::nullopt;
        }
    }
    const auto source = read_file(script_path);
    if (!source) {
        err << "error: cannot open script file: " << script_path << "\n";
        return std::nullopt;
    }
    try {
        out.script =
            parse_script(*source, out.model ? &out.model->names : nullptr);
    } catch (const ParseError& e) {
        err << script_path << ": " << e.what() << "\n";
        return std::nullopt;
    }
    return out;
}

int outcome_exit_code(const SuiteSummary& s) {
    return (s.crashed == 0 && s.failed == 0) ? 0 : 1;
}

void print_report(const RunReport& r, const std::string& format,
                  std::ostream& out) {
    if (format == "jsonl") {
        out << report_to_jsonl(r) << "\n";
    } else {
        out << "[" << r.index << "] " << render_report(r) << "\n";
    }
}

} // namespace

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    auto loaded = load_inputs(opt.model_path, opt.script_path, err);
    if (!loaded) return 2;

    SuiteConfig cfg;
    cfg.samples = opt.samples.value_or(loaded->script.options.samples.value_or(100));
    cfg.seed = pick_seed(opt.seed, loaded->script.options.seed);
    if (opt.pool) cfg.pool_size = *opt.pool;
    const bool keep =
        opt.keep_state.value_or(loaded->script.options.keep_state.value_or(false));
    cfg.reset = keep ? SuiteConfig::Reset::Keep : SuiteConfig::Reset::Reinstall;
    cfg.property = loaded->script.property;

    if (opt.only_index) {
        if (*opt.only_index < 0 || *opt.only_index >= cfg.samples) {
            err << "error: --only-index out of range\n";
            return 2;
        }
        const RunReport r =
            run_sample(loaded->script.check_gen, loaded->model, cfg, *opt.only_index);
        print_report(r, opt.format, out);
        return (r.outcome.is_crash() || r.outcome.is_fail()) ? 1 : 0;
    }

    const SuiteResult result = run_suite(loaded->script.check_gen, loaded->model, cfg);
    for (const RunReport& r : result.reports) print_report(r, opt.format, out);
    if (opt.format == "jsonl") {
        out << "{\"summary\":{\"passed\":" << result.summary.passed
            << ",\"crashed\":" << result.summary.crashed
            << ",\"failed\":" << result.summary.failed
            << ",\"blocked\":" << result.summary.blocked << "}}\n";
    } else {
        out << render_summary(result.summary) << "\n";
    }
    return outcome_exit_code(result.summary);
}

int cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& err) {
    auto loaded = load_inputs(opt.model_path, opt.script_path, err);
    if (!loaded) return 2;
    const std::uint64_t seed = pick_seed(opt.seed, loaded->script.options.seed);
    for (int i = 0; i < opt.count; ++i) {
        const TracePtr t = sample(*loaded->script.check_gen,
                                  SampleCfg{Rng::child_seed(seed, i)});
        out << render(*t) << "\n";
    }
    return 0;
}

int cmd_check_member(const CheckMemberOptions& opt, std::ostream& out,
                     std::ostream& err) {
    auto loaded = load_inputs(opt.model_path, opt.script_path, err);
    if (!loaded) return 2;
    TracePtr trace;
    try {
        trace = parse_trace_text(opt.trace_text,
                                 loaded->model ? &loaded->model->names : nullptr);
    } catch (const ParseError& e) {
        err << "trace: " << e.what() << "\n";
        return 2;
    }
    if (denotes(*loaded->script.check_gen, trace)) {
        out << "member\n";
        return 0;
    }
    out << "not-member\n";
    return 1;
}

int cmd_replay(const ReplayOptions& opt, std::ostream& out, std::ostream& err) {
    std::shared_ptr<const AppModel> model;
    try {
        model = std::make_shared<AppModel>(load_model_file(opt.model_path));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    TracePtr trace;
    try {
        trace = parse_trace_text(opt.trace_text, &model->names);
    } catch (const ParseError& e) {
        err << "trace: " << e.what() << "\n";
        return 2;
    }
    if (!trace_is_concrete(*trace)) {
        err << "error: WildcardInReplay: replay traces must not contain '*'\n";
        return 2;
    }

    DeviceSim sim(model);
    DriverConfig dcfg;
    dcfg.rng_seed = pick_seed(opt.seed, std::nullopt);
    const RunResult rr = run(trace, sim, dcfg);

    RunReport report;
    report.index = 0;
    report.sample_seed = dcfg.rng_seed;
    report.outcome = rr.outcome;
    report.exec = rr.exec;
    report.steps = rr.steps;
    report.trace = trace;
    if (opt.format == "jsonl") out << report_to_jsonl(report) << "\n";
    else out << render_report(report) << "\n";
    return (rr.outcome.is_crash() || rr.outcome.is_fail()) ? 1 : 0;
}

int cmd_validate_model(const std::string& model_path, std::ostream& out,
                       std::ostream& err) {
    try {
        const AppModel m = load_model_file(model_path);
        out << "ok: " << (m.name.empty() ? model_path : m.name) << " ("
            << m.screens.size() << " screens, " << m.transitions.size()
            << " transitions)\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int main_entry(int argc, const char* const* argv) {
    CLI::App app{"property-based UI-trace testing against a simulated device"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run_cmd = app.add_subcommand("run", "sample a generator and execute the suite");
    run_cmd->add_option("model", run_opt.model_path, "app model (.json)")->required();
    run_cmd->add_option("script", run_opt.script_path, "test script (.chimp)")->required();
    std::optional<int> samples, pool, only_index;
    std::optional<std::uint64_t> run_seed;
    std::string reset_mode, run_format = "text";
    run_cmd->add_option("--samples", samples, "number of sampled traces");
    run_cmd->add_option("--seed", run_seed, "suite seed (default: $CHIMP_SEED or 0)");
    run_cmd->add_option("--pool", pool, "simulator pool size");
    run_cmd->add_option("--only-index", only_index, "run a single sample index");
    run_cmd->add_option("--reset", reset_mode, "reinstall|keep")
        ->check(CLI::IsMember({"reinstall", "keep"}));
    run_cmd->add_option("--format", run_format, "text|jsonl")
        ->check(CLI::IsMember({"text", "jsonl"}));

    SampleOptions sample_opt;
    auto* sample_cmd = app.add_subcommand("sample", "print sampled traces");
    sample_cmd->add_option("script", sample_opt.script_path, "test script")->required();
    std::optional<std::uint64_t> sample_seed;
    sample_cmd->add_option("-n,--count", sample_opt.count, "number of traces");
    sample_cmd->add_option("--seed", sample_seed, "sampling seed");
    std::string sample_model;
    sample_cmd->add_option("--model", sample_model, "model for #name resolution");

    CheckMemberOptions member_opt;
    auto* member_cmd =
        app.add_subcommand("check-member", "decide trace membership in the generator");
    member_cmd->add_option("script", member_opt.script_path, "test script")->required();
    member_cmd->add_option("trace", member_opt.trace_text, "trace expression")->required();
    std::string member_model;
    member_cmd->add_option("--model", member_model, "model for #name resolution");

    ReplayOptions replay_opt;
    auto* replay_cmd = app.add_subcommand("replay", "execute one concrete trace");
    replay_cmd->add_option("model", replay_opt.model_path, "app model")->required();
    replay_cmd->add_option("trace", replay_opt.trace_text, "trace expression")->required();
    std::optional<std::uint64_t> replay_seed;
    replay_cmd->add_option("--seed", replay_seed, "driver seed");
    replay_cmd->add_option("--format", replay_opt.format, "text|jsonl")
        ->check(CLI::IsMember({"text", "jsonl"}));

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate-model", "load and validate a model");
    validate_cmd->add_option("model", validate_path, "app model")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (run_cmd->parsed()) {
        run_opt.samples = samples;
        run_opt.seed = run_seed;
        run_opt.pool = pool;
        run_opt.only_index = only_index;
        if (!reset_mode.empty()) run_opt.keep_state = (reset_mode == "keep");
        run_opt.format = run_format;
        return cmd_run(run_opt, std::cout, std::cerr);
    }
    if (sample_cmd->parsed()) {
        sample_opt.seed = sample_seed;
        if (!sample_model.empty()) sample_opt.model_path = sample_model;
        return cmd_sample(sample_opt, std::cout, std::cerr);
    }
    if (member_cmd->parsed()) {
        if (!member_model.empty()) member_opt.model_path = member_model;
        return cmd_check_member(member_opt, std::cout, std::cerr);
    }
    if (replay_cmd->parsed()) {
        replay_opt.seed = replay_seed;
        return cmd_replay(replay_opt, std::cout, std::cerr);
    }
    return cmd_validate_model(validate_path, std::cout, std::cerr);
}

} // namespace chimp::cli
