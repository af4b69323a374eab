#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace chimp::cli {

// Exit codes: 0 ok (no crash/fail), 1 crash or failed assert, 2 load/parse
// error.

struct RunOptions {
    std::string model_path;
    std::string script_path;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<int> pool;
    std::optional<int> only_index;
    std::optional<bool> keep_state; // --reset keep|reinstall
    std::string format = "text";    // text | jsonl
};

struct SampleOptions {
    std::string script_path;
    int count = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> model_path; // resolves #name in scripts
};

struct CheckMemberOptions {
    std::string script_path;
    std::string trace_text;
    std::optional<std::string> model_path;
};

struct ReplayOptions {
    std::string model_path;
    std::string trace_text;
    std::optional<std::uint64_t> seed;
    std::string format = "text";
};

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& err);
int cmd_check_member(const CheckMemberOptions& opt, std::ostream& out,
                     std::ostream& err);
int cmd_replay(const ReplayOptions& opt, std::ostream& out, std::ostream& err);
int cmd_validate_model(const std::string& model_path, std::ostream& out,
                       std::ostream& err);

// Argument parsing front end for the chimp binary.
int main_entry(int argc, const char* const* argv);

} // namespace chimp::cli
