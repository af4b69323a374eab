#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chimp/genlang.hpp"

namespace chimp {

struct ParseDiagnostic {
    int line = 1;   // 1-based
    int column = 1; // 1-based
    std::string message;
    std::string excerpt; // offending source line

    std::string to_string() const;
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(ParseDiagnostic d)
        : std::runtime_error(d.to_string()), diagnostic(std::move(d)) {}
    ParseDiagnostic diagnostic;
};

// Symbolic widget names (#name) resolve against the app model's name table.
using NameTable = std::map<std::string, int>;

struct SuiteOptions {
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<bool> keep_state; // reset keep|reinstall
};

// A parsed .chimp file: named generator bindings plus one check stanza.
struct Script {
    std::vector<std::pair<std::string, GenPtr>> bindings;
    std::string check_name;
    GenPtr check_gen;
    std::optional<PropPtr> property;
    SuiteOptions options;
};

// Parses a full script. Scripts using #name require a name table; pass the
// loaded model's table. Throws ParseError.
Script parse_script(const std::string& source, const NameTable* names = nullptr);

// Parses a single generator / property / trace expression.
GenPtr parse_gen_text(const std::string& source, const NameTable* names = nullptr);
PropPtr parse_prop_text(const std::string& source, const NameTable* names = nullptr);
TracePtr parse_trace_text(const std::string& source,
                          const NameTable* names = nullptr);

// A generator that denotes exactly one trace (no choice, no repeat, constant
// arguments) converts to that trace; anything else yields nullopt.
std::optional<TracePtr> gen_to_trace(const Gen& g);

// Renders a generator in the script surface syntax; parse_gen_text of the
// result reproduces the generator structurally.
std::string render_gen(const Gen& g);

} // namespace chimp
