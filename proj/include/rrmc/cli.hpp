#pragma once

// Command-line front end. Kept as a library so tests can drive it in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rrmc/model.hpp"
#include "rrmc/schemes.hpp"

namespace rrmc::cli {

inline constexpr std::string_view kVersion = "1.0.0";

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kConstraint = 3;
inline constexpr int kIo = 4;
inline constexpr int kVerifyFailed = 5;
} // namespace exit_code

enum class Command { Run, ClosedForm, Simulate, Compare, Absorb };
enum class Format { Csv, Json };

std::string_view to_string(Command command);
std::string_view to_string(Format format);

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunSpec {
    Command command = Command::Run;
    /// Unset means raw (p, s, q, r) for the general class.
    std::optional<SchemeId> scheme;
    /// compare only; empty means all seven schemes.
    std::vector<SchemeId> schemes;
    FreeParams params;
    std::optional<int> m;
    std::vector<double> pb;
    Quantum quanta = 10;
    std::int64_t walks = 10000;
    std::uint64_t seed = 0;
    Format format = Format::Csv;
    /// Empty writes to standard output.
    std::string output;
    bool verify = false;
    unsigned threads = 0;
    /// simulate only: export the first `traces` walk paths to `trace_file`.
    std::int64_t traces = 0;
    std::string trace_file;
};

/// Model inputs a RunSpec resolves to. `preset` is set when a scheme was named.
struct Resolved {
    std::optional<SchemePreset> preset;
    SchemeParamsd params;
    Distributiond init;
};

/// Parses argv (argv[0] is the program name). Throws UsageError for bad
/// flags and rrmc::Error when the flags name an invalid scheme setup.
/// Returns nullopt when --help or --version was handled; the text goes to `out`.
std::optional<RunSpec> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Throws UsageError or rrmc::Error like parse_args.
Resolved resolve(const RunSpec& spec);
/// compare: one lenient preset per requested scheme.
std::vector<SchemePreset> resolve_all(const RunSpec& spec);

nlohmann::ordered_json to_json(const RunSpec& spec);
/// Inverse of to_json; extra keys such as "engine" and "version" are ignored.
RunSpec spec_from_json(const nlohmann::ordered_json& meta);

/// 12 significant digits, locale-independent.
std::string format_number(double value);

/// Runs the spec and returns the rendered output. --verify divergence is
/// reported through `verify_ok`.
std::string render(const RunSpec& spec, bool* verify_ok = nullptr);

/// Full pipeline: parse, run, write. Returns a process exit status.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace rrmc::cli
