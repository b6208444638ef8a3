#pragma once

#include "pcg/corpus.hpp"
#include "pcg/experiments.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pcg {

inline constexpr long kMaxBudget = 100'000'000;

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_assertion = 3, exit_resource = 4 };

/// Invalid configuration: unknown key or experiment, malformed value, violated cap.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string experiment;
    CorpusSpec corpus;
    long mc_budget = kDefaultBudget;
    std::string output_dir = ".";
    std::set<std::string> emit{"csv", "json"};
    std::optional<double> alpha;

    std::uint64_t seed() const { return corpus.seed; }
    ExperimentOptions options() const { return ExperimentOptions{mc_budget, alpha}; }
    /// Throws ConfigError naming the violated rule or cap.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// Applies `key = value` lines (blank lines and # comments allowed) on top of cfg.
void apply_config_text(RunConfig& cfg, const std::string& text);
/// Sets one key; keys are experiment, dim, p, family, count, mc_budget, seed, out, emit, alpha.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
/// Canonical `key = value` text; apply_config_text(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& cfg);

/// Parses command-line arguments (without the program name). Values from --config are
/// applied first, explicit flags override them; the result is validated.
RunConfig parse_config(const std::vector<std::string>& args);

/// Writes <name>_<seed>.json / .csv / .plot.csv as selected; returns the written paths.
std::vector<std::string> emit_report(const ExperimentReport& report, const RunConfig& cfg);

/// Full CLI: parse, run, emit; returns the process exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace pcg
