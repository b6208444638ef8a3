#pragma once

#include "pcg/corpus.hpp"
#include "pcg/measure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pcg {

struct ExperimentRow {
    std::string instance_id;
    std::string descriptor;
    double lhs = 0.0;
    double rhs = 0.0;
    /// lhs / rhs.
    double ratio = 0.0;
    /// Propagated Monte Carlo standard error of the ratio.
    double std_error = 0.0;
    /// Experiment-specific side values, serialized in order.
    std::vector<std::pair<std::string, double>> extras;
    /// Non-empty when the instance failed; the numbers are then NaN.
    std::string error;

    std::optional<double> extra(const std::string& key) const;
};

struct ExperimentSummary {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    double fitted_constant = 0.0;
    /// How fitted_constant folds the rows, e.g. "max ratio".
    std::string fitted_rule;
    int failed = 0;
};

struct ExperimentReport {
    std::string name;
    int dimension = 0;
    double p = 1.0;
    std::vector<ExperimentRow> rows;
    ExperimentSummary summary;
    std::uint64_t seed = 0;
    std::string config_hash;
    /// Violated hard assertions (directions the inequalities guarantee).
    std::vector<std::string> violations;
};

struct ExperimentOptions {
    long mc_budget = kDefaultBudget;
    /// Lemma 3 exponent; unset means 1/p - 1/2 + 0.25.
    std::optional<double> alpha;
};

/// Registered experiment names, in CLI order.
const std::vector<std::string>& experiment_names();
/// Dispatch by name; throws InvalidBodyError for unknown names.
ExperimentReport run_experiment(const std::string& name, const CorpusSpec& spec, const ExperimentOptions& options = {});

ExperimentReport run_brunn_minkowski(const CorpusSpec& spec, const ExperimentOptions& options = {});
ExperimentReport run_reverse_bm(const CorpusSpec& spec, const ExperimentOptions& options = {});
/// Reverse Brunn-Minkowski statistic on explicit pairs (spec supplies seed and labels).
ExperimentReport run_reverse_bm(const CorpusSpec& spec, const std::vector<CorpusPair>& pairs,
                                const ExperimentOptions& options = {});
ExperimentReport run_santalo(const CorpusSpec& spec, const ExperimentOptions& options = {});
ExperimentReport run_prop1(const CorpusSpec& spec, const ExperimentOptions& options = {});
ExperimentReport run_prop2(const CorpusSpec& spec, const ExperimentOptions& options = {});
ExperimentReport run_lemma3_envelope(const CorpusSpec& spec, const ExperimentOptions& options = {});
ExperimentReport run_eq2_two_sided(const CorpusSpec& spec, const ExperimentOptions& options = {});

/// Recomputes the summary as a fold of the rows (fitted_rule is kept).
void summarize(ExperimentReport& report);
/// FNV-1a hash (16 hex digits) of the canonical experiment configuration.
std::string config_hash(const std::string& name, const CorpusSpec& spec, const ExperimentOptions& options);
/// Least-squares slope of log(y) against log(x).
double log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pcg
