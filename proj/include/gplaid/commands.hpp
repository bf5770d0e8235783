#pragma once

// Run orchestration behind the CLI and the C API: JSON configuration,
// fit / simulate / evaluate / select, and the report files they write.

#include "gplaid/chain.hpp"
#include "gplaid/graph.hpp"
#include "gplaid/selection.hpp"
#include "gplaid/simgen.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace gplaid {

using Json = nlohmann::json;

struct GridOptions {
    double t_min = 1.0;
    double t_max = 20.0;
    std::size_t m = 10;
    GridSpacing spacing = GridSpacing::geometric;
};

/// Where a relational graph comes from. At most one source per side.
struct GraphSource {
    std::filesystem::path distances;  // square labelled matrix -> r-NN graph
    std::filesystem::path edges;      // (id, id, distance) list
    std::filesystem::path groups;     // (id, group) list -> group graph
    double group_distance = 1.0;
    std::optional<double> correlation_xi;  // time-course correlation graph
    std::size_t max_lag = 3;
    std::size_t knn = 15;

    bool empty() const {
        return distances.empty() && edges.empty() && groups.empty() && !correlation_xi;
    }
};

struct FitOptions {
    std::filesystem::path data;
    GraphSource gene_graph;
    GraphSource condition_graph;
    GridOptions grid_rho;
    GridOptions grid_kappa;
    ChainConfig chain;
    double threshold = 0.5;
    bool write_trace = true;
    std::filesystem::path output;
};

struct SelectOptions {
    FitOptions fit;
    std::vector<std::size_t> k_values;
    std::vector<std::uint64_t> seeds;
    std::size_t threads = 1;
};

struct SimulateOptions {
    ScenarioSpec scenario;
    std::uint64_t graph_seed = 0;  // 0: derived from the scenario seed
    double group_distance = 1.0;
    std::filesystem::path output;
};

/// Parsers for the JSON configuration documents. Unknown keys, wrong types
/// and invalid values raise ConfigError.
FitOptions parse_fit_options(const Json& doc);
SelectOptions parse_select_options(const Json& doc);
SimulateOptions parse_simulate_options(const Json& doc);

/// Loaded inputs of a fit: data and optional graphs.
struct FitInputs {
    ExpressionMatrix data;
    std::optional<RelationalGraph> genes;
    std::optional<RelationalGraph> conditions;
};

FitInputs load_fit_inputs(const FitOptions& options);

struct FitResult {
    FitOptions options;
    ExpressionMatrix data;
    SamplerTrace trace;
    DicResult dic{};
    double aic = 0.0;
    std::size_t aic_dimension = 0;
    ThresholdResult biclusters;
};

FitResult run_fit(const FitOptions& options, const FitInputs& inputs);
FitResult run_fit(const FitOptions& options);

Json summary_json(const FitResult& fit);
Json criteria_json(const FitResult& fit);
Json trace_record_json(const TraceRecord& rec, const WangLandauState& wl);

/// trace.jsonl, summary.json, memberships_rows.csv, memberships_cols.csv,
/// criteria.json in `dir` (created if needed). Each file is written atomically.
void write_fit_outputs(const FitResult& fit, const std::filesystem::path& dir);

/// Log-likelihood column of a trace.jsonl file.
std::vector<double> read_trace_log_likelihoods(const std::filesystem::path& path);

/// Biclusters from the "biclusters" array of a summary.json or truth.json.
BiclusterSet read_biclusters(const std::filesystem::path& path);

/// dataset.csv, truth.json, gene_distances.csv and the condition graph file
/// (condition_edges.csv for the yeast rule, condition_groups.csv otherwise).
SyntheticDataset run_simulate(const SimulateOptions& options);

struct EvaluationReport {
    double f1_estimated_vs_truth = 0.0;
    double f1_truth_vs_estimated = 0.0;
};

/// Writes f1.csv, f1_pairs.csv and redundancy.csv into `dir`. An empty
/// estimate or truth raises DataError.
EvaluationReport run_evaluate(const std::filesystem::path& estimated, const std::filesystem::path& truth,
                              const std::filesystem::path& dir);

struct SelectionRow {
    std::size_t K;
    std::size_t replicates;
    double dic_mean, dic_se;  // se is NaN with fewer than two replicates
    double p_c_mean, p_c_se;
    double aic_mean, aic_se;
    double mean_log_likelihood;
    double map_log_likelihood;
};

struct SelectionCell {
    std::size_t K;
    std::uint64_t seed;
    DicResult dic;
    double aic;
};

struct SelectionResult {
    std::vector<SelectionCell> cells;  // ordered by (K, seed)
    std::vector<SelectionRow> rows;    // ordered by K
};

/// Runs one chain per (K, seed) cell, on up to `threads` worker threads,
/// then writes criteria.csv, criteria.json and runs.csv.
SelectionResult run_select(const SelectOptions& options);

std::vector<SelectionRow> summarise_cells(const std::vector<SelectionCell>& cells);
std::string criteria_csv(const std::vector<SelectionRow>& rows);

}  // namespace gplaid
