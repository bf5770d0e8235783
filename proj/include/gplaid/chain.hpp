#pragma once

// The Gibbs-plaid posterior sampler.

#include "gplaid/graph.hpp"
#include "gplaid/plaid.hpp"
#include "gplaid/rng.hpp"
#include "gplaid/wang_landau.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace gplaid {

struct ChainProgress {
    std::size_t iteration;
    std::size_t max_iters;
    double log_likelihood;
    double gamma;
    std::size_t epoch;
};

struct ChainConfig {
    std::size_t K = 1;
    std::size_t max_iters = 10000;
    std::size_t burn_in = 5000;
    std::size_t thin = 10;
    std::uint64_t rng_seed = 1;
    Hyperparameters hyper;
    TemperatureGrid grid_rho;    // ignored (single cell) without a gene graph
    TemperatureGrid grid_kappa;  // ignored (single cell) without a condition graph
    WangLandauConfig wang_landau;
    std::size_t progress_interval = 10000;
    std::function<void(const ChainProgress&)> on_progress;

    /// Throws ConfigError on violated invariants.
    void validate() const;
};

/// Optional relational graphs. A missing graph means all pairwise weights
/// are zero, so the labels on that side are a priori independent.
struct ChainGraphs {
    const RelationalGraph* genes = nullptr;
    const RelationalGraph* conditions = nullptr;
};

struct TraceRecord {
    std::size_t iteration = 0;
    double log_likelihood = 0.0;
    /// log p(y | .) + log pi(sigma2, Theta) + singleton label terms.
    double log_posterior = 0.0;
    std::size_t t_rho = 0;  // grid indices
    std::size_t t_kappa = 0;
    BiclusterState state;
    PlaidParameters params;
};

struct SamplerTrace {
    std::vector<TraceRecord> records;
    Matrix row_membership;  // p x K, frequencies over retained records
    Matrix col_membership;  // q x K
    WangLandauState wang_landau;

    bool empty() const { return records.empty(); }
};

/// Gene labels of bicluster k: field from the partial residuals `z` (data
/// minus everything except layer k), then one Swendsen-Wang update. Effects
/// for candidate members are the raw effects centred on the current members.
void sweep_gene_labels(const Matrix& z, BiclusterState& state, const PlaidParameters& params,
                       const Hyperparameters& hyper, const RelationalGraph* graph, std::span<const double> weights,
                       std::size_t k, Rng& rng);

/// Condition-side counterpart.
void sweep_condition_labels(const Matrix& z, BiclusterState& state, const PlaidParameters& params,
                            const Hyperparameters& hyper, const RelationalGraph* graph,
                            std::span<const double> weights, std::size_t k, Rng& rng);

/// Joint log-posterior as recorded in the trace (see TraceRecord).
double joint_log_posterior(double log_lik, const BiclusterState& state, const PlaidParameters& params,
                           const Hyperparameters& hyper);

/// Runs the sampler. Per iteration: temperature move (genes), temperature
/// move (conditions), log-psi update and gamma schedule, label sweep over all
/// biclusters (genes then conditions), conjugate parameter update. Retains
/// iterations t > burn_in with (t - burn_in) % thin == 0. Deterministic in
/// the seed.
SamplerTrace run_chain(const ExpressionMatrix& y, const ChainGraphs& graphs, const ChainConfig& config);

}  // namespace gplaid
