#pragma once

// Synthetic plaid datasets with planted biclusters.

#include "gplaid/graph.hpp"
#include "gplaid/plaid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gplaid {

enum class MeanRule { yeast, rd, custom };

struct BlockSpec {
    std::size_t row_start = 0;
    std::size_t row_count = 0;
    std::size_t col_start = 0;
    std::size_t col_count = 0;
};

struct ScenarioSpec {
    std::size_t p = 100;
    std::size_t q = 17;
    std::size_t K = 2;
    MeanRule mean_rule = MeanRule::yeast;
    double custom_base = 2.0;   // custom rule: E[mu_k] = base + slope * k
    double custom_slope = 2.0;
    double xi = 0.8;
    double nu_sim = 3.0;
    double s2_sim = 0.03;
    std::optional<double> sigma2_override;  // fixes sigma2 (0 means noiseless)
    double var_mu0 = 0.05;
    double var_mu = 0.05;
    double var_alpha = 0.5;
    double var_beta = 0.5;

    /// Explicit blocks; when empty, K contiguous blocks are laid out
    /// automatically with the sizes and overlaps below.
    std::vector<BlockSpec> blocks;
    std::size_t rows_per_block = 0;  // 0: p / (K + 1)
    std::size_t cols_per_block = 0;  // 0: max(2, q / (K + 1))
    double row_overlap = 0.0;        // fraction of a block shared with the next
    double col_overlap = 0.0;

    /// Externally supplied labels (p x K and q x K); override the blocks.
    std::optional<BiclusterState> labels;

    std::uint64_t rng_seed = 1;

    /// Throws ConfigError.
    void validate() const;
};

struct SyntheticDataset {
    ExpressionMatrix data;
    BiclusterState truth;
    PlaidParameters params;
};

MeanRule parse_mean_rule(const std::string& s);
std::string to_string(MeanRule rule);

/// Expected bicluster mean E[mu_k] for 1-based k.
double expected_bicluster_mean(const ScenarioSpec& spec, std::size_t k);

/// Planted labels from the explicit, automatic or supplied block layout.
BiclusterState generate_labels(const ScenarioSpec& spec);

/// Y = plaid mean surface + N(0, sigma2) noise, with
///   mu0 ~ N(0, var_mu0), mu_k ~ N(E[mu_k], var_mu),
///   a_ik ~ N(2/(1+e^{-rank}) - centre, var_alpha) projected to sum zero (same for b),
///   sigma2 ~ scaled-inv-chi2(nu_sim, s2_sim).
SyntheticDataset generate_dataset(const ScenarioSpec& spec);

/// Gene distances consistent with the planted structure: genes sharing a
/// true bicluster (or both in none) are close, others far. Symmetric with a
/// zero diagonal.
Matrix planted_gene_distances(const BiclusterState& truth, std::uint64_t seed);

}  // namespace gplaid
