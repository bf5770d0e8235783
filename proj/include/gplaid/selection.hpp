#pragma once

// Model-choice criteria and bicluster comparison measures.

#include "gplaid/chain.hpp"
#include "gplaid/plaid.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace gplaid {

struct Bicluster {
    std::vector<std::size_t> rows;  // sorted, unique
    std::vector<std::size_t> cols;

    std::size_t cells() const { return rows.size() * cols.size(); }
};

/// Biclusters that are non-empty in both dimensions.
using BiclusterSet = std::vector<Bicluster>;

/// Record with the largest log-posterior; earliest wins ties.
const TraceRecord& map_estimate(const SamplerTrace& trace);

struct DicResult {
    double dic;
    double p_c;
    double mean_log_likelihood;
    double map_log_likelihood;
};

/// DIC_c = -2 E[log p] + p_c with p_c = -2 E[log p] + 2 log p(MAP).
DicResult dic_c(const SamplerTrace& trace);
DicResult dic_c(const std::vector<double>& log_likelihoods, double map_log_likelihood);

/// Free parameters at the MAP: mu0, sigma2, K means and the
/// (r_k - 1) + (c_k - 1) constrained effects per bicluster.
std::size_t aic_dimension(const BiclusterState& state);

/// -2 log p(MAP) + 2 d.
double aic(const TraceRecord& map_record);
double aic(double map_log_likelihood, std::size_t dimension);

struct ThresholdResult {
    BiclusterSet biclusters;
    std::vector<std::size_t> source_index;  // bicluster k each entry came from
    std::vector<std::size_t> dropped;       // k that were empty in a dimension
};

/// Index included iff its probability >= threshold.
ThresholdResult threshold_memberships(const Matrix& row_prob, const Matrix& col_prob, double threshold);

/// Biclusters of a binary state (empty ones dropped).
ThresholdResult biclusters_from_state(const BiclusterState& state);

struct F1Pair {
    double recall;
    double precision;
    double f1;
};

/// recall = |A∩B|/n_B, precision = |A∩B|/n_A, F1 = 2|A∩B|/(n_A + n_B), where
/// |A∩B| = r_{A∩B} c_{A∩B}.
F1Pair f1_pair(const Bicluster& a, const Bicluster& b);

/// (1/|M1|) sum_i max_j F1(A_i, B_j).
double f1_average(const BiclusterSet& m1, const BiclusterSet& m2);

enum class Dimension { rows, columns };

/// 0.5 (|S_A ∩ S_B| / |S_A| + |S_A ∩ S_B| / |S_B|).
double relative_redundancy(const Bicluster& a, const Bicluster& b, Dimension dim);

}  // namespace gplaid
