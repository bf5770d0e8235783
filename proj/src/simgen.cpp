#include "gplaid/simgen.hpp"

#include "gplaid/errors.hpp"
#include "gplaid/gibbs.hpp"
#include "gplaid/rng.hpp"

#include <algorithm>
#include <cmath>

namespace gplaid {

void ScenarioSpec::validate() const {
    if (p < 1 || q < 1 || K < 1) throw ConfigError("p, q and K must be at least 1");
    if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi must lie in (0, 1)");
    if (!(nu_sim > 0.0) || !(s2_sim > 0.0)) throw ConfigError("noise parameters must be positive");
    for (double v : {var_mu0, var_mu, var_alpha, var_beta}) {
        if (!(v >= 0.0)) throw ConfigError("generating variances must be non-negative");
    }
    if (sigma2_override && !(*sigma2_override >= 0.0)) throw ConfigError("sigma2 override must be >= 0");
    if (!(row_overlap >= 0.0 && row_overlap < 1.0) || !(col_overlap >= 0.0 && col_overlap < 1.0)) {
        throw ConfigError("overlap fractions must lie in [0, 1)");
    }
    if (!blocks.empty() && blocks.size() != K) throw ConfigError("number of blocks must equal K");
    if (labels) {
        if (labels->genes() != p || labels->conditions() != q || labels->biclusters() != K) {
            throw ConfigError("supplied labels do not match (p, q, K)");
        }
    }
}

MeanRule parse_mean_rule(const std::string& s) {
    if (s == "yeast") return MeanRule::yeast;
    if (s == "rd") return MeanRule::rd;
    if (s == "custom") return MeanRule::custom;
    throw ConfigError("unknown mean rule '" + s + "' (expected yeast, rd or custom)");
}

std::string to_string(MeanRule rule) {
    switch (rule) {
        case MeanRule::yeast: return "yeast";
        case MeanRule::rd: return "rd";
        case MeanRule::custom: return "custom";
    }
    return "custom";
}

double expected_bicluster_mean(const ScenarioSpec& spec, std::size_t k) {
    const double kd = static_cast<double>(k);
    switch (spec.mean_rule) {
        case MeanRule::yeast: return 2.0 * (kd + 1.0);
        case MeanRule::rd: return 2.0 * (10.0 * (kd + 1.0) / static_cast<double>(spec.K) + 1.0);
        case MeanRule::custom: return spec.custom_base + spec.custom_slope * kd;
    }
    return 0.0;
}

namespace {

std::vector<BlockSpec> auto_blocks(const ScenarioSpec& spec) {
    const std::size_t rows = spec.rows_per_block ? spec.rows_per_block : std::max<std::size_t>(1, spec.p / (spec.K + 1));
    const std::size_t cols = spec.cols_per_block ? spec.cols_per_block
                                                 : std::max<std::size_t>(std::min<std::size_t>(2, spec.q), spec.q / (spec.K + 1));
    const auto row_shared = static_cast<std::size_t>(std::lround(spec.row_overlap * static_cast<double>(rows)));
    const auto col_shared = static_cast<std::size_t>(std::lround(spec.col_overlap * static_cast<double>(cols)));
    const std::size_t row_step = std::max<std::size_t>(1, rows - std::min(row_shared, rows));
    const std::size_t col_step = std::max<std::size_t>(1, cols - std::min(col_shared, cols));
    std::vector<BlockSpec> out;
    for (std::size_t k = 0; k < spec.K; ++k) {
        // conditions wrap around when K blocks do not fit side by side
        std::size_t col_start = k * col_step;
        if (col_start + cols > spec.q) col_start = spec.q >= cols ? (col_start % (spec.q - cols + 1)) : 0;
        out.push_back({k * row_step, rows, col_start, std::min(cols, spec.q)});
    }
    return out;
}

}  // namespace

BiclusterState generate_labels(const ScenarioSpec& spec) {
    spec.validate();
    if (spec.labels) {
        spec.labels->validate();
        return *spec.labels;
    }
    const auto blocks = spec.blocks.empty() ? auto_blocks(spec) : spec.blocks;
    BiclusterState state(spec.p, spec.q, spec.K);
    for (std::size_t k = 0; k < spec.K; ++k) {
        const auto& b = blocks[k];
        if (b.row_count == 0 || b.col_count == 0 || b.row_start + b.row_count > spec.p
            || b.col_start + b.col_count > spec.q) {
            throw ConfigError("block " + std::to_string(k + 1) + " does not fit in the " + std::to_string(spec.p)
                              + " x " + std::to_string(spec.q) + " matrix");
        }
        const auto kk = static_cast<Eigen::Index>(k);
        for (std::size_t i = b.row_start; i < b.row_start + b.row_count; ++i) state.rho(static_cast<Eigen::Index>(i), kk) = 1;
        for (std::size_t j = b.col_start; j < b.col_start + b.col_count; ++j) state.kappa(static_cast<Eigen::Index>(j), kk) = 1;
    }
    return state;
}

namespace {

// a ~ N(m, var I) over members, with m_t = 2/(1+e^{-t}) - mean for member
// rank t = 1..r; non-members get prior draws. Stored raw, caller projects.
void draw_planted_effects(Rng& rng, const LabelMatrix& labels, Eigen::Index k, double var, Matrix& raw) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
        if (labels(i, k)) idx.push_back(i);
    }
    std::vector<double> mean(idx.size());
    double centre = 0.0;
    for (std::size_t t = 0; t < idx.size(); ++t) {
        mean[t] = 2.0 / (1.0 + std::exp(-static_cast<double>(t + 1)));
        centre += mean[t];
    }
    if (!idx.empty()) centre /= static_cast<double>(idx.size());
    for (Eigen::Index i = 0; i < labels.rows(); ++i) raw(i, k) = draw_normal(rng, 0.0, var);
    for (std::size_t t = 0; t < idx.size(); ++t) raw(idx[t], k) += mean[t] - centre;
}

}  // namespace

SyntheticDataset generate_dataset(const ScenarioSpec& spec) {
    SyntheticDataset out;
    out.truth = generate_labels(spec);
    Rng rng(spec.rng_seed);
    const std::size_t K = spec.K;
    PlaidParameters params(spec.p, spec.q, K);
    params.mu0 = draw_normal(rng, 0.0, spec.var_mu0);
    for (std::size_t k = 0; k < K; ++k) {
        params.mu[static_cast<Eigen::Index>(k)] = draw_normal(rng, expected_bicluster_mean(spec, k + 1), spec.var_mu);
    }
    for (std::size_t k = 0; k < K; ++k) {
        draw_planted_effects(rng, out.truth.rho, static_cast<Eigen::Index>(k), spec.var_alpha, params.raw_gene_effects);
        draw_planted_effects(rng, out.truth.kappa, static_cast<Eigen::Index>(k), spec.var_beta, params.raw_cond_effects);
    }
    const double drawn = draw_scaled_inv_chi2(rng, spec.nu_sim, spec.s2_sim);
    params.sigma2 = spec.sigma2_override ? *spec.sigma2_override : drawn;
    params.refresh_constrained(out.truth);

    Matrix y = mean_surface(out.truth, params);
    if (params.sigma2 > 0.0) {
        const double sd = std::sqrt(params.sigma2);
        std::normal_distribution<double> noise(0.0, 1.0);
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
            for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) += sd * noise(rng);
        }
    }
    out.data = ExpressionMatrix::from_values(std::move(y));
    out.params = std::move(params);
    return out;
}

Matrix planted_gene_distances(const BiclusterState& truth, std::uint64_t seed) {
    const auto p = truth.rho.rows();
    Rng rng(seed);
    Matrix d = Matrix::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const bool i_none = truth.rho.row(i).cast<int>().sum() == 0;
            const bool j_none = truth.rho.row(j).cast<int>().sum() == 0;
            const bool share = (truth.rho.row(i).cast<int>().array() * truth.rho.row(j).cast<int>().array()).sum() > 0;
            const bool close = share || (i_none && j_none);
            const double u = uniform01(rng);
            // round to keep the matrix exactly reproducible through text files
            const double v = std::round((close ? 0.05 + 0.3 * u : 0.6 + 0.4 * u) * 1e6) / 1e6;
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

}  // namespace gplaid
