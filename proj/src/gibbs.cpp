#include "gplaid/gibbs.hpp"

#include "gplaid/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gplaid {

namespace {

std::vector<Eigen::Index> members(const LabelMatrix& labels, Eigen::Index k) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
        if (labels(i, k)) out.push_back(i);
    }
    return out;
}

void require_finite(const Vector& v) {
    if (!v.allFinite()) throw DataError("non-finite label field");
}

Vector offsets_or_zero(const Vector& offsets, Eigen::Index n) {
    return offsets.size() == 0 ? Vector::Zero(n) : offsets;
}

}  // namespace

Vector row_field(const Matrix& z, std::span<const std::uint8_t> col_labels, double mu_k, const Vector& row_effect,
                 const Vector& col_effect, const Vector& offsets, double sigma2) {
    Vector a = offsets_or_zero(offsets, z.rows());
    const double c = 0.5 / sigma2;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        if (!col_labels[static_cast<std::size_t>(j)]) continue;
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const double m = mu_k + row_effect[i] + col_effect[j];
            a[i] -= c * (m * m - 2.0 * z(i, j) * m);
        }
    }
    require_finite(a);
    return a;
}

Vector col_field(const Matrix& z, std::span<const std::uint8_t> row_labels, double mu_k, const Vector& row_effect,
                 const Vector& col_effect, const Vector& offsets, double sigma2) {
    Vector a = offsets_or_zero(offsets, z.cols());
    const double c = 0.5 / sigma2;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            if (!row_labels[static_cast<std::size_t>(i)]) continue;
            const double m = mu_k + row_effect[i] + col_effect[j];
            s += m * m - 2.0 * z(i, j) * m;
        }
        a[j] -= c * s;
    }
    require_finite(a);
    return a;
}

Vector compute_field(const ExpressionMatrix& y, const BiclusterState& state, const PlaidParameters& params,
                     const Hyperparameters& hyper, std::size_t k) {
    if (!(params.sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    const Matrix z = partial_residuals(y, state, params, k);
    const auto kk = static_cast<Eigen::Index>(k);
    return row_field(z, std::span<const std::uint8_t>(state.kappa.col(kk).data(), state.conditions()),
                     params.mu[kk], params.gene_effects.col(kk), params.cond_effects.col(kk), hyper.field_gene,
                     params.sigma2);
}

Vector compute_condition_field(const ExpressionMatrix& y, const BiclusterState& state,
                               const PlaidParameters& params, const Hyperparameters& hyper, std::size_t k) {
    if (!(params.sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    const Matrix z = partial_residuals(y, state, params, k);
    const auto kk = static_cast<Eigen::Index>(k);
    return col_field(z, std::span<const std::uint8_t>(state.rho.col(kk).data(), state.genes()), params.mu[kk],
                     params.gene_effects.col(kk), params.cond_effects.col(kk), hyper.field_cond, params.sigma2);
}

NormalMoments mu0_conditional(const Matrix& residual_without_mu0, double sigma2, double sigma2_mu0) {
    const double prec = static_cast<double>(residual_without_mu0.size()) / sigma2 + 1.0 / sigma2_mu0;
    return {residual_without_mu0.sum() / sigma2 / prec, 1.0 / prec};
}

std::pair<double, double> sigma2_conditional(double ssr, std::size_t n_cells, double nu, double s2) {
    const double dof = nu + static_cast<double>(n_cells);
    return {dof, (nu * s2 + ssr) / dof};
}

void add_bicluster_layer(Matrix& m, const BiclusterState& state, const PlaidParameters& params, std::size_t k,
                         double sign) {
    const auto kk = static_cast<Eigen::Index>(k);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (!state.kappa(j, kk)) continue;
        const double cj = params.mu[kk] + params.cond_effects(j, kk);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (state.rho(i, kk)) m(i, j) += sign * (cj + params.gene_effects(i, kk));
        }
    }
}

void update_mu0(Matrix& residual, PlaidParameters& params, const Hyperparameters& hyper, Rng& rng) {
    residual.array() += params.mu0;
    const auto post = mu0_conditional(residual, params.sigma2, hyper.sigma2_mu0);
    params.mu0 = draw_normal(rng, post.mean, post.variance);
    residual.array() -= params.mu0;
}

namespace {

// Draws a full-length raw effect vector. Members get the exact conditional
// under alpha = V a with a ~ N(0, prior_var I); everything else (non-members
// and the member mean direction) comes from the prior.
//   ebar: per-member mean of the layer residual with the effect removed
//   weight: number of cells per member (c_k for genes, r_k for conditions)
void draw_effects(Rng& rng, Eigen::Ref<Vector> raw, const std::vector<Eigen::Index>& idx, const Vector& ebar,
                  double weight, double sigma2, double prior_var) {
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw[i] = draw_normal(rng, 0.0, prior_var);
    const auto r = static_cast<Eigen::Index>(idx.size());
    if (r == 0 || weight == 0.0) return;
    const double lambda = weight / sigma2 + 1.0 / prior_var;
    const double shrink = (weight / sigma2) / lambda;
    const double ebar_mean = ebar.mean();
    // raw[idx] currently holds xi * sqrt(prior_var); split it into V and 1 parts.
    Vector xi(r);
    for (Eigen::Index t = 0; t < r; ++t) xi[t] = raw[idx[static_cast<std::size_t>(t)]] / std::sqrt(prior_var);
    const double xi_mean = xi.mean();
    for (Eigen::Index t = 0; t < r; ++t) {
        const double centred_xi = xi[t] - xi_mean;
        raw[idx[static_cast<std::size_t>(t)]] =
            shrink * (ebar[t] - ebar_mean) + centred_xi / std::sqrt(lambda) + xi_mean * std::sqrt(prior_var);
    }
}

}  // namespace

void update_bicluster(Matrix& residual, const BiclusterState& state, PlaidParameters& params,
                      const Hyperparameters& hyper, std::size_t k, Rng& rng) {
    const auto kk = static_cast<Eigen::Index>(k);
    const auto rows = members(state.rho, kk);
    const auto cols = members(state.kappa, kk);
    const double s2 = params.sigma2;

    if (rows.empty() || cols.empty()) {
        params.mu[kk] = draw_normal(rng, 0.0, hyper.sigma2_mu);
        draw_effects(rng, params.raw_gene_effects.col(kk), {}, Vector(), 0.0, s2, hyper.sigma2_alpha);
        draw_effects(rng, params.raw_cond_effects.col(kk), {}, Vector(), 0.0, s2, hyper.sigma2_beta);
        params.gene_effects.col(kk).setZero();
        params.cond_effects.col(kk).setZero();
        return;
    }

    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(cols.size());
    // z restricted to the bicluster block
    Matrix z(r, c);
    for (Eigen::Index t = 0; t < r; ++t) {
        for (Eigen::Index u = 0; u < c; ++u) {
            const auto i = rows[static_cast<std::size_t>(t)];
            const auto j = cols[static_cast<std::size_t>(u)];
            z(t, u) = residual(i, j) + params.mu[kk] + params.gene_effects(i, kk) + params.cond_effects(j, kk);
        }
    }
    Vector alpha(r);
    Vector beta(c);
    for (Eigen::Index t = 0; t < r; ++t) alpha[t] = params.gene_effects(rows[static_cast<std::size_t>(t)], kk);
    for (Eigen::Index u = 0; u < c; ++u) beta[u] = params.cond_effects(cols[static_cast<std::size_t>(u)], kk);

    // mu_k
    {
        const double n = static_cast<double>(r * c);
        const double sum = ((z.colwise() - alpha).rowwise() - beta.transpose()).sum();
        const double prec = n / s2 + 1.0 / hyper.sigma2_mu;
        params.mu[kk] = draw_normal(rng, sum / s2 / prec, 1.0 / prec);
    }
    const double mu_k = params.mu[kk];

    // gene effects
    {
        Vector ebar = ((z.rowwise() - beta.transpose()).array() - mu_k).rowwise().mean();
        draw_effects(rng, params.raw_gene_effects.col(kk), rows, ebar, static_cast<double>(c), s2,
                     hyper.sigma2_alpha);
        double mean = 0.0;
        for (auto i : rows) mean += params.raw_gene_effects(i, kk);
        mean /= static_cast<double>(r);
        params.gene_effects.col(kk).setZero();
        for (Eigen::Index t = 0; t < r; ++t) {
            const auto i = rows[static_cast<std::size_t>(t)];
            alpha[t] = params.raw_gene_effects(i, kk) - mean;
            params.gene_effects(i, kk) = alpha[t];
        }
    }

    // condition effects
    {
        Vector ebar = ((z.colwise() - alpha).array() - mu_k).colwise().mean().transpose();
        draw_effects(rng, params.raw_cond_effects.col(kk), cols, ebar, static_cast<double>(r), s2,
                     hyper.sigma2_beta);
        double mean = 0.0;
        for (auto j : cols) mean += params.raw_cond_effects(j, kk);
        mean /= static_cast<double>(c);
        params.cond_effects.col(kk).setZero();
        for (Eigen::Index u = 0; u < c; ++u) {
            const auto j = cols[static_cast<std::size_t>(u)];
            beta[u] = params.raw_cond_effects(j, kk) - mean;
            params.cond_effects(j, kk) = beta[u];
        }
    }

    for (Eigen::Index t = 0; t < r; ++t) {
        for (Eigen::Index u = 0; u < c; ++u) {
            residual(rows[static_cast<std::size_t>(t)], cols[static_cast<std::size_t>(u)]) =
                z(t, u) - mu_k - alpha[t] - beta[u];
        }
    }
}

void update_sigma2(const Matrix& residual, PlaidParameters& params, const Hyperparameters& hyper, Rng& rng) {
    const double ssr = residual.squaredNorm();
    if (!std::isfinite(ssr)) throw DataError("non-finite residual sum of squares");
    const auto [dof, scale] = sigma2_conditional(ssr, static_cast<std::size_t>(residual.size()), hyper.nu, hyper.s2);
    params.sigma2 = draw_scaled_inv_chi2(rng, dof, scale);
}

PlaidParameters gibbs_update_parameters(const ExpressionMatrix& y, const BiclusterState& state,
                                        const PlaidParameters& params, const Hyperparameters& hyper, Rng& rng) {
    if (!(params.sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    PlaidParameters out = params;
    out.refresh_constrained(state);
    Matrix residual = y.values - mean_surface(state, out);
    if (!residual.allFinite()) throw DataError("non-finite residuals");
    update_mu0(residual, out, hyper, rng);
    for (std::size_t k = 0; k < state.biclusters(); ++k) update_bicluster(residual, state, out, hyper, k, rng);
    update_sigma2(residual, out, hyper, rng);
    return out;
}

}  // namespace gplaid
