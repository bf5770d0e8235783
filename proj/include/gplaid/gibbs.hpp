#pragma once

// Label fields and conjugate parameter updates for the plaid model.

#include "gplaid/plaid.hpp"
#include "gplaid/rng.hpp"

#include <span>

namespace gplaid {

/// Gene-label field of bicluster k:
///   A_i = a_i - (0.5/sigma2) sum_j kappa_jk {(z_ijk - mu_k - alpha_ik - beta_jk)^2 - z_ijk^2}
/// with z the partial residuals and alpha/beta the stored constrained effects.
Vector compute_field(const ExpressionMatrix& y, const BiclusterState& state, const PlaidParameters& params,
                     const Hyperparameters& hyper, std::size_t k);

/// Condition-label counterpart (sum over member genes).
Vector compute_condition_field(const ExpressionMatrix& y, const BiclusterState& state,
                               const PlaidParameters& params, const Hyperparameters& hyper, std::size_t k);

/// Field on the rows of a partial-residual matrix `z` given column labels.
/// `row_effect` and `col_effect` are the effects used for every row/column.
Vector row_field(const Matrix& z, std::span<const std::uint8_t> col_labels, double mu_k, const Vector& row_effect,
                 const Vector& col_effect, const Vector& offsets, double sigma2);

/// Field on the columns of `z` given row labels.
Vector col_field(const Matrix& z, std::span<const std::uint8_t> row_labels, double mu_k, const Vector& row_effect,
                 const Vector& col_effect, const Vector& offsets, double sigma2);

struct NormalMoments {
    double mean;
    double variance;
};

/// mu0 | rest from r = y - (mu - mu0): Normal with precision n/sigma2 + 1/s2_mu0.
NormalMoments mu0_conditional(const Matrix& residual_without_mu0, double sigma2, double sigma2_mu0);

/// Posterior parameters (dof, scale) of sigma2 | rest given the residual sum of squares.
std::pair<double, double> sigma2_conditional(double ssr, std::size_t n_cells, double nu, double s2);

/// In-place updates against a maintained residual matrix y - mu.
void update_mu0(Matrix& residual, PlaidParameters& params, const Hyperparameters& hyper, Rng& rng);
void update_bicluster(Matrix& residual, const BiclusterState& state, PlaidParameters& params,
                      const Hyperparameters& hyper, std::size_t k, Rng& rng);
void update_sigma2(const Matrix& residual, PlaidParameters& params, const Hyperparameters& hyper, Rng& rng);

/// One full conjugate sweep: mu0, then (mu_k, a_k, b_k) for each k, then
/// sigma2. Constrained effects are re-projected after each draw.
PlaidParameters gibbs_update_parameters(const ExpressionMatrix& y, const BiclusterState& state,
                                        const PlaidParameters& params, const Hyperparameters& hyper, Rng& rng);

/// Adds sign * layer k to `m` (cells in I_k x J_k).
void add_bicluster_layer(Matrix& m, const BiclusterState& state, const PlaidParameters& params, std::size_t k,
                         double sign);

}  // namespace gplaid
