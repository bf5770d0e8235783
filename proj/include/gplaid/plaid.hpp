#pragma once

// Plaid model core: data, labels, parameters, mean surface and likelihood.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gplaid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using LabelMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using LabelVector = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

/// p x q log-expression values with row (gene) and column (condition) ids.
struct ExpressionMatrix {
    Matrix values;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

    /// Checks p, q >= 1, finite values, unique ids. Throws DataError.
    void validate() const;

    /// Wraps a bare matrix, generating ids "g1.." and "c1..".
    static ExpressionMatrix from_values(Matrix values);
};

/// Binary memberships: rho is p x K (genes), kappa is q x K (conditions).
struct BiclusterState {
    LabelMatrix rho;
    LabelMatrix kappa;

    BiclusterState() = default;
    BiclusterState(std::size_t p, std::size_t q, std::size_t K);

    std::size_t genes() const { return static_cast<std::size_t>(rho.rows()); }
    std::size_t conditions() const { return static_cast<std::size_t>(kappa.rows()); }
    std::size_t biclusters() const { return static_cast<std::size_t>(rho.cols()); }

    std::size_t row_count(std::size_t k) const;
    std::size_t col_count(std::size_t k) const;
    std::size_t cell_count(std::size_t k) const { return row_count(k) * col_count(k); }

    /// Entries in {0,1} and rho/kappa agree on K. Throws DataError.
    void validate() const;
};

/// Plaid parameters. Raw effects are stored full length; the constrained
/// effects are the member-centred projections and are zero for non-members.
struct PlaidParameters {
    double mu0 = 0.0;
    Vector mu;              // K
    Matrix raw_gene_effects;  // p x K (a_k)
    Matrix raw_cond_effects;  // q x K (b_k)
    Matrix gene_effects;      // p x K (alpha_k = V_k a_k on members)
    Matrix cond_effects;      // q x K (beta_k = U_k b_k on members)
    double sigma2 = 1.0;

    PlaidParameters() = default;
    PlaidParameters(std::size_t p, std::size_t q, std::size_t K);

    std::size_t biclusters() const { return static_cast<std::size_t>(mu.size()); }

    /// Recomputes gene_effects/cond_effects from the raw effects for the
    /// membership in `state`. Empty biclusters get all-zero effects.
    void refresh_constrained(const BiclusterState& state);
};

struct Hyperparameters {
    double sigma2_mu0 = 0.5;
    double sigma2_mu = 0.5;
    double sigma2_alpha = 0.5;
    double sigma2_beta = 0.5;
    double nu = 1.0;
    double s2 = 0.05;
    Vector field_gene;  // p offsets a_i; empty means all zero
    Vector field_cond;  // q offsets c_j; empty means all zero

    double gene_offset(std::size_t i) const { return field_gene.size() == 0 ? 0.0 : field_gene[static_cast<Eigen::Index>(i)]; }
    double cond_offset(std::size_t j) const { return field_cond.size() == 0 ? 0.0 : field_cond[static_cast<Eigen::Index>(j)]; }

    /// Positive variances and offset lengths matching (p, q). Throws ConfigError.
    void validate(std::size_t p, std::size_t q) const;
};

/// mu_ij = mu0 + sum_k (mu_k + alpha_ik + beta_jk) rho_ik kappa_jk.
Matrix mean_surface(const BiclusterState& state, const PlaidParameters& params);

/// Data minus mu0 and every bicluster layer except k (0-based).
Matrix partial_residuals(const ExpressionMatrix& y, const BiclusterState& state,
                         const PlaidParameters& params, std::size_t k);

/// Gaussian log-likelihood of y under the plaid mean surface.
double log_likelihood(const ExpressionMatrix& y, const BiclusterState& state,
                      const PlaidParameters& params);

/// Log-likelihood from a residual matrix y - mu and variance sigma2.
double log_likelihood_from_residuals(const Matrix& residuals, double sigma2);

/// Centres `raw` (length m >= 1): applies I - (1/m) 11'.
std::vector<double> project_effects(std::span<const double> raw);

/// Log prior density of (mu0, mu, raw effects, sigma2). Raw effects are iid
/// N(0, sigma2_alpha) / N(0, sigma2_beta) over their full length.
double log_parameter_prior(const BiclusterState& state, const PlaidParameters& params,
                           const Hyperparameters& hyper);

}  // namespace gplaid
