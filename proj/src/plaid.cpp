#include "gplaid/plaid.hpp"

#include "gplaid/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace gplaid {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double normal_logpdf(double x, double var) {
    return -0.5 * (kLog2Pi + std::log(var) + x * x / var);
}

double scaled_inv_chi2_logpdf(double x, double nu, double s2) {
    const double h = 0.5 * nu;
    return h * std::log(h) - std::lgamma(h) + h * std::log(s2) - (h + 1.0) * std::log(x)
           - nu * s2 / (2.0 * x);
}

void check_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw DataError(std::string("duplicate ") + what + " id '" + id + "'");
        }
    }
}

void centre_members(const LabelMatrix& labels, const Matrix& raw, Matrix& out) {
    out.setZero(raw.rows(), raw.cols());
    for (Eigen::Index k = 0; k < raw.cols(); ++k) {
        double sum = 0.0;
        Eigen::Index m = 0;
        for (Eigen::Index i = 0; i < raw.rows(); ++i) {
            if (labels(i, k)) {
                sum += raw(i, k);
                ++m;
            }
        }
        if (m == 0) continue;
        const double mean = sum / static_cast<double>(m);
        for (Eigen::Index i = 0; i < raw.rows(); ++i) {
            if (labels(i, k)) out(i, k) = raw(i, k) - mean;
        }
    }
}

}  // namespace

void ExpressionMatrix::validate() const {
    if (values.rows() < 1 || values.cols() < 1) {
        throw DataError("expression matrix must have at least one row and one column");
    }
    if (row_ids.size() != rows() || col_ids.size() != cols()) {
        throw DataError("expression matrix ids do not match its dimensions");
    }
    if (!values.allFinite()) throw DataError("expression matrix contains non-finite values");
    check_unique(row_ids, "row");
    check_unique(col_ids, "column");
}

ExpressionMatrix ExpressionMatrix::from_values(Matrix values) {
    ExpressionMatrix y;
    y.values = std::move(values);
    for (Eigen::Index i = 0; i < y.values.rows(); ++i) y.row_ids.push_back("g" + std::to_string(i + 1));
    for (Eigen::Index j = 0; j < y.values.cols(); ++j) y.col_ids.push_back("c" + std::to_string(j + 1));
    return y;
}

BiclusterState::BiclusterState(std::size_t p, std::size_t q, std::size_t K)
    : rho(LabelMatrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(K))),
      kappa(LabelMatrix::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(K))) {}

std::size_t BiclusterState::row_count(std::size_t k) const {
    return static_cast<std::size_t>(rho.col(static_cast<Eigen::Index>(k)).cast<int>().sum());
}

std::size_t BiclusterState::col_count(std::size_t k) const {
    return static_cast<std::size_t>(kappa.col(static_cast<Eigen::Index>(k)).cast<int>().sum());
}

void BiclusterState::validate() const {
    if (rho.cols() != kappa.cols()) throw DataError("rho and kappa disagree on K");
    if ((rho.array() > 1).any() || (kappa.array() > 1).any()) {
        throw DataError("membership labels must be 0 or 1");
    }
}

PlaidParameters::PlaidParameters(std::size_t p, std::size_t q, std::size_t K)
    : mu(Vector::Zero(static_cast<Eigen::Index>(K))),
      raw_gene_effects(Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(K))),
      raw_cond_effects(Matrix::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(K))),
      gene_effects(Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(K))),
      cond_effects(Matrix::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(K))) {}

void PlaidParameters::refresh_constrained(const BiclusterState& state) {
    centre_members(state.rho, raw_gene_effects, gene_effects);
    centre_members(state.kappa, raw_cond_effects, cond_effects);
}

void Hyperparameters::validate(std::size_t p, std::size_t q) const {
    for (double v : {sigma2_mu0, sigma2_mu, sigma2_alpha, sigma2_beta, nu, s2}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("hyperparameter variances must be positive");
    }
    if (field_gene.size() != 0 && static_cast<std::size_t>(field_gene.size()) != p) {
        throw ConfigError("gene field offsets must have length p");
    }
    if (field_cond.size() != 0 && static_cast<std::size_t>(field_cond.size()) != q) {
        throw ConfigError("condition field offsets must have length q");
    }
}

namespace {

void check_dims(const BiclusterState& state, const PlaidParameters& params) {
    const auto K = state.rho.cols();
    if (state.kappa.cols() != K || params.mu.size() != K || params.gene_effects.cols() != K
        || params.cond_effects.cols() != K || params.gene_effects.rows() != state.rho.rows()
        || params.cond_effects.rows() != state.kappa.rows()) {
        throw DataError("state and parameter dimensions disagree");
    }
}

void add_layer(Matrix& out, const BiclusterState& state, const PlaidParameters& params,
               Eigen::Index k, double sign) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        if (!state.kappa(j, k)) continue;
        const double cj = params.mu[k] + params.cond_effects(j, k);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            if (state.rho(i, k)) out(i, j) += sign * (cj + params.gene_effects(i, k));
        }
    }
}

}  // namespace

Matrix mean_surface(const BiclusterState& state, const PlaidParameters& params) {
    check_dims(state, params);
    Matrix mu = Matrix::Constant(state.rho.rows(), state.kappa.rows(), params.mu0);
    for (Eigen::Index k = 0; k < state.rho.cols(); ++k) add_layer(mu, state, params, k, 1.0);
    return mu;
}

Matrix partial_residuals(const ExpressionMatrix& y, const BiclusterState& state,
                         const PlaidParameters& params, std::size_t k) {
    check_dims(state, params);
    if (k >= state.biclusters()) throw std::invalid_argument("bicluster index out of range");
    if (y.values.rows() != state.rho.rows() || y.values.cols() != state.kappa.rows()) {
        throw DataError("data and state dimensions disagree");
    }
    Matrix z = y.values.array() - params.mu0;
    for (Eigen::Index kk = 0; kk < state.rho.cols(); ++kk) {
        if (kk != static_cast<Eigen::Index>(k)) add_layer(z, state, params, kk, -1.0);
    }
    return z;
}

double log_likelihood_from_residuals(const Matrix& residuals, double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be positive");
    const double n = static_cast<double>(residuals.size());
    const double ll = -0.5 * n * (kLog2Pi + std::log(sigma2)) - 0.5 * residuals.squaredNorm() / sigma2;
    if (!std::isfinite(ll)) throw DataError("non-finite log-likelihood");
    return ll;
}

double log_likelihood(const ExpressionMatrix& y, const BiclusterState& state,
                      const PlaidParameters& params) {
    if (y.values.rows() != state.rho.rows() || y.values.cols() != state.kappa.rows()) {
        throw DataError("data and state dimensions disagree");
    }
    return log_likelihood_from_residuals(y.values - mean_surface(state, params), params.sigma2);
}

std::vector<double> project_effects(std::span<const double> raw) {
    if (raw.empty()) throw std::invalid_argument("cannot project an empty effect vector");
    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= static_cast<double>(raw.size());
    std::vector<double> out(raw.begin(), raw.end());
    for (double& v : out) v -= mean;
    return out;
}

double log_parameter_prior(const BiclusterState& state, const PlaidParameters& params,
                           const Hyperparameters& hyper) {
    check_dims(state, params);
    double lp = normal_logpdf(params.mu0, hyper.sigma2_mu0);
    for (Eigen::Index k = 0; k < params.mu.size(); ++k) lp += normal_logpdf(params.mu[k], hyper.sigma2_mu);
    for (Eigen::Index i = 0; i < params.raw_gene_effects.size(); ++i) {
        lp += normal_logpdf(params.raw_gene_effects.data()[i], hyper.sigma2_alpha);
    }
    for (Eigen::Index i = 0; i < params.raw_cond_effects.size(); ++i) {
        lp += normal_logpdf(params.raw_cond_effects.data()[i], hyper.sigma2_beta);
    }
    lp += scaled_inv_chi2_logpdf(params.sigma2, hyper.nu, hyper.s2);
    return lp;
}

}  // namespace gplaid
