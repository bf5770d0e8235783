#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the sampler code paths it checks.

#include "gplaid/graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

inline double log_sum_exp(const std::vector<double>& v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

/// Exact distribution over all 2^n labelings of
///   p(x) ∝ exp( sum_i h_i x_i + sum_e w_e 1[x_a = x_b] ),
/// indexed by the bit pattern (bit i = label of node i).
inline std::vector<double> ising_distribution(std::size_t n, const std::vector<gplaid::Edge>& edges,
                                              const std::vector<double>& w, const std::vector<double>& h) {
    const std::size_t states = std::size_t{1} << n;
    std::vector<double> logp(states);
    for (std::size_t s = 0; s < states; ++s) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((s >> i) & 1U) e += h[i];
        }
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (((s >> edges[k].a) & 1U) == ((s >> edges[k].b) & 1U)) e += w[k];
        }
        logp[s] = e;
    }
    const double z = log_sum_exp(logp);
    std::vector<double> p(states);
    for (std::size_t s = 0; s < states; ++s) p[s] = std::exp(logp[s] - z);
    return p;
}

/// log of the scaled-inverse-chi-squared density of sigma2.
inline double log_scaled_inv_chi2(double x, double nu, double s2) {
    const double h = nu / 2.0;
    return h * std::log(h) - std::lgamma(h) + h * std::log(s2) - (h + 1.0) * std::log(x) - nu * s2 / (2.0 * x);
}

struct MicroPrior {
    double var_mu0 = 0.5;
    double var_mu = 0.5;
    double var_alpha = 0.5;
    double var_beta = 0.5;
    double nu = 1.0;
    double s2 = 0.05;
};

/// log p(y | rho, kappa) for one bicluster with every parameter integrated
/// out: y ~ N(0, sigma2 I + C) given sigma2, where C collects the Gaussian
/// prior covariances of mu0, mu_1 and the centred effects on the block, and
/// sigma2 is integrated numerically against its prior on a log grid.
inline double log_marginal_likelihood(const Eigen::MatrixXd& y, const std::vector<int>& rho,
                                      const std::vector<int>& kappa, const MicroPrior& pr) {
    const auto p = y.rows();
    const auto q = y.cols();
    const auto n = p * q;
    std::vector<Eigen::Index> rows, cols;
    for (Eigen::Index i = 0; i < p; ++i) {
        if (rho[static_cast<std::size_t>(i)]) rows.push_back(i);
    }
    for (Eigen::Index j = 0; j < q; ++j) {
        if (kappa[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    const bool block = !rows.empty() && !cols.empty();
    const double r = static_cast<double>(rows.size());
    const double c = static_cast<double>(cols.size());
    auto in_rows = [&](Eigen::Index i) { return rho[static_cast<std::size_t>(i)] != 0; };
    auto in_cols = [&](Eigen::Index j) { return kappa[static_cast<std::size_t>(j)] != 0; };

    Eigen::MatrixXd C(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const Eigen::Index i = a % p, j = a / p;  // column-major cell order
        for (Eigen::Index b = 0; b < n; ++b) {
            const Eigen::Index i2 = b % p, j2 = b / p;
            double v = pr.var_mu0;
            if (block && in_rows(i) && in_cols(j) && in_rows(i2) && in_cols(j2)) {
                const double vi = (i == i2 ? 1.0 : 0.0) - 1.0 / r;
                const double uj = (j == j2 ? 1.0 : 0.0) - 1.0 / c;
                v += pr.var_mu + pr.var_alpha * vi + pr.var_beta * uj;
            }
            C(a, b) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const Eigen::VectorXd proj = es.eigenvectors().transpose() * Eigen::Map<const Eigen::VectorXd>(y.data(), n);

    // integral over u = log sigma2 of p(y | sigma2) p(sigma2) sigma2
    const int steps = 6000;
    const double lo = std::log(1e-7), hi = std::log(1e3);
    const double du = (hi - lo) / steps;
    std::vector<double> terms;
    terms.reserve(steps + 1);
    for (int s = 0; s <= steps; ++s) {
        const double u = lo + du * s;
        const double sig2 = std::exp(u);
        double ll = 0.0;
        for (Eigen::Index a = 0; a < n; ++a) {
            const double v = sig2 + lam[a];
            ll += -0.5 * std::log(2.0 * M_PI * v) - 0.5 * proj[a] * proj[a] / v;
        }
        const double w = (s == 0 || s == steps) ? 0.5 : 1.0;
        terms.push_back(ll + log_scaled_inv_chi2(sig2, pr.nu, pr.s2) + u + std::log(w * du));
    }
    return log_sum_exp(terms);
}

/// Normalised psi over a temperature grid for one bicluster with a gene
/// graph (kernel weights `w0`) and independent, unweighted condition labels:
///   psi(T) ∝ sum_{rho, kappa} exp( sum_e w0_e 1[rho_a = rho_b] / T ) p(y | rho, kappa).
inline std::vector<double> brute_force_psi(const Eigen::MatrixXd& y, const std::vector<gplaid::Edge>& edges,
                                           const std::vector<double>& w0, const std::vector<double>& temps,
                                           const MicroPrior& pr) {
    const auto p = static_cast<std::size_t>(y.rows());
    const auto q = static_cast<std::size_t>(y.cols());
    std::vector<double> energy(std::size_t{1} << p, 0.0);
    std::vector<double> log_m_rho(std::size_t{1} << p);
    for (std::size_t s = 0; s < energy.size(); ++s) {
        std::vector<int> rho(p);
        for (std::size_t i = 0; i < p; ++i) rho[i] = static_cast<int>((s >> i) & 1U);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (rho[edges[e].a] == rho[edges[e].b]) energy[s] += w0[e];
        }
        std::vector<double> over_kappa;
        for (std::size_t t = 0; t < (std::size_t{1} << q); ++t) {
            std::vector<int> kappa(q);
            for (std::size_t j = 0; j < q; ++j) kappa[j] = static_cast<int>((t >> j) & 1U);
            over_kappa.push_back(log_marginal_likelihood(y, rho, kappa, pr));
        }
        log_m_rho[s] = log_sum_exp(over_kappa);
    }
    std::vector<double> log_psi;
    for (double T : temps) {
        std::vector<double> v(energy.size());
        for (std::size_t s = 0; s < energy.size(); ++s) v[s] = energy[s] / T + log_m_rho[s];
        log_psi.push_back(log_sum_exp(v));
    }
    const double z = log_sum_exp(log_psi);
    std::vector<double> out;
    for (double l : log_psi) out.push_back(std::exp(l - z));
    return out;
}

}  // namespace oracle
