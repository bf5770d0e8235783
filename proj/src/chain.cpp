#include "gplaid/chain.hpp"

#include "gplaid/errors.hpp"
#include "gplaid/gibbs.hpp"
#include "gplaid/swendsen_wang.hpp"

#include <cmath>

namespace gplaid {

void ChainConfig::validate() const {
    if (K < 1) throw ConfigError("K must be at least 1");
    if (max_iters == 0) throw ConfigError("max_iters must be positive");
    if (!(max_iters > burn_in)) throw ConfigError("max_iters must exceed burn_in");
    if (thin < 1) throw ConfigError("thin must be at least 1");
    wang_landau.validate();
}

namespace {

// Effects every candidate row would carry if it joined: raw effects minus the
// current member mean. With no members every candidate is a singleton,
// whose projected effect is zero.
Vector candidate_effects(const LabelMatrix& labels, const Matrix& raw, Eigen::Index k) {
    double sum = 0.0;
    Eigen::Index m = 0;
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
        if (labels(i, k)) {
            sum += raw(i, k);
            ++m;
        }
    }
    if (m == 0) return Vector::Zero(raw.rows());
    return raw.col(k).array() - sum / static_cast<double>(m);
}

void refresh_column(const LabelMatrix& labels, const Matrix& raw, Matrix& out, Eigen::Index k) {
    out.col(k).setZero();
    double sum = 0.0;
    Eigen::Index m = 0;
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
        if (labels(i, k)) {
            sum += raw(i, k);
            ++m;
        }
    }
    if (m == 0) return;
    const double mean = sum / static_cast<double>(m);
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
        if (labels(i, k)) out(i, k) = raw(i, k) - mean;
    }
}

void independent_update(std::span<const double> field, std::span<std::uint8_t> labels, Rng& rng) {
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = draw_bernoulli_logit(rng, field[i]) ? 1 : 0;
}

double label_energy(const RelationalGraph* graph, const std::vector<double>& kernel, const LabelMatrix& labels) {
    if (graph == nullptr) return 0.0;
    double e = 0.0;
    for (Eigen::Index k = 0; k < labels.cols(); ++k) {
        e += same_label_energy(*graph, kernel,
                               std::span<const std::uint8_t>(labels.col(k).data(),
                                                             static_cast<std::size_t>(labels.rows())));
    }
    return e;
}

}  // namespace

void sweep_gene_labels(const Matrix& z, BiclusterState& state, const PlaidParameters& params,
                       const Hyperparameters& hyper, const RelationalGraph* graph, std::span<const double> weights,
                       std::size_t k, Rng& rng) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Vector alpha = candidate_effects(state.rho, params.raw_gene_effects, kk);
    const Vector field = row_field(z, std::span<const std::uint8_t>(state.kappa.col(kk).data(), state.conditions()),
                                   params.mu[kk], alpha, params.cond_effects.col(kk), hyper.field_gene,
                                   params.sigma2);
    std::span<std::uint8_t> labels(state.rho.col(kk).data(), state.genes());
    std::span<const double> f(field.data(), static_cast<std::size_t>(field.size()));
    if (graph == nullptr) {
        independent_update(f, labels, rng);
    } else {
        swendsen_wang_update(*graph, weights, f, labels, rng);
    }
}

void sweep_condition_labels(const Matrix& z, BiclusterState& state, const PlaidParameters& params,
                            const Hyperparameters& hyper, const RelationalGraph* graph,
                            std::span<const double> weights, std::size_t k, Rng& rng) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Vector beta = candidate_effects(state.kappa, params.raw_cond_effects, kk);
    const Vector field = col_field(z, std::span<const std::uint8_t>(state.rho.col(kk).data(), state.genes()),
                                   params.mu[kk], params.gene_effects.col(kk), beta, hyper.field_cond,
                                   params.sigma2);
    std::span<std::uint8_t> labels(state.kappa.col(kk).data(), state.conditions());
    std::span<const double> f(field.data(), static_cast<std::size_t>(field.size()));
    if (graph == nullptr) {
        independent_update(f, labels, rng);
    } else {
        swendsen_wang_update(*graph, weights, f, labels, rng);
    }
}

double joint_log_posterior(double log_lik, const BiclusterState& state, const PlaidParameters& params,
                           const Hyperparameters& hyper) {
    double lp = log_lik + log_parameter_prior(state, params, hyper);
    for (Eigen::Index k = 0; k < state.rho.cols(); ++k) {
        for (Eigen::Index i = 0; i < state.rho.rows(); ++i) {
            if (state.rho(i, k)) lp += hyper.gene_offset(static_cast<std::size_t>(i));
        }
        for (Eigen::Index j = 0; j < state.kappa.rows(); ++j) {
            if (state.kappa(j, k)) lp += hyper.cond_offset(static_cast<std::size_t>(j));
        }
    }
    return lp;
}

SamplerTrace run_chain(const ExpressionMatrix& y, const ChainGraphs& graphs, const ChainConfig& config) {
    config.validate();
    y.validate();
    const std::size_t p = y.rows();
    const std::size_t q = y.cols();
    const std::size_t K = config.K;
    config.hyper.validate(p, q);
    if (graphs.genes != nullptr && graphs.genes->nodes() != p) {
        throw DataError("gene graph has " + std::to_string(graphs.genes->nodes()) + " nodes, data has "
                        + std::to_string(p) + " rows");
    }
    if (graphs.conditions != nullptr && graphs.conditions->nodes() != q) {
        throw DataError("condition graph has " + std::to_string(graphs.conditions->nodes())
                        + " nodes, data has " + std::to_string(q) + " columns");
    }

    Rng rng(config.rng_seed);
    const Hyperparameters& hyper = config.hyper;

    WangLandauState wl(graphs.genes ? config.grid_rho : TemperatureGrid(),
                       graphs.conditions ? config.grid_kappa : TemperatureGrid(), config.wang_landau);
    wl.cur_rho = wl.m() / 2;
    wl.cur_kappa = wl.n() / 2;

    const std::vector<double> kernel_rho = graphs.genes ? graphs.genes->kernel_weights() : std::vector<double>{};
    const std::vector<double> kernel_kappa =
        graphs.conditions ? graphs.conditions->kernel_weights() : std::vector<double>{};
    std::vector<double> w_rho(kernel_rho.size());
    std::vector<double> w_kappa(kernel_kappa.size());

    // Initial state: Bernoulli(1/2) labels, data-centred mean, zero effects.
    BiclusterState state(p, q, K);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(K); ++k) {
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(p); ++i) state.rho(i, k) = uniform01(rng) < 0.5;
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(q); ++j) state.kappa(j, k) = uniform01(rng) < 0.5;
    }
    PlaidParameters params(p, q, K);
    params.mu0 = y.values.mean();
    const double var = (y.values.array() - params.mu0).square().mean();
    params.sigma2 = var > 0.0 ? var : hyper.s2;

    Matrix residual = y.values - mean_surface(state, params);

    SamplerTrace trace;
    trace.row_membership = Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(K));
    trace.col_membership = Matrix::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(K));
    trace.records.reserve((config.max_iters - config.burn_in) / config.thin + 1);

    for (std::size_t t = 1; t <= config.max_iters; ++t) {
        // (i) gene temperature
        if (wl.m() > 1) {
            const auto prop = propose_temperature(wl.cur_rho, wl.m(), rng);
            wl_accept_temperature(TemperatureSide::rho, prop, label_energy(graphs.genes, kernel_rho, state.rho),
                                  wl, rng);
        }
        // (ii) condition temperature
        if (wl.n() > 1) {
            const auto prop = propose_temperature(wl.cur_kappa, wl.n(), rng);
            wl_accept_temperature(TemperatureSide::kappa, prop,
                                  label_energy(graphs.conditions, kernel_kappa, state.kappa), wl, rng);
        }
        // (iii) log-psi and gain
        update_log_psi(wl, wl.cur_rho, wl.cur_kappa);
        wl.record_visit();
        gamma_schedule(wl, t);
        if (t == config.burn_in) std::fill(wl.total_visits.begin(), wl.total_visits.end(), std::uint64_t{0});

        // (iv) labels at the post-move temperatures
        const double inv_t_rho = 1.0 / wl.t_rho();
        const double inv_t_kappa = 1.0 / wl.t_kappa();
        for (std::size_t e = 0; e < w_rho.size(); ++e) w_rho[e] = kernel_rho[e] * inv_t_rho;
        for (std::size_t e = 0; e < w_kappa.size(); ++e) w_kappa[e] = kernel_kappa[e] * inv_t_kappa;
        for (std::size_t k = 0; k < K; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            add_bicluster_layer(residual, state, params, k, 1.0);  // residual is now z_k
            sweep_gene_labels(residual, state, params, hyper, graphs.genes, w_rho, k, rng);
            refresh_column(state.rho, params.raw_gene_effects, params.gene_effects, kk);
            sweep_condition_labels(residual, state, params, hyper, graphs.conditions, w_kappa, k, rng);
            refresh_column(state.kappa, params.raw_cond_effects, params.cond_effects, kk);
            add_bicluster_layer(residual, state, params, k, -1.0);
        }

        // (v) parameters
        update_mu0(residual, params, hyper, rng);
        for (std::size_t k = 0; k < K; ++k) update_bicluster(residual, state, params, hyper, k, rng);
        update_sigma2(residual, params, hyper, rng);

        const bool keep = t > config.burn_in && (t - config.burn_in) % config.thin == 0;
        if (keep) {
            residual = y.values - mean_surface(state, params);
            TraceRecord rec;
            rec.iteration = t;
            rec.log_likelihood = log_likelihood_from_residuals(residual, params.sigma2);
            rec.log_posterior = joint_log_posterior(rec.log_likelihood, state, params, hyper);
            rec.t_rho = wl.cur_rho;
            rec.t_kappa = wl.cur_kappa;
            rec.state = state;
            rec.params = params;
            trace.row_membership += state.rho.cast<double>();
            trace.col_membership += state.kappa.cast<double>();
            trace.records.push_back(std::move(rec));
        } else if (t % 1000 == 0) {
            residual = y.values - mean_surface(state, params);
        }

        if (config.on_progress && config.progress_interval > 0 && t % config.progress_interval == 0) {
            config.on_progress({t, config.max_iters, log_likelihood_from_residuals(residual, params.sigma2),
                                wl.gamma, wl.epoch});
        }
    }

    if (!trace.records.empty()) {
        const double n = static_cast<double>(trace.records.size());
        trace.row_membership /= n;
        trace.col_membership /= n;
    }
    trace.wang_landau = std::move(wl);
    return trace;
}

}  // namespace gplaid
