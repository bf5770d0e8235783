#include "gplaid/wang_landau.hpp"

#include "gplaid/errors.hpp"
#include "gplaid/swendsen_wang.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gplaid {

void WangLandauConfig::validate() const {
    if (!(gamma0 > 0.0)) throw ConfigError("gamma0 must be positive");
    if (!(flatness_fraction > 0.0 && flatness_fraction < 1.0)) {
        throw ConfigError("flatness_fraction must lie in (0, 1)");
    }
    if (!(gamma_floor_coef > 0.0) || !(gamma_floor_exp > 0.0)) {
        throw ConfigError("gamma floor coefficient and exponent must be positive");
    }
}

WangLandauState::WangLandauState(TemperatureGrid rho, TemperatureGrid kappa, WangLandauConfig cfg)
    : grid_rho(std::move(rho)), grid_kappa(std::move(kappa)), config(cfg) {
    config.validate();
    log_psi = Matrix::Zero(static_cast<Eigen::Index>(m()), static_cast<Eigen::Index>(n()));
    visits.assign(cells(), 0);
    total_visits.assign(cells(), 0);
    gamma = config.gamma0;
}

void WangLandauState::record_visit() {
    const std::size_t cell = cur_rho * n() + cur_kappa;
    ++visits[cell];
    ++total_visits[cell];
}

std::uint64_t WangLandauState::epoch_visits() const {
    return std::accumulate(visits.begin(), visits.end(), std::uint64_t{0});
}

double proposal_probability(std::size_t from, std::size_t to, std::size_t size) {
    if (size <= 1) return from == to ? 1.0 : 0.0;
    const std::size_t diff = from > to ? from - to : to - from;
    if (diff != 1) return 0.0;
    if (from == 0 || from == size - 1) return 1.0;
    return 0.5;
}

TemperatureProposal propose_temperature(std::size_t current, std::size_t grid_size, Rng& rng) {
    if (grid_size == 0 || current >= grid_size) throw std::invalid_argument("temperature index out of range");
    if (grid_size == 1) return {current, 0.0};
    std::size_t next = 0;
    if (current == 0) {
        next = 1;
    } else if (current == grid_size - 1) {
        next = grid_size - 2;
    } else {
        next = uniform01(rng) < 0.5 ? current - 1 : current + 1;
    }
    const double ratio = proposal_probability(next, current, grid_size) / proposal_probability(current, next, grid_size);
    return {next, std::log(ratio)};
}

double wl_log_acceptance(TemperatureSide side, const TemperatureProposal& proposal, double energy,
                         const WangLandauState& wl) {
    const bool rho = side == TemperatureSide::rho;
    const auto& grid = rho ? wl.grid_rho : wl.grid_kappa;
    const std::size_t cur = rho ? wl.cur_rho : wl.cur_kappa;
    if (proposal.index >= grid.size()) throw std::invalid_argument("proposed temperature not on the grid");
    const auto r_old = static_cast<Eigen::Index>(wl.cur_rho);
    const auto c_old = static_cast<Eigen::Index>(wl.cur_kappa);
    const auto r_new = rho ? static_cast<Eigen::Index>(proposal.index) : r_old;
    const auto c_new = rho ? c_old : static_cast<Eigen::Index>(proposal.index);
    const double pair_term = energy * (1.0 / grid[proposal.index] - 1.0 / grid[cur]);
    return proposal.log_ratio + wl.log_psi(r_old, c_old) - wl.log_psi(r_new, c_new) + pair_term;
}

bool wl_accept_temperature(TemperatureSide side, const TemperatureProposal& proposal, double energy,
                           WangLandauState& wl, Rng& rng) {
    std::size_t& cur = side == TemperatureSide::rho ? wl.cur_rho : wl.cur_kappa;
    if (proposal.index == cur) return true;
    const double log_a = wl_log_acceptance(side, proposal, energy, wl);
    const bool accept = log_a >= 0.0 || std::log(uniform01(rng)) < log_a;
    if (accept) cur = proposal.index;
    return accept;
}

bool wl_accept_temperature(TemperatureSide side, const TemperatureProposal& proposal,
                           const LabelMatrix& labels, const RelationalGraph* graph, WangLandauState& wl,
                           Rng& rng) {
    double energy = 0.0;
    if (graph != nullptr) {
        const auto kernel = graph->kernel_weights();
        for (Eigen::Index k = 0; k < labels.cols(); ++k) {
            energy += same_label_energy(*graph, kernel,
                                        std::span<const std::uint8_t>(labels.col(k).data(),
                                                                      static_cast<std::size_t>(labels.rows())));
        }
    }
    return wl_accept_temperature(side, proposal, energy, wl, rng);
}

void update_log_psi(WangLandauState& wl, std::size_t i_rho, std::size_t i_kappa) {
    if (i_rho >= wl.m() || i_kappa >= wl.n()) throw std::invalid_argument("grid cell out of range");
    const double share = wl.gamma / static_cast<double>(wl.cells());
    wl.log_psi.array() -= share;
    wl.log_psi(static_cast<Eigen::Index>(i_rho), static_cast<Eigen::Index>(i_kappa)) += wl.gamma;
}

bool histogram_is_flat(const std::vector<std::uint64_t>& visits, double fraction) {
    if (visits.empty()) return false;
    const double total = static_cast<double>(std::accumulate(visits.begin(), visits.end(), std::uint64_t{0}));
    if (total == 0.0) return false;
    const double mean = total / static_cast<double>(visits.size());
    const auto min_v = static_cast<double>(*std::min_element(visits.begin(), visits.end()));
    return min_v >= fraction * mean;
}

void gamma_schedule(WangLandauState& wl, std::size_t t) {
    if (t < 1) throw std::invalid_argument("iteration index starts at 1");
    const auto& cfg = wl.config;
    const double floor = cfg.gamma_floor_coef / std::pow(static_cast<double>(t), cfg.gamma_floor_exp);
    if (!wl.floor_active) {
        if (wl.epoch_visits() >= cfg.min_epoch_length && histogram_is_flat(wl.visits, cfg.flatness_fraction)) {
            ++wl.epoch;
            wl.gamma = cfg.gamma0 / std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(wl.epoch, 1000)));
            std::fill(wl.visits.begin(), wl.visits.end(), std::uint64_t{0});
        }
        if (wl.gamma < floor) wl.floor_active = true;
    }
    if (wl.floor_active) wl.gamma = floor;
}

Matrix normalized_psi(const WangLandauState& wl) {
    const double mx = wl.log_psi.maxCoeff();
    Matrix e = (wl.log_psi.array() - mx).exp().matrix();
    return e / e.sum();
}

}  // namespace gplaid
