#pragma once

// Wang-Landau flat-histogram adaptation over a (T_rho, T_kappa) grid.

#include "gplaid/graph.hpp"
#include "gplaid/plaid.hpp"
#include "gplaid/rng.hpp"

#include <cstdint>
#include <vector>

namespace gplaid {

struct WangLandauConfig {
    double gamma0 = 1.0;
    /// Histogram is flat when min visits >= flatness_fraction * mean visits.
    double flatness_fraction = 0.8;
    /// Flatness is only tested once an epoch holds this many visits.
    std::size_t min_epoch_length = 1000;
    double gamma_floor_coef = 1e-4;
    double gamma_floor_exp = 0.7;

    void validate() const;
};

enum class TemperatureSide { rho, kappa };

struct WangLandauState {
    TemperatureGrid grid_rho;
    TemperatureGrid grid_kappa;
    WangLandauConfig config;
    Matrix log_psi;                       // m x n
    std::vector<std::uint64_t> visits;    // current epoch, row-major m x n
    std::vector<std::uint64_t> total_visits;
    double gamma = 1.0;
    std::size_t epoch = 0;
    bool floor_active = false;
    std::size_t cur_rho = 0;
    std::size_t cur_kappa = 0;

    WangLandauState() = default;
    WangLandauState(TemperatureGrid rho, TemperatureGrid kappa, WangLandauConfig cfg);

    std::size_t m() const { return grid_rho.size(); }
    std::size_t n() const { return grid_kappa.size(); }
    std::size_t cells() const { return m() * n(); }
    double t_rho() const { return grid_rho[cur_rho]; }
    double t_kappa() const { return grid_kappa[cur_kappa]; }

    void record_visit();
    std::uint64_t epoch_visits() const;
};

struct TemperatureProposal {
    std::size_t index;
    /// log q(current | proposed) - log q(proposed | current)
    double log_ratio;
};

/// Probability of proposing index `to` from `from` on a grid of `size`:
/// 1 at the ends (towards the interior), 1/2 each way in the interior.
double proposal_probability(std::size_t from, std::size_t to, std::size_t size);

TemperatureProposal propose_temperature(std::size_t current, std::size_t grid_size, Rng& rng);

/// Log acceptance ratio of a temperature move on one side. `energy` is the
/// temperature-free interaction sum over all biclusters,
/// sum_k sum_{i~i'} exp(-d^2/2s^2) 1[labels equal], so the pairwise term is
/// energy * (1/T_new - 1/T_old).
double wl_log_acceptance(TemperatureSide side, const TemperatureProposal& proposal, double energy,
                         const WangLandauState& wl);

/// Proposes and accepts/rejects a move on one side; updates the current index.
bool wl_accept_temperature(TemperatureSide side, const TemperatureProposal& proposal, double energy,
                           WangLandauState& wl, Rng& rng);

/// Same, computing the energy from a label matrix (columns = biclusters).
bool wl_accept_temperature(TemperatureSide side, const TemperatureProposal& proposal,
                           const LabelMatrix& labels, const RelationalGraph* graph, WangLandauState& wl,
                           Rng& rng);

/// log psi += gamma (1[cell visited] - 1/(mn)).
void update_log_psi(WangLandauState& wl, std::size_t i_rho, std::size_t i_kappa);

/// gamma at iteration t (>= 1): halves on each flat epoch, switching for good
/// to gamma_floor_coef / t^gamma_floor_exp once the halved value drops below it.
void gamma_schedule(WangLandauState& wl, std::size_t t);

bool histogram_is_flat(const std::vector<std::uint64_t>& visits, double fraction);

/// exp(log_psi) normalised to sum to one, computed with log-sum-exp.
Matrix normalized_psi(const WangLandauState& wl);

}  // namespace gplaid
