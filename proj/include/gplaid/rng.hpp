#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gplaid {

/// All randomness in a chain flows from one seeded 64-bit Mersenne twister.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double draw_normal(Rng& rng, double mean, double variance) {
    return mean + std::sqrt(variance) * std::normal_distribution<double>(0.0, 1.0)(rng);
}

/// Scaled inverse chi-squared with nu degrees of freedom and scale s2.
inline double draw_scaled_inv_chi2(Rng& rng, double nu, double s2) {
    return nu * s2 / std::chi_squared_distribution<double>(nu)(rng);
}

inline double logistic(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// Bernoulli draw with log-odds of 1 versus 0 equal to `log_odds`.
inline bool draw_bernoulli_logit(Rng& rng, double log_odds) {
    return uniform01(rng) < logistic(log_odds);
}

}  // namespace gplaid
