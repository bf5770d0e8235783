#pragma once

// Swendsen-Wang block updates for a binary auto-logistic field on a graph.

#include "gplaid/graph.hpp"
#include "gplaid/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gplaid {

/// Probability that a bond is frozen: (1 - e^{-B}) on same-label edges, else 0.
double bond_probability(double weight, bool same_label, bool is_edge);

/// Union-find with path compression.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n);
    std::size_t find(std::size_t x);
    void unite(std::size_t a, std::size_t b);

private:
    std::vector<std::size_t> parent_;
};

/// One Swendsen-Wang update of `labels` targeting
///   p(x) ∝ exp{ sum_i field_i x_i + sum_{edges e=(i,i')} weights_e 1[x_i = x_i'] }.
/// Bonds between equal neighbours are frozen with probability 1 - e^{-w};
/// each connected component is then relabelled 1 with log-odds equal to the
/// sum of its fields. Components are visited in order of their smallest node.
void swendsen_wang_update(const RelationalGraph& graph, std::span<const double> weights,
                          std::span<const double> field, std::span<std::uint8_t> labels, Rng& rng);

/// sum_e kernel_e 1[x_a = x_b]: the temperature-free interaction energy.
double same_label_energy(const RelationalGraph& graph, std::span<const double> kernel,
                         std::span<const std::uint8_t> labels);

}  // namespace gplaid
