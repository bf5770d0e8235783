#include "gplaid/swendsen_wang.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gplaid {

double bond_probability(double weight, bool same_label, bool is_edge) {
    if (!(weight >= 0.0)) throw std::invalid_argument("bond weight must be non-negative");
    if (!same_label || !is_edge) return 0.0;
    return -std::expm1(-weight);
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
        const std::size_t next = parent_[x];
        parent_[x] = root;
        x = next;
    }
    return root;
}

void DisjointSets::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // smaller index becomes the root so roots are component minima
    if (a < b) {
        parent_[b] = a;
    } else {
        parent_[a] = b;
    }
}

void swendsen_wang_update(const RelationalGraph& graph, std::span<const double> weights,
                          std::span<const double> field, std::span<std::uint8_t> labels, Rng& rng) {
    const std::size_t n = graph.nodes();
    if (labels.size() != n || field.size() != n) throw std::invalid_argument("label/field length mismatch");
    if (weights.size() != graph.edges().size()) throw std::invalid_argument("weight count mismatch");

    DisjointSets sets(n);
    const auto& edges = graph.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& edge = edges[e];
        if (labels[edge.a] != labels[edge.b]) continue;
        const double p = bond_probability(weights[e], true, true);
        if (p > 0.0 && uniform01(rng) < p) sets.unite(edge.a, edge.b);
    }

    // Roots are component minima, so scanning nodes in order meets each root
    // before any other member of its component.
    std::vector<double> log_odds(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) log_odds[sets.find(i)] += field[i];
    std::vector<std::uint8_t> new_label(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = sets.find(i);
        if (root == i) new_label[i] = draw_bernoulli_logit(rng, log_odds[i]) ? 1 : 0;
        labels[i] = new_label[root];
    }
}

double same_label_energy(const RelationalGraph& graph, std::span<const double> kernel,
                         std::span<const std::uint8_t> labels) {
    double s = 0.0;
    const auto& edges = graph.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (labels[edges[e].a] == labels[edges[e].b]) s += kernel[e];
    }
    return s;
}

}  // namespace gplaid
