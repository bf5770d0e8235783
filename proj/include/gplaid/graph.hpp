#pragma once

// Relational graphs over genes or conditions, edge weights and temperature grids.

#include "gplaid/plaid.hpp"

#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

namespace gplaid {

struct Edge {
    std::size_t a;
    std::size_t b;  // a < b
    double distance;
};

/// Sparse undirected weighted graph. Edges are unique unordered pairs sorted
/// by (a, b); there are no self-loops.
class RelationalGraph {
public:
    RelationalGraph() = default;

    /// Validates and canonicalises the edge list (orders endpoints, sorts).
    /// Duplicate pairs, self-loops and bad distances raise DataError.
    RelationalGraph(std::size_t n_nodes, std::vector<Edge> edges, double bandwidth);

    std::size_t nodes() const { return n_nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    double bandwidth() const { return bandwidth_; }

    /// exp(-d^2 / (2 sigma^2)) per edge; the temperature-free kernel part.
    std::vector<double> kernel_weights() const;

    std::vector<std::size_t> degrees() const;

private:
    std::size_t n_nodes_ = 0;
    std::vector<Edge> edges_;
    double bandwidth_ = 1.0;
};

/// r-nearest-neighbour graph, symmetrised by union. Ties are broken by
/// ascending node index. Bandwidth is the average nearest-neighbour distance.
RelationalGraph build_knn_graph(const Matrix& distances, std::size_t r);

/// Graph from an explicit edge list. Bandwidth defaults to the average over
/// nodes of each node's smallest incident edge distance.
RelationalGraph graph_from_edges(std::size_t n_nodes, std::vector<Edge> edges);

/// Resolves named edge endpoints against `ids`; an unknown name that parses
/// as an integer in range is taken as a 0-based index.
std::vector<Edge> resolve_edges(const std::vector<std::string>& ids,
                                const std::vector<std::tuple<std::string, std::string, double>>& named);

/// B(d; T, sigma) = (1/T) exp(-d^2 / (2 sigma^2)).
double edge_weight(double distance, double temperature, double bandwidth);

/// Mean over nodes of the distance to the nearest other node.
double avg_nn_bandwidth(const Matrix& distances);
double avg_nn_bandwidth(std::size_t n_nodes, const std::vector<Edge>& edges);

/// 2 (1 - xi^|j - j'|) for |j - j'| <= 3, otherwise 0.
double correlation_distance(std::size_t j, std::size_t j2, double xi);

/// Time-course condition graph: edges between conditions at lag 1..max_lag
/// with correlation distances. Pairs beyond max_lag are non-edges.
RelationalGraph build_correlation_graph(std::size_t q, double xi, std::size_t max_lag = 3);

/// Conditions in the same group are linked with a common distance.
RelationalGraph build_group_graph(const std::vector<std::string>& groups, double distance);

enum class GridSpacing { linear, geometric };

class TemperatureGrid {
public:
    TemperatureGrid() : values_{1.0} {}
    explicit TemperatureGrid(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

TemperatureGrid build_temperature_grid(double t_min, double t_max, std::size_t m, GridSpacing spacing);

GridSpacing parse_spacing(const std::string& s);

}  // namespace gplaid
