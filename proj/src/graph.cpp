#include "gplaid/graph.hpp"

#include "gplaid/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace gplaid {

RelationalGraph::RelationalGraph(std::size_t n_nodes, std::vector<Edge> edges, double bandwidth)
    : n_nodes_(n_nodes), edges_(std::move(edges)), bandwidth_(bandwidth) {
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) throw DataError("graph bandwidth must be positive");
    for (auto& e : edges_) {
        if (e.a == e.b) throw DataError("self-loop on node " + std::to_string(e.a));
        if (e.a >= n_nodes_ || e.b >= n_nodes_) throw DataError("edge endpoint out of range");
        if (!std::isfinite(e.distance) || e.distance < 0.0) throw DataError("edge distance must be finite and >= 0");
        if (e.a > e.b) std::swap(e.a, e.b);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i].a == edges_[i - 1].a && edges_[i].b == edges_[i - 1].b) {
            throw DataError("duplicate edge " + std::to_string(edges_[i].a) + "-" + std::to_string(edges_[i].b));
        }
    }
}

std::vector<double> RelationalGraph::kernel_weights() const {
    std::vector<double> w;
    w.reserve(edges_.size());
    const double denom = 2.0 * bandwidth_ * bandwidth_;
    for (const auto& e : edges_) w.push_back(std::exp(-e.distance * e.distance / denom));
    return w;
}

std::vector<std::size_t> RelationalGraph::degrees() const {
    std::vector<std::size_t> deg(n_nodes_, 0);
    for (const auto& e : edges_) {
        ++deg[e.a];
        ++deg[e.b];
    }
    return deg;
}

namespace {

void check_distance_matrix(const Matrix& d) {
    if (d.rows() != d.cols()) throw DataError("distance matrix must be square");
    if (!d.allFinite()) throw DataError("distance matrix contains non-finite values");
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0) throw DataError("distance matrix must have a zero diagonal");
        for (Eigen::Index j = 0; j < i; ++j) {
            if (d(i, j) != d(j, i)) throw DataError("distance matrix is not symmetric");
            if (d(i, j) < 0.0) throw DataError("distances must be non-negative");
        }
    }
}

}  // namespace

RelationalGraph build_knn_graph(const Matrix& distances, std::size_t r) {
    check_distance_matrix(distances);
    const auto n = static_cast<std::size_t>(distances.rows());
    if (r < 1 || r >= n) throw std::invalid_argument("neighbour count r must satisfy 1 <= r < n");

    std::map<std::pair<std::size_t, std::size_t>, double> pairs;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        const auto di = distances.row(static_cast<Eigen::Index>(i));
        auto less = [&](std::size_t x, std::size_t y) {
            // self sorts last so it is never chosen
            if (x == i || y == i) return y == i && x != i;
            const double dx = di[static_cast<Eigen::Index>(x)];
            const double dy = di[static_cast<Eigen::Index>(y)];
            return dx < dy || (dx == dy && x < y);
        };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r), order.end(), less);
        for (std::size_t t = 0; t < r; ++t) {
            const std::size_t j = order[t];
            pairs.emplace(std::minmax(i, j), di[static_cast<Eigen::Index>(j)]);
        }
    }
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [key, d] : pairs) edges.push_back({key.first, key.second, d});
    return RelationalGraph(n, std::move(edges), avg_nn_bandwidth(distances));
}

RelationalGraph graph_from_edges(std::size_t n_nodes, std::vector<Edge> edges) {
    const double sigma = avg_nn_bandwidth(n_nodes, edges);
    return RelationalGraph(n_nodes, std::move(edges), sigma);
}

std::vector<Edge> resolve_edges(const std::vector<std::string>& ids,
                                const std::vector<std::tuple<std::string, std::string, double>>& named) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
    auto lookup = [&](const std::string& name) -> std::size_t {
        if (auto it = index.find(name); it != index.end()) return it->second;
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), v);
        if (ec == std::errc() && ptr == name.data() + name.size() && v < ids.size()) return v;
        throw DataError("edge endpoint '" + name + "' does not match any node id");
    };
    std::vector<Edge> edges;
    edges.reserve(named.size());
    for (const auto& [a, b, d] : named) edges.push_back({lookup(a), lookup(b), d});
    return edges;
}

double edge_weight(double distance, double temperature, double bandwidth) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!(distance >= 0.0)) throw std::invalid_argument("distance must be non-negative");
    return std::exp(-distance * distance / (2.0 * bandwidth * bandwidth)) / temperature;
}

double avg_nn_bandwidth(const Matrix& distances) {
    const auto n = distances.rows();
    if (n < 2) throw DataError("bandwidth needs at least two nodes");
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) best = std::min(best, distances(i, j));
        }
        total += best;
    }
    const double sigma = total / static_cast<double>(n);
    if (!(sigma > 0.0)) throw DataError("degenerate distances: every nearest-neighbour distance is zero");
    return sigma;
}

double avg_nn_bandwidth(std::size_t n_nodes, const std::vector<Edge>& edges) {
    if (n_nodes < 2) throw DataError("bandwidth needs at least two nodes");
    std::vector<double> best(n_nodes, std::numeric_limits<double>::infinity());
    for (const auto& e : edges) {
        if (e.a >= n_nodes || e.b >= n_nodes) throw DataError("edge endpoint out of range");
        best[e.a] = std::min(best[e.a], e.distance);
        best[e.b] = std::min(best[e.b], e.distance);
    }
    double total = 0.0;
    std::size_t counted = 0;
    for (double b : best) {
        if (std::isfinite(b)) {
            total += b;
            ++counted;
        }
    }
    if (counted == 0) throw DataError("graph has no edges to derive a bandwidth from");
    const double sigma = total / static_cast<double>(counted);
    if (!(sigma > 0.0)) throw DataError("degenerate distances: every nearest-neighbour distance is zero");
    return sigma;
}

double correlation_distance(std::size_t j, std::size_t j2, double xi) {
    if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("correlation xi must lie in (0, 1)");
    const std::size_t lag = j > j2 ? j - j2 : j2 - j;
    if (lag > 3) return 0.0;
    return 2.0 * (1.0 - std::pow(xi, static_cast<double>(lag)));
}

RelationalGraph build_correlation_graph(std::size_t q, double xi, std::size_t max_lag) {
    if (q < 2) throw DataError("correlation graph needs at least two conditions");
    if (max_lag < 1 || max_lag > 3) throw std::invalid_argument("max_lag must be in 1..3");
    std::vector<Edge> edges;
    for (std::size_t j = 0; j < q; ++j) {
        for (std::size_t lag = 1; lag <= max_lag && j + lag < q; ++lag) {
            edges.push_back({j, j + lag, correlation_distance(j, j + lag, xi)});
        }
    }
    return graph_from_edges(q, std::move(edges));
}

RelationalGraph build_group_graph(const std::vector<std::string>& groups, double distance) {
    if (!(distance > 0.0) || !std::isfinite(distance)) throw ConfigError("group distance must be positive");
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < groups.size(); ++a) {
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            if (!groups[a].empty() && groups[a] == groups[b]) edges.push_back({a, b, distance});
        }
    }
    return graph_from_edges(groups.size(), std::move(edges));
}

TemperatureGrid::TemperatureGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ConfigError("temperature grid must not be empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) throw ConfigError("temperatures must be positive");
        if (i > 0 && !(values_[i] > values_[i - 1])) throw ConfigError("temperatures must be strictly increasing");
    }
}

TemperatureGrid build_temperature_grid(double t_min, double t_max, std::size_t m, GridSpacing spacing) {
    if (!(t_min > 0.0) || !(t_max >= t_min) || !std::isfinite(t_max)) {
        throw ConfigError("temperature bounds must satisfy 0 < t_min <= t_max");
    }
    if (m < 1) throw ConfigError("temperature grid needs at least one value");
    if (m == 1) return TemperatureGrid({t_min});
    if (t_min == t_max) throw ConfigError("a grid of several temperatures needs t_min < t_max");
    std::vector<double> v(m);
    const double steps = static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double f = static_cast<double>(i) / steps;
        v[i] = spacing == GridSpacing::linear ? t_min + f * (t_max - t_min)
                                              : t_min * std::pow(t_max / t_min, f);
    }
    v.front() = t_min;
    v.back() = t_max;
    return TemperatureGrid(std::move(v));
}

GridSpacing parse_spacing(const std::string& s) {
    if (s == "linear") return GridSpacing::linear;
    if (s == "geometric") return GridSpacing::geometric;
    throw ConfigError("unknown temperature spacing '" + s + "' (expected linear or geometric)");
}

}  // namespace gplaid
