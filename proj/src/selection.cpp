#include "gplaid/selection.hpp"

#include "gplaid/errors.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace gplaid {

const TraceRecord& map_estimate(const SamplerTrace& trace) {
    if (trace.records.empty()) throw DataError("trace is empty");
    const TraceRecord* best = &trace.records.front();
    for (const auto& rec : trace.records) {
        if (rec.log_posterior > best->log_posterior) best = &rec;
    }
    return *best;
}

DicResult dic_c(const std::vector<double>& log_likelihoods, double map_log_likelihood) {
    if (log_likelihoods.empty()) throw DataError("trace is empty");
    double mean = 0.0;
    for (double ll : log_likelihoods) mean += ll;
    mean /= static_cast<double>(log_likelihoods.size());
    const double p_c = -2.0 * mean + 2.0 * map_log_likelihood;
    return {-2.0 * mean + p_c, p_c, mean, map_log_likelihood};
}

DicResult dic_c(const SamplerTrace& trace) {
    const auto& map = map_estimate(trace);
    std::vector<double> ll;
    ll.reserve(trace.records.size());
    for (const auto& rec : trace.records) ll.push_back(rec.log_likelihood);
    return dic_c(ll, map.log_likelihood);
}

std::size_t aic_dimension(const BiclusterState& state) {
    std::size_t d = 2 + state.biclusters();
    for (std::size_t k = 0; k < state.biclusters(); ++k) {
        const std::size_t r = state.row_count(k);
        const std::size_t c = state.col_count(k);
        d += (r > 0 ? r - 1 : 0) + (c > 0 ? c - 1 : 0);
    }
    return d;
}

double aic(double map_log_likelihood, std::size_t dimension) {
    return -2.0 * map_log_likelihood + 2.0 * static_cast<double>(dimension);
}

double aic(const TraceRecord& map_record) {
    return aic(map_record.log_likelihood, aic_dimension(map_record.state));
}

ThresholdResult threshold_memberships(const Matrix& row_prob, const Matrix& col_prob, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in [0, 1]");
    if (row_prob.cols() != col_prob.cols()) throw DataError("membership matrices disagree on K");
    auto in_range = [](const Matrix& m) { return (m.array() >= 0.0).all() && (m.array() <= 1.0).all(); };
    if (!in_range(row_prob) || !in_range(col_prob)) throw DataError("membership probabilities must lie in [0, 1]");
    ThresholdResult out;
    for (Eigen::Index k = 0; k < row_prob.cols(); ++k) {
        Bicluster b;
        for (Eigen::Index i = 0; i < row_prob.rows(); ++i) {
            if (row_prob(i, k) >= threshold) b.rows.push_back(static_cast<std::size_t>(i));
        }
        for (Eigen::Index j = 0; j < col_prob.rows(); ++j) {
            if (col_prob(j, k) >= threshold) b.cols.push_back(static_cast<std::size_t>(j));
        }
        if (b.rows.empty() || b.cols.empty()) {
            out.dropped.push_back(static_cast<std::size_t>(k));
            continue;
        }
        out.biclusters.push_back(std::move(b));
        out.source_index.push_back(static_cast<std::size_t>(k));
    }
    return out;
}

ThresholdResult biclusters_from_state(const BiclusterState& state) {
    return threshold_memberships(state.rho.cast<double>(), state.kappa.cast<double>(), 0.5);
}

namespace {

std::size_t intersection_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

void require_nonempty(const Bicluster& b) {
    if (b.rows.empty() || b.cols.empty()) throw DataError("bicluster is empty");
}

}  // namespace

F1Pair f1_pair(const Bicluster& a, const Bicluster& b) {
    require_nonempty(a);
    require_nonempty(b);
    const double shared =
        static_cast<double>(intersection_size(a.rows, b.rows)) * static_cast<double>(intersection_size(a.cols, b.cols));
    const double na = static_cast<double>(a.cells());
    const double nb = static_cast<double>(b.cells());
    return {shared / nb, shared / na, 2.0 * shared / (na + nb)};
}

double f1_average(const BiclusterSet& m1, const BiclusterSet& m2) {
    if (m1.empty() || m2.empty()) throw DataError("bicluster set is empty");
    double total = 0.0;
    for (const auto& a : m1) {
        double best = 0.0;
        for (const auto& b : m2) best = std::max(best, f1_pair(a, b).f1);
        total += best;
    }
    return total / static_cast<double>(m1.size());
}

double relative_redundancy(const Bicluster& a, const Bicluster& b, Dimension dim) {
    const auto& sa = dim == Dimension::rows ? a.rows : a.cols;
    const auto& sb = dim == Dimension::rows ? b.rows : b.cols;
    if (sa.empty() || sb.empty()) throw DataError("index set is empty");
    const double shared = static_cast<double>(intersection_size(sa, sb));
    return 0.5 * (shared / static_cast<double>(sa.size()) + shared / static_cast<double>(sb.size()));
}

}  // namespace gplaid
