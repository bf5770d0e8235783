#include "gplaid/commands.hpp"

#include "gplaid/errors.hpp"
#include "gplaid/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace gplaid {

namespace fs = std::filesystem;

namespace {

// Typed access to one JSON object; remembers which keys were consumed so
// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_number()) throw ConfigError(path(key) + " must be a number");
        return v.get<double>();
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        if (!has(key)) return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(path(key) + " must be a non-negative integer");
        }
        return v.get<std::size_t>();
    }

    std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            throw ConfigError(path(key) + " must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_boolean()) throw ConfigError(path(key) + " must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_string()) throw ConfigError(path(key) + " must be a string");
        return v.get<std::string>();
    }

    const Json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        return &obj_.at(key);
    }

    std::string path(const std::string& key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!used_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
        }
    }

private:
    const Json& obj_;
    std::string where_;
    std::set<std::string> used_;
};

std::vector<std::size_t> count_list(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of integers");
    std::vector<std::size_t> out;
    for (const auto& e : v) {
        if (!e.is_number_integer() || e.get<long long>() < 0) throw ConfigError(where + " must hold non-negative integers");
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

Vector number_vector(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(where + " must hold numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

GridOptions parse_grid(const Json& v, const std::string& where) {
    ObjectReader r(v, where);
    GridOptions g;
    g.t_min = r.number("t_min", g.t_min);
    g.t_max = r.number("t_max", g.t_max);
    g.m = r.count("m", g.m);
    if (r.has("spacing")) g.spacing = parse_spacing(r.string("spacing", "geometric"));
    r.finish();
    return g;
}

GraphSource parse_graph(const Json& v, const std::string& where) {
    ObjectReader r(v, where);
    GraphSource g;
    g.distances = r.string("distances", "");
    g.edges = r.string("edges", "");
    g.groups = r.string("groups", "");
    g.group_distance = r.number("group_distance", g.group_distance);
    if (r.has("correlation_xi")) g.correlation_xi = r.number("correlation_xi", 0.0);
    g.max_lag = r.count("max_lag", g.max_lag);
    g.knn = r.count("knn", g.knn);
    r.finish();
    const int sources = int(!g.distances.empty()) + int(!g.edges.empty()) + int(!g.groups.empty())
                        + int(g.correlation_xi.has_value());
    if (sources > 1) throw ConfigError(where + ": give at most one of distances, edges, groups, correlation_xi");
    if (g.knn < 1) throw ConfigError(where + ".knn must be at least 1");
    return g;
}

void parse_hyper(const Json& v, Hyperparameters& h) {
    ObjectReader r(v, "hyper");
    h.sigma2_mu0 = r.number("sigma2_mu0", h.sigma2_mu0);
    h.sigma2_mu = r.number("sigma2_mu", h.sigma2_mu);
    h.sigma2_alpha = r.number("sigma2_alpha", h.sigma2_alpha);
    h.sigma2_beta = r.number("sigma2_beta", h.sigma2_beta);
    h.nu = r.number("nu", h.nu);
    h.s2 = r.number("s2", h.s2);
    if (const Json* f = r.child("field_gene")) h.field_gene = number_vector(*f, "hyper.field_gene");
    if (const Json* f = r.child("field_cond")) h.field_cond = number_vector(*f, "hyper.field_cond");
    r.finish();
}

void parse_wang_landau(const Json& v, WangLandauConfig& c) {
    ObjectReader r(v, "wang_landau");
    c.gamma0 = r.number("gamma0", c.gamma0);
    c.flatness_fraction = r.number("flatness_fraction", c.flatness_fraction);
    c.min_epoch_length = r.count("min_epoch_length", c.min_epoch_length);
    c.gamma_floor_coef = r.number("gamma_floor_coef", c.gamma_floor_coef);
    c.gamma_floor_exp = r.number("gamma_floor_exp", c.gamma_floor_exp);
    r.finish();
}

// Fit keys shared by `fit` and `select`; the caller handles its extra keys
// before finish().
FitOptions parse_fit_keys(ObjectReader& r) {
    FitOptions o;
    o.data = r.string("data", "");
    o.output = r.string("output", "");
    if (const Json* g = r.child("gene_graph")) o.gene_graph = parse_graph(*g, "gene_graph");
    if (const Json* g = r.child("condition_graph")) o.condition_graph = parse_graph(*g, "condition_graph");
    if (const Json* g = r.child("grid_rho")) o.grid_rho = parse_grid(*g, "grid_rho");
    if (const Json* g = r.child("grid_kappa")) o.grid_kappa = parse_grid(*g, "grid_kappa");
    if (const Json* h = r.child("hyper")) parse_hyper(*h, o.chain.hyper);
    if (const Json* w = r.child("wang_landau")) parse_wang_landau(*w, o.chain.wang_landau);
    o.chain.K = r.count("K", o.chain.K);
    o.chain.max_iters = r.count("max_iters", o.chain.max_iters);
    o.chain.burn_in = r.count("burn_in", o.chain.burn_in);
    o.chain.thin = r.count("thin", o.chain.thin);
    o.chain.rng_seed = r.seed("seed", o.chain.rng_seed);
    o.chain.progress_interval = r.count("progress_interval", o.chain.progress_interval);
    o.threshold = r.number("threshold", o.threshold);
    o.write_trace = r.boolean("write_trace", o.write_trace);
    if (o.data.empty()) throw ConfigError("'data' (expression matrix path) is required");
    if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
    o.chain.grid_rho = build_temperature_grid(o.grid_rho.t_min, o.grid_rho.t_max, o.grid_rho.m, o.grid_rho.spacing);
    o.chain.grid_kappa =
        build_temperature_grid(o.grid_kappa.t_min, o.grid_kappa.t_max, o.grid_kappa.m, o.grid_kappa.spacing);
    return o;
}

}  // namespace

FitOptions parse_fit_options(const Json& doc) {
    ObjectReader r(doc, "config");
    FitOptions o = parse_fit_keys(r);
    r.finish();
    o.chain.validate();
    return o;
}

SelectOptions parse_select_options(const Json& doc) {
    ObjectReader r(doc, "config");
    SelectOptions s;
    s.fit = parse_fit_keys(r);
    if (const Json* k = r.child("K_values")) s.k_values = count_list(*k, "K_values");
    if (const Json* k = r.child("seeds")) {
        for (auto v : count_list(*k, "seeds")) s.seeds.push_back(v);
    }
    s.threads = r.count("threads", 1);
    r.finish();
    if (s.k_values.empty()) throw ConfigError("K_values must not be empty");
    for (auto k : s.k_values) {
        if (k < 1) throw ConfigError("K_values must be at least 1");
    }
    std::sort(s.k_values.begin(), s.k_values.end());
    s.k_values.erase(std::unique(s.k_values.begin(), s.k_values.end()), s.k_values.end());
    if (s.seeds.empty()) s.seeds.push_back(s.fit.chain.rng_seed);
    if (s.threads < 1) s.threads = 1;
    s.fit.chain.validate();
    return s;
}

SimulateOptions parse_simulate_options(const Json& doc) {
    ObjectReader r(doc, "config");
    SimulateOptions o;
    ScenarioSpec& s = o.scenario;
    s.p = r.count("p", s.p);
    s.q = r.count("q", s.q);
    s.K = r.count("K", s.K);
    if (r.has("mean_rule")) s.mean_rule = parse_mean_rule(r.string("mean_rule", "yeast"));
    s.custom_base = r.number("custom_base", s.custom_base);
    s.custom_slope = r.number("custom_slope", s.custom_slope);
    s.xi = r.number("xi", s.xi);
    s.nu_sim = r.number("nu_sim", s.nu_sim);
    s.s2_sim = r.number("s2_sim", s.s2_sim);
    if (r.has("sigma2")) s.sigma2_override = r.number("sigma2", 0.0);
    s.var_mu0 = r.number("var_mu0", s.var_mu0);
    s.var_mu = r.number("var_mu", s.var_mu);
    s.var_alpha = r.number("var_alpha", s.var_alpha);
    s.var_beta = r.number("var_beta", s.var_beta);
    s.rows_per_block = r.count("rows_per_block", s.rows_per_block);
    s.cols_per_block = r.count("cols_per_block", s.cols_per_block);
    s.row_overlap = r.number("row_overlap", s.row_overlap);
    s.col_overlap = r.number("col_overlap", s.col_overlap);
    if (const Json* b = r.child("blocks")) {
        if (!b->is_array()) throw ConfigError("blocks must be an array");
        for (const auto& e : *b) {
            ObjectReader br(e, "blocks[]");
            BlockSpec spec;
            spec.row_start = br.count("row_start", 0);
            spec.row_count = br.count("row_count", 0);
            spec.col_start = br.count("col_start", 0);
            spec.col_count = br.count("col_count", 0);
            br.finish();
            s.blocks.push_back(spec);
        }
    }
    const std::string rows_path = r.string("labels_rows", "");
    const std::string cols_path = r.string("labels_cols", "");
    s.rng_seed = r.seed("seed", s.rng_seed);
    o.graph_seed = r.seed("graph_seed", 0);
    o.group_distance = r.number("group_distance", o.group_distance);
    o.output = r.string("output", "");
    r.finish();
    if (rows_path.empty() != cols_path.empty()) throw ConfigError("labels_rows and labels_cols go together");
    if (!rows_path.empty()) {
        const auto rho = io::read_labelled_matrix(rows_path);
        const auto kappa = io::read_labelled_matrix(cols_path);
        if (rho.cols() != kappa.cols()) throw DataError("label files disagree on K");
        BiclusterState st(rho.rows(), kappa.rows(), rho.cols());
        for (Eigen::Index i = 0; i < rho.values.size(); ++i) st.rho.data()[i] = rho.values.data()[i] != 0.0;
        for (Eigen::Index i = 0; i < kappa.values.size(); ++i) st.kappa.data()[i] = kappa.values.data()[i] != 0.0;
        s.labels = std::move(st);
    }
    s.validate();
    return o;
}

namespace {

std::optional<RelationalGraph> load_graph(const GraphSource& src, const std::vector<std::string>& ids,
                                          const std::string& side) {
    if (src.empty()) return std::nullopt;
    const std::size_t n = ids.size();
    if (!src.distances.empty()) {
        const auto d = io::read_labelled_matrix(src.distances);
        if (d.rows() != n || d.cols() != n) {
            throw DataError("'" + src.distances.string() + "': " + side + " distances must be " + std::to_string(n)
                            + " x " + std::to_string(n));
        }
        Matrix dist = d.values;
        if (d.row_ids != ids) {
            std::unordered_map<std::string, std::size_t> pos;
            for (std::size_t i = 0; i < n; ++i) pos.emplace(d.row_ids[i], i);
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto it = pos.find(ids[i]);
                if (it == pos.end()) {
                    throw DataError("'" + src.distances.string() + "': no row for " + side + " '" + ids[i] + "'");
                }
                order[i] = it->second;
            }
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        d.values(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(order[j]));
                }
            }
        }
        if ((dist - dist.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw DataError("'" + src.distances.string() + "': distance matrix is not symmetric");
        }
        return build_knn_graph(dist, std::min(src.knn, n > 1 ? n - 1 : std::size_t{1}));
    }
    if (!src.edges.empty()) {
        std::vector<std::tuple<std::string, std::string, double>> named;
        for (const auto& e : io::read_edge_list(src.edges)) named.emplace_back(e.a, e.b, e.distance);
        return graph_from_edges(n, resolve_edges(ids, named));
    }
    if (!src.groups.empty()) {
        std::unordered_map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < n; ++i) pos.emplace(ids[i], i);
        std::vector<std::string> groups(n);
        for (const auto& [id, group] : io::read_pairs(src.groups)) {
            const auto it = pos.find(id);
            if (it == pos.end()) {
                throw DataError("'" + src.groups.string() + "': unknown " + side + " '" + id + "'");
            }
            groups[it->second] = group;
        }
        return build_group_graph(groups, src.group_distance);
    }
    return build_correlation_graph(n, *src.correlation_xi, src.max_lag);
}

}  // namespace

FitInputs load_fit_inputs(const FitOptions& options) {
    FitInputs in;
    in.data = io::read_labelled_matrix(options.data);
    in.data.validate();
    in.genes = load_graph(options.gene_graph, in.data.row_ids, "gene");
    in.conditions = load_graph(options.condition_graph, in.data.col_ids, "condition");
    return in;
}

FitResult run_fit(const FitOptions& options, const FitInputs& inputs) {
    FitResult fit;
    fit.options = options;
    fit.data = inputs.data;
    ChainGraphs graphs{inputs.genes ? &*inputs.genes : nullptr, inputs.conditions ? &*inputs.conditions : nullptr};
    fit.trace = run_chain(inputs.data, graphs, options.chain);
    if (fit.trace.empty()) throw RuntimeError("no retained samples");
    const TraceRecord& map = map_estimate(fit.trace);
    fit.dic = dic_c(fit.trace);
    fit.aic = aic(map);
    fit.aic_dimension = aic_dimension(map.state);
    fit.biclusters = threshold_memberships(fit.trace.row_membership, fit.trace.col_membership, options.threshold);
    return fit;
}

FitResult run_fit(const FitOptions& options) { return run_fit(options, load_fit_inputs(options)); }

namespace {

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

// One "0110..." string per bicluster.
Json label_strings(const LabelMatrix& labels) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < labels.cols(); ++k) {
        std::string s(static_cast<std::size_t>(labels.rows()), '0');
        for (Eigen::Index i = 0; i < labels.rows(); ++i) {
            if (labels(i, k)) s[static_cast<std::size_t>(i)] = '1';
        }
        out.push_back(std::move(s));
    }
    return out;
}

Json biclusters_json(const ThresholdResult& t, const ExpressionMatrix* data) {
    Json out = Json::array();
    for (std::size_t b = 0; b < t.biclusters.size(); ++b) {
        const auto& bc = t.biclusters[b];
        Json e;
        e["k"] = t.source_index.empty() ? b + 1 : t.source_index[b] + 1;
        e["rows"] = bc.rows;
        e["cols"] = bc.cols;
        if (data != nullptr) {
            Json rid = Json::array();
            Json cid = Json::array();
            for (auto i : bc.rows) rid.push_back(data->row_ids[i]);
            for (auto j : bc.cols) cid.push_back(data->col_ids[j]);
            e["row_ids"] = std::move(rid);
            e["col_ids"] = std::move(cid);
        }
        out.push_back(std::move(e));
    }
    return out;
}

Json grid_json(const TemperatureGrid& g) { return g.values(); }

Json wang_landau_json(const WangLandauState& wl) {
    Json out;
    out["grid_rho"] = grid_json(wl.grid_rho);
    out["grid_kappa"] = grid_json(wl.grid_kappa);
    out["log_psi"] = matrix_json(wl.log_psi);
    out["psi"] = matrix_json(normalized_psi(wl));
    Json visits = Json::array();
    Json total = Json::array();
    for (std::size_t i = 0; i < wl.m(); ++i) {
        Json v = Json::array();
        Json t = Json::array();
        for (std::size_t j = 0; j < wl.n(); ++j) {
            v.push_back(wl.visits[i * wl.n() + j]);
            t.push_back(wl.total_visits[i * wl.n() + j]);
        }
        visits.push_back(std::move(v));
        total.push_back(std::move(t));
    }
    out["epoch_visits"] = std::move(visits);
    out["visits"] = std::move(total);
    out["gamma"] = wl.gamma;
    out["epoch"] = wl.epoch;
    return out;
}

Json params_json(const PlaidParameters& p) {
    Json out;
    out["mu0"] = p.mu0;
    out["mu"] = vector_json(p.mu);
    out["gene_effects"] = matrix_json(p.gene_effects);
    out["cond_effects"] = matrix_json(p.cond_effects);
    out["sigma2"] = p.sigma2;
    return out;
}

Json config_echo(const FitOptions& o) {
    const ChainConfig& c = o.chain;
    Json out;
    out["K"] = c.K;
    out["max_iters"] = c.max_iters;
    out["burn_in"] = c.burn_in;
    out["thin"] = c.thin;
    out["seed"] = c.rng_seed;
    out["threshold"] = o.threshold;
    out["hyper"] = {{"sigma2_mu0", c.hyper.sigma2_mu0}, {"sigma2_mu", c.hyper.sigma2_mu},
                    {"sigma2_alpha", c.hyper.sigma2_alpha}, {"sigma2_beta", c.hyper.sigma2_beta},
                    {"nu", c.hyper.nu}, {"s2", c.hyper.s2}};
    out["wang_landau"] = {{"gamma0", c.wang_landau.gamma0},
                          {"flatness_fraction", c.wang_landau.flatness_fraction},
                          {"min_epoch_length", c.wang_landau.min_epoch_length},
                          {"gamma_floor_coef", c.wang_landau.gamma_floor_coef},
                          {"gamma_floor_exp", c.wang_landau.gamma_floor_exp}};
    return out;
}

}  // namespace

Json criteria_json(const FitResult& fit) {
    Json out;
    out["K"] = fit.options.chain.K;
    out["dic_c"] = fit.dic.dic;
    out["p_c"] = fit.dic.p_c;
    out["aic"] = fit.aic;
    out["aic_dimension"] = fit.aic_dimension;
    out["mean_log_likelihood"] = fit.dic.mean_log_likelihood;
    out["map_log_likelihood"] = fit.dic.map_log_likelihood;
    out["retained_samples"] = fit.trace.records.size();
    return out;
}

Json summary_json(const FitResult& fit) {
    const TraceRecord& map = map_estimate(fit.trace);
    Json out;
    out["config"] = config_echo(fit.options);
    out["p"] = fit.data.rows();
    out["q"] = fit.data.cols();
    out["row_ids"] = fit.data.row_ids;
    out["col_ids"] = fit.data.col_ids;
    out["membership_rows"] = matrix_json(fit.trace.row_membership);
    out["membership_cols"] = matrix_json(fit.trace.col_membership);
    Json m;
    m["iteration"] = map.iteration;
    m["log_likelihood"] = map.log_likelihood;
    m["log_posterior"] = map.log_posterior;
    m["t_rho"] = fit.trace.wang_landau.grid_rho[map.t_rho];
    m["t_kappa"] = fit.trace.wang_landau.grid_kappa[map.t_kappa];
    m["rho"] = label_strings(map.state.rho);
    m["kappa"] = label_strings(map.state.kappa);
    m["params"] = params_json(map.params);
    out["map"] = std::move(m);
    out["wang_landau"] = wang_landau_json(fit.trace.wang_landau);
    out["criteria"] = criteria_json(fit);
    out["threshold"] = fit.options.threshold;
    out["biclusters"] = biclusters_json(fit.biclusters, &fit.data);
    Json dropped = Json::array();
    for (auto k : fit.biclusters.dropped) dropped.push_back(k + 1);
    out["dropped"] = std::move(dropped);
    return out;
}

Json trace_record_json(const TraceRecord& rec, const WangLandauState& wl) {
    Json out;
    out["iteration"] = rec.iteration;
    out["log_likelihood"] = rec.log_likelihood;
    out["log_posterior"] = rec.log_posterior;
    out["t_rho"] = wl.grid_rho[rec.t_rho];
    out["t_kappa"] = wl.grid_kappa[rec.t_kappa];
    out["mu0"] = rec.params.mu0;
    out["mu"] = vector_json(rec.params.mu);
    out["sigma2"] = rec.params.sigma2;
    out["rho"] = label_strings(rec.state.rho);
    out["kappa"] = label_strings(rec.state.kappa);
    return out;
}

void write_fit_outputs(const FitResult& fit, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeError("cannot create '" + dir.string() + "': " + ec.message());
    if (fit.options.write_trace) {
        std::string lines;
        for (const auto& rec : fit.trace.records) {
            lines += trace_record_json(rec, fit.trace.wang_landau).dump();
            lines += '\n';
        }
        io::write_file_atomic(dir / "trace.jsonl", lines);
    }
    io::write_file_atomic(dir / "summary.json", summary_json(fit).dump(2) + "\n");
    io::write_file_atomic(dir / "criteria.json", criteria_json(fit).dump(2) + "\n");
    std::vector<std::string> ks;
    for (std::size_t k = 0; k < fit.options.chain.K; ++k) ks.push_back("k" + std::to_string(k + 1));
    io::write_labelled_matrix(dir / "memberships_rows.csv", fit.trace.row_membership, fit.data.row_ids, ks, "gene");
    io::write_labelled_matrix(dir / "memberships_cols.csv", fit.trace.col_membership, fit.data.col_ids, ks,
                              "condition");
}

std::vector<double> read_trace_log_likelihoods(const fs::path& path) {
    std::istringstream in(io::read_file(path));
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(Json::parse(line).at("log_likelihood").get<double>());
        } catch (const nlohmann::json::exception& e) {
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

BiclusterSet read_biclusters(const fs::path& path) {
    Json doc;
    try {
        doc = Json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("'" + path.string() + "': " + e.what());
    }
    if (!doc.is_object() || !doc.contains("biclusters") || !doc["biclusters"].is_array()) {
        throw DataError("'" + path.string() + "': no 'biclusters' array");
    }
    BiclusterSet out;
    for (const auto& e : doc["biclusters"]) {
        Bicluster b;
        try {
            b.rows = e.at("rows").get<std::vector<std::size_t>>();
            b.cols = e.at("cols").get<std::vector<std::size_t>>();
        } catch (const nlohmann::json::exception& ex) {
            throw DataError("'" + path.string() + "': malformed bicluster: " + ex.what());
        }
        std::sort(b.rows.begin(), b.rows.end());
        b.rows.erase(std::unique(b.rows.begin(), b.rows.end()), b.rows.end());
        std::sort(b.cols.begin(), b.cols.end());
        b.cols.erase(std::unique(b.cols.begin(), b.cols.end()), b.cols.end());
        if (!b.rows.empty() && !b.cols.empty()) out.push_back(std::move(b));
    }
    return out;
}

SyntheticDataset run_simulate(const SimulateOptions& options) {
    if (options.output.empty()) throw ConfigError("'output' directory is required");
    const ScenarioSpec& spec = options.scenario;
    SyntheticDataset ds = generate_dataset(spec);
    std::error_code ec;
    fs::create_directories(options.output, ec);
    if (ec) throw RuntimeError("cannot create '" + options.output.string() + "': " + ec.message());

    io::write_labelled_matrix(options.output / "dataset.csv", ds.data.values, ds.data.row_ids, ds.data.col_ids,
                              "gene");
    const std::uint64_t graph_seed = options.graph_seed ? options.graph_seed : spec.rng_seed + 1000;
    io::write_labelled_matrix(options.output / "gene_distances.csv", planted_gene_distances(ds.truth, graph_seed),
                              ds.data.row_ids, ds.data.row_ids, "gene");

    std::string graph_file;
    if (spec.mean_rule == MeanRule::yeast) {
        graph_file = "condition_edges.csv";
        std::string s = "a,b,distance\n";
        const RelationalGraph graph = build_correlation_graph(spec.q, spec.xi);
        for (const auto& e : graph.edges()) {
            s += ds.data.col_ids[e.a] + "," + ds.data.col_ids[e.b] + "," + io::format_double(e.distance) + "\n";
        }
        io::write_file_atomic(options.output / graph_file, s);
    } else {
        // conditions sharing the same set of planted biclusters form a group
        graph_file = "condition_groups.csv";
        std::string s = "condition,group\n";
        for (std::size_t j = 0; j < spec.q; ++j) {
            std::string g = "g";
            bool any = false;
            for (std::size_t k = 0; k < spec.K; ++k) {
                const bool in = ds.truth.kappa(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) != 0;
                g += in ? '1' : '0';
                any = any || in;
            }
            s += ds.data.col_ids[j] + "," + (any ? g : "background") + "\n";
        }
        io::write_file_atomic(options.output / graph_file, s);
    }

    Json truth;
    Json echo;
    echo["p"] = spec.p;
    echo["q"] = spec.q;
    echo["K"] = spec.K;
    echo["mean_rule"] = to_string(spec.mean_rule);
    echo["xi"] = spec.xi;
    echo["nu_sim"] = spec.nu_sim;
    echo["s2_sim"] = spec.s2_sim;
    echo["sigma2"] = spec.sigma2_override ? Json(*spec.sigma2_override) : Json(nullptr);
    echo["var_mu0"] = spec.var_mu0;
    echo["var_mu"] = spec.var_mu;
    echo["var_alpha"] = spec.var_alpha;
    echo["var_beta"] = spec.var_beta;
    if (spec.mean_rule == MeanRule::custom) {
        echo["custom_base"] = spec.custom_base;
        echo["custom_slope"] = spec.custom_slope;
    }
    truth["spec"] = std::move(echo);
    truth["seed"] = spec.rng_seed;
    truth["graph_seed"] = graph_seed;
    truth["condition_graph"] = graph_file;
    truth["rho"] = label_strings(ds.truth.rho);
    truth["kappa"] = label_strings(ds.truth.kappa);
    truth["params"] = params_json(ds.params);
    truth["biclusters"] = biclusters_json(biclusters_from_state(ds.truth), &ds.data);
    io::write_file_atomic(options.output / "truth.json", truth.dump(2) + "\n");
    return ds;
}

EvaluationReport run_evaluate(const fs::path& estimated, const fs::path& truth, const fs::path& dir) {
    const BiclusterSet est = read_biclusters(estimated);
    const BiclusterSet tru = read_biclusters(truth);
    if (est.empty()) throw DataError("'" + estimated.string() + "' holds no non-empty bicluster");
    if (tru.empty()) throw DataError("'" + truth.string() + "' holds no non-empty bicluster");
    EvaluationReport rep;
    rep.f1_estimated_vs_truth = f1_average(est, tru);
    rep.f1_truth_vs_estimated = f1_average(tru, est);

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeError("cannot create '" + dir.string() + "': " + ec.message());
    io::write_file_atomic(dir / "f1.csv", "measure,value\nf1_estimated_vs_truth,"
                                              + io::format_double(rep.f1_estimated_vs_truth)
                                              + "\nf1_truth_vs_estimated,"
                                              + io::format_double(rep.f1_truth_vs_estimated) + "\n");
    std::string pairs = "estimated,truth,recall,precision,f1\n";
    for (std::size_t a = 0; a < est.size(); ++a) {
        for (std::size_t b = 0; b < tru.size(); ++b) {
            const F1Pair f = f1_pair(est[a], tru[b]);
            pairs += std::to_string(a + 1) + "," + std::to_string(b + 1) + "," + io::format_double(f.recall) + ","
                     + io::format_double(f.precision) + "," + io::format_double(f.f1) + "\n";
        }
    }
    io::write_file_atomic(dir / "f1_pairs.csv", pairs);
    std::string red = "a,b,rows,columns\n";
    for (std::size_t a = 0; a < est.size(); ++a) {
        for (std::size_t b = a + 1; b < est.size(); ++b) {
            red += std::to_string(a + 1) + "," + std::to_string(b + 1) + ","
                   + io::format_double(relative_redundancy(est[a], est[b], Dimension::rows)) + ","
                   + io::format_double(relative_redundancy(est[a], est[b], Dimension::columns)) + "\n";
        }
    }
    io::write_file_atomic(dir / "redundancy.csv", red);
    return rep;
}

namespace {

void mean_se(const std::vector<double>& v, double& mean, double& se) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    se = std::nan("");
    if (v.size() < 2) return;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::string csv_number(double v) { return std::isnan(v) ? std::string() : io::format_double(v); }

}  // namespace

std::vector<SelectionRow> summarise_cells(const std::vector<SelectionCell>& cells) {
    std::map<std::size_t, std::vector<const SelectionCell*>> by_k;
    for (const auto& c : cells) by_k[c.K].push_back(&c);
    std::vector<SelectionRow> rows;
    for (const auto& [k, group] : by_k) {
        std::vector<double> dic, pc, aic_v, ll, map_ll;
        for (const auto* c : group) {
            dic.push_back(c->dic.dic);
            pc.push_back(c->dic.p_c);
            aic_v.push_back(c->aic);
            ll.push_back(c->dic.mean_log_likelihood);
            map_ll.push_back(c->dic.map_log_likelihood);
        }
        SelectionRow r{};
        r.K = k;
        r.replicates = group.size();
        mean_se(dic, r.dic_mean, r.dic_se);
        mean_se(pc, r.p_c_mean, r.p_c_se);
        mean_se(aic_v, r.aic_mean, r.aic_se);
        double unused = 0.0;
        mean_se(ll, r.mean_log_likelihood, unused);
        mean_se(map_ll, r.map_log_likelihood, unused);
        rows.push_back(r);
    }
    return rows;
}

std::string criteria_csv(const std::vector<SelectionRow>& rows) {
    std::string s = "K,replicates,dic_c,dic_c_se,p_c,p_c_se,aic,aic_se,mean_log_likelihood,map_log_likelihood\n";
    for (const auto& r : rows) {
        s += std::to_string(r.K) + "," + std::to_string(r.replicates) + "," + csv_number(r.dic_mean) + ","
             + csv_number(r.dic_se) + "," + csv_number(r.p_c_mean) + "," + csv_number(r.p_c_se) + ","
             + csv_number(r.aic_mean) + "," + csv_number(r.aic_se) + "," + csv_number(r.mean_log_likelihood) + ","
             + csv_number(r.map_log_likelihood) + "\n";
    }
    return s;
}

SelectionResult run_select(const SelectOptions& options) {
    if (options.fit.output.empty()) throw ConfigError("'output' directory is required");
    const FitInputs inputs = load_fit_inputs(options.fit);

    std::vector<SelectionCell> cells;
    for (auto k : options.k_values) {
        for (auto seed : options.seeds) cells.push_back({k, seed, {}, 0.0});
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                FitOptions o = options.fit;
                o.chain.K = cells[i].K;
                o.chain.rng_seed = cells[i].seed;
                o.chain.on_progress = nullptr;
                const FitResult fit = run_fit(o, inputs);
                cells[i].dic = fit.dic;
                cells[i].aic = fit.aic;
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!error) error = std::current_exception();
                next = cells.size();
            }
        }
    };
    const std::size_t n_threads = std::min(options.threads, cells.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    SelectionResult result;
    result.cells = std::move(cells);
    result.rows = summarise_cells(result.cells);

    std::error_code ec;
    fs::create_directories(options.fit.output, ec);
    if (ec) throw RuntimeError("cannot create '" + options.fit.output.string() + "': " + ec.message());
    io::write_file_atomic(options.fit.output / "criteria.csv", criteria_csv(result.rows));
    std::string runs = "K,seed,dic_c,p_c,aic,mean_log_likelihood,map_log_likelihood\n";
    for (const auto& c : result.cells) {
        runs += std::to_string(c.K) + "," + std::to_string(c.seed) + "," + io::format_double(c.dic.dic) + ","
                + io::format_double(c.dic.p_c) + "," + io::format_double(c.aic) + ","
                + io::format_double(c.dic.mean_log_likelihood) + "," + io::format_double(c.dic.map_log_likelihood)
                + "\n";
    }
    io::write_file_atomic(options.fit.output / "runs.csv", runs);
    Json doc = Json::array();
    for (const auto& r : result.rows) {
        Json e;
        e["K"] = r.K;
        e["replicates"] = r.replicates;
        e["dic_c"] = r.dic_mean;
        e["p_c"] = r.p_c_mean;
        e["aic"] = r.aic_mean;
        e["dic_c_se"] = std::isnan(r.dic_se) ? Json(nullptr) : Json(r.dic_se);
        e["p_c_se"] = std::isnan(r.p_c_se) ? Json(nullptr) : Json(r.p_c_se);
        e["aic_se"] = std::isnan(r.aic_se) ? Json(nullptr) : Json(r.aic_se);
        e["mean_log_likelihood"] = r.mean_log_likelihood;
        e["map_log_likelihood"] = r.map_log_likelihood;
        doc.push_back(std::move(e));
    }
    io::write_file_atomic(options.fit.output / "criteria.json", doc.dump(2) + "\n");
    return result;
}

}  // namespace gplaid
