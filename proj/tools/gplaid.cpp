// Command-line front end over the gplaid C API.

#include "gplaid/gplaid.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using Json = nlohmann::json;

namespace {

constexpr int exit_config = 2;

int exit_code(gp_status s) {
    switch (s) {
        case GP_OK: return 0;
        case GP_ERR_ARGUMENT:
        case GP_ERR_CONFIG: return 2;
        case GP_ERR_DATA: return 3;
        case GP_ERR_RUNTIME: return 4;
    }
    return 4;
}

int report(gp_status s, const char* what) {
    if (s != GP_OK) std::cerr << "gplaid " << what << ": " << gp_last_error() << "\n";
    return exit_code(s);
}

struct ConfigFailure {
    std::string message;
};

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream in(path);
    if (!in) throw ConfigFailure{"cannot open config file '" + path + "'"};
    try {
        Json doc = Json::parse(in);
        if (!doc.is_object()) throw ConfigFailure{"config file '" + path + "' must hold a JSON object"};
        return doc;
    } catch (const Json::parse_error& e) {
        throw ConfigFailure{"config file '" + path + "': " + e.what()};
    }
}

template <class T>
void set_if(Json& doc, const char* key, const std::optional<T>& v) {
    if (v) doc[key] = *v;
}

// Flags shared by fit and select.
struct FitFlags {
    std::string config;
    std::optional<std::string> data, output;
    std::optional<std::string> gene_distances, gene_edges;
    std::optional<std::string> cond_distances, cond_edges, cond_groups;
    std::optional<double> group_distance, correlation_xi;
    std::optional<std::size_t> knn;
    std::optional<std::size_t> K, iters, burn_in, thin, progress_interval;
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold, t_min, t_max;
    std::optional<std::size_t> grid_size;
    std::optional<std::string> spacing;
    bool no_trace = false;
    bool quiet = false;

    void add_to(CLI::App* app) {
        app->add_option("-c,--config", config, "JSON configuration file; flags override its values");
        app->add_option("-d,--data", data, "expression matrix (CSV/TSV, genes x conditions)");
        app->add_option("-o,--output", output, "output directory");
        app->add_option("--gene-distances", gene_distances, "square gene distance matrix (r-NN graph)");
        app->add_option("--gene-edges", gene_edges, "gene edge list (id, id, distance)");
        app->add_option("--condition-distances", cond_distances, "square condition distance matrix");
        app->add_option("--condition-edges", cond_edges, "condition edge list (id, id, distance)");
        app->add_option("--condition-groups", cond_groups, "condition group file (id, group)");
        app->add_option("--group-distance", group_distance, "distance between conditions of one group");
        app->add_option("--correlation-xi", correlation_xi, "time-course condition graph with this correlation");
        app->add_option("--knn", knn, "neighbours per node for distance matrices");
        app->add_option("-K,--biclusters", K, "number of biclusters");
        app->add_option("--iters", iters, "total iterations");
        app->add_option("--burn-in", burn_in, "burn-in iterations");
        app->add_option("--thin", thin, "keep every n-th post burn-in iteration");
        app->add_option("--seed", seed, "random seed");
        app->add_option("--threshold", threshold, "membership threshold for reported biclusters");
        app->add_option("--t-min", t_min, "lowest grid temperature (both sides)");
        app->add_option("--t-max", t_max, "highest grid temperature (both sides)");
        app->add_option("--grid-size", grid_size, "temperatures per side");
        app->add_option("--spacing", spacing, "grid spacing: linear or geometric");
        app->add_option("--progress-interval", progress_interval, "iterations between progress lines");
        app->add_flag("--no-trace", no_trace, "skip trace.jsonl");
        app->add_flag("-q,--quiet", quiet, "no progress output");
    }

    Json merged() const {
        Json doc = load_config(config);
        set_if(doc, "data", data);
        set_if(doc, "output", output);
        // A source flag replaces whatever source the config file named.
        auto graph = [&](const char* side, Json sources) {
            Json g = doc.contains(side) && doc[side].is_object() ? doc[side] : Json::object();
            if (!sources.empty()) {
                for (const char* key : {"distances", "edges", "groups", "correlation_xi"}) g.erase(key);
                g.update(sources);
            }
            if (!g.empty()) doc[side] = g;
        };
        Json gene_src = Json::object();
        set_if(gene_src, "distances", gene_distances);
        set_if(gene_src, "edges", gene_edges);
        Json cond_src = Json::object();
        set_if(cond_src, "distances", cond_distances);
        set_if(cond_src, "edges", cond_edges);
        set_if(cond_src, "groups", cond_groups);
        set_if(cond_src, "correlation_xi", correlation_xi);
        graph("gene_graph", gene_src);
        graph("condition_graph", cond_src);
        if (knn) doc["gene_graph"]["knn"] = *knn;
        if (knn && cond_distances) doc["condition_graph"]["knn"] = *knn;
        if (group_distance) doc["condition_graph"]["group_distance"] = *group_distance;
        set_if(doc, "K", K);
        set_if(doc, "max_iters", iters);
        set_if(doc, "burn_in", burn_in);
        set_if(doc, "thin", thin);
        set_if(doc, "seed", seed);
        set_if(doc, "threshold", threshold);
        set_if(doc, "progress_interval", progress_interval);
        if (no_trace) doc["write_trace"] = false;
        for (const char* side : {"grid_rho", "grid_kappa"}) {
            if (!(t_min || t_max || grid_size || spacing)) break;
            Json g = doc.contains(side) && doc[side].is_object() ? doc[side] : Json::object();
            set_if(g, "t_min", t_min);
            set_if(g, "t_max", t_max);
            set_if(g, "m", grid_size);
            set_if(g, "spacing", spacing);
            doc[side] = g;
        }
        return doc;
    }
};

void print_progress(size_t iteration, size_t max_iters, double log_likelihood, void*) {
    std::fprintf(stderr, "iteration %zu/%zu  log-likelihood %.4f\n", iteration, max_iters, log_likelihood);
}

int cmd_fit(const FitFlags& flags) {
    const Json doc = flags.merged();
    if (!doc.contains("output")) {
        std::cerr << "gplaid fit: an output directory is required (--output)\n";
        return exit_config;
    }
    gp_fit* fit = nullptr;
    gp_status s = gp_fit_run(doc.dump().c_str(), flags.quiet ? nullptr : print_progress, nullptr, &fit);
    if (s != GP_OK) return report(s, "fit");
    s = gp_fit_write(fit, doc["output"].get<std::string>().c_str());
    if (s == GP_OK && !flags.quiet) {
        double dic = 0.0, pc = 0.0, aic = 0.0;
        gp_fit_criteria(fit, &dic, &pc, &aic);
        std::fprintf(stderr, "DIC_c %.4f  p_c %.4f  AIC %.4f  (%zu retained samples)\n", dic, pc, aic,
                     gp_fit_retained(fit));
    }
    gp_fit_free(fit);
    return report(s, "fit");
}

int cmd_select(const FitFlags& flags, const std::vector<std::size_t>& k_values,
               const std::vector<std::uint64_t>& seeds, std::optional<std::size_t> threads) {
    Json doc = flags.merged();
    if (!k_values.empty()) doc["K_values"] = k_values;
    if (!seeds.empty()) doc["seeds"] = seeds;
    set_if(doc, "threads", threads);
    doc.erase("K");
    return report(gp_select(doc.dump().c_str()), "select");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian plaid biclustering with relational graph priors"};
    app.set_version_flag("--version", std::string(gp_version()));
    app.require_subcommand(1);

    FitFlags fit_flags;
    auto* fit = app.add_subcommand("fit", "run one sampler chain");
    fit_flags.add_to(fit);

    FitFlags select_flags;
    std::vector<std::size_t> k_values;
    std::vector<std::uint64_t> seeds;
    std::optional<std::size_t> threads;
    auto* select = app.add_subcommand("select", "DIC_c / AIC over a range of K with replicate seeds");
    select_flags.add_to(select);
    select->add_option("--K-values", k_values, "numbers of biclusters to compare");
    select->add_option("--seeds", seeds, "replicate seeds");
    select->add_option("--threads", threads, "worker threads");

    std::string sim_config;
    std::optional<std::size_t> sim_p, sim_q, sim_K;
    std::optional<std::string> sim_rule, sim_output;
    std::optional<double> sim_xi, sim_sigma2;
    std::optional<std::uint64_t> sim_seed, sim_graph_seed;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset with planted biclusters");
    simulate->add_option("-c,--config", sim_config, "JSON scenario file; flags override its values");
    simulate->add_option("-p,--genes", sim_p, "number of genes");
    simulate->add_option("-q,--conditions", sim_q, "number of conditions");
    simulate->add_option("-K,--biclusters", sim_K, "number of planted biclusters");
    simulate->add_option("--mean-rule", sim_rule, "yeast, rd or custom");
    simulate->add_option("--xi", sim_xi, "condition correlation");
    simulate->add_option("--sigma2", sim_sigma2, "fixed noise variance (0 = noiseless)");
    simulate->add_option("--seed", sim_seed, "random seed");
    simulate->add_option("--graph-seed", sim_graph_seed, "seed for the gene distance matrix");
    simulate->add_option("-o,--output", sim_output, "output directory");

    std::string est_path, truth_path, eval_output;
    auto* evaluate = app.add_subcommand("evaluate", "F1 and redundancy of estimated against true biclusters");
    evaluate->add_option("-e,--estimated", est_path, "summary.json of a fit (or any file with 'biclusters')")
        ->required();
    evaluate->add_option("-t,--truth", truth_path, "truth.json from simulate")->required();
    evaluate->add_option("-o,--output", eval_output, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (*fit) return cmd_fit(fit_flags);
        if (*select) return cmd_select(select_flags, k_values, seeds, threads);
        if (*simulate) {
            Json doc = load_config(sim_config);
            set_if(doc, "p", sim_p);
            set_if(doc, "q", sim_q);
            set_if(doc, "K", sim_K);
            set_if(doc, "mean_rule", sim_rule);
            set_if(doc, "xi", sim_xi);
            set_if(doc, "sigma2", sim_sigma2);
            set_if(doc, "seed", sim_seed);
            set_if(doc, "graph_seed", sim_graph_seed);
            set_if(doc, "output", sim_output);
            return report(gp_simulate(doc.dump().c_str()), "simulate");
        }
        if (*evaluate) {
            double f1 = 0.0, f1_rev = 0.0;
            const gp_status s = gp_evaluate(est_path.c_str(), truth_path.c_str(), eval_output.c_str(), &f1, &f1_rev);
            if (s == GP_OK) std::printf("F1(estimated, truth) = %.6f\nF1(truth, estimated) = %.6f\n", f1, f1_rev);
            return report(s, "evaluate");
        }
    } catch (const ConfigFailure& e) {
        std::cerr << "gplaid: " << e.message << "\n";
        return exit_config;
    }
    return exit_config;
}
