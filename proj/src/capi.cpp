#include "gplaid/gplaid.h"

#include "gplaid/commands.hpp"
#include "gplaid/errors.hpp"
#include "gplaid/io.hpp"

#include <string>

struct gp_matrix {
    gplaid::ExpressionMatrix m;
};

struct gp_fit {
    gplaid::FitResult result;
};

namespace {

thread_local std::string last_error;

template <class F>
gp_status guarded(F&& f) {
    last_error.clear();
    try {
        f();
        return GP_OK;
    } catch (const gplaid::ConfigError& e) {
        last_error = e.what();
        return GP_ERR_CONFIG;
    } catch (const nlohmann::json::exception& e) {
        last_error = std::string("configuration: ") + e.what();
        return GP_ERR_CONFIG;
    } catch (const gplaid::DataError& e) {
        last_error = e.what();
        return GP_ERR_DATA;
    } catch (const std::invalid_argument& e) {
        last_error = e.what();
        return GP_ERR_ARGUMENT;
    } catch (const std::exception& e) {
        last_error = e.what();
        return GP_ERR_RUNTIME;
    } catch (...) {
        last_error = "unknown error";
        return GP_ERR_RUNTIME;
    }
}

gp_status null_argument(const char* what) {
    last_error = std::string(what) + " must not be null";
    return GP_ERR_ARGUMENT;
}

gplaid::Json parse_config(const char* text) {
    try {
        return gplaid::Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw gplaid::ConfigError(std::string("invalid JSON configuration: ") + e.what());
    }
}

}  // namespace

extern "C" {

const char* gp_version(void) { return "1.0.0"; }

const char* gp_last_error(void) { return last_error.c_str(); }

gp_status gp_matrix_read(const char* path, gp_matrix** out) {
    if (path == nullptr || out == nullptr) return null_argument("path and out");
    *out = nullptr;
    return guarded([&] {
        auto m = std::make_unique<gp_matrix>();
        m->m = gplaid::io::read_labelled_matrix(path);
        *out = m.release();
    });
}

size_t gp_matrix_rows(const gp_matrix* m) { return m ? m->m.rows() : 0; }
size_t gp_matrix_cols(const gp_matrix* m) { return m ? m->m.cols() : 0; }

double gp_matrix_get(const gp_matrix* m, size_t i, size_t j) {
    if (m == nullptr || i >= m->m.rows() || j >= m->m.cols()) return 0.0;
    return m->m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

void gp_matrix_free(gp_matrix* m) { delete m; }

gp_status gp_fit_run(const char* config_json, gp_progress_fn progress, void* user, gp_fit** out) {
    if (config_json == nullptr || out == nullptr) return null_argument("config_json and out");
    *out = nullptr;
    return guarded([&] {
        gplaid::FitOptions options = gplaid::parse_fit_options(parse_config(config_json));
        if (progress != nullptr) {
            options.chain.on_progress = [progress, user](const gplaid::ChainProgress& p) {
                progress(p.iteration, p.max_iters, p.log_likelihood, user);
            };
        }
        auto fit = std::make_unique<gp_fit>();
        fit->result = gplaid::run_fit(options);
        fit->result.options.chain.on_progress = nullptr;
        *out = fit.release();
    });
}

gp_status gp_fit_write(const gp_fit* fit, const char* out_dir) {
    if (fit == nullptr || out_dir == nullptr) return null_argument("fit and out_dir");
    return guarded([&] { gplaid::write_fit_outputs(fit->result, out_dir); });
}

gp_status gp_fit_criteria(const gp_fit* fit, double* dic_c, double* p_c, double* aic) {
    if (fit == nullptr) return null_argument("fit");
    if (dic_c) *dic_c = fit->result.dic.dic;
    if (p_c) *p_c = fit->result.dic.p_c;
    if (aic) *aic = fit->result.aic;
    return GP_OK;
}

size_t gp_fit_biclusters(const gp_fit* fit) { return fit ? fit->result.options.chain.K : 0; }

size_t gp_fit_retained(const gp_fit* fit) { return fit ? fit->result.trace.records.size() : 0; }

double gp_fit_row_membership(const gp_fit* fit, size_t i, size_t k) {
    if (fit == nullptr) return 0.0;
    const auto& m = fit->result.trace.row_membership;
    if (i >= static_cast<size_t>(m.rows()) || k >= static_cast<size_t>(m.cols())) return 0.0;
    return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
}

double gp_fit_col_membership(const gp_fit* fit, size_t j, size_t k) {
    if (fit == nullptr) return 0.0;
    const auto& m = fit->result.trace.col_membership;
    if (j >= static_cast<size_t>(m.rows()) || k >= static_cast<size_t>(m.cols())) return 0.0;
    return m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
}

void gp_fit_free(gp_fit* fit) { delete fit; }

gp_status gp_simulate(const char* config_json) {
    if (config_json == nullptr) return null_argument("config_json");
    return guarded([&] { gplaid::run_simulate(gplaid::parse_simulate_options(parse_config(config_json))); });
}

gp_status gp_evaluate(const char* estimated_path, const char* truth_path, const char* out_dir,
                      double* f1_estimated_vs_truth, double* f1_truth_vs_estimated) {
    if (estimated_path == nullptr || truth_path == nullptr || out_dir == nullptr) {
        return null_argument("estimated_path, truth_path and out_dir");
    }
    return guarded([&] {
        const auto rep = gplaid::run_evaluate(estimated_path, truth_path, out_dir);
        if (f1_estimated_vs_truth) *f1_estimated_vs_truth = rep.f1_estimated_vs_truth;
        if (f1_truth_vs_estimated) *f1_truth_vs_estimated = rep.f1_truth_vs_estimated;
    });
}

gp_status gp_select(const char* config_json) {
    if (config_json == nullptr) return null_argument("config_json");
    return guarded([&] { gplaid::run_select(gplaid::parse_select_options(parse_config(config_json))); });
}

}  // extern "C"
