#include "melab/melab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "melab/error.hpp"
#include "melab/ingest.hpp"
#include "melab/report.hpp"
#include "melab/simulate.hpp"
#include "melab/theory.hpp"

struct melab_dataset {
  melab::MeasuredDataset value;
};

struct melab_report {
  melab::ReportTable value;
};

namespace {

thread_local std::string last_error;

melab_status status_of(melab::ErrorKind kind) {
  switch (kind) {
    case melab::ErrorKind::InvalidArgument: return MELAB_ERR_INVALID_ARGUMENT;
    case melab::ErrorKind::Domain: return MELAB_ERR_DOMAIN;
    case melab::ErrorKind::Singular: return MELAB_ERR_SINGULAR;
    case melab::ErrorKind::Data: return MELAB_ERR_DATA;
    case melab::ErrorKind::AllSkipped: return MELAB_ERR_ALL_SKIPPED;
    case melab::ErrorKind::Io: return MELAB_ERR_IO;
  }
  return MELAB_ERR_INTERNAL;
}

melab_status fail(melab_status status, const char* what) {
  last_error = what;
  return status;
}

// Runs `body` and converts any exception into a status code.
template <class F>
melab_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return MELAB_OK;
  } catch (const melab::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MELAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MELAB_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw melab::Error(melab::ErrorKind::InvalidArgument, what);
}

melab::PopulationParams to_cpp(const melab_params& p) {
  return {p.n, p.mu_y, p.mu_x, p.sigma_y2, p.sigma_x2, p.rho, p.sigma_u2, p.sigma_v2};
}

melab_params to_c(const melab::PopulationParams& p) {
  return {p.n, p.mu_y, p.mu_x, p.sigma_y2, p.sigma_x2, p.rho, p.sigma_u2, p.sigma_v2};
}

melab::EstimatorSpec to_cpp(const melab_estimator& e) {
  namespace est = melab::estimator;
  switch (e.kind) {
    case MELAB_MEAN_PER_UNIT: return est::MeanPerUnit{};
    case MELAB_EXP_RATIO: return est::ExpRatio{};
    case MELAB_WEIGHTED: return est::Weighted{e.c1, e.c2};
    case MELAB_SINGH_SOLANKI: return est::SinghSolanki{e.alpha, e.beta};
    case MELAB_GENERAL_CLASS: return est::GeneralClass{e.c1, e.c2, e.alpha, e.beta};
  }
  throw melab::Error(melab::ErrorKind::InvalidArgument, "unknown estimator kind");
}

melab_estimator to_c(const melab::EstimatorSpec& spec) {
  namespace est = melab::estimator;
  melab_estimator e{MELAB_MEAN_PER_UNIT, 0.0, 0.0, 0.0, 0.0};
  if (std::holds_alternative<est::ExpRatio>(spec)) {
    e.kind = MELAB_EXP_RATIO;
  } else if (const auto* w = std::get_if<est::Weighted>(&spec)) {
    e = {MELAB_WEIGHTED, w->omega1, w->omega2, 0.0, 0.0};
  } else if (const auto* s = std::get_if<est::SinghSolanki>(&spec)) {
    e = {MELAB_SINGH_SOLANKI, 0.0, 0.0, s->alpha, s->beta};
  } else if (const auto* g = std::get_if<est::GeneralClass>(&spec)) {
    e = {MELAB_GENERAL_CLASS, g->m1, g->m2, g->alpha, g->beta};
  }
  return e;
}

melab::ErrorLaw to_cpp(melab_error_law law) {
  switch (law) {
    case MELAB_ERRORS_GAUSSIAN: return melab::ErrorLaw::Gaussian;
    case MELAB_ERRORS_UNIFORM: return melab::ErrorLaw::Uniform;
    case MELAB_ERRORS_STUDENT_T: return melab::ErrorLaw::StudentT;
  }
  throw melab::Error(melab::ErrorKind::InvalidArgument, "unknown error law");
}

melab::SimulationConfig to_cpp(const melab_sim_config& c) {
  require(c.replicates > 0 && c.replicates <= INT64_C(1) << 40, "replicates out of range");
  melab::SimulationConfig cfg;
  cfg.params = to_cpp(c.params);
  cfg.sample_n = c.sample_n;
  cfg.replicates = static_cast<long>(c.replicates);
  cfg.seed = c.seed;
  cfg.error_law = to_cpp(c.error_law);
  cfg.student_df = c.student_df;
  cfg.threads = c.threads;
  return cfg;
}

std::vector<melab::AlphaBeta> grid_of(const double* alphas, const double* betas, size_t pairs) {
  require(pairs == 0 || (alphas && betas), "null alpha/beta arrays");
  if (pairs == 0) return melab::default_grid();
  std::vector<melab::AlphaBeta> grid;
  for (size_t i = 0; i < pairs; ++i) grid.emplace_back(alphas[i], betas[i]);
  return grid;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

melab_mse to_c(const melab::MseBreakdown& m) { return {m.without_me, m.me_contribution, m.total}; }

}  // namespace

extern "C" {

const char* melab_version(void) { return "1.0.0"; }

const char* melab_last_error(void) { return last_error.c_str(); }

void melab_string_free(char* s) { std::free(s); }

melab_status melab_preset_table1(melab_params* out) {
  return guarded([&] {
    require(out, "null output");
    *out = to_c(melab::table1_preset());
  });
}

melab_status melab_params_validate(const melab_params* params) {
  return guarded([&] {
    require(params, "null params");
    to_cpp(*params).validate();
  });
}

melab_status melab_params_set(melab_params* params, const char* key, double value) {
  return guarded([&] {
    require(params && key, "null argument");
    melab::PopulationParams p = to_cpp(*params);
    melab::set_param(p, key, value);
    *params = to_c(p);
  });
}

melab_status melab_params_from_json(const char* json, melab_params* inout) {
  return guarded([&] {
    require(json && inout, "null argument");
    *inout = to_c(melab::params_from_json(json, to_cpp(*inout)));
  });
}

melab_status melab_params_to_json(const melab_params* params, char** out) {
  return guarded([&] {
    require(params && out, "null argument");
    *out = copy_string(melab::params_to_json(to_cpp(*params)));
  });
}

melab_status melab_derive_moments(const melab_params* params, melab_moments* out) {
  return guarded([&] {
    require(params && out, "null argument");
    const melab::MomentSet m = melab::derive_moments(to_cpp(*params));
    *out = {m.V_ym, m.V_xm, m.V_yxm, m.R_m, m.C_y, m.C_x};
  });
}

melab_status melab_evaluate(const melab_estimator* spec, const double* y, const double* x,
                            size_t count, double mu_x, double* out) {
  return guarded([&] {
    require(spec && out, "null argument");
    require(count == 0 || (y && x), "null sample arrays");
    std::vector<melab::Observation> obs(count);
    for (size_t i = 0; i < count; ++i) obs[i] = {y[i], x[i]};
    *out = melab::evaluate(to_cpp(*spec), melab::ObservedSample(std::move(obs)), mu_x);
  });
}

melab_status melab_theory(const melab_estimator* spec, const melab_params* params, double* mse,
                          double* bias) {
  return guarded([&] {
    require(spec && params, "null argument");
    const auto s = to_cpp(*spec);
    const auto p = to_cpp(*params);
    if (mse) *mse = melab::theory_mse(s, p);
    if (bias) *bias = melab::theory_bias(s, p);
  });
}

melab_status melab_var_mean_per_unit(const melab_params* params, melab_mse* out) {
  return guarded([&] {
    require(params && out, "null argument");
    *out = to_c(melab::var_mean_per_unit(to_cpp(*params)));
  });
}

melab_status melab_mse_t1(const melab_params* params, melab_mse* out) {
  return guarded([&] {
    require(params && out, "null argument");
    *out = to_c(melab::mse_t1(to_cpp(*params)));
  });
}

melab_status melab_mse_t3(const melab_params* params, double alpha, double beta, melab_mse* out) {
  return guarded([&] {
    require(params && out, "null argument");
    *out = to_c(melab::mse_t3(to_cpp(*params), alpha, beta));
  });
}

melab_status melab_opt_weights_t2(const melab_params* params, melab_optimum* out) {
  return guarded([&] {
    require(params && out, "null argument");
    const auto p = to_cpp(*params);
    const auto w = melab::opt_weights_t2(melab::derive_moments(p), p.mu_y);
    *out = {w.first, w.second, w.min_mse};
  });
}

melab_status melab_opt_weights_t4(const melab_params* params, double alpha, double beta,
                                  melab_optimum* out) {
  return guarded([&] {
    require(params && out, "null argument");
    const auto p = to_cpp(*params);
    const auto w = melab::opt_weights_t4(melab::derive_moments(p), p.mu_y, alpha, beta);
    *out = {w.first, w.second, w.min_mse};
  });
}

melab_status melab_pre(double reference_mse, double mse, double* out) {
  return guarded([&] {
    require(out, "null output");
    *out = melab::pre(reference_mse, mse);
  });
}

melab_status melab_table_estimators(const melab_params* params, const double* alphas,
                                    const double* betas, size_t pairs, melab_estimator* out,
                                    size_t capacity, size_t* count) {
  return guarded([&] {
    require(params && count, "null argument");
    require(capacity == 0 || out, "null output array");
    const auto specs = melab::table_estimators(to_cpp(*params), grid_of(alphas, betas, pairs));
    *count = specs.size();
    for (size_t i = 0; i < specs.size() && i < capacity; ++i) out[i] = to_c(specs[i]);
  });
}

melab_status melab_sim_config_default(const melab_params* params, melab_sim_config* out) {
  return guarded([&] {
    require(params && out, "null argument");
    const melab::SimulationConfig d;
    *out = {*params,       params->n, d.replicates, d.seed, MELAB_ERRORS_GAUSSIAN,
            d.student_df, 0};
  });
}

melab_status melab_sim_config_from_json(const char* json, melab_sim_config* inout) {
  return guarded([&] {
    require(json && inout, "null argument");
    const auto c = melab::simulation_config_from_json(json, to_cpp(*inout));
    *inout = {to_c(c.params), c.sample_n,  c.replicates, c.seed,
              inout->error_law, c.student_df, c.threads};
    switch (c.error_law) {
      case melab::ErrorLaw::Gaussian: inout->error_law = MELAB_ERRORS_GAUSSIAN; break;
      case melab::ErrorLaw::Uniform: inout->error_law = MELAB_ERRORS_UNIFORM; break;
      case melab::ErrorLaw::StudentT: inout->error_law = MELAB_ERRORS_STUDENT_T; break;
    }
  });
}

melab_status melab_simulate(const melab_sim_config* config, const melab_estimator* specs,
                            size_t count, melab_sim_result* out) {
  return guarded([&] {
    require(config && (count == 0 || (specs && out)), "null argument");
    std::vector<melab::EstimatorSpec> list;
    for (size_t i = 0; i < count; ++i) list.push_back(to_cpp(specs[i]));
    const auto results = melab::run_monte_carlo(to_cpp(*config), list);
    for (size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      out[i] = {specs[i],        r.empirical_bias, r.mc_se_bias,       r.empirical_mse,
                r.mc_se_mse,     r.replicates_used, r.replicates_skipped, r.theory_mse,
                r.theory_bias};
    }
  });
}

melab_status melab_dataset_load(const char* path, const melab_columns* columns, char delimiter,
                                melab_dataset** out) {
  return guarded([&] {
    require(path && out, "null argument");
    melab::ColumnMap map;
    if (columns) {
      if (columns->Y_true) map.Y_true = columns->Y_true;
      if (columns->X_true) map.X_true = columns->X_true;
      if (columns->y_obs) map.y_obs = columns->y_obs;
      if (columns->x_obs) map.x_obs = columns->x_obs;
    }
    *out = new melab_dataset{melab::load_dataset_file(path, map, delimiter ? delimiter : ',')};
  });
}

size_t melab_dataset_row_count(const melab_dataset* ds) { return ds ? ds->value.rows.size() : 0; }

melab_status melab_dataset_params(const melab_dataset* ds, int n_for_theory, melab_params* out) {
  return guarded([&] {
    require(ds && out, "null argument");
    *out = to_c(melab::compute_params(ds->value, n_for_theory));
  });
}

void melab_dataset_free(melab_dataset* ds) { delete ds; }

melab_status melab_report_params(const melab_params* params, melab_report** out) {
  return guarded([&] {
    require(params && out, "null argument");
    *out = new melab_report{melab::params_report(to_cpp(*params))};
  });
}

melab_status melab_report_theory(const melab_params* params, const double* alphas,
                                 const double* betas, size_t pairs, melab_report** out) {
  return guarded([&] {
    require(params && out, "null argument");
    *out = new melab_report{
        melab::theory_report(to_cpp(*params), grid_of(alphas, betas, pairs))};
  });
}

melab_status melab_report_simulate(const melab_sim_config* config, const melab_estimator* specs,
                                   size_t count, melab_report** out) {
  return guarded([&] {
    require(config && specs && count > 0 && out, "null argument or empty estimator list");
    const auto cfg = to_cpp(*config);
    std::vector<melab::EstimatorSpec> list;
    for (size_t i = 0; i < count; ++i) list.push_back(to_cpp(specs[i]));
    *out = new melab_report{melab::simulation_report(cfg, melab::run_monte_carlo(cfg, list))};
  });
}

melab_status melab_report_sweep(const melab_sim_config* config, const melab_estimator* specs,
                                size_t spec_count, const int* n_grid, size_t grid_size,
                                melab_report** out) {
  return guarded([&] {
    require(config && specs && n_grid && out, "null argument");
    require(spec_count == 1 || spec_count == grid_size, "need 1 or grid_size estimators");
    std::vector<melab::EstimatorSpec> s;
    for (size_t i = 0; i < grid_size; ++i) s.push_back(to_cpp(specs[spec_count == 1 ? 0 : i]));
    const std::vector<int> grid(n_grid, n_grid + grid_size);
    require(!s.empty(), "empty n grid");
    *out = new melab_report{
        melab::sweep_report(s.front(), melab::convergence_sweep(to_cpp(*config), s, grid))};
  });
}

size_t melab_report_row_count(const melab_report* report) {
  return report ? report->value.rows.size() : 0;
}

melab_status melab_report_value(const melab_report* report, size_t row, const char* column,
                                double* out) {
  return guarded([&] {
    require(report && column && out, "null argument");
    const auto v = report->value.number(row, column);
    require(v.has_value(), "cell is not numeric");
    *out = *v;
  });
}

melab_status melab_report_render(const melab_report* report, melab_format format, char** out) {
  return guarded([&] {
    require(report && out, "null argument");
    melab::Format f = melab::Format::Csv;
    switch (format) {
      case MELAB_FORMAT_CSV: f = melab::Format::Csv; break;
      case MELAB_FORMAT_JSON: f = melab::Format::Json; break;
      case MELAB_FORMAT_MARKDOWN: f = melab::Format::Markdown; break;
      default: require(false, "unknown format");
    }
    *out = copy_string(melab::render(report->value, f));
  });
}

void melab_report_free(melab_report* report) { delete report; }

}  // extern "C"
