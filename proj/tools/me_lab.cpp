// me-lab: first-order MSE tables and Monte Carlo checks for mean estimators
// under additive measurement error. Talks to the library only through melab.h.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "melab/melab.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTolerance = 3;

struct LibraryError {
  melab_status status;
  std::string message;
};

void check(melab_status s) {
  if (s != MELAB_OK) throw LibraryError{s, melab_last_error()};
}

struct UsageError {
  std::string message;
};

using ReportPtr = std::unique_ptr<melab_report, decltype(&melab_report_free)>;

struct Source {
  std::string preset;
  std::string data;
  std::string params_json;
  std::string col_Y = "Y";
  std::string col_X = "X";
  std::string col_y = "y";
  std::string col_x = "x";
  std::string delimiter = ",";
  int data_n = 0;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Built-in scenario (gujarati-table1)");
    cmd->add_option("--data", data, "Delimited file of true and observed values");
    cmd->add_option("--params-json", params_json, "JSON file with the eight parameters");
    cmd->add_option("--col-Y", col_Y, "Column of true study values");
    cmd->add_option("--col-X", col_X, "Column of true auxiliary values");
    cmd->add_option("--col-y", col_y, "Column of observed study values");
    cmd->add_option("--col-x", col_x, "Column of observed auxiliary values");
    cmd->add_option("--delimiter", delimiter, "Field delimiter: a single character or 'tab'");
    cmd->add_option("--sample-n", data_n,
                    "Sample size n attached to parameters computed from --data "
                    "(default: row count)");
    cmd->add_option("--param", overrides, "Override a parameter, e.g. --param sigma_u2=0");
  }

  bool given() const { return !preset.empty() || !data.empty() || !params_json.empty(); }

  melab_params resolve() const {
    const int given = !preset.empty() + !data.empty() + !params_json.empty();
    if (given != 1) {
      throw UsageError{"exactly one of --preset, --data or --params-json is required"};
    }
    melab_params p{};
    if (!preset.empty()) {
      if (preset != "gujarati-table1") throw UsageError{"unknown preset '" + preset + "'"};
      check(melab_preset_table1(&p));
    } else if (!data.empty()) {
      char delim = delimiter == "tab" || delimiter == "\\t" ? '\t' : delimiter.at(0);
      if (delimiter.size() != 1 && delim != '\t') throw UsageError{"bad --delimiter"};
      const melab_columns cols{col_Y.c_str(), col_X.c_str(), col_y.c_str(), col_x.c_str()};
      melab_dataset* ds = nullptr;
      check(melab_dataset_load(data.c_str(), &cols, delim, &ds));
      std::unique_ptr<melab_dataset, decltype(&melab_dataset_free)> guard(ds, melab_dataset_free);
      const int n = data_n > 0 ? data_n : static_cast<int>(melab_dataset_row_count(ds));
      check(melab_dataset_params(ds, n, &p));
    } else {
      check(melab_params_from_json(read_file(params_json).c_str(), &p));
    }
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw UsageError{"--param expects key=value, got '" + o + "'"};
      double v = 0.0;
      try {
        v = std::stod(o.substr(eq + 1));
      } catch (const std::exception&) {
        throw UsageError{"--param value is not a number: '" + o + "'"};
      }
      check(melab_params_set(&p, o.substr(0, eq).c_str(), v));
    }
    check(melab_params_validate(&p));
    return p;
  }

  static std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LibraryError{MELAB_ERR_IO, "cannot open '" + path + "'"};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
};

struct Output {
  std::string format = "md";
  std::string path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json", "md"}));
    cmd->add_option("--out", path, "Write to this file instead of stdout");
  }

  melab_format kind() const {
    if (format == "csv") return MELAB_FORMAT_CSV;
    if (format == "json") return MELAB_FORMAT_JSON;
    return MELAB_FORMAT_MARKDOWN;
  }

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream out(path);
    if (!out) throw LibraryError{MELAB_ERR_IO, "cannot write '" + path + "'"};
    out << text;
  }

  void write(const melab_report* report) const {
    char* text = nullptr;
    check(melab_report_render(report, kind(), &text));
    std::string s(text);
    melab_string_free(text);
    write(s);
  }
};

struct Grid {
  std::vector<std::string> pairs;

  void attach(CLI::App* cmd) {
    cmd->add_option("--grid", pairs,
                    "alpha,beta pairs for t3/t4 (default: 1,0 0,1 1,1 1,-1); "
                    "alpha must be an integer in [-3, 3]");
  }

  void resolve(std::vector<double>& alphas, std::vector<double>& betas) const {
    for (const auto& p : pairs) {
      const auto comma = p.find(',');
      if (comma == std::string::npos) throw UsageError{"--grid expects alpha,beta: '" + p + "'"};
      double a = 0.0;
      double b = 0.0;
      try {
        a = std::stod(p.substr(0, comma));
        b = std::stod(p.substr(comma + 1));
      } catch (const std::exception&) {
        throw UsageError{"--grid expects numbers: '" + p + "'"};
      }
      if (a != std::trunc(a) || a < -3 || a > 3) {
        throw UsageError{"alpha must be an integer in [-3, 3]: '" + p + "'"};
      }
      if (!std::isfinite(b)) throw UsageError{"beta must be finite: '" + p + "'"};
      alphas.push_back(a);
      betas.push_back(b);
    }
  }
};

// Tags of the table estimators, in the order melab_table_estimators returns them.
std::vector<std::string> table_tags(std::size_t pairs) {
  std::vector<std::string> tags = {"ybar", "t1", "treg", "t2min"};
  for (std::size_t i = 0; i < pairs; ++i) tags.push_back("t3");
  for (std::size_t i = 0; i < pairs; ++i) tags.push_back("t4min");
  return tags;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"me-lab: mean estimators under measurement error"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(melab_version()));

  Source params_src;
  Output params_out;
  auto* params_cmd = app.add_subcommand("params", "Print the eight scenario parameters");
  params_src.attach(params_cmd);
  params_out.attach(params_cmd);

  Source theory_src;
  Output theory_out;
  Grid theory_grid;
  auto* theory_cmd = app.add_subcommand("theory", "First-order MSE decomposition and PRE table");
  theory_src.attach(theory_cmd);
  theory_out.attach(theory_cmd);
  theory_grid.attach(theory_cmd);

  Source sim_src;
  Output sim_out;
  Grid sim_grid;
  std::string config_path;
  std::optional<long long> replicates;
  std::optional<unsigned long long> seed;
  std::optional<int> sample_n;
  std::optional<std::string> error_law;
  std::optional<double> df;
  std::optional<int> threads;
  std::optional<double> tolerance;
  std::string estimators;
  std::vector<int> n_grid;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of the first-order theory");
  sim_src.attach(sim_cmd);
  sim_out.attach(sim_cmd);
  sim_grid.attach(sim_cmd);
  sim_cmd->add_option("--config", config_path, "Simulation config JSON");
  sim_cmd->add_option("--replicates", replicates, "Monte Carlo replicates (>= 100)");
  sim_cmd->add_option("--seed", seed, "Base seed");
  sim_cmd->add_option("--n", sample_n, "Sample size per replicate");
  sim_cmd->add_option("--error-law", error_law, "Law of u and v")
      ->check(CLI::IsMember({"gaussian", "uniform", "student-t"}));
  sim_cmd->add_option("--df", df, "Degrees of freedom for student-t errors (> 4)");
  sim_cmd->add_option("--threads", threads, "Worker threads (default: ME_LAB_THREADS)");
  sim_cmd->add_option("--tolerance", tolerance,
                      "Exit with status 3 if any relative MSE gap exceeds this");
  sim_cmd->add_option("--estimators", estimators,
                      "Comma list from ybar,t1,treg,t2min,t3,t4min (default: all)");
  sim_cmd->add_option("--n-grid", n_grid, "Run a convergence sweep over these sample sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (params_cmd->parsed()) {
      const melab_params p = params_src.resolve();
      if (params_out.format == "json") {
        char* json = nullptr;
        check(melab_params_to_json(&p, &json));
        std::string s(json);
        melab_string_free(json);
        params_out.write(s + "\n");
      } else {
        melab_report* r = nullptr;
        check(melab_report_params(&p, &r));
        ReportPtr guard(r, melab_report_free);
        params_out.write(r);
      }
      return 0;
    }

    if (theory_cmd->parsed()) {
      const melab_params p = theory_src.resolve();
      std::vector<double> alphas;
      std::vector<double> betas;
      theory_grid.resolve(alphas, betas);
      melab_report* r = nullptr;
      check(melab_report_theory(&p, alphas.data(), betas.data(), alphas.size(), &r));
      ReportPtr guard(r, melab_report_free);
      theory_out.write(r);
      return 0;
    }

    // simulate; --config may carry the parameters instead of a source flag
    melab_params p{};
    if (sim_src.given() || config_path.empty()) p = sim_src.resolve();
    melab_sim_config cfg{};
    check(melab_sim_config_default(&p, &cfg));
    if (!config_path.empty()) {
      check(melab_sim_config_from_json(Source::read_file(config_path).c_str(), &cfg));
    }
    if (replicates) cfg.replicates = *replicates;
    if (seed) cfg.seed = *seed;
    if (sample_n) cfg.sample_n = *sample_n;
    if (df) cfg.student_df = *df;
    if (threads) cfg.threads = *threads;
    if (error_law) {
      cfg.error_law = *error_law == "uniform"     ? MELAB_ERRORS_UNIFORM
                      : *error_law == "student-t" ? MELAB_ERRORS_STUDENT_T
                                                  : MELAB_ERRORS_GAUSSIAN;
    }

    std::vector<double> alphas;
    std::vector<double> betas;
    sim_grid.resolve(alphas, betas);
    // Optimal coefficients are resolved at the simulated sample size.
    auto table_at = [&](int n) {
      melab_params at_n = cfg.params;
      at_n.n = n;
      size_t count = 0;
      check(melab_table_estimators(&at_n, alphas.data(), betas.data(), alphas.size(), nullptr,
                                   0, &count));
      std::vector<melab_estimator> all(count);
      check(melab_table_estimators(&at_n, alphas.data(), betas.data(), alphas.size(), all.data(),
                                   all.size(), &count));
      return all;
    };

    const auto tags = table_tags(alphas.empty() ? 4 : alphas.size());
    std::vector<std::size_t> picked;
    if (estimators.empty()) {
      for (std::size_t i = 0; i < tags.size(); ++i) picked.push_back(i);
    } else {
      const auto wanted = split_list(estimators);
      for (const auto& w : wanted) {
        bool known = false;
        for (const auto& t : tags) known = known || t == w;
        if (!known) throw UsageError{"unknown estimator '" + w + "'"};
      }
      for (std::size_t i = 0; i < tags.size(); ++i) {
        for (const auto& w : wanted) {
          if (tags[i] == w) picked.push_back(i);
        }
      }
    }

    if (!n_grid.empty()) {
      std::vector<std::vector<melab_estimator>> per_n;
      for (int n : n_grid) per_n.push_back(table_at(n));
      std::string text;
      double worst = 0.0;
      for (std::size_t idx : picked) {
        std::vector<melab_estimator> specs;
        for (const auto& all : per_n) specs.push_back(all[idx]);
        melab_report* r = nullptr;
        check(melab_report_sweep(&cfg, specs.data(), specs.size(), n_grid.data(), n_grid.size(),
                                 &r));
        ReportPtr guard(r, melab_report_free);
        for (size_t i = 0; i < melab_report_row_count(r); ++i) {
          double gap = 0.0;
          check(melab_report_value(r, i, "relative_gap", &gap));
          worst = std::max(worst, gap);
        }
        char* s = nullptr;
        check(melab_report_render(r, sim_out.kind(), &s));
        text += s;
        melab_string_free(s);
      }
      sim_out.write(text);
      return tolerance && worst > *tolerance ? kExitTolerance : 0;
    }

    const auto all = table_at(cfg.sample_n);
    std::vector<melab_estimator> chosen;
    for (std::size_t idx : picked) chosen.push_back(all[idx]);

    melab_report* r = nullptr;
    check(melab_report_simulate(&cfg, chosen.data(), chosen.size(), &r));
    ReportPtr guard(r, melab_report_free);
    sim_out.write(r);
    if (tolerance) {
      for (size_t i = 0; i < melab_report_row_count(r); ++i) {
        double gap = 0.0;
        check(melab_report_value(r, i, "relative_gap", &gap));
        if (gap > *tolerance) {
          std::cerr << "relative MSE gap " << gap << " in row " << i << " exceeds tolerance "
                    << *tolerance << "\n";
          return kExitTolerance;
        }
      }
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.message << "\n";
    return kExitUsage;
  } catch (const LibraryError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitData;
  }
}
