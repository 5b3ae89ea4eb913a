#include "melab/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "melab/error.hpp"
#include "melab/theory.hpp"

namespace melab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const std::vector<std::string> kTheoryColumns = {
    "estimator", "alpha", "beta", "coef1", "coef2", "without_me", "me_contribution",
    "total", "pre", "note"};

std::string pair_label(const char* tag, const AlphaBeta& ab) {
  return std::string(tag) + "(" + format_full(ab.first) + "," + format_full(ab.second) + ")";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "md" || name == "markdown") return Format::Markdown;
  throw Error(ErrorKind::InvalidArgument, "unknown format '" + name + "'");
}

std::size_t ReportTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown column '" + name + "'");
}

std::optional<double> ReportTable::number(std::size_t row, const std::string& name) const {
  if (row >= rows.size()) throw Error(ErrorKind::InvalidArgument, "row out of range");
  const Cell& c = rows[row][column(name)];
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* l = std::get_if<long>(&c)) return static_cast<double>(*l);
  return std::nullopt;
}

std::vector<AlphaBeta> default_grid() { return {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}}; }

std::string format_full(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_table(double value) {
  if (!std::isfinite(value)) return format_full(value);
  const double mag = std::abs(value);
  const int int_digits = mag >= 1.0 ? static_cast<int>(std::floor(std::log10(mag))) + 1 : 0;
  int decimals = std::max(3, 6 - int_digits);
  if (mag > 0.0 && mag < 1.0) {
    const int leading_zeros = -static_cast<int>(std::floor(std::log10(mag))) - 1;
    decimals = std::max(decimals, leading_zeros + 6);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::vector<EstimatorSpec> table_estimators(const PopulationParams& params,
                                            const std::vector<AlphaBeta>& grid) {
  const MomentSet m = derive_moments(params);
  std::vector<EstimatorSpec> specs;
  specs.emplace_back(estimator::MeanPerUnit{});
  specs.emplace_back(estimator::ExpRatio{});
  specs.emplace_back(estimator::Weighted{1.0, regression_slope(m)});
  const OptimalWeights w2 = opt_weights_t2(m, params.mu_y);
  specs.emplace_back(estimator::Weighted{w2.first, w2.second});
  for (const auto& [a, b] : grid) specs.emplace_back(estimator::SinghSolanki{a, b});
  for (const auto& [a, b] : grid) {
    const OptimalWeights w4 = opt_weights_t4(m, params.mu_y, a, b);
    specs.emplace_back(estimator::GeneralClass{w4.first, w4.second, a, b});
  }
  return specs;
}

ReportTable theory_report(const PopulationParams& params, const std::vector<AlphaBeta>& grid) {
  params.validate();
  const MomentSet m = derive_moments(params);
  const double reference = var_mean_per_unit(params).total;

  ReportTable t;
  t.title = "First-order MSE with and without measurement error";
  t.columns = kTheoryColumns;

  auto add = [&](std::string tag, std::optional<AlphaBeta> ab, std::optional<double> c1,
                 std::optional<double> c2, const MseBreakdown& mse) {
    std::vector<Cell> row(kTheoryColumns.size());
    row[0] = std::move(tag);
    if (ab) {
      row[1] = ab->first;
      row[2] = ab->second;
    }
    if (c1) row[3] = *c1;
    if (c2) row[4] = *c2;
    row[5] = mse.without_me;
    row[6] = mse.me_contribution;
    row[7] = mse.total;
    if (mse.total > 0.0) {
      row[8] = pre(reference, mse.total);
    } else {
      row[9] = std::string("first-order MSE is not positive");
    }
    t.rows.push_back(std::move(row));
  };
  auto add_failed = [&](std::string tag, const AlphaBeta& ab, const std::string& why) {
    std::vector<Cell> row(kTheoryColumns.size());
    row[0] = std::move(tag);
    row[1] = ab.first;
    row[2] = ab.second;
    row[9] = why;
    t.rows.push_back(std::move(row));
  };

  add("ybar", std::nullopt, std::nullopt, std::nullopt, var_mean_per_unit(params));
  add("t1", std::nullopt, std::nullopt, std::nullopt, mse_t1(params));
  add("treg", std::nullopt, 1.0, regression_slope(m), mse_treg(params));
  try {
    const OptimalWeights w = opt_weights_t2(m, params.mu_y);
    add("t2min", AlphaBeta{0.0, 0.0}, w.first, w.second, mse_t2_min(params));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Singular) throw;
    add_failed("t2min", {0.0, 0.0}, e.what());
  }
  for (const auto& ab : grid) {
    add(pair_label("t3", ab), ab, std::nullopt, std::nullopt, mse_t3(params, ab.first, ab.second));
  }
  for (const auto& ab : grid) {
    try {
      const OptimalWeights w = opt_weights_t4(m, params.mu_y, ab.first, ab.second);
      add(pair_label("t4min", ab), ab, w.first, w.second, mse_t4_min(params, ab.first, ab.second));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Singular && e.kind() != ErrorKind::Domain) throw;
      add_failed(pair_label("t4min", ab), ab, e.what());
    }
  }
  return t;
}

ReportTable params_report(const PopulationParams& p) {
  ReportTable t;
  t.title = "Population parameters";
  t.columns = {"n", "mu_y", "mu_x", "sigma_y2", "sigma_x2", "rho", "sigma_u2", "sigma_v2"};
  t.rows.push_back({static_cast<long>(p.n), p.mu_y, p.mu_x, p.sigma_y2, p.sigma_x2, p.rho,
                    p.sigma_u2, p.sigma_v2});
  return t;
}

ReportTable simulation_report(const SimulationConfig& config,
                              const std::vector<SimulationResult>& results) {
  ReportTable t;
  t.title = "Monte Carlo vs first-order theory (n = " + std::to_string(config.sample_n) +
            ", " + std::to_string(config.replicates) + " replicates, " +
            to_string(config.error_law) + " errors, seed " + std::to_string(config.seed) + ")";
  t.columns = {"estimator", "n", "replicates_used", "replicates_skipped", "empirical_bias",
               "mc_se_bias", "theory_bias", "empirical_mse", "mc_se_mse", "theory_mse",
               "relative_gap"};
  for (const auto& r : results) {
    t.rows.push_back({describe(r.estimator), static_cast<long>(config.sample_n),
                      r.replicates_used, r.replicates_skipped, r.empirical_bias, r.mc_se_bias,
                      r.theory_bias, r.empirical_mse, r.mc_se_mse, r.theory_mse,
                      r.relative_gap()});
  }
  return t;
}

ReportTable sweep_report(const EstimatorSpec& spec, const std::vector<SweepRow>& rows) {
  ReportTable t;
  t.title = "Convergence of " + describe(spec) + " towards first-order theory";
  t.columns = {"n", "empirical_mse", "mc_se_mse", "theory_mse", "relative_gap"};
  for (const auto& r : rows) {
    t.rows.push_back(
        {static_cast<long>(r.n), r.empirical_mse, r.mc_se_mse, r.theory_mse, r.relative_gap});
  }
  return t;
}

std::string render(const ReportTable& table, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::Csv: {
      for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
      }
      out << '\n';
      for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) out << ',';
          std::visit(overloaded{[&](std::monostate) {},
                                [&](const std::string& s) { out << csv_escape(s); },
                                [&](double d) { out << format_full(d); },
                                [&](long l) { out << l; }},
                     row[i]);
        }
        out << '\n';
      }
      break;
    }
    case Format::Json: {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& row : table.rows) {
        nlohmann::ordered_json rec = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
          std::visit(overloaded{[&](std::monostate) { rec[table.columns[i]] = nullptr; },
                                [&](const std::string& s) { rec[table.columns[i]] = s; },
                                [&](double d) { rec[table.columns[i]] = d; },
                                [&](long l) { rec[table.columns[i]] = l; }},
                     row[i]);
        }
        rows.push_back(std::move(rec));
      }
      nlohmann::ordered_json doc;
      doc["title"] = table.title;
      doc["rows"] = std::move(rows);
      out << doc.dump(2) << '\n';
      break;
    }
    case Format::Markdown: {
      out << "### " << table.title << "\n\n|";
      for (const auto& c : table.columns) out << ' ' << c << " |";
      out << "\n|";
      for (std::size_t i = 0; i < table.columns.size(); ++i) out << " --- |";
      out << '\n';
      for (const auto& row : table.rows) {
        out << '|';
        for (const auto& cell : row) {
          out << ' ';
          std::visit(overloaded{[&](std::monostate) { out << '-'; },
                                [&](const std::string& s) { out << s; },
                                [&](double d) { out << format_table(d); },
                                [&](long l) { out << l; }},
                     cell);
          out << " |";
        }
        out << '\n';
      }
      break;
    }
  }
  return out.str();
}

}  // namespace melab
