#include "melab/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "melab/error.hpp"

namespace melab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::size_t find_column(const std::vector<std::string_view>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorKind::Data, "missing column '" + name + "'");
}

double parse_cell(std::string_view cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "row " << row << ", column '" << column << "': cannot parse '" << cell
        << "' as a real number";
    throw Error(ErrorKind::Data, msg.str());
  }
  return v;
}

struct Moments2 {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  double cov = 0.0;
};

// Divisor-N moments of two columns.
template <class GetA, class GetB>
Moments2 moments(const std::vector<MeasuredRow>& rows, GetA a, GetB b) {
  const double N = static_cast<double>(rows.size());
  Moments2 m;
  for (const auto& r : rows) {
    m.mean_a += a(r);
    m.mean_b += b(r);
  }
  m.mean_a /= N;
  m.mean_b /= N;
  for (const auto& r : rows) {
    const double da = a(r) - m.mean_a;
    const double db = b(r) - m.mean_b;
    m.var_a += da * da;
    m.var_b += db * db;
    m.cov += da * db;
  }
  m.var_a /= N;
  m.var_b /= N;
  m.cov /= N;
  return m;
}

}  // namespace

MeasuredDataset load_dataset(std::istream& source, const ColumnMap& columns, char delimiter,
                             std::string name) {
  std::string line;
  while (std::getline(source, line) && blank(line)) {
  }
  if (blank(line)) throw Error(ErrorKind::Data, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const std::string header_line = line;
  const auto header = split(header_line, delimiter);
  const std::size_t iY = find_column(header, columns.Y_true);
  const std::size_t iX = find_column(header, columns.X_true);
  const std::size_t iy = find_column(header, columns.y_obs);
  const std::size_t ix = find_column(header, columns.x_obs);

  MeasuredDataset ds;
  ds.name = std::move(name);
  std::size_t row = 0;
  while (std::getline(source, line)) {
    if (blank(line)) continue;
    ++row;
    const auto cells = split(line, delimiter);
    auto cell = [&](std::size_t idx, const std::string& col) {
      if (idx >= cells.size()) {
        std::ostringstream msg;
        msg << "row " << row << ", column '" << col << "': missing value";
        throw Error(ErrorKind::Data, msg.str());
      }
      return parse_cell(cells[idx], row, col);
    };
    ds.rows.push_back({cell(iY, columns.Y_true), cell(iX, columns.X_true),
                       cell(iy, columns.y_obs), cell(ix, columns.x_obs)});
  }
  if (ds.rows.size() < 2) {
    throw Error(ErrorKind::Data, "dataset needs at least 2 rows, found " +
                                     std::to_string(ds.rows.size()));
  }
  return ds;
}

MeasuredDataset load_dataset_file(const std::string& path, const ColumnMap& columns,
                                  char delimiter) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return load_dataset(in, columns, delimiter, path);
}

void write_dataset(std::ostream& out, const MeasuredDataset& ds, const ColumnMap& columns,
                   char delimiter) {
  out << columns.Y_true << delimiter << columns.X_true << delimiter << columns.y_obs
      << delimiter << columns.x_obs << '\n';
  char buf[64];
  auto put = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
  };
  for (const auto& r : ds.rows) {
    put(r.Y_true);
    out << delimiter;
    put(r.X_true);
    out << delimiter;
    put(r.y_obs);
    out << delimiter;
    put(r.x_obs);
    out << '\n';
  }
}

PopulationParams compute_params(const MeasuredDataset& ds, int n_for_theory) {
  if (ds.rows.size() < 2) throw Error(ErrorKind::Data, "dataset needs at least 2 rows");
  const Moments2 truth =
      moments(ds.rows, [](const MeasuredRow& r) { return r.Y_true; },
              [](const MeasuredRow& r) { return r.X_true; });
  const Moments2 errors =
      moments(ds.rows, [](const MeasuredRow& r) { return r.y_obs - r.Y_true; },
              [](const MeasuredRow& r) { return r.x_obs - r.X_true; });
  if (truth.var_a <= 0.0) throw Error(ErrorKind::Data, "true Y column has zero variance");
  if (truth.var_b <= 0.0) throw Error(ErrorKind::Data, "true X column has zero variance");

  PopulationParams p;
  p.n = n_for_theory;
  p.mu_y = truth.mean_a;
  p.mu_x = truth.mean_b;
  p.sigma_y2 = truth.var_a;
  p.sigma_x2 = truth.var_b;
  p.rho = std::clamp(truth.cov / std::sqrt(truth.var_a * truth.var_b), -1.0, 1.0);
  p.sigma_u2 = errors.var_a;
  p.sigma_v2 = errors.var_b;
  p.validate();
  return p;
}

PopulationParams table1_preset() {
  PopulationParams p;
  p.n = 10;
  p.mu_y = 127.0;
  p.mu_x = 170.0;
  p.sigma_y2 = 1278.0;
  p.sigma_x2 = 3300.0;
  p.rho = 0.964;
  p.sigma_u2 = 36.0;
  p.sigma_v2 = 36.0;
  return p;
}

std::string params_to_json(const PopulationParams& p) {
  nlohmann::ordered_json j;
  j["n"] = p.n;
  j["mu_y"] = p.mu_y;
  j["mu_x"] = p.mu_x;
  j["sigma_y2"] = p.sigma_y2;
  j["sigma_x2"] = p.sigma_x2;
  j["rho"] = p.rho;
  j["sigma_u2"] = p.sigma_u2;
  j["sigma_v2"] = p.sigma_v2;
  return j.dump(2);
}

void set_param(PopulationParams& p, const std::string& key, double value) {
  if (key == "n") {
    if (value != std::trunc(value) || value < 2 || value > 1e9) {
      throw Error(ErrorKind::InvalidArgument, "n must be an integer >= 2");
    }
    p.n = static_cast<int>(value);
  } else if (key == "mu_y") {
    p.mu_y = value;
  } else if (key == "mu_x") {
    p.mu_x = value;
  } else if (key == "sigma_y2") {
    p.sigma_y2 = value;
  } else if (key == "sigma_x2") {
    p.sigma_x2 = value;
  } else if (key == "rho") {
    p.rho = value;
  } else if (key == "sigma_u2") {
    p.sigma_u2 = value;
  } else if (key == "sigma_v2") {
    p.sigma_v2 = value;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown parameter '" + key + "'");
  }
}

PopulationParams params_from_json(const std::string& json, const PopulationParams& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, std::string("invalid parameter JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Data, "parameter JSON must be an object");
  PopulationParams p = base;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw Error(ErrorKind::Data, "parameter '" + key + "' is not a number");
    set_param(p, key, value.get<double>());
  }
  p.validate();
  return p;
}

SimulationConfig simulation_config_from_json(const std::string& json,
                                             const SimulationConfig& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, std::string("invalid config JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Data, "config JSON must be an object");
  SimulationConfig c = base;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "params") {
        c.params = params_from_json(value.dump(), c.params);
      } else if (key == "sample_n") {
        c.sample_n = value.get<int>();
      } else if (key == "replicates") {
        c.replicates = value.get<long>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "error_law") {
        c.error_law = parse_error_law(value.get<std::string>());
      } else if (key == "df") {
        c.student_df = value.get<double>();
      } else if (key == "threads") {
        c.threads = value.get<int>();
      } else {
        throw Error(ErrorKind::Data, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, std::string("invalid config value: ") + e.what());
  }
  return c;
}

}  // namespace melab
