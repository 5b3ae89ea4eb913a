#pragma once

#include <istream>
#include <string>
#include <vector>

#include "melab/moments.hpp"
#include "melab/simulate.hpp"

namespace melab {

struct MeasuredRow {
  double Y_true = 0.0;
  double X_true = 0.0;
  double y_obs = 0.0;
  double x_obs = 0.0;
};

struct MeasuredDataset {
  std::string name;
  std::vector<MeasuredRow> rows;
};

/// Header names of the four mapped columns.
struct ColumnMap {
  std::string Y_true = "Y";
  std::string X_true = "X";
  std::string y_obs = "y";
  std::string x_obs = "x";
};

/// Parses delimited text with a header row. Data rows are numbered from 1
/// in error messages.
MeasuredDataset load_dataset(std::istream& source, const ColumnMap& columns,
                             char delimiter = ',', std::string name = {});
MeasuredDataset load_dataset_file(const std::string& path, const ColumnMap& columns,
                                  char delimiter = ',');

/// Writes the dataset back as delimited text using the mapped header names.
void write_dataset(std::ostream& out, const MeasuredDataset& ds, const ColumnMap& columns,
                   char delimiter = ',');

/// Population parameters of a dataset. All moments use divisor N.
PopulationParams compute_params(const MeasuredDataset& ds, int n_for_theory);

/// The built-in consumption/income scenario.
PopulationParams table1_preset();

/// JSON object with keys n, mu_y, mu_x, sigma_y2, sigma_x2, rho, sigma_u2, sigma_v2.
std::string params_to_json(const PopulationParams& params);
/// Missing keys keep the value from `base`; the result is validated.
PopulationParams params_from_json(const std::string& json, const PopulationParams& base = {});

/// Simulation config document:
///   {"params": {...}, "sample_n": 200, "replicates": 200000, "seed": 1,
///    "error_law": "gaussian", "df": 8, "threads": 0}
/// Missing keys keep the value from `base`.
SimulationConfig simulation_config_from_json(const std::string& json,
                                             const SimulationConfig& base);

/// Overrides one field by its JSON name. Throws on an unknown key.
void set_param(PopulationParams& params, const std::string& key, double value);

}  // namespace melab
