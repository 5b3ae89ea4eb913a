#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "melab/moments.hpp"
#include "melab/simulate.hpp"

namespace melab {

enum class Format { Csv, Json, Markdown };

Format parse_format(const std::string& name);

using Cell = std::variant<std::monostate, std::string, double, long>;

/// Column-ordered table shared by every CLI command.
struct ReportTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Column index by name; throws on an unknown name.
  std::size_t column(const std::string& name) const;
  /// Numeric value of a cell, empty when the cell is blank or textual.
  std::optional<double> number(std::size_t row, const std::string& column) const;
};

using AlphaBeta = std::pair<double, double>;

/// The (alpha, beta) pairs of the reference comparison.
std::vector<AlphaBeta> default_grid();

/// ybar, t1, t_reg, t2min, t3(grid) and t4min(grid) with their MSE split and
/// PRE against ybar. A singular optimum blanks its row and fills `note`.
ReportTable theory_report(const PopulationParams& params, const std::vector<AlphaBeta>& grid);

/// Estimators of theory_report with coefficients resolved at `params`.
std::vector<EstimatorSpec> table_estimators(const PopulationParams& params,
                                            const std::vector<AlphaBeta>& grid);

ReportTable params_report(const PopulationParams& params);
ReportTable simulation_report(const SimulationConfig& config,
                              const std::vector<SimulationResult>& results);
ReportTable sweep_report(const EstimatorSpec& spec, const std::vector<SweepRow>& rows);

std::string render(const ReportTable& table, Format format);

/// Shortest text that round-trips to the same double.
std::string format_full(double value);
/// At least 3 decimals and at least 6 significant digits.
std::string format_table(double value);

}  // namespace melab
