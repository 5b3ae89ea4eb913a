#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "melab/estimators.hpp"
#include "melab/moments.hpp"

namespace melab {

enum class ErrorLaw { Gaussian, Uniform, StudentT };

ErrorLaw parse_error_law(const std::string& name);
std::string to_string(ErrorLaw law);

struct SimulationConfig {
  PopulationParams params;
  int sample_n = 10;  // overrides params.n
  long replicates = 10000;
  std::uint64_t seed = 1;
  ErrorLaw error_law = ErrorLaw::Gaussian;
  double student_df = 8.0;  // used when error_law == StudentT, must exceed 4
  int threads = 0;          // 0: ME_LAB_THREADS or hardware concurrency

  void validate() const;
};

struct SimulationResult {
  EstimatorSpec estimator;
  double empirical_bias = 0.0;
  double mc_se_bias = 0.0;
  double empirical_mse = 0.0;
  double mc_se_mse = 0.0;
  long replicates_used = 0;
  long replicates_skipped = 0;
  double theory_mse = 0.0;
  double theory_bias = 0.0;

  double relative_gap() const;
};

struct SweepRow {
  int n = 0;
  double empirical_mse = 0.0;
  double mc_se_mse = 0.0;
  double theory_mse = 0.0;
  double relative_gap = 0.0;
};

/// Generates the observed sample for one replicate. The result depends only
/// on (config.seed, replicate_index, config.params, config.sample_n,
/// config.error_law).
ObservedSample draw_replicate(const SimulationConfig& config, std::uint64_t replicate_index);

struct ReplicateDraw {
  std::vector<Observation> truth;  // (Y_i, X_i) before measurement error
  ObservedSample observed;
};

/// draw_replicate together with the error-free values it was built from.
ReplicateDraw draw_replicate_with_truth(const SimulationConfig& config,
                                        std::uint64_t replicate_index);

/// Output is independent of the worker count.
std::vector<SimulationResult> run_monte_carlo(const SimulationConfig& config,
                                              const std::vector<EstimatorSpec>& specs);

std::vector<SweepRow> convergence_sweep(const SimulationConfig& config, const EstimatorSpec& spec,
                                        const std::vector<int>& n_grid);
/// One spec per grid point, for estimators whose coefficients depend on n.
std::vector<SweepRow> convergence_sweep(const SimulationConfig& config,
                                        const std::vector<EstimatorSpec>& specs,
                                        const std::vector<int>& n_grid);

/// Worker count from ME_LAB_THREADS, falling back to hardware concurrency.
int default_thread_count();

}  // namespace melab
