#pragma once

#include <optional>

#include "melab/estimators.hpp"
#include "melab/moments.hpp"

namespace melab {

/// Coefficients of the second-order expansion of the (alpha, beta)
/// correction factor: factor = 1 - B*d - A*d^2 with d = (xbar - mu_x)/mu_x.
///
/// A uses alpha*(alpha-1) in its first term. A direct Taylor expansion gives
/// alpha*(alpha-1)/2; the two agree for alpha in {0, 1}, the only values the
/// reference tables use.
struct ABCoefficients {
  double A = 0.0;
  double B = 0.0;
};

/// Total first-order MSE split into the part present without measurement
/// error and the contribution of the errors.
struct MseBreakdown {
  double without_me = 0.0;
  double me_contribution = 0.0;
  double total = 0.0;

  static MseBreakdown from_parts(double total, double without_me) {
    return {without_me, total - without_me, total};
  }
};

/// Coefficients of the t4 MSE quadratic
///   (m1-1)^2 mu_y^2 + m1^2 P1 + m2^2 P2 + 2 m1 m2 P3 - 2 m1 P4 - 2 m2 P5.
struct QuadraticCoeffs {
  double P1 = 0.0;
  double P2 = 0.0;
  double P3 = 0.0;
  double P4 = 0.0;
  double P5 = 0.0;
};

/// Closed-form minimiser of a two-weight MSE quadratic.
struct OptimalWeights {
  double first = 0.0;
  double second = 0.0;
  double min_mse = 0.0;
};

struct DominanceT1 {
  bool holds = false;
  std::optional<double> ratio;  // R_m V_xm / V_yxm; empty when V_yxm == 0
};

MseBreakdown var_mean_per_unit(const PopulationParams& params);

double bias_t1(const MomentSet& m, double mu_x);
MseBreakdown mse_t1(const PopulationParams& params);

double mse_t2(const MomentSet& m, double mu_y, double omega1, double omega2);
OptimalWeights opt_weights_t2(const MomentSet& m, double mu_y);

/// Regression slope V_yxm / V_xm used by the t_reg row.
double regression_slope(const MomentSet& m);

ABCoefficients ab_coefficients(double alpha, double beta);

/// Total MSE of t3 at these moments (no decomposition).
double mse_t3_total(const MomentSet& m, double alpha, double beta);
MseBreakdown mse_t3(const PopulationParams& params, double alpha, double beta);
double bias_t3(const MomentSet& m, double mu_x, double alpha, double beta);

QuadraticCoeffs quadratic_coeffs_t4(const MomentSet& m, double alpha, double beta);
double mse_t4(double mu_y, const QuadraticCoeffs& coeffs, double m1, double m2);
OptimalWeights opt_weights_t4(const MomentSet& m, double mu_y, double alpha, double beta);
double bias_t4(const MomentSet& m, double mu_x, double mu_y, double alpha, double beta,
               double m1, double m2);

/// Optimised t2 at full params; the error-free part is re-optimised at
/// sigma_u2 = sigma_v2 = 0.
MseBreakdown mse_t2_min(const PopulationParams& params);
MseBreakdown mse_t4_min(const PopulationParams& params, double alpha, double beta);
/// Regression estimator with slope V_yxm / V_xm, slope recomputed per scenario.
MseBreakdown mse_treg(const PopulationParams& params);

/// Percent relative efficiency 100 * reference / mse.
double pre(double reference_mse, double mse);

DominanceT1 dominance_t1(const PopulationParams& params);
bool dominance_t4(const PopulationParams& params, double alpha, double beta);

/// First-order MSE / bias of an arbitrary estimator at fixed coefficients.
double theory_mse(const EstimatorSpec& spec, const PopulationParams& params);
double theory_bias(const EstimatorSpec& spec, const PopulationParams& params);

}  // namespace melab
