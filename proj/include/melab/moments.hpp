#pragma once

#include <string>

namespace melab {

/// Population-level description of a study scenario: true-score means,
/// variances and correlation, plus the variances of the additive errors on
/// the observed study (u) and auxiliary (v) variables.
struct PopulationParams {
  int n = 2;
  double mu_y = 0.0;
  double mu_x = 0.0;
  double sigma_y2 = 0.0;
  double sigma_x2 = 0.0;
  double rho = 0.0;
  double sigma_u2 = 0.0;
  double sigma_v2 = 0.0;

  /// Throws Error(InvalidArgument) when any field violates its range.
  void validate() const;

  /// Same scenario with both error variances set to zero.
  PopulationParams error_free() const;

  /// Same scenario at a different sample size.
  PopulationParams with_n(int sample_n) const;

  bool operator==(const PopulationParams&) const = default;
};

/// First-order moments of k1 = ybar - mu_y and k2 = xbar - mu_x under the
/// additive error model, plus the ratio and coefficients of variation.
struct MomentSet {
  double V_ym = 0.0;   // E(k1^2)
  double V_xm = 0.0;   // E(k2^2)
  double V_yxm = 0.0;  // E(k1 k2)
  double R_m = 0.0;    // mu_y / mu_x
  double C_y = 0.0;
  double C_x = 0.0;
};

MomentSet derive_moments(const PopulationParams& params);

}  // namespace melab
