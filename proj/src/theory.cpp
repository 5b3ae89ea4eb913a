#include "melab/theory.hpp"

#include <cmath>
#include <variant>

#include "melab/error.hpp"

namespace melab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Determinants this small relative to their terms are treated as singular.
constexpr double kSingularTol = 1e-12;

double checked_determinant(double ad, double bc, const char* what) {
  const double det = ad - bc;
  const double scale = std::abs(ad) + std::abs(bc);
  if (!std::isfinite(det) || scale == 0.0 || std::abs(det) <= kSingularTol * scale) {
    throw Error(ErrorKind::Singular, std::string("singular optimum system for ") + what);
  }
  return det;
}

}  // namespace

MseBreakdown var_mean_per_unit(const PopulationParams& params) {
  params.validate();
  const double n = params.n;
  return {params.sigma_y2 / n, params.sigma_u2 / n, (params.sigma_y2 + params.sigma_u2) / n};
}

double bias_t1(const MomentSet& m, double mu_x) {
  return (0.375 * m.R_m * m.V_xm - 0.5 * m.V_yxm) / mu_x;
}

MseBreakdown mse_t1(const PopulationParams& params) {
  const MomentSet m = derive_moments(params);
  const double n = params.n;
  const double k = m.C_x / m.C_y;
  const double without = params.sigma_y2 / n * (1.0 - k * (params.rho - m.C_x / (4.0 * m.C_y)));
  const double ratio2 = (params.mu_y * params.mu_y) / (4.0 * params.mu_x * params.mu_x);
  const double me = (ratio2 * params.sigma_v2 + params.sigma_u2) / n;
  return {without, me, without + me};
}

double mse_t2(const MomentSet& m, double mu_y, double omega1, double omega2) {
  const double d = omega1 - 1.0;
  return d * d * mu_y * mu_y + omega1 * omega1 * m.V_ym + omega2 * omega2 * m.V_xm -
         2.0 * omega1 * omega2 * m.V_yxm;
}

OptimalWeights opt_weights_t2(const MomentSet& m, double mu_y) {
  const double b1 = mu_y * mu_y + m.V_ym;
  const double b2 = -m.V_yxm;
  const double b3 = m.V_xm;
  const double b4 = mu_y * mu_y;
  const double det = checked_determinant(b1 * b3, b2 * b2, "t2");
  OptimalWeights w;
  w.first = b3 * b4 / det;
  w.second = -b2 * b4 / det;
  w.min_mse = mu_y * mu_y - b3 * b4 * b4 / det;
  return w;
}

double regression_slope(const MomentSet& m) { return m.V_yxm / m.V_xm; }

ABCoefficients ab_coefficients(double alpha, double beta) {
  return {alpha * (alpha - 1.0) + beta * (beta - 2.0) / 8.0 + alpha * beta / 2.0,
          alpha + beta / 2.0};
}

double mse_t3_total(const MomentSet& m, double alpha, double beta) {
  const double B = ab_coefficients(alpha, beta).B;
  return m.V_ym + m.V_xm * m.R_m * m.R_m * B * B - 2.0 * m.R_m * B * m.V_yxm;
}

MseBreakdown mse_t3(const PopulationParams& params, double alpha, double beta) {
  const double total = mse_t3_total(derive_moments(params), alpha, beta);
  const double without = mse_t3_total(derive_moments(params.error_free()), alpha, beta);
  return MseBreakdown::from_parts(total, without);
}

double bias_t3(const MomentSet& m, double mu_x, double alpha, double beta) {
  const auto [A, B] = ab_coefficients(alpha, beta);
  return -(B * m.V_yxm + A * m.R_m * m.V_xm) / mu_x;
}

QuadraticCoeffs quadratic_coeffs_t4(const MomentSet& m, double alpha, double beta) {
  const auto [A, B] = ab_coefficients(alpha, beta);
  const double R2 = m.R_m * m.R_m;
  QuadraticCoeffs c;
  c.P1 = m.V_ym + B * B * R2 * m.V_xm - 2.0 * A * R2 * m.V_xm;
  c.P2 = m.V_xm;
  c.P3 = 2.0 * B * m.R_m * m.V_xm - m.V_yxm;
  c.P4 = B * m.R_m * m.V_yxm - A * R2 * m.V_xm;
  c.P5 = B * m.R_m * m.V_xm;
  return c;
}

double mse_t4(double mu_y, const QuadraticCoeffs& c, double m1, double m2) {
  const double d = m1 - 1.0;
  return d * d * mu_y * mu_y + m1 * m1 * c.P1 + m2 * m2 * c.P2 + 2.0 * m1 * m2 * c.P3 -
         2.0 * m1 * c.P4 - 2.0 * m2 * c.P5;
}

OptimalWeights opt_weights_t4(const MomentSet& m, double mu_y, double alpha, double beta) {
  const QuadraticCoeffs c = quadratic_coeffs_t4(m, alpha, beta);
  const double mu2 = mu_y * mu_y;
  const double B1 = mu2 + c.P4;
  const double B2 = mu2 + c.P1;
  const double det = checked_determinant(B2 * c.P2, c.P3 * c.P3, "t4");
  // Far from the usual regime the first-order quadratic can be indefinite and
  // its stationary point is then a saddle or a maximum.
  if (det < 0.0 || B2 <= 0.0) {
    throw Error(ErrorKind::Domain, "first-order t4 MSE has no minimum at these parameters");
  }
  OptimalWeights w;
  w.first = (B1 * c.P2 - c.P3 * c.P5) / det;
  w.second = (B2 * c.P5 - B1 * c.P3) / det;
  w.min_mse = mse_t4(mu_y, c, w.first, w.second);
  return w;
}

double bias_t4(const MomentSet& m, double mu_x, double mu_y, double alpha, double beta,
               double m1, double m2) {
  const auto [A, B] = ab_coefficients(alpha, beta);
  return (m1 - 1.0) * mu_y - m1 * mu_y * (m.V_xm * A / (mu_x * mu_x)) -
         m1 * (B / mu_x) * m.V_yxm + m2 * (B / mu_x) * m.V_xm;
}

MseBreakdown mse_t2_min(const PopulationParams& params) {
  const double total = opt_weights_t2(derive_moments(params), params.mu_y).min_mse;
  const double without =
      opt_weights_t2(derive_moments(params.error_free()), params.mu_y).min_mse;
  return MseBreakdown::from_parts(total, without);
}

MseBreakdown mse_t4_min(const PopulationParams& params, double alpha, double beta) {
  const double total =
      opt_weights_t4(derive_moments(params), params.mu_y, alpha, beta).min_mse;
  const double without =
      opt_weights_t4(derive_moments(params.error_free()), params.mu_y, alpha, beta).min_mse;
  return MseBreakdown::from_parts(total, without);
}

MseBreakdown mse_treg(const PopulationParams& params) {
  auto at = [&](const PopulationParams& p) {
    const MomentSet m = derive_moments(p);
    return mse_t2(m, p.mu_y, 1.0, regression_slope(m));
  };
  return MseBreakdown::from_parts(at(params), at(params.error_free()));
}

double pre(double reference_mse, double mse) {
  if (!(mse > 0.0)) throw Error(ErrorKind::InvalidArgument, "PRE needs a positive MSE");
  if (!(reference_mse > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "PRE needs a positive reference MSE");
  }
  return 100.0 * reference_mse / mse;
}

DominanceT1 dominance_t1(const PopulationParams& params) {
  const MomentSet m = derive_moments(params);
  DominanceT1 d;
  d.holds = mse_t1(params).total <= var_mean_per_unit(params).total;
  if (m.V_yxm != 0.0) d.ratio = m.R_m * m.V_xm / m.V_yxm;
  return d;
}

bool dominance_t4(const PopulationParams& params, double alpha, double beta) {
  const MomentSet m = derive_moments(params);
  return opt_weights_t4(m, params.mu_y, alpha, beta).min_mse <= var_mean_per_unit(params).total;
}

double theory_mse(const EstimatorSpec& spec, const PopulationParams& params) {
  const MomentSet m = derive_moments(params);
  return std::visit(
      overloaded{
          [&](const estimator::MeanPerUnit&) { return m.V_ym; },
          [&](const estimator::ExpRatio&) { return mse_t1(params).total; },
          [&](const estimator::Weighted& w) {
            return mse_t2(m, params.mu_y, w.omega1, w.omega2);
          },
          [&](const estimator::SinghSolanki& s) { return mse_t3_total(m, s.alpha, s.beta); },
          [&](const estimator::GeneralClass& g) {
            return mse_t4(params.mu_y, quadratic_coeffs_t4(m, g.alpha, g.beta), g.m1, g.m2);
          },
      },
      spec);
}

double theory_bias(const EstimatorSpec& spec, const PopulationParams& params) {
  const MomentSet m = derive_moments(params);
  return std::visit(
      overloaded{
          [&](const estimator::MeanPerUnit&) { return 0.0; },
          [&](const estimator::ExpRatio&) { return bias_t1(m, params.mu_x); },
          [&](const estimator::Weighted& w) { return params.mu_y * (w.omega1 - 1.0); },
          [&](const estimator::SinghSolanki& s) {
            return bias_t3(m, params.mu_x, s.alpha, s.beta);
          },
          [&](const estimator::GeneralClass& g) {
            return bias_t4(m, params.mu_x, params.mu_y, g.alpha, g.beta, g.m1, g.m2);
          },
      },
      spec);
}

}  // namespace melab
