#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace melab {

/// One observed (error-contaminated) unit.
struct Observation {
  double y = 0.0;
  double x = 0.0;
};

/// Observed pairs (y_i, x_i) of a single sample.
class ObservedSample {
 public:
  ObservedSample() = default;
  explicit ObservedSample(std::vector<Observation> pairs);

  std::span<const Observation> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  double mean_y() const;
  double mean_x() const;

 private:
  std::vector<Observation> pairs_;
};

namespace estimator {

/// Plain sample mean of the observed study variable.
struct MeanPerUnit {
  bool operator==(const MeanPerUnit&) const = default;
};

/// ybar * exp((mu_x - xbar) / (mu_x + xbar)).
struct ExpRatio {
  bool operator==(const ExpRatio&) const = default;
};

/// omega1 * ybar + omega2 * (mu_x - xbar), unrestricted weights.
struct Weighted {
  double omega1 = 1.0;
  double omega2 = 0.0;
  bool operator==(const Weighted&) const = default;
};

/// ybar * {2 - (xbar/mu_x)^alpha * exp(beta (xbar - mu_x) / (xbar + mu_x))}.
struct SinghSolanki {
  double alpha = 0.0;
  double beta = 0.0;
  bool operator==(const SinghSolanki&) const = default;
};

/// [m1 * ybar + m2 * (mu_x - xbar)] times the SinghSolanki correction factor.
struct GeneralClass {
  double m1 = 1.0;
  double m2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool operator==(const GeneralClass&) const = default;
};

}  // namespace estimator

using EstimatorSpec =
    std::variant<estimator::MeanPerUnit, estimator::ExpRatio, estimator::Weighted,
                 estimator::SinghSolanki, estimator::GeneralClass>;

/// Short tag such as "t1" or "t4(1,-1)".
std::string describe(const EstimatorSpec& spec);

/// Evaluates the estimator from the two sample means. Throws Error(Domain)
/// when the defining formula is undefined at (ybar, xbar) or overflows.
double evaluate_means(const EstimatorSpec& spec, double ybar, double xbar, double mu_x);

/// Evaluates the estimator on a sample. Throws Error(InvalidArgument) on an
/// empty or non-finite sample and Error(Domain) like evaluate_means.
double evaluate(const EstimatorSpec& spec, const ObservedSample& sample, double mu_x);

/// The factor 2 - (xbar/mu_x)^alpha * exp(beta (xbar - mu_x)/(xbar + mu_x)).
double correction_factor(double xbar, double mu_x, double alpha, double beta);

}  // namespace melab
