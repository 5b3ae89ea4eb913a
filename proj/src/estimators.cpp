#include "melab/estimators.hpp"

#include <cmath>
#include <sstream>

#include "melab/error.hpp"

namespace melab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

double weighted_mean(double ybar, double xbar, double mu_x, double c1, double c2) {
  return c1 * ybar + c2 * (mu_x - xbar);
}

}  // namespace

ObservedSample::ObservedSample(std::vector<Observation> pairs) : pairs_(std::move(pairs)) {
  for (const auto& p : pairs_) {
    if (!std::isfinite(p.y) || !std::isfinite(p.x)) {
      throw Error(ErrorKind::InvalidArgument, "observed sample contains a non-finite value");
    }
  }
}

double ObservedSample::mean_y() const {
  if (pairs_.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  double s = 0.0;
  for (const auto& p : pairs_) s += p.y;
  return s / static_cast<double>(pairs_.size());
}

double ObservedSample::mean_x() const {
  if (pairs_.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  double s = 0.0;
  for (const auto& p : pairs_) s += p.x;
  return s / static_cast<double>(pairs_.size());
}

std::string describe(const EstimatorSpec& spec) {
  return std::visit(
      overloaded{
          [](const estimator::MeanPerUnit&) { return std::string("ybar"); },
          [](const estimator::ExpRatio&) { return std::string("t1"); },
          [](const estimator::Weighted& w) {
            return "t2(" + num(w.omega1) + "," + num(w.omega2) + ")";
          },
          [](const estimator::SinghSolanki& s) {
            return "t3(" + num(s.alpha) + "," + num(s.beta) + ")";
          },
          [](const estimator::GeneralClass& g) {
            return "t4(" + num(g.alpha) + "," + num(g.beta) + ")";
          },
      },
      spec);
}

double correction_factor(double xbar, double mu_x, double alpha, double beta) {
  if (mu_x == 0.0) throw Error(ErrorKind::Domain, "mu_x must be non-zero");
  const double denom = xbar + mu_x;
  if (denom == 0.0) throw Error(ErrorKind::Domain, "xbar + mu_x vanishes");
  const double ratio = xbar / mu_x;
  if (ratio <= 0.0 && alpha != std::trunc(alpha)) {
    throw Error(ErrorKind::Domain, "non-integer alpha with xbar/mu_x <= 0");
  }
  if (ratio == 0.0 && alpha < 0.0) {
    throw Error(ErrorKind::Domain, "negative alpha with xbar = 0");
  }
  return 2.0 - std::pow(ratio, alpha) * std::exp(beta * (xbar - mu_x) / denom);
}

double evaluate_means(const EstimatorSpec& spec, double ybar, double xbar, double mu_x) {
  if (mu_x == 0.0) throw Error(ErrorKind::Domain, "mu_x must be non-zero");
  const double value = std::visit(
      overloaded{
          [&](const estimator::MeanPerUnit&) { return ybar; },
          [&](const estimator::ExpRatio&) {
            const double denom = mu_x + xbar;
            if (denom == 0.0) throw Error(ErrorKind::Domain, "xbar + mu_x vanishes");
            return ybar * std::exp((mu_x - xbar) / denom);
          },
          [&](const estimator::Weighted& w) {
            return weighted_mean(ybar, xbar, mu_x, w.omega1, w.omega2);
          },
          [&](const estimator::SinghSolanki& s) {
            return ybar * correction_factor(xbar, mu_x, s.alpha, s.beta);
          },
          [&](const estimator::GeneralClass& g) {
            return weighted_mean(ybar, xbar, mu_x, g.m1, g.m2) *
                   correction_factor(xbar, mu_x, g.alpha, g.beta);
          },
      },
      spec);
  if (!std::isfinite(value)) throw Error(ErrorKind::Domain, "estimator value overflowed");
  return value;
}

double evaluate(const EstimatorSpec& spec, const ObservedSample& sample, double mu_x) {
  if (sample.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty sample");
  return evaluate_means(spec, sample.mean_y(), sample.mean_x(), mu_x);
}

}  // namespace melab
