#include "melab/moments.hpp"

#include <cmath>
#include <sstream>

#include "melab/error.hpp"

namespace melab {

namespace {

[[noreturn]] void reject(const std::string& field, double value, const char* rule) {
  std::ostringstream msg;
  msg << "invalid population parameter " << field << " = " << value << ": " << rule;
  throw Error(ErrorKind::InvalidArgument, msg.str());
}

}  // namespace

void PopulationParams::validate() const {
  if (n < 2) reject("n", n, "sample size must be at least 2");
  for (auto [name, v] : {std::pair{"mu_y", mu_y}, {"mu_x", mu_x}, {"sigma_y2", sigma_y2},
                         {"sigma_x2", sigma_x2}, {"rho", rho}, {"sigma_u2", sigma_u2},
                         {"sigma_v2", sigma_v2}}) {
    if (!std::isfinite(v)) reject(name, v, "must be finite");
  }
  if (mu_y == 0.0) reject("mu_y", mu_y, "ratio forms need a non-zero mean");
  if (mu_x == 0.0) reject("mu_x", mu_x, "ratio forms need a non-zero mean");
  if (sigma_y2 <= 0.0) reject("sigma_y2", sigma_y2, "must be positive");
  if (sigma_x2 <= 0.0) reject("sigma_x2", sigma_x2, "must be positive");
  if (std::abs(rho) > 1.0) reject("rho", rho, "must lie in [-1, 1]");
  if (sigma_u2 < 0.0) reject("sigma_u2", sigma_u2, "must be non-negative");
  if (sigma_v2 < 0.0) reject("sigma_v2", sigma_v2, "must be non-negative");
}

PopulationParams PopulationParams::error_free() const {
  PopulationParams p = *this;
  p.sigma_u2 = 0.0;
  p.sigma_v2 = 0.0;
  return p;
}

PopulationParams PopulationParams::with_n(int sample_n) const {
  PopulationParams p = *this;
  p.n = sample_n;
  return p;
}

MomentSet derive_moments(const PopulationParams& params) {
  params.validate();
  const double n = params.n;
  const double sd_y = std::sqrt(params.sigma_y2);
  const double sd_x = std::sqrt(params.sigma_x2);
  MomentSet m;
  m.V_ym = (params.sigma_y2 + params.sigma_u2) / n;
  m.V_xm = (params.sigma_x2 + params.sigma_v2) / n;
  m.V_yxm = params.rho * sd_y * sd_x / n;
  m.R_m = params.mu_y / params.mu_x;
  m.C_y = sd_y / params.mu_y;
  m.C_x = sd_x / params.mu_x;
  return m;
}

}  // namespace melab
