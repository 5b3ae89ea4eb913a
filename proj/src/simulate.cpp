#include "melab/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "melab/error.hpp"
#include "melab/theory.hpp"

namespace melab {

namespace {

constexpr long kBlockSize = 1024;

// SplitMix64 finaliser; maps (seed, replicate) to an independent engine seed.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t replicate) {
  return mix64(mix64(seed) ^ mix64(replicate + 0x632be59bd9b4e019ULL));
}

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct Accumulator {
  CompensatedSum e1, e2, e4;
  long used = 0;
  long skipped = 0;

  void add(double e) {
    const double sq = e * e;
    e1.add(e);
    e2.add(sq);
    e4.add(sq * sq);
    ++used;
  }
  void merge(const Accumulator& o) {
    e1.add(o.e1.value());
    e2.add(o.e2.value());
    e4.add(o.e4.value());
    used += o.used;
    skipped += o.skipped;
  }
};

class ErrorSampler {
 public:
  ErrorSampler(ErrorLaw law, double variance, double df) : law_(law), df_(df) {
    const double sd = std::sqrt(variance);
    switch (law) {
      case ErrorLaw::Gaussian: scale_ = sd; break;
      case ErrorLaw::Uniform: scale_ = sd * std::sqrt(3.0); break;
      case ErrorLaw::StudentT: scale_ = sd * std::sqrt((df - 2.0) / df); break;
    }
  }

  template <class Engine>
  double operator()(Engine& eng) {
    switch (law_) {
      case ErrorLaw::Gaussian: return scale_ * normal_(eng);
      case ErrorLaw::Uniform: return scale_ * (2.0 * unit_(eng) - 1.0);
      case ErrorLaw::StudentT: return scale_ * student_(eng);
    }
    return 0.0;
  }

 private:
  ErrorLaw law_;
  double df_;
  double scale_ = 0.0;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::student_t_distribution<double> student_{law_ == ErrorLaw::StudentT ? df_ : 8.0};
};

// Fills `out` with the observed pairs of one replicate.
void fill_replicate(const SimulationConfig& config, std::uint64_t index,
                    std::vector<Observation>& out, std::vector<Observation>* truth = nullptr) {
  const PopulationParams& p = config.params;
  std::mt19937_64 eng(substream_seed(config.seed, index));
  std::normal_distribution<double> normal;
  ErrorSampler err_y(config.error_law, p.sigma_u2, config.student_df);
  ErrorSampler err_x(config.error_law, p.sigma_v2, config.student_df);
  const double sd_y = std::sqrt(p.sigma_y2);
  const double sd_x = std::sqrt(p.sigma_x2);
  const double resid = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));

  out.resize(static_cast<std::size_t>(config.sample_n));
  if (truth) truth->resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Observation& obs = out[i];
    const double z1 = normal(eng);
    const double z2 = normal(eng);
    const double X = p.mu_x + sd_x * z1;
    const double Y = p.mu_y + sd_y * (p.rho * z1 + resid * z2);
    const double u = err_y(eng);
    const double v = err_x(eng);
    obs.y = Y + u;
    obs.x = X + v;
    if (truth) (*truth)[i] = {Y, X};
  }
}

void sample_means(const std::vector<Observation>& obs, double& ybar, double& xbar) {
  double sy = 0.0;
  double sx = 0.0;
  for (const auto& o : obs) {
    sy += o.y;
    sx += o.x;
  }
  ybar = sy / static_cast<double>(obs.size());
  xbar = sx / static_cast<double>(obs.size());
}

}  // namespace

ErrorLaw parse_error_law(const std::string& name) {
  if (name == "gaussian" || name == "normal") return ErrorLaw::Gaussian;
  if (name == "uniform") return ErrorLaw::Uniform;
  if (name == "student-t" || name == "t") return ErrorLaw::StudentT;
  throw Error(ErrorKind::InvalidArgument, "unknown error law '" + name + "'");
}

std::string to_string(ErrorLaw law) {
  switch (law) {
    case ErrorLaw::Gaussian: return "gaussian";
    case ErrorLaw::Uniform: return "uniform";
    case ErrorLaw::StudentT: return "student-t";
  }
  return "?";
}

void SimulationConfig::validate() const {
  if (sample_n < 2) throw Error(ErrorKind::InvalidArgument, "sample_n must be at least 2");
  params.with_n(sample_n).validate();
  if (replicates < 100) throw Error(ErrorKind::InvalidArgument, "replicates must be >= 100");
  if (error_law == ErrorLaw::StudentT && !(student_df > 4.0)) {
    throw Error(ErrorKind::InvalidArgument, "Student-t errors need df > 4");
  }
  if (threads < 0) throw Error(ErrorKind::InvalidArgument, "threads must be non-negative");
}

double SimulationResult::relative_gap() const {
  return std::abs(empirical_mse - theory_mse) / theory_mse;
}

int default_thread_count() {
  if (const char* env = std::getenv("ME_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ObservedSample draw_replicate(const SimulationConfig& config, std::uint64_t replicate_index) {
  config.validate();
  std::vector<Observation> obs;
  fill_replicate(config, replicate_index, obs);
  return ObservedSample(std::move(obs));
}

ReplicateDraw draw_replicate_with_truth(const SimulationConfig& config,
                                        std::uint64_t replicate_index) {
  config.validate();
  std::vector<Observation> obs;
  std::vector<Observation> truth;
  fill_replicate(config, replicate_index, obs, &truth);
  return {std::move(truth), ObservedSample(std::move(obs))};
}

std::vector<SimulationResult> run_monte_carlo(const SimulationConfig& config,
                                              const std::vector<EstimatorSpec>& specs) {
  config.validate();
  const double mu_x = config.params.mu_x;
  const double mu_y = config.params.mu_y;
  const std::size_t nspec = specs.size();
  const long nblocks = (config.replicates + kBlockSize - 1) / kBlockSize;

  // Block b holds replicates [b*kBlockSize, (b+1)*kBlockSize); blocks are
  // merged in index order, so the worker count never changes the result.
  std::vector<Accumulator> blocks(static_cast<std::size_t>(nblocks) * nspec);
  std::atomic<long> next{0};

  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    std::vector<Observation> buf;
    for (long b = next++; b < nblocks; b = next++) {
      Accumulator* acc = &blocks[static_cast<std::size_t>(b) * nspec];
      const long begin = b * kBlockSize;
      const long end = std::min(config.replicates, begin + kBlockSize);
      for (long r = begin; r < end; ++r) {
        fill_replicate(config, static_cast<std::uint64_t>(r), buf);
        double ybar = 0.0;
        double xbar = 0.0;
        sample_means(buf, ybar, xbar);
        for (std::size_t s = 0; s < nspec; ++s) {
          double t = 0.0;
          try {
            t = evaluate_means(specs[s], ybar, xbar, mu_x);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::Domain) throw;
            ++acc[s].skipped;
            continue;
          }
          if (!std::isfinite(t)) {
            ++acc[s].skipped;
            continue;
          }
          acc[s].add(t - mu_y);
        }
      }
    }
  };
  auto worker = [&] {
    try {
      work();
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = nblocks;
    }
  };

  const int nthreads =
      static_cast<int>(std::min<long>(config.threads > 0 ? config.threads : default_thread_count(),
                                      nblocks));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const PopulationParams at_n = config.params.with_n(config.sample_n);
  std::vector<SimulationResult> results;
  results.reserve(nspec);
  for (std::size_t s = 0; s < nspec; ++s) {
    Accumulator total;
    for (long b = 0; b < nblocks; ++b) total.merge(blocks[static_cast<std::size_t>(b) * nspec + s]);

    SimulationResult r;
    r.estimator = specs[s];
    r.replicates_used = total.used;
    r.replicates_skipped = total.skipped;
    if (total.used == 0) {
      throw Error(ErrorKind::AllSkipped, "every replicate was skipped for " + describe(specs[s]));
    }
    const double N = static_cast<double>(total.used);
    const double s1 = total.e1.value();
    const double s2 = total.e2.value();
    const double s4 = total.e4.value();
    r.empirical_bias = s1 / N;
    r.empirical_mse = s2 / N;
    if (total.used >= 2) {
      const double var_e = std::max(0.0, (s2 - s1 * s1 / N) / (N - 1.0));
      const double var_e2 = std::max(0.0, (s4 - s2 * s2 / N) / (N - 1.0));
      r.mc_se_bias = std::sqrt(var_e / N);
      r.mc_se_mse = std::sqrt(var_e2 / N);
    }
    r.theory_mse = theory_mse(specs[s], at_n);
    r.theory_bias = theory_bias(specs[s], at_n);
    results.push_back(r);
  }
  return results;
}

std::vector<SweepRow> convergence_sweep(const SimulationConfig& config, const EstimatorSpec& spec,
                                        const std::vector<int>& n_grid) {
  return convergence_sweep(config, std::vector<EstimatorSpec>(n_grid.size(), spec), n_grid);
}

std::vector<SweepRow> convergence_sweep(const SimulationConfig& config,
                                        const std::vector<EstimatorSpec>& specs,
                                        const std::vector<int>& n_grid) {
  if (n_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty n grid");
  if (!std::is_sorted(n_grid.begin(), n_grid.end())) {
    throw Error(ErrorKind::InvalidArgument, "n grid must be ascending");
  }
  if (specs.size() != n_grid.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one estimator per grid point");
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    SimulationConfig c = config;
    c.sample_n = n_grid[i];
    const SimulationResult r = run_monte_carlo(c, {specs[i]}).front();
    rows.push_back({n_grid[i], r.empirical_mse, r.mc_se_mse, r.theory_mse, r.relative_gap()});
  }
  return rows;
}

}  // namespace melab
