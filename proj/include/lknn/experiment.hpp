#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lknn/density.hpp"
#include "lknn/estimators.hpp"
#include "lknn/risk.hpp"

namespace lknn {

enum class Schedule { Standard, Local };

// How the regressors for one grid cell are assembled.
struct EstimatorConfig {
  Schedule schedule = Schedule::Local;
  bool two_sample = false;
  double kappa_source = 1.0;
  double kappa_target = 1.0;
  double ell_multiplier = 3.0;
  double beta = 1.0;
  // Transfer exponents used by the standard schedules and the theoretical
  // rate; when unset they are derived from the design pair.
  std::optional<double> gamma;
  std::optional<double> rho;
  // Testing hook: constant density override for the local rule.
  std::optional<double> density_override;

  std::string schedule_name() const { return schedule == Schedule::Local ? "local" : "standard"; }
};

// Exponent defaults per design pair: gamma sits at 0.9 of the analytic
// threshold (capped for unbounded thresholds); rho at the Pareto moment
// supremum alpha, effectively unbounded otherwise.
inline double default_gamma(const DistributionSpec& source, const DistributionSpec& target) {
  const double threshold = dre_threshold(source, target);
  if (std::isinf(threshold)) return 1e9;
  return 0.9 * threshold;
}

inline double default_rho(const DistributionSpec& target) {
  if (target.family() == Family::Pareto) return target.alpha();
  return 1e9;
}

namespace detail {

// One-sample regressor for a realized dataset under the configured schedule.
inline OneSampleRegressor build_regressor(LabeledDataset data, const EstimatorConfig& config,
                                          double kappa, std::size_t log_argument,
                                          std::size_t floor_sample_count, double gamma) {
  const std::size_t n = data.size();
  const std::size_t dim = data.dim();
  auto index = std::make_shared<NeighborIndex>(std::move(data.cloud));
  NeighborFunction nf = [&]() -> NeighborFunction {
    if (config.schedule == Schedule::Standard) {
      const std::size_t k =
          standard_k_schedule(n, log_argument, config.beta, dim, gamma, kappa);
      return NeighborFunction::constant(k, n);
    }
    // A constant override collapses the rule to a constant k, so no density
    // estimator is built for it.
    std::shared_ptr<const DensityEstimator> density;
    if (!config.density_override) {
      const std::size_t ell = recommended_ell_for(n, log_argument, config.ell_multiplier);
      density = std::make_shared<DensityEstimator>(index, ell);
    }
    return NeighborFunction::local_adaptive(kappa, config.beta, density, n,
                                            static_cast<double>(log_argument),
                                            config.density_override);
  }();
  (void)floor_sample_count;
  return OneSampleRegressor(index, std::move(data.labels), std::move(nf));
}

}  // namespace detail

// Assembles the regressor for one generated source (and optional target)
// dataset. The standard target arm reuses the source schedule at the
// exponent rho/(rho+d), which reproduces the target-size rule exactly.
inline TwoSampleRegressor build_cell_regressor(LabeledDataset source_data,
                                               std::optional<LabeledDataset> target_data,
                                               const EstimatorConfig& config, double gamma,
                                               double rho) {
  const std::size_t n = source_data.size();
  const std::size_t m = target_data ? target_data->size() : 0;
  const std::size_t log_argument = config.two_sample && m > 0 ? n + m : n;
  OneSampleRegressor source =
      detail::build_regressor(std::move(source_data), config, config.kappa_source, log_argument, n, gamma);
  std::optional<OneSampleRegressor> target;
  if (target_data && m > 0) {
    const double d = static_cast<double>(target_data->dim());
    const double gamma_for_target = rho / (rho + d);
    target = detail::build_regressor(std::move(*target_data), config, config.kappa_target,
                                     log_argument, m, gamma_for_target);
  }
  return TwoSampleRegressor(std::move(source), std::move(target));
}

struct ExperimentPlan {
  RegressionTask task;
  EstimatorConfig estimator;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> m_grid;  // empty for one-sample; else parallel to n_grid
  std::size_t replicates = 1;
  std::size_t test_count = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
};

inline void validate_grid(const ExperimentPlan& plan) {
  if (plan.n_grid.empty() || plan.replicates < 1)
    throw std::invalid_argument("n_grid and replicates must be nonempty");
  for (std::size_t i = 1; i < plan.n_grid.size(); ++i)
    if (plan.n_grid[i] <= plan.n_grid[i - 1])
      throw std::invalid_argument("n_grid must be strictly increasing");
  if (!plan.m_grid.empty() && plan.m_grid.size() != plan.n_grid.size())
    throw std::invalid_argument("m_grid must be empty or match n_grid in length");
}

// Slope fitting needs at least 3 grid points and 5 replicates per point.
inline void require_fittable(const ExperimentPlan& plan) {
  validate_grid(plan);
  if (plan.n_grid.size() < 3 || plan.replicates < 5)
    throw std::invalid_argument("degenerate grid: need >= 3 grid points and >= 5 replicates");
}

// Computes the excess risk for one (grid point, replicate) cell. Exposed so
// the paired comparison can reuse the exact cell layout.
inline double run_cell(const RegressionTask& task, const EstimatorConfig& config, std::size_t n,
                       std::size_t m, const Rng& cell_stream, std::size_t test_count,
                       double gamma, double rho) {
  LabeledDataset source_data = generate_labeled(task, SampleSide::Source, n, cell_stream);
  std::optional<LabeledDataset> target_data;
  if (config.two_sample && m > 0)
    target_data = generate_labeled(task, SampleSide::Target, m, cell_stream);
  TwoSampleRegressor regressor =
      build_cell_regressor(std::move(source_data), std::move(target_data), config, gamma, rho);
  return excess_risk_mc([&](std::span<const double> x) { return regressor.predict(x); }, task,
                        test_count, cell_stream);
}

// Runs the full grid. Cells execute in parallel over a preassigned stream
// per (grid index, replicate); assembly order is fixed, so the output is
// identical for every thread count.
inline RiskCurve run_risk_curve(const ExperimentPlan& plan) {
  validate_grid(plan);
  const double gamma = plan.estimator.gamma
                           ? *plan.estimator.gamma
                           : default_gamma(plan.task.source(), plan.task.target());
  const double rho = plan.estimator.rho ? *plan.estimator.rho : default_rho(plan.task.target());

  struct Cell {
    std::size_t grid_index;
    std::size_t replicate;
  };
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < plan.n_grid.size(); ++g)
    for (std::size_t rep = 0; rep < plan.replicates; ++rep) cells.push_back({g, rep});

  RiskCurve curve;
  curve.points.resize(plan.n_grid.size());
  for (std::size_t g = 0; g < plan.n_grid.size(); ++g) {
    curve.points[g].n = plan.n_grid[g];
    curve.points[g].m = plan.m_grid.empty() ? 0 : plan.m_grid[g];
    curve.points[g].replicate_risks.resize(plan.replicates);
    curve.points[g].replicate_seeds.resize(plan.replicates);
    curve.points[g].replicate_wall_ms.resize(plan.replicates);
  }

  const Rng root(plan.seed);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || failed.load()) return;
      const Cell cell = cells[i];
      const std::size_t n = plan.n_grid[cell.grid_index];
      const std::size_t m = plan.m_grid.empty() ? 0 : plan.m_grid[cell.grid_index];
      Rng cell_stream = root.child(cell.grid_index, cell.replicate);
      const auto started = std::chrono::steady_clock::now();
      try {
        const double risk =
            run_cell(plan.task, plan.estimator, n, m, cell_stream, plan.test_count, gamma, rho);
        const auto elapsed = std::chrono::steady_clock::now() - started;
        auto& point = curve.points[cell.grid_index];
        point.replicate_risks[cell.replicate] = risk;
        point.replicate_seeds[cell.replicate] = cell_stream.seed();
        point.replicate_wall_ms[cell.replicate] =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failed.exchange(true))
          failure_message = "cell n=" + std::to_string(n) + ", replicate " +
                            std::to_string(cell.replicate) + ": " + e.what();
        return;
      }
    }
  };

  unsigned thread_count = plan.threads == 0 ? std::thread::hardware_concurrency() : plan.threads;
  if (thread_count == 0) thread_count = 1;
  thread_count = std::min<unsigned>(thread_count, static_cast<unsigned>(cells.size()));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error(failure_message);
  return curve;
}

inline RateSetting rate_setting_for(const EstimatorConfig& config) {
  if (config.schedule == Schedule::Local)
    return RateSetting::LocalOneSample;
  return RateSetting::StandardOneSample;
}

// Full pipeline: risk curve plus fitted and theoretical exponents.
inline std::pair<RiskCurve, RateReport> run_rate_experiment(const ExperimentPlan& plan) {
  RiskCurve curve = run_risk_curve(plan);
  const bool two_sample = !plan.m_grid.empty();
  RateReport report =
      fit_rate(curve, two_sample ? FitLogArgument::NPlusM : FitLogArgument::N);
  const double gamma = plan.estimator.gamma
                           ? *plan.estimator.gamma
                           : default_gamma(plan.task.source(), plan.task.target());
  const double rho = plan.estimator.rho ? *plan.estimator.rho : default_rho(plan.task.target());
  const TheoreticalRate rate =
      theoretical_rate(rate_setting_for(plan.estimator), plan.estimator.beta,
                       plan.task.dim(), gamma, rho);
  report.theoretical = rate.rate;
  report.regime = rate.regime;
  return {std::move(curve), report};
}

// Tidy CSV with the stable header. Wall times are written only on request:
// the default keeps runs byte-identical for a fixed seed.
inline void write_risk_csv(std::ostream& out, const RiskCurve& curve,
                           const std::string& estimator_name, bool include_timing = false) {
  out << "n,m,replicate,estimator,risk,seed,wall_time_ms\n";
  char risk_buf[64];
  for (const auto& point : curve.points) {
    for (std::size_t rep = 0; rep < point.replicate_risks.size(); ++rep) {
      std::snprintf(risk_buf, sizeof(risk_buf), "%.17g", point.replicate_risks[rep]);
      out << point.n << ',' << point.m << ',' << rep << ',' << estimator_name << ',' << risk_buf
          << ',' << point.replicate_seeds[rep] << ','
          << (include_timing ? point.replicate_wall_ms[rep] : 0) << '\n';
    }
  }
}

// Interleaved two-estimator CSV used by paired comparisons.
inline void write_paired_risk_csv(std::ostream& out, const RiskCurve& first,
                                  const std::string& first_name, const RiskCurve& second,
                                  const std::string& second_name, bool include_timing = false) {
  out << "n,m,replicate,estimator,risk,seed,wall_time_ms\n";
  char risk_buf[64];
  auto write_point = [&](const RiskCurvePoint& point, const std::string& name, std::size_t rep) {
    std::snprintf(risk_buf, sizeof(risk_buf), "%.17g", point.replicate_risks[rep]);
    out << point.n << ',' << point.m << ',' << rep << ',' << name << ',' << risk_buf << ','
        << point.replicate_seeds[rep] << ','
        << (include_timing ? point.replicate_wall_ms[rep] : 0) << '\n';
  };
  for (std::size_t g = 0; g < first.points.size(); ++g) {
    for (std::size_t rep = 0; rep < first.points[g].replicate_risks.size(); ++rep) {
      write_point(first.points[g], first_name, rep);
      write_point(second.points[g], second_name, rep);
    }
  }
}

}  // namespace lknn
