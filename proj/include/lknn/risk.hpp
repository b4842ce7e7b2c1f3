#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lknn/distributions.hpp"
#include "lknn/estimators.hpp"
#include "lknn/rng.hpp"

namespace lknn {

// Regression target with certified smoothness data: |f| <= bound_f and
// |f(x)-f(y)| <= holder_l * |x-y|^beta.
class TargetFunction {
public:
  // amplitude * sin(frequency * mean-direction projection). Lipschitz with
  // constant amplitude * frequency.
  static TargetFunction sine(double amplitude, double frequency) {
    if (!(amplitude > 0.0) || !(frequency > 0.0))
      throw std::invalid_argument("sine: amplitude and frequency must be > 0");
    TargetFunction f;
    f.name_ = "sine";
    f.p1_ = amplitude;
    f.p2_ = frequency;
    f.beta_ = 1.0;
    f.bound_ = amplitude;
    f.holder_ = amplitude * frequency;
    return f;
  }

  // min(bound, l * |x - center|^beta): a capped power cusp, Holder-beta.
  static TargetFunction cusp(double bound, double l, double beta, double center) {
    if (!(bound > 0.0) || !(l > 0.0)) throw std::invalid_argument("cusp: bound and l must be > 0");
    if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("cusp: beta must be in (0, 1]");
    TargetFunction f;
    f.name_ = "cusp";
    f.p1_ = l;
    f.p2_ = center;
    f.beta_ = beta;
    f.bound_ = bound;
    f.holder_ = l;
    return f;
  }

  double operator()(std::span<const double> x) const {
    if (name_ == "sine") {
      const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
      double proj = 0.0;
      for (double xi : x) proj += xi;
      return p1_ * std::sin(p2_ * proj * scale);
    }
    double dist2 = 0.0;
    for (double xi : x) {
      const double diff = xi - p2_;
      dist2 += diff * diff;
    }
    return std::min(bound_, p1_ * std::pow(std::sqrt(dist2), beta_));
  }

  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  const std::string& name() const { return name_; }
  double beta() const { return beta_; }
  double bound() const { return bound_; }
  double holder_constant() const { return holder_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }

private:
  std::string name_;
  double p1_ = 0.0;
  double p2_ = 0.0;
  double beta_ = 1.0;
  double bound_ = 1.0;
  double holder_ = 1.0;
};

enum class NoiseKind { Gaussian, Laplace };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Gaussian;
  double scale = 0.0;  // sigma or b; 0 means noiseless

  double draw(Rng& rng) const {
    if (scale == 0.0) return 0.0;
    return kind == NoiseKind::Gaussian ? rng.gaussian(0.0, scale) : rng.laplace(0.0, scale);
  }
};

// A full regression setting: target function, centered noise, and the
// source/target design pair sharing both (covariate shift). The smoothness
// certificate is spot-checked on sampled pairs at construction.
class RegressionTask {
public:
  RegressionTask(TargetFunction f, NoiseSpec noise, DistributionSpec source,
                 DistributionSpec target)
      : f_(std::move(f)), noise_(noise), source_(std::move(source)), target_(std::move(target)) {
    if (source_.dim() != target_.dim())
      throw std::invalid_argument("RegressionTask: source/target dimension mismatch");
    if (!(noise_.scale >= 0.0)) throw std::invalid_argument("RegressionTask: negative noise scale");
    certify_smoothness();
  }

  const TargetFunction& f() const { return f_; }
  const NoiseSpec& noise() const { return noise_; }
  const DistributionSpec& source() const { return source_; }
  const DistributionSpec& target() const { return target_; }
  std::size_t dim() const { return source_.dim(); }

private:
  // Spot-checks |f| <= bound and the Holder inequality on pairs drawn from
  // both marginals. A failed certificate is a construction error.
  void certify_smoothness() const {
    Rng rng(0x51107e57c4f3ull);
    Rng source_stream = rng.child("source");
    Rng target_stream = rng.child("target");
    const std::size_t count = 256;
    PointCloud from_source = source_.sample(count, source_stream);
    PointCloud from_target = target_.sample(count, target_stream);
    auto check_cloud = [&](const PointCloud& cloud) {
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto x = cloud.point(i);
        const double fx = f_(x);
        if (std::abs(fx) > f_.bound() * (1.0 + 1e-12))
          throw std::invalid_argument("RegressionTask: |f| exceeds its certified bound");
        const auto y = cloud.point((i + 1) % cloud.size());
        double dist2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
          const double diff = x[j] - y[j];
          dist2 += diff * diff;
        }
        const double allowed =
            f_.holder_constant() * std::pow(std::sqrt(dist2), f_.beta());
        if (std::abs(fx - f_(y)) > allowed * (1.0 + 1e-9))
          throw std::invalid_argument("RegressionTask: f violates its certified smoothness");
      }
    };
    check_cloud(from_source);
    check_cloud(from_target);
  }

  TargetFunction f_;
  NoiseSpec noise_;
  DistributionSpec source_;
  DistributionSpec target_;
};

enum class SampleSide { Source, Target };

// Draws n covariates from the chosen marginal and labels them
// f(X) + noise. The covariate stream is side-specific; the noise stream is
// not, so source and target runs with the same seed see the same noise
// sequence applied to different covariates.
inline LabeledDataset generate_labeled(const RegressionTask& task, SampleSide side, std::size_t n,
                                       const Rng& stream) {
  if (n < 1) throw std::invalid_argument("generate_labeled: n must be >= 1");
  Rng x_stream = stream.child(side == SampleSide::Source ? "covariates/source"
                                                         : "covariates/target");
  Rng noise_stream = stream.child("noise");
  const DistributionSpec& marginal =
      side == SampleSide::Source ? task.source() : task.target();
  PointCloud cloud = marginal.sample(n, x_stream);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i)
    labels[i] = task.f()(cloud.point(i)) + task.noise().draw(noise_stream);
  return LabeledDataset(std::move(cloud), std::move(labels));
}

// Mean squared deviation from the true regression function over fresh draws
// from the target marginal. The risk is against f itself; label noise never
// enters.
inline double excess_risk_mc(const std::function<double(std::span<const double>)>& predictor,
                             const RegressionTask& task, std::size_t test_count,
                             const Rng& stream) {
  if (test_count < 1) throw std::invalid_argument("excess_risk_mc: test_count must be >= 1");
  Rng test_stream = stream.child("test-points");
  PointCloud test_points = task.target().sample(test_count, test_stream);
  double sum = 0.0;
  for (std::size_t i = 0; i < test_count; ++i) {
    const auto x = test_points.point(i);
    const double diff = predictor(x) - task.f()(x);
    sum += diff * diff;
  }
  return sum / static_cast<double>(test_count);
}

enum class RateSetting {
  StandardOneSample,
  StandardTwoSampleTarget,
  LocalOneSample,
  LocalTwoSampleTarget,
};

enum class RateRegime { SourceLimited, SmoothnessLimited };

struct TheoreticalRate {
  double rate;
  RateRegime regime;
};

// Risk decay exponents: each setting is a minimum between a transfer term
// and the smoothness term 2b/(2b+d).
inline TheoreticalRate theoretical_rate(RateSetting setting, double beta, std::size_t dim,
                                        double gamma, double rho) {
  if (!(beta > 0.0) || dim < 1) throw std::invalid_argument("theoretical_rate: bad beta or dim");
  const double d = static_cast<double>(dim);
  const double r0 = 2.0 * beta / (2.0 * beta + d);
  double transfer = 0.0;
  switch (setting) {
    case RateSetting::StandardOneSample:
      if (!(gamma > 0.0)) throw std::invalid_argument("theoretical_rate: gamma must be > 0");
      transfer = gamma / (gamma + 1.0);
      break;
    case RateSetting::StandardTwoSampleTarget:
      if (!(rho > 0.0)) throw std::invalid_argument("theoretical_rate: rho must be > 0");
      transfer = rho / (2.0 * rho + d);
      break;
    case RateSetting::LocalOneSample:
      if (!(gamma > 0.0)) throw std::invalid_argument("theoretical_rate: gamma must be > 0");
      transfer = gamma;
      break;
    case RateSetting::LocalTwoSampleTarget:
      if (!(rho > 0.0)) throw std::invalid_argument("theoretical_rate: rho must be > 0");
      transfer = rho / (rho + d);
      break;
  }
  if (transfer < r0) return {transfer, RateRegime::SourceLimited};
  return {r0, RateRegime::SmoothnessLimited};
}

// Boundaries of the exponent interval where the adaptive one-sample rule is
// strictly faster than the constant one: (2b/(2b+d), 2b/d).
inline std::pair<double, double> adaptive_gap_interval(double beta, std::size_t dim) {
  const double d = static_cast<double>(dim);
  return {2.0 * beta / (2.0 * beta + d), 2.0 * beta / d};
}

struct RiskCurvePoint {
  std::size_t n = 0;
  std::size_t m = 0;  // 0 for one-sample experiments
  std::vector<double> replicate_risks;
  std::vector<std::uint64_t> replicate_seeds;
  std::vector<std::int64_t> replicate_wall_ms;
};

struct RiskCurve {
  std::vector<RiskCurvePoint> points;
};

enum class FitLogArgument { N, NPlusM };

struct RateReport {
  double fitted_slope = 0.0;
  double slope_std_err = 0.0;
  double theoretical = 0.0;
  RateRegime regime = RateRegime::SmoothnessLimited;
};

inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + (mid - 1), values.end());
  return 0.5 * (hi + values[mid - 1]);
}

// Ordinary least squares of log(median risk) on log(n / log A). The sign
// convention makes a positive slope r mean risk ~ (log A / n)^r. Requires at
// least 3 grid points and 5 replicates per point.
inline RateReport fit_rate(const RiskCurve& curve, FitLogArgument log_argument) {
  if (curve.points.size() < 3) throw std::invalid_argument("fit_rate: degenerate grid");
  std::vector<double> xs, ys;
  for (const auto& point : curve.points) {
    if (point.replicate_risks.size() < 5) throw std::invalid_argument("fit_rate: degenerate grid");
    const double a = log_argument == FitLogArgument::N
                         ? static_cast<double>(point.n)
                         : static_cast<double>(point.n + point.m);
    const double med = median(point.replicate_risks);
    if (!(med > 0.0)) throw std::invalid_argument("fit_rate: nonpositive median risk");
    xs.push_back(std::log(static_cast<double>(point.n) / std::log(a)));
    ys.push_back(std::log(med));
  }
  const std::size_t count = xs.size();
  const double x_mean = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
    sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: degenerate grid");
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double fit = y_mean + slope * (xs[i] - x_mean);
    rss += (ys[i] - fit) * (ys[i] - fit);
  }
  RateReport report;
  report.fitted_slope = -slope;
  report.slope_std_err =
      count > 2 ? std::sqrt(rss / (static_cast<double>(count) - 2.0) / sxx) : 0.0;
  return report;
}

}  // namespace lknn
