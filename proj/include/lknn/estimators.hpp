#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "lknn/density.hpp"
#include "lknn/neighbors.hpp"
#include "lknn/point_cloud.hpp"

namespace lknn {

// Covariates plus one real label per point.
struct LabeledDataset {
  PointCloud cloud;
  std::vector<double> labels;

  LabeledDataset(PointCloud c, std::vector<double> y) : cloud(std::move(c)), labels(std::move(y)) {
    if (labels.size() != cloud.size())
      throw std::invalid_argument("LabeledDataset: label count must match point count");
    for (double v : labels)
      if (!std::isfinite(v)) throw std::invalid_argument("LabeledDataset: non-finite label");
  }

  std::size_t size() const { return cloud.size(); }
  std::size_t dim() const { return cloud.dim(); }
};

// k = min(n, max(ceil(kappa * log(L)^(d/(2b+d)) * (n*density)^(2b/(2b+d))), floor))
// with floor = max(1, ceil(log n)). Natural log. An infinite density pins the
// cap, a zero density pins the floor.
inline std::size_t adaptive_neighbor_count(double kappa, double beta, std::size_t dim,
                                           std::size_t n, double log_argument,
                                           double density_value) {
  if (!(kappa > 0.0) || !(beta > 0.0)) throw std::invalid_argument("kappa and beta must be > 0");
  if (n < 1 || !(log_argument >= 1.0))
    throw std::invalid_argument("adaptive_neighbor_count: bad sizes");
  const double d = static_cast<double>(dim);
  const double floor_k =
      std::max(1.0, std::ceil(std::log(static_cast<double>(n))));
  const double cap = static_cast<double>(n);
  if (std::isinf(density_value)) return static_cast<std::size_t>(cap);
  if (density_value <= 0.0) return static_cast<std::size_t>(floor_k);
  const double power = 2.0 * beta / (2.0 * beta + d);
  const double raw = kappa * std::pow(std::log(log_argument), d / (2.0 * beta + d)) *
                     std::pow(static_cast<double>(n) * density_value, power);
  const double k = std::min(cap, std::max(std::ceil(raw), floor_k));
  return static_cast<std::size_t>(k);
}

// Source-arm schedule for the non-adaptive estimator:
// k = ceil(kappa * log(A)^(1-r) * n^r) with r = min(gamma/(gamma+1), 2b/(2b+d)),
// clamped to {1, ..., n}. A is n for one sample, n+m for two.
inline std::size_t standard_k_schedule(std::size_t n, std::size_t aux_log, double beta,
                                       std::size_t dim, double gamma, double kappa) {
  if (n < 2 || aux_log < 2) throw std::invalid_argument("standard_k_schedule: n must be >= 2");
  if (!(gamma > 0.0) || !(beta > 0.0) || !(kappa > 0.0))
    throw std::invalid_argument("standard_k_schedule: parameters must be > 0");
  const double d = static_cast<double>(dim);
  const double r0 = 2.0 * beta / (2.0 * beta + d);
  const double r = std::min(gamma / (gamma + 1.0), r0);
  const double raw = kappa * std::pow(std::log(static_cast<double>(aux_log)), 1.0 - r) *
                     std::pow(static_cast<double>(n), r);
  const double k = std::min(static_cast<double>(n), std::max(1.0, std::ceil(raw)));
  return static_cast<std::size_t>(k);
}

// Rule x -> k(x): either a constant (standard estimator) or density-adaptive.
class NeighborFunction {
public:
  struct Constant {
    std::size_t k;
  };
  struct LocalAdaptive {
    double kappa;
    double beta;
    std::shared_ptr<const DensityEstimator> density;
    std::size_t n;            // sample size: cap and floor argument
    double log_argument;      // n for one sample, n+m for two
    // Testing hook: replaces the density estimate with a constant, which
    // reduces the rule to the matching constant-k function.
    std::optional<double> density_override;
  };

  static NeighborFunction constant(std::size_t k, std::size_t n) {
    if (k < 1 || k > n) throw std::invalid_argument("NeighborFunction: k out of range");
    NeighborFunction nf;
    nf.kind_ = Constant{k};
    nf.n_ = n;
    return nf;
  }

  static NeighborFunction local_adaptive(double kappa, double beta,
                                         std::shared_ptr<const DensityEstimator> density,
                                         std::size_t n, double log_argument,
                                         std::optional<double> density_override = std::nullopt) {
    if (!density && !density_override)
      throw std::invalid_argument("NeighborFunction: local rule needs a density estimator");
    NeighborFunction nf;
    nf.kind_ = LocalAdaptive{kappa, beta, std::move(density), n, log_argument, density_override};
    nf.n_ = n;
    return nf;
  }

  std::size_t sample_size() const { return n_; }
  bool is_constant() const { return std::holds_alternative<Constant>(kind_); }

  std::size_t operator()(std::span<const double> x) const {
    if (const auto* c = std::get_if<Constant>(&kind_)) return c->k;
    const auto& rule = std::get<LocalAdaptive>(kind_);
    const double density_value =
        rule.density_override ? *rule.density_override : rule.density->estimate(x);
    const std::size_t dim = rule.density ? rule.density->dim() : x.size();
    return adaptive_neighbor_count(rule.kappa, rule.beta, dim, rule.n, rule.log_argument,
                                   density_value);
  }

private:
  std::variant<Constant, LocalAdaptive> kind_;
  std::size_t n_ = 0;
};

inline std::size_t local_neighbor_count(const NeighborFunction& nf, std::span<const double> x) {
  return nf(x);
}

// One-sample regressor: the mean label of the k(x) canonical nearest
// neighbours. k(x) is computed first, then exactly one neighbour query of
// that size is issued.
class OneSampleRegressor {
public:
  OneSampleRegressor(LabeledDataset data, NeighborFunction neighbor_fn)
      : labels_(std::move(data.labels)),
        index_(std::make_shared<NeighborIndex>(std::move(data.cloud))),
        neighbor_fn_(std::move(neighbor_fn)) {
    if (neighbor_fn_.sample_size() != index_->size())
      throw std::invalid_argument("OneSampleRegressor: neighbor function sized for another sample");
  }

  OneSampleRegressor(std::shared_ptr<const NeighborIndex> index, std::vector<double> labels,
                     NeighborFunction neighbor_fn)
      : labels_(std::move(labels)), index_(std::move(index)), neighbor_fn_(std::move(neighbor_fn)) {
    if (!index_ || labels_.size() != index_->size())
      throw std::invalid_argument("OneSampleRegressor: labels must match the index");
  }

  std::size_t size() const { return index_->size(); }
  std::size_t dim() const { return index_->dim(); }
  const NeighborIndex& index() const { return *index_; }
  std::shared_ptr<const NeighborIndex> index_ptr() const { return index_; }
  const NeighborFunction& neighbor_fn() const { return neighbor_fn_; }

  double label_sum_at(std::span<const double> x, std::size_t k) const {
    const auto res = index_->k_nearest(x, k);
    double sum = 0.0;
    for (std::size_t idx : res.indices) sum += labels_[idx];
    return sum;
  }

  double predict(std::span<const double> x) const {
    const std::size_t k = neighbor_fn_(x);
    return label_sum_at(x, k) / static_cast<double>(k);
  }

private:
  std::vector<double> labels_;
  std::shared_ptr<const NeighborIndex> index_;
  NeighborFunction neighbor_fn_;
};

// Two-sample regressor: pooled neighbour average
//   (sum of k_P(x) source labels + sum of k_Q(x) target labels) / (k_P + k_Q),
// equivalently the w_P/w_Q convex combination of the two one-sample
// predictions. With no target sample it degenerates to the source regressor
// exactly.
class TwoSampleRegressor {
public:
  TwoSampleRegressor(OneSampleRegressor source, std::optional<OneSampleRegressor> target)
      : source_(std::move(source)), target_(std::move(target)) {
    if (target_ && target_->dim() != source_.dim())
      throw std::invalid_argument("TwoSampleRegressor: dimension mismatch between samples");
  }

  const OneSampleRegressor& source() const { return source_; }
  bool has_target() const { return target_.has_value(); }
  const OneSampleRegressor& target() const { return *target_; }

  double predict(std::span<const double> x) const {
    if (!target_) return source_.predict(x);
    const std::size_t k_source = source_.neighbor_fn()(x);
    const std::size_t k_target = target_->neighbor_fn()(x);
    const double pooled = source_.label_sum_at(x, k_source) + target_->label_sum_at(x, k_target);
    return pooled / static_cast<double>(k_source + k_target);
  }

  // Weight of the source arm at x: k_P / (k_P + k_Q).
  double source_weight(std::span<const double> x) const {
    if (!target_) return 1.0;
    const double k_source = static_cast<double>(source_.neighbor_fn()(x));
    const double k_target = static_cast<double>(target_->neighbor_fn()(x));
    return k_source / (k_source + k_target);
  }

private:
  OneSampleRegressor source_;
  std::optional<OneSampleRegressor> target_;
};

}  // namespace lknn
