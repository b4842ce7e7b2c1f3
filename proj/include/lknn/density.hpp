#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>

#include "lknn/neighbors.hpp"

namespace lknn {

inline double unit_ball_volume(std::size_t dim) {
  return std::pow(std::numbers::pi, 0.5 * static_cast<double>(dim)) /
         std::tgamma(0.5 * static_cast<double>(dim) + 1.0);
}

// ell-nearest-neighbour density estimator: ell / (n * R_ell(x)^d). Estimates
// the sampling density up to the unit-ball volume constant; pass
// normalize_volume = true to divide that constant out. Returns +inf when the
// query coincides with at least ell duplicate sample points (R_ell = 0);
// callers are expected to clamp.
class DensityEstimator {
public:
  DensityEstimator(std::shared_ptr<const NeighborIndex> index, std::size_t ell,
                   bool normalize_volume = false)
      : index_(std::move(index)), ell_(ell), normalize_volume_(normalize_volume) {
    if (!index_) throw std::invalid_argument("DensityEstimator: null index");
    if (ell_ < 1 || ell_ > index_->size())
      throw std::invalid_argument("DensityEstimator: ell out of range [1, n]");
  }

  std::size_t ell() const { return ell_; }
  std::size_t sample_size() const { return index_->size(); }
  std::size_t dim() const { return index_->dim(); }
  const NeighborIndex& index() const { return *index_; }

  double estimate(std::span<const double> x) const {
    const double radius = index_->kth_radius(x, ell_);
    if (radius == 0.0) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(index_->size());
    double value = static_cast<double>(ell_) /
                   (n * std::pow(radius, static_cast<double>(dim())));
    if (normalize_volume_) value /= unit_ball_volume(dim());
    return value;
  }

private:
  std::shared_ptr<const NeighborIndex> index_;
  std::size_t ell_;
  bool normalize_volume_;
};

// ell schedule ~ multiplier * log n, clamped to {1, ..., n}. Natural log.
inline std::size_t recommended_ell(std::size_t n, double multiplier) {
  if (n < 2) throw std::invalid_argument("recommended_ell: n must be >= 2");
  if (!(multiplier > 0.0)) throw std::invalid_argument("recommended_ell: multiplier must be > 0");
  const double raw = std::ceil(multiplier * std::log(static_cast<double>(n)));
  if (raw >= static_cast<double>(n)) return n;
  return static_cast<std::size_t>(std::max(1.0, raw));
}

// Variant used when the schedule's log argument differs from the sample the
// estimator lives on (two-sample experiments use the pooled count).
inline std::size_t recommended_ell_for(std::size_t n, std::size_t log_argument,
                                       double multiplier) {
  if (n < 1 || log_argument < 2) throw std::invalid_argument("recommended_ell_for: bad sizes");
  if (!(multiplier > 0.0)) throw std::invalid_argument("recommended_ell_for: multiplier must be > 0");
  const double raw = std::ceil(multiplier * std::log(static_cast<double>(log_argument)));
  if (raw >= static_cast<double>(n)) return n;
  return static_cast<std::size_t>(std::max(1.0, raw));
}

}  // namespace lknn
