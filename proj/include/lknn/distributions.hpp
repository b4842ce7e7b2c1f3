#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lknn/point_cloud.hpp"
#include "lknn/rng.hpp"

namespace lknn {

enum class Family { Uniform, Exponential, Pareto, Gaussian };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::Uniform: return "uniform";
    case Family::Exponential: return "exponential";
    case Family::Pareto: return "pareto";
    case Family::Gaussian: return "gaussian";
  }
  return "?";
}

// Two-sided ball-mass comparison constants: mass >= a_minus * p(x) * r^d for
// r <= r_minus, and mass <= a_plus * p(x) * r^d on the support for r <= r_plus.
struct MassPropertyConstants {
  double a_minus;
  double r_minus;
  double a_plus;
  double r_plus;
};

// Analytic design distribution. Uniform is a cube in any dimension; the
// exponential, Pareto and Gaussian families are one-dimensional.
class DistributionSpec {
public:
  static DistributionSpec uniform(double a, double b, std::size_t dim = 1) {
    if (!(a < b)) throw std::invalid_argument("uniform: requires a < b");
    if (dim < 1) throw std::invalid_argument("uniform: dim must be >= 1");
    DistributionSpec s;
    s.family_ = Family::Uniform;
    s.a_ = a;
    s.b_ = b;
    s.dim_ = dim;
    return s;
  }

  static DistributionSpec exponential(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exponential: lambda must be > 0");
    DistributionSpec s;
    s.family_ = Family::Exponential;
    s.a_ = lambda;
    return s;
  }

  // Location 1, shape alpha; density alpha * x^-(alpha+1) on [1, inf).
  static DistributionSpec pareto(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("pareto: alpha must be > 0");
    DistributionSpec s;
    s.family_ = Family::Pareto;
    s.a_ = alpha;
    return s;
  }

  static DistributionSpec gaussian(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be > 0");
    DistributionSpec s;
    s.family_ = Family::Gaussian;
    s.a_ = mu;
    s.b_ = sigma;
    return s;
  }

  Family family() const { return family_; }
  std::size_t dim() const { return dim_; }

  double uniform_a() const { return a_; }
  double uniform_b() const { return b_; }
  double lambda() const { return a_; }
  double alpha() const { return a_; }
  double mu() const { return a_; }
  double sigma() const { return b_; }

  // Support interval per coordinate (uniform) or on the line.
  double support_left() const {
    switch (family_) {
      case Family::Uniform: return a_;
      case Family::Exponential: return 0.0;
      case Family::Pareto: return 1.0;
      case Family::Gaussian: return -std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }
  double support_right() const {
    switch (family_) {
      case Family::Uniform: return b_;
      default: return std::numeric_limits<double>::infinity();
    }
  }

  double pdf(std::span<const double> x) const {
    if (x.size() != dim_) throw std::invalid_argument("pdf: dimension mismatch");
    switch (family_) {
      case Family::Uniform: {
        for (double xi : x)
          if (xi < a_ || xi > b_) return 0.0;
        return std::pow(b_ - a_, -static_cast<double>(dim_));
      }
      case Family::Exponential:
        return x[0] < 0.0 ? 0.0 : a_ * std::exp(-a_ * x[0]);
      case Family::Pareto:
        return x[0] < 1.0 ? 0.0 : a_ * std::pow(x[0], -(a_ + 1.0));
      case Family::Gaussian: {
        const double z = (x[0] - a_) / b_;
        return std::exp(-0.5 * z * z) / (b_ * std::sqrt(2.0 * std::numbers::pi));
      }
    }
    return 0.0;
  }

  double pdf(double x) const { return pdf(std::span<const double>(&x, 1)); }

  double cdf(double x) const {
    if (dim_ != 1) throw std::invalid_argument("cdf: only available in dimension 1");
    switch (family_) {
      case Family::Uniform:
        return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
      case Family::Exponential:
        return x <= 0.0 ? 0.0 : 1.0 - std::exp(-a_ * x);
      case Family::Pareto:
        return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -a_);
      case Family::Gaussian:
        return 0.5 * std::erfc(-(x - a_) / (b_ * std::sqrt(2.0)));
    }
    return 0.0;
  }

  // Exact probability of the closed Euclidean ball B(x, r). Only supported
  // in dimension 1, where it is a CDF difference.
  double ball_mass(double x, double r) const {
    if (dim_ != 1)
      throw std::invalid_argument("ball_mass: unsupported for dimension > 1");
    if (!(r > 0.0)) throw std::invalid_argument("ball_mass: r must be > 0");
    // cdf already clips below the support, so this is exact for every family.
    return cdf(x + r) - cdf(x - r);
  }

  // Known sup-norm bound of the density.
  double sup_density() const {
    switch (family_) {
      case Family::Uniform: return std::pow(b_ - a_, -static_cast<double>(dim_));
      case Family::Exponential: return a_;
      case Family::Pareto: return a_;
      case Family::Gaussian: return 1.0 / (b_ * std::sqrt(2.0 * std::numbers::pi));
    }
    return 0.0;
  }

  // Documented ball-mass comparison constants for the families that admit
  // them; Gaussian has none (it is the stock negative example).
  std::optional<MassPropertyConstants> reference_mass_constants() const {
    switch (family_) {
      case Family::Uniform:
        return MassPropertyConstants{1.0, b_ - a_, 2.0, b_ - a_};
      case Family::Exponential:
        return MassPropertyConstants{std::exp(-a_), 1.0, 2.0 * std::sinh(a_) / a_, 1.0};
      case Family::Pareto:
        return MassPropertyConstants{2.0, 0.5, std::pow(1.5, a_ + 1.0), 0.5};
      case Family::Gaussian:
        return std::nullopt;
    }
    return std::nullopt;
  }

  // i.i.d. draws; deterministic given the stream state.
  PointCloud sample(std::size_t count, Rng& rng) const {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    std::vector<double> data;
    data.reserve(count * dim_);
    for (std::size_t i = 0; i < count; ++i) {
      switch (family_) {
        case Family::Uniform:
          for (std::size_t j = 0; j < dim_; ++j) data.push_back(rng.uniform(a_, b_));
          break;
        case Family::Exponential:
          data.push_back(rng.exponential(a_));
          break;
        case Family::Pareto:
          data.push_back(rng.pareto(a_));
          break;
        case Family::Gaussian:
          data.push_back(rng.gaussian(a_, b_));
          break;
      }
    }
    return PointCloud(std::move(data), dim_);
  }

  bool same_family_and_dim(const DistributionSpec& other) const {
    return family_ == other.family_ && dim_ == other.dim_;
  }

  std::string describe() const {
    switch (family_) {
      case Family::Uniform:
        return "uniform(" + std::to_string(a_) + "," + std::to_string(b_) + ")^" + std::to_string(dim_);
      case Family::Exponential: return "exponential(" + std::to_string(a_) + ")";
      case Family::Pareto: return "pareto(" + std::to_string(a_) + ")";
      case Family::Gaussian: return "gaussian(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
    }
    return "?";
  }

private:
  Family family_ = Family::Uniform;
  double a_ = 0.0;  // uniform lower / lambda / alpha / mu
  double b_ = 1.0;  // uniform upper / sigma
  std::size_t dim_ = 1;
};

// Supremum of admissible tail-ratio exponents for the supported analytic
// pairs: lambda_target / lambda_source for exponentials,
// alpha_target / (alpha_source + 1) for Paretos, +inf for identical uniform
// supports. Other pairs have no closed form here.
inline double dre_threshold(const DistributionSpec& source, const DistributionSpec& target) {
  if (source.family() == Family::Exponential && target.family() == Family::Exponential)
    return target.lambda() / source.lambda();
  if (source.family() == Family::Pareto && target.family() == Family::Pareto)
    return target.alpha() / (source.alpha() + 1.0);
  if (source.family() == Family::Uniform && target.family() == Family::Uniform &&
      source.dim() == target.dim() && source.uniform_a() == target.uniform_a() &&
      source.uniform_b() == target.uniform_b())
    return std::numeric_limits<double>::infinity();
  throw std::invalid_argument("dre_threshold: unsupported family pair " + source.describe() +
                              " -> " + target.describe());
}

}  // namespace lknn
