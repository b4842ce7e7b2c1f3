#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lknn/distributions.hpp"
#include "lknn/quadrature.hpp"

namespace lknn {

enum class Verdict { Satisfied, Violated, Inconclusive };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

// A violation always carries a reproducible witness: the grid point or
// exponent it was observed at, plus the measured and required values.
struct DiagnosticWitness {
  std::string quantity;  // "minimal_mass", "maximal_mass", "dre", "pseudo_moment"
  double x = std::numeric_limits<double>::quiet_NaN();
  double r = std::numeric_limits<double>::quiet_NaN();  // radius or exponent
  double measured = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
};

struct DiagnosticReport {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<DiagnosticWitness> witness;
  std::string detail;
};

// Checks mass >= a_minus * p(x) * r^d (all grid x, r <= r_minus) and
// mass <= a_plus * p(x) * r^d (grid x inside the support, r <= r_plus).
// Comparisons carry a 1e-9 relative slack so constants that are tight at
// some grid point do not flip on rounding. First violation wins.
inline DiagnosticReport check_mass_properties(const DistributionSpec& spec,
                                              const MassPropertyConstants& constants,
                                              const std::vector<double>& x_grid,
                                              const std::vector<double>& r_grid) {
  if (spec.dim() != 1)
    throw std::invalid_argument("check_mass_properties: only 1-d families supported");
  if (x_grid.empty() || r_grid.empty())
    throw std::invalid_argument("check_mass_properties: empty grid");
  for (double r : r_grid)
    if (!(r > 0.0)) throw std::invalid_argument("check_mass_properties: radii must be > 0");

  constexpr double slack = 1e-9;
  DiagnosticReport report;
  std::size_t checked = 0;
  for (double x : x_grid) {
    const double density = spec.pdf(x);
    for (double r : r_grid) {
      const double reference = density * r;  // p(x) * r^d with d = 1
      if (r <= constants.r_minus) {
        const double mass = spec.ball_mass(x, r);
        const double bound = constants.a_minus * reference;
        ++checked;
        if (mass < bound * (1.0 - slack)) {
          report.verdict = Verdict::Violated;
          report.witness = DiagnosticWitness{"minimal_mass", x, r, mass, bound};
          std::ostringstream os;
          os << "ball mass " << mass << " < " << bound << " = a_minus*p(x)*r at x=" << x
             << ", r=" << r;
          report.detail = os.str();
          return report;
        }
      }
      if (r <= constants.r_plus && density > 0.0) {
        const double mass = spec.ball_mass(x, r);
        const double bound = constants.a_plus * reference;
        ++checked;
        if (mass > bound * (1.0 + slack)) {
          report.verdict = Verdict::Violated;
          report.witness = DiagnosticWitness{"maximal_mass", x, r, mass, bound};
          std::ostringstream os;
          os << "ball mass " << mass << " > " << bound << " = a_plus*p(x)*r at x=" << x
             << ", r=" << r;
          report.detail = os.str();
          return report;
        }
      }
    }
  }
  if (checked == 0) throw std::invalid_argument("check_mass_properties: no radius within range");
  report.verdict = Verdict::Satisfied;
  report.detail = std::to_string(checked) + " grid comparisons held";
  return report;
}

namespace detail {

inline DiagnosticReport classify_integral(const ImproperIntegral& result, const char* quantity,
                                          double exponent) {
  DiagnosticReport report;
  switch (result.verdict) {
    case IntegralClass::Converged:
      report.verdict = Verdict::Satisfied;
      report.detail = "integral converged to " + std::to_string(result.value);
      break;
    case IntegralClass::Diverged:
      report.verdict = Verdict::Violated;
      report.witness = DiagnosticWitness{quantity, result.witness, exponent,
                                         std::numeric_limits<double>::infinity(),
                                         std::numeric_limits<double>::infinity()};
      report.detail = "integral diverges (" + result.note + ")";
      break;
    case IntegralClass::Inconclusive:
      report.verdict = Verdict::Inconclusive;
      report.detail = result.note;
      break;
  }
  return report;
}

}  // namespace detail

// Numeric test of integral q(x) / p(x)^gamma dx < inf over the target's
// support, by doubling truncations with growth-rate classification.
inline DiagnosticReport check_dre_numeric(const DistributionSpec& source,
                                          const DistributionSpec& target, double gamma,
                                          std::size_t segment_budget = 1200) {
  if (!(gamma > 0.0)) throw std::invalid_argument("check_dre_numeric: gamma must be > 0");
  if (source.dim() != 1 || target.dim() != 1)
    throw std::invalid_argument("check_dre_numeric: only 1-d families supported");
  auto integrand = [&](double x) {
    const double q = target.pdf(x);
    if (q == 0.0) return 0.0;
    return q / std::pow(source.pdf(x), gamma);
  };
  ImproperOptions opt;
  opt.max_segments = segment_budget;
  const auto result = integrate_improper(integrand, target.support_left(),
                                         target.support_right(), opt);
  return detail::classify_integral(result, "dre", gamma);
}

// Numeric test of integral q(x)^(d/(rho+d)) dx < inf, same protocol.
inline DiagnosticReport check_pseudo_moment(const DistributionSpec& target, double rho,
                                            std::size_t segment_budget = 1200) {
  if (!(rho > 0.0)) throw std::invalid_argument("check_pseudo_moment: rho must be > 0");
  const double d = static_cast<double>(target.dim());
  const double exponent = d / (rho + d);
  if (target.family() == Family::Uniform) {
    // Constant density on a bounded cube: the integral is closed-form finite.
    DiagnosticReport report;
    report.verdict = Verdict::Satisfied;
    const double side = target.uniform_b() - target.uniform_a();
    const double value = std::pow(side, d) * std::pow(target.sup_density(), exponent);
    report.detail = "integral converged to " + std::to_string(value);
    return report;
  }
  auto integrand = [&](double x) { return std::pow(target.pdf(x), exponent); };
  ImproperOptions opt;
  opt.max_segments = segment_budget;
  const auto result = integrate_improper(integrand, target.support_left(),
                                         target.support_right(), opt);
  return detail::classify_integral(result, "pseudo_moment", rho);
}

enum class TailFunctional { SourceRatio, TargetPower };

// SourceRatio: integral of q / p^t. TargetPower: integral of q^(1 - t).
// Returns +inf when the integral diverges.
inline double tail_functional(const DistributionSpec& source, const DistributionSpec& target,
                              double t, TailFunctional which, std::size_t segment_budget = 1200) {
  if (!(t > 0.0)) throw std::invalid_argument("tail_functional: t must be > 0");
  if (source.dim() != 1 || target.dim() != 1)
    throw std::invalid_argument("tail_functional: only 1-d families supported");
  std::function<double(double)> integrand;
  if (which == TailFunctional::SourceRatio) {
    integrand = [&source, &target, t](double x) {
      const double q = target.pdf(x);
      if (q == 0.0) return 0.0;
      return q / std::pow(source.pdf(x), t);
    };
  } else {
    integrand = [&target, t](double x) {
      const double q = target.pdf(x);
      if (q == 0.0) return 0.0;
      return std::pow(q, 1.0 - t);
    };
  }
  ImproperOptions opt;
  opt.max_segments = segment_budget;
  const auto result = integrate_improper(integrand, target.support_left(),
                                         target.support_right(), opt);
  if (result.verdict == IntegralClass::Diverged) return std::numeric_limits<double>::infinity();
  if (result.verdict == IntegralClass::Inconclusive)
    throw std::runtime_error("tail_functional: segment budget exhausted");
  return result.value;
}

}  // namespace lknn
