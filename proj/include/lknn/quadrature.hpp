#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace lknn {

// Gauss-Kronrod 7-15 pair on [a, b]; err is the usual |G7 - K15| scaled
// estimate.
inline double gauss_kronrod_15(const std::function<double(double)>& f, double a, double b,
                               double& err) {
  static const double nodes[8] = {
      0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
      0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
  static const double wk[8] = {
      0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
      0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
  static const double wg[4] = {
      0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870};

  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double k15 = wk[0] * f0;
  double g7 = wg[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * nodes[i];
    const double fsum = f(mid + dx) + f(mid - dx);
    k15 += wk[i] * fsum;
    if (i % 2 == 0) g7 += wg[i / 2] * fsum;
  }
  k15 *= half;
  g7 *= half;
  err = std::pow(200.0 * std::abs(k15 - g7), 1.5);
  return k15;
}

// Adaptive bisection on a finite interval. Returns NaN if any node evaluates
// to a non-finite value.
inline double integrate_interval(const std::function<double(double)>& f, double a, double b,
                                 double rel_tol = 1e-10, double abs_tol = 1e-300,
                                 int max_depth = 40) {
  struct Segment {
    double a, b;
    int depth;
  };
  std::vector<Segment> stack{{a, b, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    double err = 0.0;
    const double value = gauss_kronrod_15(f, seg.a, seg.b, err);
    if (!std::isfinite(value)) return std::numeric_limits<double>::quiet_NaN();
    if (err <= rel_tol * std::abs(value) || err <= abs_tol || seg.depth >= max_depth) {
      total += value;
      continue;
    }
    const double mid = 0.5 * (seg.a + seg.b);
    stack.push_back({seg.a, mid, seg.depth + 1});
    stack.push_back({mid, seg.b, seg.depth + 1});
  }
  return total;
}

enum class IntegralClass { Converged, Diverged, Inconclusive };

struct ImproperIntegral {
  IntegralClass verdict = IntegralClass::Inconclusive;
  double value = std::numeric_limits<double>::quiet_NaN();
  // Where divergence was observed (last segment start), if any.
  double witness = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct ImproperOptions {
  double tail_rel_tol = 1e-8;   // stop once the estimated remainder is this small
  double growth_tol = 0.98;    // segment ratios at or above this mean divergence
  std::size_t max_segments = 1200;
  double interval_rel_tol = 1e-11;
};

namespace detail {

// Integrates f over doubling segments [s, 2s), [2s, 4s), ... away from
// `origin` in direction `sign`, classifying the tail by the growth rate of
// successive contributions. A geometric remainder estimate is folded into
// the value once the ratios settle below 1.
inline ImproperIntegral integrate_tail(const std::function<double(double)>& f, double origin,
                                       double sign, const ImproperOptions& opt,
                                       double core_scale) {
  ImproperIntegral out;
  double s = 1.0;
  double total = 0.0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int hot_streak = 0;
  std::vector<double> ratios;
  for (std::size_t j = 0; j < opt.max_segments; ++j) {
    const double lo = origin + sign * s;
    const double hi = origin + sign * 2.0 * s;
    const double piece = sign > 0 ? integrate_interval(f, lo, hi, opt.interval_rel_tol)
                                  : integrate_interval(f, hi, lo, opt.interval_rel_tol);
    if (!std::isfinite(piece)) {
      out.verdict = IntegralClass::Diverged;
      out.witness = lo;
      out.note = "non-finite integrand";
      return out;
    }
    total += piece;
    const double scale = std::max({std::abs(total), core_scale, 1e-300});
    if (std::isfinite(prev) && prev > 0.0 && piece > 0.0) {
      const double ratio = piece / prev;
      ratios.push_back(ratio);
      if (ratio >= opt.growth_tol && piece > 1e-14 * scale) {
        if (++hot_streak >= 3) {
          out.verdict = IntegralClass::Diverged;
          out.witness = lo;
          out.note = "segment contributions not decaying (ratio " + std::to_string(ratio) + ")";
          return out;
        }
      } else {
        hot_streak = 0;
      }
      if (ratio < 1.0) {
        // Geometric extrapolation of the remaining tail.
        const double remainder = piece * ratio / (1.0 - ratio);
        if (remainder <= opt.tail_rel_tol * scale) {
          out.verdict = IntegralClass::Converged;
          out.value = total + remainder;
          return out;
        }
      }
    } else if (piece <= opt.tail_rel_tol * scale && j >= 2) {
      // Dead tail (zero or underflow) twice in a row is enough.
      out.verdict = IntegralClass::Converged;
      out.value = total;
      return out;
    }
    prev = piece;
    s *= 2.0;
  }
  out.verdict = IntegralClass::Inconclusive;
  out.value = total;
  out.note = "segment budget exhausted";
  return out;
}

}  // namespace detail

// Improper integral of f over (lo, hi), either endpoint possibly infinite.
// The finite core is handled by adaptive quadrature; infinite tails by
// doubling truncations with Cauchy/growth classification.
inline ImproperIntegral integrate_improper(const std::function<double(double)>& f, double lo,
                                           double hi, const ImproperOptions& opt = {}) {
  ImproperIntegral out;
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  const double core_lo = lo_inf ? std::min(hi_inf ? 0.0 : hi, 0.0) - 1.0 : lo;
  const double core_hi = hi_inf ? std::max(core_lo + 1.0, lo_inf ? 1.0 : lo + 1.0) : hi;

  const double core = integrate_interval(f, core_lo, core_hi, opt.interval_rel_tol);
  if (!std::isfinite(core)) {
    out.verdict = IntegralClass::Diverged;
    out.witness = core_lo;
    out.note = "non-finite integrand in core interval";
    return out;
  }
  double total = core;
  const double scale = std::max(std::abs(core), 1e-12);

  if (hi_inf) {
    const auto tail = detail::integrate_tail(f, core_hi - 1.0, +1.0, opt, scale);
    if (tail.verdict != IntegralClass::Converged) {
      out = tail;
      return out;
    }
    total += tail.value;
  }
  if (lo_inf) {
    const auto tail = detail::integrate_tail(f, core_lo + 1.0, -1.0, opt, scale);
    if (tail.verdict != IntegralClass::Converged) {
      out = tail;
      return out;
    }
    total += tail.value;
  }
  out.verdict = IntegralClass::Converged;
  out.value = total;
  return out;
}

}  // namespace lknn
