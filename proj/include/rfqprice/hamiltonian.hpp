#pragma once

#include <cmath>

#include "rfqprice/error.hpp"
#include "rfqprice/scurve.hpp"

namespace rfqprice {

/// H(p) = sup_delta f(delta) (delta - p), with its derivatives and maximiser.
struct HamiltonianValue {
  double H = 0.0;
  double H_prime = 0.0;
  double H_second = 0.0;
  double delta_star = 0.0;
  double x = 0.0;  // alpha + beta delta* / delta0, reusable as a starting point
};

namespace detail {

inline double logistic(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

}  // namespace detail

/// With x = alpha + beta delta / delta0 and c = alpha + beta p / delta0, the
/// first-order condition f'(delta)(delta - p) + f(delta) = 0 of the logistic
/// curve reads g(x) = x - c - 1 - exp(-x) = 0. g is increasing and concave with
/// g(c + 1) < 0 <= g(c + 1 + exp(-c - 1)), so Newton steps are kept inside that
/// bracket, with bisection as a fallback. `guess` (an earlier x) speeds up
/// repeated calls with nearby p.
inline HamiltonianValue hamiltonian(const SCurve& s, double p, double guess = NAN) {
  const double scale = s.delta0 / s.beta;
  const double c = s.alpha + p / scale;
  if (!std::isfinite(c)) throw DomainError("hamiltonian: non-finite argument");
  // Below this the optimal fill rate's complement exp(-x) leaves double range.
  if (c < -700.0) throw DomainError("hamiltonian: argument too negative for the fill curve");
  double lo = c + 1.0;
  double hi = c + 1.0 + std::exp(-(c + 1.0));
  double x = (std::isfinite(guess) && guess > lo && guess < hi) ? guess : hi;
  bool done = false;
  for (int it = 0; it < 100 && !done; ++it) {
    const double e = std::exp(-x);
    const double g = x - c - 1.0 - e;
    if (g == 0.0) break;
    if (g < 0.0) lo = x; else hi = x;
    double next = x - g / (1.0 + e);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    // Quadratic convergence: once the step is this small the new iterate is exact.
    done = std::abs(next - x) <= 1e-12 * std::max(1.0, std::abs(x));
    x = next;
  }
  auto g = [c](double v) { return v - c - 1.0 - std::exp(-v); };
  if (!done && g(x) != 0.0) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    x = 0.5 * (lo + hi);
    if (!(std::abs(g(x)) < 1e-10 * std::max(1.0, std::abs(x)))) throw NumericalError("hamiltonian: optimal margin did not converge");
  }

  const double sig = detail::logistic(x);  // 1 - f(delta*)
  const double fill = 1.0 - sig;
  HamiltonianValue out;
  out.x = x;
  out.delta_star = scale * (x - s.alpha);
  out.H = scale * std::exp(-x);
  out.H_prime = -fill;
  out.H_second = fill * sig * sig / scale;
  if (!std::isfinite(out.H)) throw NumericalError("hamiltonian: value overflowed");
  return out;
}

/// Optimal quoted margin delta_bar(p) = f^{-1}(-H'(p)) = delta*(p).
inline double optimal_margin(const SCurve& s, double p) { return hamiltonian(s, p).delta_star; }

/// Second-order Taylor coefficients of H at p = 0.
struct QuadAlphas {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

inline QuadAlphas quad_coeffs(const SCurve& s) {
  validate(s);
  const HamiltonianValue h = hamiltonian(s, 0.0);
  return {h.H, h.H_prime, h.H_second};
}

}  // namespace rfqprice
