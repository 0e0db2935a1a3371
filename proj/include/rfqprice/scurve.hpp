#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "rfqprice/error.hpp"
#include "rfqprice/linalg.hpp"

namespace rfqprice {

/// Logistic fill probability f(delta) = 1 / (1 + exp(alpha + beta * delta / delta0)),
/// delta being the quoted margin in $ and delta0 the reference (composite) spread.
struct SCurve {
  double alpha = 0.0;
  double beta = 1.0;
  double delta0 = 1.0;

  double operator()(double delta) const { return 1.0 / (1.0 + std::exp(alpha + beta * delta / delta0)); }
};

inline void validate(const SCurve& s) {
  if (!std::isfinite(s.alpha) || !std::isfinite(s.beta) || !(s.beta > 0.0))
    throw InputError("scurve: beta must be positive and finite");
  if (!(s.delta0 > 0.0) || !std::isfinite(s.delta0)) throw InputError("scurve: delta0 must be positive");
}

struct SCurveFit {
  SCurve curve;
  double alpha_stderr = 0.0;
  double beta_stderr = 0.0;
  int iterations = 0;
};

/// One quote: margin in units of delta0 and whether the client traded.
struct QuoteOutcome {
  double margin = 0.0;
  bool filled = false;
};

/// Maximum-likelihood logistic regression of fills on normalised margins by
/// damped Newton steps. Perfectly separated samples are refused unless
/// `regularize` adds an L2 penalty of 1e-4 on both coefficients.
inline SCurveFit fit_scurve(const std::vector<QuoteOutcome>& quotes, bool regularize = false) {
  constexpr double kPenalty = 1e-4;
  if (quotes.empty()) throw InputError("fit_scurve: no quotes");
  double fill_max = -INFINITY, fill_min = INFINITY, miss_max = -INFINITY, miss_min = INFINITY;
  std::size_t fills = 0;
  for (const auto& q : quotes) {
    if (!std::isfinite(q.margin)) throw InputError("fit_scurve: non-finite margin");
    if (q.filled) {
      ++fills;
      fill_max = std::max(fill_max, q.margin);
      fill_min = std::min(fill_min, q.margin);
    } else {
      miss_max = std::max(miss_max, q.margin);
      miss_min = std::min(miss_min, q.margin);
    }
  }
  if (fills == 0 || fills == quotes.size())
    throw InputError("fit_scurve: both filled and unfilled quotes are required");
  if (std::min(fill_min, miss_min) == std::max(fill_max, miss_max))
    throw InputError("fit_scurve: all margins are equal, the slope is not identified");
  const bool separated = fill_max <= miss_min || miss_max <= fill_min;
  if (separated && !regularize)
    throw InputError("fit_scurve: fills are perfectly separated by the margin; enable regularization");
  const double lambda = regularize ? kPenalty : 0.0;

  // Fill probability is 1 - sigmoid(a + b x); the log-likelihood is concave in (a, b).
  auto objective = [&](double a, double b) {
    double ll = 0.0;
    for (const auto& q : quotes) {
      const double eta = a + b * q.margin;
      // log f = -log(1 + e^eta), log (1 - f) = eta - log(1 + e^eta)
      const double softplus = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
      ll += q.filled ? -softplus : eta - softplus;
    }
    return ll - 0.5 * lambda * (a * a + b * b);
  };

  double a = 0.0, b = 0.0;
  double current = objective(a, b);
  Eigen::Matrix2d info;
  SCurveFit fit;
  for (int it = 1; it <= 100; ++it) {
    Eigen::Vector2d grad(-lambda * a, -lambda * b);
    info << lambda, 0.0, 0.0, lambda;
    for (const auto& q : quotes) {
      const double eta = a + b * q.margin;
      const double miss = 1.0 / (1.0 + std::exp(-eta));  // 1 - f
      const double r = (q.filled ? 0.0 : 1.0) - miss;
      grad[0] += r;
      grad[1] += r * q.margin;
      const double w = miss * (1.0 - miss);
      info(0, 0) += w;
      info(0, 1) += w * q.margin;
      info(1, 1) += w * q.margin * q.margin;
    }
    info(1, 0) = info(0, 1);
    const Eigen::Vector2d step = info.ldlt().solve(grad);
    double t = 1.0;
    double next = objective(a + step[0], b + step[1]);
    while (next < current && t > 1e-10) {
      t *= 0.5;
      next = objective(a + t * step[0], b + t * step[1]);
    }
    a += t * step[0];
    b += t * step[1];
    const double gain = next - current;
    current = next;
    fit.iterations = it;
    if (!std::isfinite(a) || !std::isfinite(b)) throw NumericalError("fit_scurve: divergence", it);
    if (step.cwiseAbs().maxCoeff() * t < 1e-12 || (gain >= 0 && gain < 1e-13 * std::abs(current))) break;
  }
  if (!(b > 0.0)) throw InputError("fit_scurve: fitted fill probability does not decrease with the margin");
  const Eigen::Matrix2d cov = info.inverse();
  fit.curve = SCurve{a, b, 1.0};
  fit.alpha_stderr = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.beta_stderr = std::sqrt(std::max(cov(1, 1), 0.0));
  return fit;
}

}  // namespace rfqprice
