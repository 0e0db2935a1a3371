#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfqprice/error.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/model.hpp"

namespace rfqprice {

/// Drift and volatility of the reference price: dS = kappa (lambda_a - lambda_b) dt + sigma dW.
struct PriceDynamicsParams {
  double kappa = 0.0;
  double kappa_stdev = 0.0;
  double sigma = 0.0;
};

/// Timestamped mid-prices (times ascending, in days).
struct PriceSeries {
  std::vector<double> time;
  std::vector<double> mid;

  std::size_t size() const { return time.size(); }
};

inline void validate(const PriceSeries& s) {
  if (s.time.size() != s.mid.size()) throw StructuralError("price series: time and mid lengths differ");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.time[i]) || !std::isfinite(s.mid[i]))
      throw InputError("price series: non-finite value at row " + std::to_string(i));
    if (i > 0 && s.time[i] < s.time[i - 1])
      throw InputError("price series: times must be non-decreasing (row " + std::to_string(i) + ")");
  }
}

/// Last observation carried forward onto a grid. Grid points before the first
/// observation take the first value.
inline std::vector<double> resample(const PriceSeries& s, const std::vector<double>& grid) {
  validate(s);
  if (s.size() == 0) throw InputError("resample: empty price series");
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) {
    const auto it = std::upper_bound(s.time.begin(), s.time.end(), t);
    const std::size_t i = it == s.time.begin() ? 0 : static_cast<std::size_t>(it - s.time.begin()) - 1;
    out.push_back(s.mid[i]);
  }
  return out;
}

/// Regular grid t0, t0 + step, ... up to t1 (inclusive within rounding).
inline std::vector<double> regular_grid(double t0, double t1, double step) {
  if (!(step > 0.0)) throw DomainError("regular_grid: step must be positive");
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((t1 - t0) / step + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(t0 + step * static_cast<double>(i));
  return g;
}

/// Realised volatility sqrt(sum dS^2 / sum dt), in $ per sqrt(day).
inline double estimate_sigma(const PriceSeries& s) {
  validate(s);
  if (s.size() < 2) throw InputError("estimate_sigma: at least two observations are required");
  double sq = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) sq += (s.mid[i] - s.mid[i - 1]) * (s.mid[i] - s.mid[i - 1]);
  const double span = s.time.back() - s.time.front();
  if (!(span > 0.0)) throw InputError("estimate_sigma: zero time span");
  return std::sqrt(sq / span);
}

/// Least squares without intercept of the price moves S_i - S_{i-1} on
/// pi_{i-1}' v, where v holds the expected drift accumulated over one
/// sampling step from each state. Returns kappa and its standard error.
inline PriceDynamicsParams estimate_kappa(const std::vector<double>& prices,
                                          const std::vector<StateDistribution>& posteriors,
                                          const Vector& drift_values) {
  if (prices.size() != posteriors.size())
    throw StructuralError("estimate_kappa: prices and posteriors must be aligned");
  if (prices.size() < 11) throw InputError("estimate_kappa: at least 10 price moves are required");
  const std::size_t n = prices.size() - 1;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (posteriors[i].size() != drift_values.size())
      throw StructuralError("estimate_kappa: posterior and drift value sizes differ");
    x[i] = posteriors[i].probs.dot(drift_values);
    y[i] = prices[i + 1] - prices[i];
  }
  double sxx = 0.0, sxy = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    scale = std::max(scale, std::abs(x[i]));
  }
  // Cancellation leaves round-off of order 1e-16 |v| when the posterior is symmetric.
  if (!(scale > 1e-12 * drift_values.cwiseAbs().maxCoeff()))
    throw InputError("estimate_kappa: no imbalance variation in sample");
  PriceDynamicsParams out;
  out.kappa = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) rss += (y[i] - out.kappa * x[i]) * (y[i] - out.kappa * x[i]);
  out.kappa_stdev = std::sqrt(rss / static_cast<double>(n - 1) / sxx);
  return out;
}

}  // namespace rfqprice
