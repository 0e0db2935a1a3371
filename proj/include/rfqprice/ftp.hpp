#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rfqprice/error.hpp"
#include "rfqprice/hjb.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/mmpp.hpp"
#include "rfqprice/model.hpp"
#include "rfqprice/riccati.hpp"

namespace rfqprice {

enum class SolverMethod { euler, quad };

inline const char* to_string(SolverMethod m) { return m == SolverMethod::euler ? "euler" : "quad"; }

/// Ergodic ask margin minus bid margin at zero inventory, per (j_b, j_a), in $.
struct SkewTable {
  Matrix skew;
};

/// Long-horizon zero-inventory quotes and the horizon at which they settled.
struct ErgodicQuotes {
  ZeroInventoryQuotes quotes;
  double horizon = 0.0;

  SkewTable skew() const { return {quotes.skew()}; }
};

struct ErgodicOptions {
  double initial_horizon = 0.5;
  double max_horizon = 100.0;
  double tolerance = 1e-6;  // on skew and spread, in $, between doubled horizons
};

/// Continues one backward solve through horizons T0 2^(k/2) and stops at the
/// first one whose zero-inventory skew and spread differ by less than the
/// tolerance from those at half that horizon.
inline ErgodicQuotes ergodic_quotes(const MmppModel& model, const MarketMakerConfig& config, SolverMethod method,
                                    const ErgodicOptions& options = {}) {
  bool reducible = false;
  stationary_distribution(model.Q, &reducible);
  if (reducible) throw InputError("ergodic_quotes: Q must be irreducible");
  auto run = [&](auto& solver) {
    std::vector<ZeroInventoryQuotes> history;
    for (int k = 0;; ++k) {
      const double horizon = options.initial_horizon * std::pow(2.0, 0.5 * k);
      if (horizon > options.max_horizon * (1.0 + 1e-12))
        throw NumericalError("ergodic_quotes: quotes not stationary after " + std::to_string(options.max_horizon) +
                             " days");
      solver.advance_to(horizon);
      history.push_back(solver.zero_inventory_quotes());
      if (k < 2) continue;
      const ZeroInventoryQuotes& half = history[static_cast<std::size_t>(k - 2)];
      const ZeroInventoryQuotes& current = history.back();
      const double change = std::max((current.skew() - half.skew()).cwiseAbs().maxCoeff(),
                                     (current.spread() - half.spread()).cwiseAbs().maxCoeff());
      if (change < options.tolerance) return ErgodicQuotes{current, horizon};
    }
  };
  if (method == SolverMethod::euler) {
    EulerHjbSolver solver(model, config);
    solver.set_residual_check(false);
    return run(solver);
  }
  RiccatiSolver solver(model, config);
  return run(solver);
}

inline SkewTable ergodic_skew(const MmppModel& model, const MarketMakerConfig& config, SolverMethod method,
                              const ErgodicOptions& options = {}) {
  return ergodic_quotes(model, config, method, options).skew();
}

/// Skew from the t = 0 slice of an existing solution, without the horizon test.
inline SkewTable ergodic_skew(const ValueGrid& grid, const MmppModel& model, const MarketMakerConfig& config) {
  return {zero_inventory_quotes(grid, model, config).skew()};
}

inline SkewTable ergodic_skew(const QuadCoeffs& coeffs, const MmppModel& model, const MarketMakerConfig& config) {
  return {zero_inventory_quotes(coeffs, model, config).skew()};
}

/// State weights for the calibration target.
enum class SpreadWeighting {
  symmetric_stationary,  // stationary distribution restricted to states j_b = j_a
  stationary,            // stationary distribution over all states
};

/// Weights in lexicographic state order, summing to one. Symmetric weighting
/// falls back to all states for models without symmetric states.
inline Vector spread_weights(const MmppModel& model, SpreadWeighting weighting) {
  const Vector pi = stationary_distribution(model).probs;
  if (weighting == SpreadWeighting::stationary) return pi;
  Vector w = Vector::Zero(pi.size());
  for (int s = 0; s < model.n_states(); ++s)
    if (model.bid_level(s) == model.ask_level(s)) w[s] = pi[s];
  if (!(w.sum() > 0.0)) return pi;
  return w / w.sum();
}

/// Weighted ergodic total spread delta_b + delta_a at zero inventory.
inline double average_spread(const ZeroInventoryQuotes& q, const MmppModel& model, const Vector& weights) {
  double total = 0.0;
  for (int s = 0; s < model.n_states(); ++s)
    total += weights[s] * (q.bid(model.bid_level(s), model.ask_level(s)) + q.ask(model.bid_level(s), model.ask_level(s)));
  return total;
}

struct GammaCalibration {
  double gamma = 0.0;
  double spread = 0.0;  // achieved weighted spread
  ErgodicQuotes quotes;
  int evaluations = 0;
};

struct CalibrationOptions {
  double log10_low = -12.0;
  double log10_high = -3.0;
  double spread_tolerance = 1e-5;  // $
  double typical_penalty = 1e-1;   // starting gamma sigma^2 z
  int max_evaluations = 60;
  SpreadWeighting weighting = SpreadWeighting::symmetric_stationary;
  ErgodicOptions ergodic;
};

/// Finds gamma such that the weighted ergodic zero-inventory spread equals the
/// target. The spread increases with gamma; the root is bracketed on log10 gamma
/// and refined by regula falsi with the Illinois modification.
inline GammaCalibration calibrate_gamma(const MmppModel& model, MarketMakerConfig config, double target_spread,
                                        SolverMethod method, const CalibrationOptions& options = {}) {
  if (!(target_spread > 0.0)) throw InputError("calibrate_gamma: target spread must be positive");
  const Vector weights = spread_weights(model, options.weighting);
  GammaCalibration best;
  auto evaluate = [&](double lg) {
    config.gamma = std::pow(10.0, lg);
    ErgodicQuotes q = ergodic_quotes(model, config, method, options.ergodic);
    const double spread = average_spread(q.quotes, model, weights);
    ++best.evaluations;
    if (best.evaluations == 1 || std::abs(spread - target_spread) < std::abs(best.spread - target_spread)) {
      best.gamma = config.gamma;
      best.spread = spread;
      best.quotes = std::move(q);
    }
    return spread - target_spread;
  };
  // Bracket outwards from a typical penalty gamma sigma^2 z ~ 0.1: near the
  // low end of the range the ergodic regime takes thousands of days to set in.
  const double scale = config.dynamics.sigma * config.dynamics.sigma * config.z;
  double start = scale > 0.0 ? std::log10(options.typical_penalty / scale) : 0.5 * (options.log10_low + options.log10_high);
  start = std::clamp(start, options.log10_low, options.log10_high);
  // Half-decade steps; a solve that is not stationary within the horizon cap
  // (small gamma relaxes slowly) is retried with a halved step.
  double a = start, b = start;
  double fa = evaluate(start), fb = fa;
  while (fa > 0.0 || fb < 0.0) {
    if ((fa > 0.0 && a <= options.log10_low) || (fb < 0.0 && b >= options.log10_high))
      throw InputError("calibrate_gamma: target spread " + std::to_string(target_spread) +
                       " is outside the achievable range; the spread at log10 gamma = " +
                       std::to_string(fa > 0.0 ? a : b) + " is " + std::to_string((fa > 0.0 ? fa : fb) + target_spread));
    const bool down = fa > 0.0;
    for (double width = 0.5;; width *= 0.5) {
      const double next = down ? std::max(options.log10_low, a - width) : std::min(options.log10_high, b + width);
      try {
        const double fn = evaluate(next);
        if (down) {
          b = a;
          fb = fa;
          a = next;
          fa = fn;
        } else {
          a = b;
          fa = fb;
          b = next;
          fb = fn;
        }
        break;
      } catch (const NumericalError&) {
        if (width < 0.01) throw;
      }
    }
  }
  int side = 0;
  while (std::abs(best.spread - target_spread) > options.spread_tolerance) {
    if (best.evaluations >= options.max_evaluations)
      throw NumericalError("calibrate_gamma: no convergence after " + std::to_string(best.evaluations) + " solves");
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = evaluate(c);
    if (fc == 0.0) break;
    if ((fc < 0.0) == (fa < 0.0)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  return best;
}

struct FtpEstimate {
  double mean = 0.0;
  double stdev = 0.0;
};

/// mid + skew / 2 averaged over the state distribution, with its dispersion.
inline FtpEstimate ftp(double mid, const SkewTable& table, const StateDistribution& pi) {
  const Vector s = table.skew.transpose().reshaped();
  validate(pi, static_cast<int>(s.size()));
  const double m1 = pi.probs.dot(s);
  const double m2 = pi.probs.dot(s.cwiseProduct(s));
  return {mid + 0.5 * m1, 0.5 * std::sqrt(std::max(m2 - m1 * m1, 0.0))};
}

}  // namespace rfqprice
