#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rfqprice/dynamics.hpp"
#include "rfqprice/error.hpp"
#include "rfqprice/hamiltonian.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/mmpp.hpp"
#include "rfqprice/model.hpp"
#include "rfqprice/scurve.hpp"

namespace rfqprice {

/// Theoretical market maker: risk aversion gamma ($^-1), trade size z, risk
/// limit q_bar (a multiple of z), horizon and time step in days.
struct MarketMakerConfig {
  double gamma = 0.0;
  double z = 1.0;
  double q_bar = 10.0;
  double horizon = 1.0;
  double time_step = 1e-3;
  PriceDynamicsParams dynamics;
  SCurve bid_curve;
  SCurve ask_curve;

  int levels() const { return static_cast<int>(std::lround(q_bar / z)); }
  /// gamma sigma^2 z: the only combination of gamma, sigma and z the quotes depend on.
  double risk_penalty() const { return gamma * dynamics.sigma * dynamics.sigma * z; }
};

/// gamma = 0 is accepted: it is the risk-neutral limit used in tests.
inline void validate(const MarketMakerConfig& c) {
  if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma)) throw InputError("market maker: gamma must be non-negative");
  if (!(c.z > 0.0) || !std::isfinite(c.z)) throw InputError("market maker: z must be positive");
  if (!(c.q_bar >= c.z) || !std::isfinite(c.q_bar)) throw InputError("market maker: q_bar must be at least z");
  if (std::abs(c.q_bar / c.z - std::round(c.q_bar / c.z)) > 1e-9 * (c.q_bar / c.z))
    throw InputError("market maker: q_bar must be an integer multiple of z");
  if (!(c.time_step > 0.0)) throw InputError("market maker: time_step must be positive");
  if (!(c.horizon >= 0.0) || !std::isfinite(c.horizon)) throw InputError("market maker: horizon must be non-negative");
  if (!std::isfinite(c.dynamics.kappa) || !(c.dynamics.sigma >= 0.0))
    throw InputError("market maker: kappa must be finite and sigma non-negative");
  validate(c.bid_curve);
  validate(c.ask_curve);
}

/// Value functions theta(t, q) per state, sampled at `times` (ascending).
/// theta[k](s, i) is the value at times[k], state s, inventory inventory[i].
struct ValueGrid {
  std::vector<double> times;
  std::vector<double> inventory;
  std::vector<Matrix> theta;
  double z = 1.0;
  double max_residual = 0.0;
};

/// Optimal zero-inventory quote margins per state, as (m_b x m_a) tables.
struct ZeroInventoryQuotes {
  Matrix bid;
  Matrix ask;

  Matrix skew() const { return ask - bid; }
  Matrix spread() const { return ask + bid; }
};

/// Backward semi-implicit scheme for the risk-limited HJB system, written for
/// phi = theta / z on the inventory lattice n = q / z:
///   phi_t + kappa d n - g n^2 / 2 + Q phi
///     + lambda_b 1{n < N} H_b(phi(n) - phi(n+1)) + lambda_a 1{n > -N} H_a(phi(n) - phi(n-1)) = 0,
/// with g = gamma sigma^2 z. Each step solves (I - dt Q) phi^k = phi^{k+1} + dt E(phi^{k+1}),
/// E holding the source and Hamiltonian terms.
class EulerHjbSolver {
 public:
  EulerHjbSolver(const MmppModel& model, const MarketMakerConfig& config)
      : model_(model), config_(config) {
    check_dimensions(model_);
    validate(model_);
    validate(config_);
    n_ = config_.levels();
    const int states = model_.n_states();
    lambda_b_ = side_rates(model_, Side::bid);
    lambda_a_ = side_rates(model_, Side::ask);
    drift_ = imbalance(model_);
    const double dt = config_.time_step;
    const double fastest = (lambda_b_ + lambda_a_).maxCoeff();
    // The explicit Hamiltonian update is monotone when dt (lambda_b + lambda_a) <= 1 (|H'| < 1).
    if (dt * fastest > 1.0)
      throw DomainError("hjb: time_step " + std::to_string(dt) + " is unstable for intensities up to " +
                        std::to_string(fastest) + "/day; use a step below " + std::to_string(1.0 / fastest));
    implicit_ = Matrix::Identity(states, states) - dt * model_.Q;
    lu_.compute(implicit_);
    phi_ = Matrix::Zero(states, 2 * n_ + 1);
    guess_b_ = Matrix::Constant(states, 2 * n_ + 1, NAN);
    guess_a_ = Matrix::Constant(states, 2 * n_ + 1, NAN);
  }

  /// Time to maturity reached so far.
  double elapsed() const { return static_cast<double>(steps_) * config_.time_step; }
  long steps() const { return steps_; }
  int levels() const { return n_; }

  /// phi = theta / z, rows are states, column i is inventory (i - N) z.
  const Matrix& phi() const { return phi_; }
  Matrix theta() const { return config_.z * phi_; }

  /// Largest residual of the discrete equation seen so far, in $ (per unit of z).
  double max_residual() const { return max_residual_; }
  void set_residual_check(bool on) { check_residual_ = on; }

  /// Explicit part E(phi): source and Hamiltonian terms.
  Matrix explicit_terms(const Matrix& phi, bool update_guesses = false) {
    const double g = config_.risk_penalty();
    const double kappa = config_.dynamics.kappa;
    Matrix e(phi.rows(), phi.cols());
    for (int i = 0; i <= 2 * n_; ++i) {
      const double n = static_cast<double>(i - n_);
      for (int s = 0; s < phi.rows(); ++s) {
        double v = kappa * drift_[s] * n - 0.5 * g * n * n;
        if (i < 2 * n_) {
          const HamiltonianValue h = hamiltonian(config_.bid_curve, phi(s, i) - phi(s, i + 1), guess_b_(s, i));
          if (update_guesses) guess_b_(s, i) = h.x;
          v += lambda_b_[s] * h.H;
        }
        if (i > 0) {
          const HamiltonianValue h = hamiltonian(config_.ask_curve, phi(s, i) - phi(s, i - 1), guess_a_(s, i));
          if (update_guesses) guess_a_(s, i) = h.x;
          v += lambda_a_[s] * h.H;
        }
        e(s, i) = v;
      }
    }
    return e;
  }

  /// One backward step of length time_step.
  void step() {
    const double dt = config_.time_step;
    const Matrix rhs = phi_ + dt * explicit_terms(phi_, true);
    Matrix next = lu_.solve(rhs);
    if (!next.allFinite())
      throw NumericalError("hjb: non-finite value function; reduce time_step", static_cast<int>(steps_ + 1));
    if (check_residual_) {
      // (phi^k - phi^{k+1}) / dt - Q phi^k - E(phi^{k+1}) = 0
      const Matrix r = (next - phi_) / dt - model_.Q * next - (rhs - phi_) / dt;
      max_residual_ = std::max(max_residual_, r.cwiseAbs().maxCoeff());
    }
    phi_ = std::move(next);
    ++steps_;
  }

  void advance_steps(long count) {
    for (long k = 0; k < count; ++k) step();
  }

  /// Advances until the time to maturity reaches `target` (rounded to the grid).
  void advance_to(double target) {
    const long goal = std::lround(target / config_.time_step);
    advance_steps(goal - steps_);
  }

  /// Optimal zero-inventory margins for the current slice.
  ZeroInventoryQuotes zero_inventory_quotes() const {
    ZeroInventoryQuotes out;
    out.bid = Matrix(model_.m_b, model_.m_a);
    out.ask = Matrix(model_.m_b, model_.m_a);
    for (int s = 0; s < model_.n_states(); ++s) {
      const double pb = phi_(s, n_) - phi_(s, n_ + 1);
      const double pa = phi_(s, n_) - phi_(s, n_ - 1);
      out.bid(model_.bid_level(s), model_.ask_level(s)) = hamiltonian(config_.bid_curve, pb).delta_star;
      out.ask(model_.bid_level(s), model_.ask_level(s)) = hamiltonian(config_.ask_curve, pa).delta_star;
    }
    return out;
  }

 private:
  MmppModel model_;
  MarketMakerConfig config_;
  int n_ = 0;
  Vector lambda_b_, lambda_a_, drift_;
  Matrix implicit_;
  Eigen::PartialPivLU<Matrix> lu_;
  Matrix phi_;
  Matrix guess_b_, guess_a_;
  long steps_ = 0;
  bool check_residual_ = true;
  double max_residual_ = 0.0;
};

/// Solves over [0, horizon], keeping every `store_every`-th slice (t = 0 and
/// t = horizon are always kept).
inline ValueGrid hjb_solve_euler(const MmppModel& model, const MarketMakerConfig& config, int store_every = 1) {
  if (store_every < 1) throw DomainError("hjb_solve_euler: store_every must be positive");
  EulerHjbSolver solver(model, config);
  const long total = std::lround(config.horizon / config.time_step);
  ValueGrid grid;
  grid.z = config.z;
  for (int i = -solver.levels(); i <= solver.levels(); ++i) grid.inventory.push_back(i * config.z);
  grid.times.push_back(static_cast<double>(total) * config.time_step);
  grid.theta.push_back(solver.theta());
  for (long k = 1; k <= total; ++k) {
    solver.step();
    if (k % store_every == 0 || k == total) {
      grid.times.push_back(static_cast<double>(total - k) * config.time_step);
      grid.theta.push_back(solver.theta());
    }
  }
  std::reverse(grid.times.begin(), grid.times.end());
  std::reverse(grid.theta.begin(), grid.theta.end());
  grid.max_residual = solver.max_residual();
  return grid;
}

/// Zero-inventory margins from the t = 0 slice of a stored grid.
inline ZeroInventoryQuotes zero_inventory_quotes(const ValueGrid& grid, const MmppModel& model,
                                                 const MarketMakerConfig& config) {
  if (grid.theta.empty()) throw StructuralError("zero_inventory_quotes: empty value grid");
  const Matrix& theta = grid.theta.front();
  const int n = static_cast<int>(grid.inventory.size()) / 2;
  if (theta.rows() != model.n_states() || n < 1) throw StructuralError("zero_inventory_quotes: grid does not match model");
  ZeroInventoryQuotes out;
  out.bid = Matrix(model.m_b, model.m_a);
  out.ask = Matrix(model.m_b, model.m_a);
  for (int s = 0; s < model.n_states(); ++s) {
    const double pb = (theta(s, n) - theta(s, n + 1)) / grid.z;
    const double pa = (theta(s, n) - theta(s, n - 1)) / grid.z;
    out.bid(model.bid_level(s), model.ask_level(s)) = hamiltonian(config.bid_curve, pb).delta_star;
    out.ask(model.bid_level(s), model.ask_level(s)) = hamiltonian(config.ask_curve, pa).delta_star;
  }
  return out;
}

}  // namespace rfqprice
