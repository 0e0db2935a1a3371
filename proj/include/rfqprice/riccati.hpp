#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "rfqprice/error.hpp"
#include "rfqprice/hamiltonian.hpp"
#include "rfqprice/hjb.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/model.hpp"

namespace rfqprice {

/// Coefficients of theta(t, q) ~ -q^2 A(t) - q B(t) - C(t), per state, at the
/// solver's accepted times (ascending). Column k of A, B, C is times[k].
struct QuadCoeffs {
  std::vector<double> times;
  Matrix A, B, C;
  QuadAlphas bid_alphas;
  QuadAlphas ask_alphas;
  double z = 1.0;

  int last() const { return static_cast<int>(times.size()) - 1; }
};

namespace detail {

/// Right-hand side in scaled variables a = z A, b = B, c = C / z, as
/// derivatives with respect to t (the system is integrated backward).
struct RiccatiRhs {
  Vector lb, la, drift;
  Matrix Q;
  QuadAlphas bid, ask;
  double g = 0.0;  // gamma sigma^2 z
  double kappa = 0.0;

  int n() const { return static_cast<int>(lb.size()); }

  Vector operator()(const Vector& y) const {
    const int k = n();
    const Vector a = y.segment(0, k), b = y.segment(k, k), c = y.segment(2 * k, k);
    const Vector s2 = lb * bid.a2 + la * ask.a2;  // lambda_b alpha^b_2 + lambda_a alpha^a_2
    const Vector d2 = lb * bid.a2 - la * ask.a2;
    const Vector s1 = lb * bid.a1 + la * ask.a1;
    const Vector d1 = lb * bid.a1 - la * ask.a1;
    const Vector s0 = lb * bid.a0 + la * ask.a0;
    Vector out(3 * k);
    out.segment(0, k) = 2.0 * s2.cwiseProduct(a.cwiseProduct(a)) - Vector::Constant(k, 0.5 * g) - Q * a;
    out.segment(k, k) = 2.0 * d1.cwiseProduct(a) + 2.0 * d2.cwiseProduct(a.cwiseProduct(a)) + kappa * drift +
                        2.0 * s2.cwiseProduct(a.cwiseProduct(b)) - Q * b;
    out.segment(2 * k, k) = s0 + s1.cwiseProduct(a) + d1.cwiseProduct(b) + 0.5 * s2.cwiseProduct(a.cwiseProduct(a)) +
                            0.5 * s2.cwiseProduct(b.cwiseProduct(b)) + d2.cwiseProduct(a.cwiseProduct(b)) - Q * c;
    return out;
  }
};

inline RiccatiRhs riccati_rhs(const MmppModel& model, const MarketMakerConfig& config, const QuadAlphas& bid,
                              const QuadAlphas& ask) {
  RiccatiRhs f;
  f.lb = side_rates(model, Side::bid);
  f.la = side_rates(model, Side::ask);
  f.drift = imbalance(model);
  f.Q = model.Q;
  f.bid = bid;
  f.ask = ask;
  f.g = config.risk_penalty();
  f.kappa = config.dynamics.kappa;
  return f;
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of the A/B/C system backward from
/// A = B = C = 0 at maturity. Can be resumed to extend the horizon, since the
/// system is autonomous.
class RiccatiSolver {
 public:
  static constexpr double kTolerance = 1e-9;
  static constexpr double kBlowUp = 1e12;

  RiccatiSolver(const MmppModel& model, const MarketMakerConfig& config)
      : model_(model), config_(config) {
    check_dimensions(model_);
    validate(model_);
    validate(config_);
    bid_ = quad_coeffs(config_.bid_curve);
    ask_ = quad_coeffs(config_.ask_curve);
    f_ = detail::riccati_rhs(model_, config_, bid_, ask_);
    y_ = Vector::Zero(3 * model_.n_states());
    record();
  }

  double elapsed() const { return tau_; }
  const QuadAlphas& bid_alphas() const { return bid_; }
  const QuadAlphas& ask_alphas() const { return ask_; }

  /// Integrates until the time to maturity reaches `target`.
  void advance_to(double target) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    // In tau = T - t the system reads dy/dtau = -F(y).
    auto rhs = [this](const Vector& y) -> Vector { return -f_(y); };
    Vector k1 = rhs(y_);
    while (tau_ < target) {
      double h = std::min(h_, target - tau_);
      const bool last = h >= target - tau_;
      const Vector k2 = rhs(y_ + h * a21 * k1);
      const Vector k3 = rhs(y_ + h * (a31 * k1 + a32 * k2));
      const Vector k4 = rhs(y_ + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vector k5 = rhs(y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vector k6 = rhs(y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vector next = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vector k7 = rhs(next);
      const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double ratio = 0.0;
      for (Eigen::Index i = 0; i < err.size(); ++i)
        ratio = std::max(ratio, std::abs(err[i]) / (kTolerance * (1.0 + std::max(std::abs(y_[i]), std::abs(next[i])))));
      if (!std::isfinite(ratio)) throw NumericalError("Riccati divergence; reduce γ or horizon");
      if (ratio <= 1.0) {
        y_ = next;
        k1 = k7;
        tau_ = last ? target : tau_ + h;
        record();
      }
      const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
      if (!(last && ratio <= 1.0)) h_ = h * factor;
      if (h_ < 1e-14 * std::max(1.0, tau_)) throw NumericalError("Riccati divergence; reduce γ or horizon");
    }
  }

  /// Scaled state: a = z A, b = B, c = C / z per state.
  const Vector& scaled() const { return y_; }

  /// Zero-inventory margins at the current time to maturity: p_b = z A + B, p_a = z A - B.
  ZeroInventoryQuotes zero_inventory_quotes() const {
    const int k = model_.n_states();
    ZeroInventoryQuotes out;
    out.bid = Matrix(model_.m_b, model_.m_a);
    out.ask = Matrix(model_.m_b, model_.m_a);
    for (int s = 0; s < k; ++s) {
      const double a = y_[s], b = y_[k + s];
      out.bid(model_.bid_level(s), model_.ask_level(s)) = hamiltonian(config_.bid_curve, a + b).delta_star;
      out.ask(model_.bid_level(s), model_.ask_level(s)) = hamiltonian(config_.ask_curve, a - b).delta_star;
    }
    return out;
  }

  /// Accepted states in unscaled units (A, B, C), ascending in t = horizon - tau.
  QuadCoeffs coefficients() const {
    const int k = model_.n_states();
    const int m = static_cast<int>(taus_.size());
    QuadCoeffs out;
    out.z = config_.z;
    out.bid_alphas = bid_;
    out.ask_alphas = ask_;
    out.A.resize(k, m);
    out.B.resize(k, m);
    out.C.resize(k, m);
    for (int j = 0; j < m; ++j) {
      const int src = m - 1 - j;
      out.times.push_back(tau_ - taus_[src]);
      out.A.col(j) = states_[src].segment(0, k) / config_.z;
      out.B.col(j) = states_[src].segment(k, k);
      out.C.col(j) = states_[src].segment(2 * k, k) * config_.z;
    }
    return out;
  }

 private:
  void record() {
    const int k = model_.n_states();
    if (y_.segment(0, k).cwiseAbs().maxCoeff() / config_.z > kBlowUp || !y_.allFinite())
      throw NumericalError("Riccati divergence; reduce γ or horizon");
    taus_.push_back(tau_);
    states_.push_back(y_);
  }

  MmppModel model_;
  MarketMakerConfig config_;
  QuadAlphas bid_, ask_;
  detail::RiccatiRhs f_;
  Vector y_;
  double tau_ = 0.0;
  double h_ = 1e-4;
  std::vector<double> taus_;
  std::vector<Vector> states_;
};

/// A/B/C over [0, config.horizon].
inline QuadCoeffs riccati_solve(const MmppModel& model, const MarketMakerConfig& config) {
  RiccatiSolver solver(model, config);
  solver.advance_to(config.horizon);
  return solver.coefficients();
}

/// Zero-inventory margins at t = 0.
inline ZeroInventoryQuotes zero_inventory_quotes(const QuadCoeffs& coeffs, const MmppModel& model,
                                                 const MarketMakerConfig& config) {
  if (coeffs.times.empty()) throw StructuralError("zero_inventory_quotes: empty coefficients");
  ZeroInventoryQuotes out;
  out.bid = Matrix(model.m_b, model.m_a);
  out.ask = Matrix(model.m_b, model.m_a);
  for (int s = 0; s < model.n_states(); ++s) {
    const double a = coeffs.z * coeffs.A(s, 0), b = coeffs.B(s, 0);
    out.bid(model.bid_level(s), model.ask_level(s)) = hamiltonian(config.bid_curve, a + b).delta_star;
    out.ask(model.bid_level(s), model.ask_level(s)) = hamiltonian(config.ask_curve, a - b).delta_star;
  }
  return out;
}

/// Largest residual, divided by z, of the quadratic-Hamiltonian HJB equation
/// evaluated on theta = -q^2 A - q B - C at every stored time and every
/// inventory level in [-q_bar, q_bar].
inline double quad_residual(const QuadCoeffs& coeffs, const MmppModel& model, const MarketMakerConfig& config) {
  const detail::RiccatiRhs f = detail::riccati_rhs(model, config, coeffs.bid_alphas, coeffs.ask_alphas);
  const int k = model.n_states();
  const double z = coeffs.z;
  const double gs2 = config.gamma * config.dynamics.sigma * config.dynamics.sigma;
  const int levels = config.levels();
  double worst = 0.0;
  for (int j = 0; j < static_cast<int>(coeffs.times.size()); ++j) {
    Vector y(3 * k);
    y << coeffs.A.col(j) * z, coeffs.B.col(j), coeffs.C.col(j) / z;
    const Vector dy = f(y);
    const Vector dA = dy.segment(0, k) / z, dB = dy.segment(k, k), dC = dy.segment(2 * k, k) * z;
    for (int i = -levels; i <= levels; ++i) {
      const double q = i * z;
      auto theta = [&](int s, double x) { return -x * x * coeffs.A(s, j) - x * coeffs.B(s, j) - coeffs.C(s, j); };
      for (int s = 0; s < k; ++s) {
        const double dtheta = -q * q * dA[s] - q * dB[s] - dC[s];
        double coupling = 0.0;
        for (int r = 0; r < k; ++r) coupling += model.Q(s, r) * theta(r, q);
        const double db = theta(s, q) - theta(s, q + z);
        const double da = theta(s, q) - theta(s, q - z);
        const QuadAlphas& ab = coeffs.bid_alphas;
        const QuadAlphas& aa = coeffs.ask_alphas;
        const double r = dtheta + config.dynamics.kappa * f.drift[s] * q - 0.5 * gs2 * q * q + coupling +
                         z * (f.lb[s] * ab.a0 + f.la[s] * aa.a0) + f.lb[s] * ab.a1 * db + f.la[s] * aa.a1 * da +
                         (f.lb[s] * ab.a2 * db * db + f.la[s] * aa.a2 * da * da) / (2.0 * z);
        worst = std::max(worst, std::abs(r) / z);
      }
    }
  }
  return worst;
}

}  // namespace rfqprice
