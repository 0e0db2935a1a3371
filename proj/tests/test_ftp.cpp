#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "reference_data.hpp"
#include "rfqprice/ftp.hpp"
#include "rfqprice/hamiltonian.hpp"
#include "rfqprice/hjb.hpp"
#include "rfqprice/riccati.hpp"

using namespace rfqprice;

namespace {

const SCurve kCurve{refdata::kAlphaLogit, refdata::kBetaLogit, 1.0};

// sup over delta of f(delta)(delta - p) by golden-section search.
double brute_force_h(const SCurve& s, double p, double* argmax = nullptr) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = p, hi = p + 60.0 * s.delta0 / s.beta;
  auto obj = [&](double d) { return s(d) * (d - p); };
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = obj(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = obj(x1);
    }
  }
  if (argmax) *argmax = 0.5 * (lo + hi);
  return obj(0.5 * (lo + hi));
}

MmppModel single_state(double lb, double la) {
  MmppModel m;
  m.lambda_b = Vector::Constant(1, lb);
  m.lambda_a = Vector::Constant(1, la);
  m.Q = Matrix::Zero(1, 1);
  return m;
}

MarketMakerConfig unit_config(double gamma, double kappa, double sigma) {
  MarketMakerConfig c;
  c.gamma = gamma;
  c.z = 1.0;
  c.q_bar = 10.0;
  c.dynamics.kappa = kappa;
  c.dynamics.sigma = sigma;
  c.bid_curve = kCurve;
  c.ask_curve = kCurve;
  return c;
}

StateDistribution point_mass(int n, int s) {
  Vector p = Vector::Zero(n);
  p[s] = 1.0;
  return StateDistribution(p);
}

// Explicit Euler scheme for one state, from the brute-force Hamiltonian.
std::vector<double> explicit_single_state(double lb, double la, const MarketMakerConfig& c, double dt) {
  const int n = c.levels();
  std::vector<double> theta(2 * n + 1, 0.0);
  const long steps = std::lround(c.horizon / dt);
  const double g = c.gamma * c.dynamics.sigma * c.dynamics.sigma;
  for (long k = 0; k < steps; ++k) {
    std::vector<double> next(theta);
    for (int i = 0; i <= 2 * n; ++i) {
      const double q = (i - n) * c.z;
      double rate = c.dynamics.kappa * (la - lb) * q - 0.5 * g * q * q;
      if (i < 2 * n) rate += c.z * lb * brute_force_h(c.bid_curve, (theta[i] - theta[i + 1]) / c.z);
      if (i > 0) rate += c.z * la * brute_force_h(c.ask_curve, (theta[i] - theta[i - 1]) / c.z);
      next[i] = theta[i] + dt * rate;
    }
    theta = next;
  }
  return theta;
}

// Classical RK4 on the A/B/C system in original units, with Delta_{i,k} = alpha_i z^k.
struct Abc {
  Vector A, B, C;
};

Abc rk4_riccati(const MmppModel& m, const MarketMakerConfig& c, double h) {
  const QuadAlphas ab = quad_coeffs(c.bid_curve), aa = quad_coeffs(c.ask_curve);
  const int n = m.n_states();
  const double z = c.z;
  Vector lb(n), la(n);
  for (int s = 0; s < n; ++s) {
    lb[s] = m.lambda_b[m.bid_level(s)];
    la[s] = m.lambda_a[m.ask_level(s)];
  }
  auto D = [&](const QuadAlphas& a, int i, int k) { return (i == 0 ? a.a0 : i == 1 ? a.a1 : a.a2) * std::pow(z, k); };
  auto f = [&](const Abc& y) {
    Abc d{Vector(n), Vector(n), Vector(n)};
    const Vector QA = m.Q * y.A, QB = m.Q * y.B, QC = m.Q * y.C;
    for (int j = 0; j < n; ++j) {
      const double A = y.A[j], B = y.B[j];
      const double b = lb[j], a = la[j];
      d.A[j] = 2 * (b * D(ab, 2, 1) + a * D(aa, 2, 1)) * A * A -
               0.5 * c.gamma * c.dynamics.sigma * c.dynamics.sigma - QA[j];
      d.B[j] = 2 * (b * D(ab, 1, 1) - a * D(aa, 1, 1)) * A + 2 * (b * D(ab, 2, 2) - a * D(aa, 2, 2)) * A * A +
               c.dynamics.kappa * (a - b) + 2 * (b * D(ab, 2, 1) + a * D(aa, 2, 1)) * A * B - QB[j];
      d.C[j] = (b * D(ab, 0, 1) + a * D(aa, 0, 1)) + (b * D(ab, 1, 2) + a * D(aa, 1, 2)) * A +
               (b * D(ab, 1, 1) - a * D(aa, 1, 1)) * B + 0.5 * (b * D(ab, 2, 3) + a * D(aa, 2, 3)) * A * A +
               0.5 * (b * D(ab, 2, 1) + a * D(aa, 2, 1)) * B * B + (b * D(ab, 2, 2) - a * D(aa, 2, 2)) * A * B -
               QC[j];
    }
    return d;
  };
  auto axpy = [](const Abc& y, double s, const Abc& d) { return Abc{y.A + s * d.A, y.B + s * d.B, y.C + s * d.C}; };
  Abc y{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
  const long steps = std::lround(c.horizon / h);
  for (long k = 0; k < steps; ++k) {
    // Backward in time: y(t - h) from y(t).
    const Abc k1 = f(y);
    const Abc k2 = f(axpy(y, -0.5 * h, k1));
    const Abc k3 = f(axpy(y, -0.5 * h, k2));
    const Abc k4 = f(axpy(y, -h, k3));
    y.A -= h / 6 * (k1.A + 2 * k2.A + 2 * k3.A + k4.A);
    y.B -= h / 6 * (k1.B + 2 * k2.B + 2 * k3.B + k4.B);
    y.C -= h / 6 * (k1.C + 2 * k2.C + 2 * k3.C + k4.C);
  }
  return y;
}

}  // namespace

TEST(Hamiltonian, MatchesBruteForceMaximisation) {
  for (double p : {-3.0, -1.0, -0.2, 0.0, 0.3, 1.0, 4.0}) {
    double arg = 0.0;
    const double h = brute_force_h(kCurve, p, &arg);
    const HamiltonianValue v = hamiltonian(kCurve, p);
    EXPECT_NEAR(v.H, h, 1e-12) << p;
    EXPECT_NEAR(v.delta_star, arg, 1e-6) << p;
  }
}

TEST(Hamiltonian, FirstOrderConditionAtZero) {
  const HamiltonianValue v = hamiltonian(kCurve, 0.0);
  const double d = v.delta_star;
  const double f = kCurve(d);
  const double fprime = -kCurve.beta / kCurve.delta0 * f * (1.0 - f);
  EXPECT_LT(std::abs(fprime * d + f), 1e-10);
}

TEST(Hamiltonian, DerivativesMatchFiniteDifferences) {
  for (const SCurve& s : {kCurve, SCurve{0.4, 1.5, 0.7}, SCurve{-2.0, 6.0, 2.3}}) {
    for (double p = -2.0; p <= 2.0; p += 0.25) {
      const double eps = 1e-5;
      const double fd = (hamiltonian(s, p + eps).H - hamiltonian(s, p - eps).H) / (2 * eps);
      EXPECT_NEAR(hamiltonian(s, p).H_prime, fd, 1e-6) << p;
    }
    const double eps = 1e-4;
    const QuadAlphas a = quad_coeffs(s);
    const double fd2 = (hamiltonian(s, eps).H - 2 * a.a0 + hamiltonian(s, -eps).H) / (eps * eps);
    EXPECT_NEAR(a.a2, fd2, 1e-5);
    EXPECT_GT(a.a1, -1.0);
    EXPECT_LT(a.a1, 0.0);
    EXPECT_GT(a.a2, 0.0);
  }
}

TEST(Hamiltonian, DecreasingAndConvex) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    double p = u(rng), r = u(rng);
    if (p > r) std::swap(p, r);
    if (p == r) continue;
    const double hp = hamiltonian(kCurve, p).H, hr = hamiltonian(kCurve, r).H;
    EXPECT_GT(hp, hr);
    EXPECT_LE(hamiltonian(kCurve, 0.5 * (p + r)).H, 0.5 * (hp + hr) + 1e-15);
  }
}

TEST(Hamiltonian, WarmStartGivesSameAnswer) {
  const HamiltonianValue cold = hamiltonian(kCurve, 0.37);
  for (double guess : {cold.x, cold.x + 0.5, cold.x - 0.5, -100.0, 100.0, double(NAN)}) {
    const HamiltonianValue warm = hamiltonian(kCurve, 0.37, guess);
    EXPECT_NEAR(warm.x, cold.x, 1e-13);
  }
}

TEST(Hamiltonian, ExtremeArgumentsStayFinite) {
  for (double p : {-200.0, -50.0, 50.0, 300.0, 1e4}) {
    const HamiltonianValue v = hamiltonian(kCurve, p);
    EXPECT_TRUE(std::isfinite(v.H) && std::isfinite(v.delta_star));
    EXPECT_GE(v.H, 0.0);
  }
  EXPECT_THROW(hamiltonian(kCurve, -1e4), DomainError);
}

TEST(Hamiltonian, IdenticalCurvesGiveIdenticalAlphas) {
  const QuadAlphas a = quad_coeffs(kCurve), b = quad_coeffs(SCurve(kCurve));
  EXPECT_EQ(a.a0, b.a0);
  EXPECT_EQ(a.a1, b.a1);
  EXPECT_EQ(a.a2, b.a2);
}

TEST(MarketMakerConfig, Validation) {
  MarketMakerConfig c = unit_config(1e-3, 0.0, 1.0);
  EXPECT_NO_THROW(validate(c));
  c.q_bar = 10.5;
  EXPECT_THROW(validate(c), InputError);
  c = unit_config(1e-3, 0.0, 1.0);
  c.q_bar = 0.5;
  EXPECT_THROW(validate(c), InputError);
  c = unit_config(-1.0, 0.0, 1.0);
  EXPECT_THROW(validate(c), InputError);
  c = unit_config(1e-3, 0.0, 1.0);
  c.time_step = 0.0;
  EXPECT_THROW(validate(c), InputError);
}

TEST(EulerHjb, TerminalSliceAndResidual) {
  const MmppModel m = refdata::sector_model(0);
  MarketMakerConfig c = unit_config(1e-2, 0.5, 2.0);
  c.horizon = 0.2;
  const ValueGrid g = hjb_solve_euler(m, c, 10);
  ASSERT_EQ(g.times.size(), 21u);
  EXPECT_NEAR(g.times.front(), 0.0, 1e-12);
  EXPECT_NEAR(g.times.back(), 0.2, 1e-12);
  EXPECT_EQ(g.theta.back().cwiseAbs().maxCoeff(), 0.0);
  for (const Matrix& t : g.theta) EXPECT_TRUE(t.allFinite());
  EXPECT_LT(g.max_residual, 1e-8);
  EXPECT_EQ(g.inventory.size(), 21u);
}

TEST(EulerHjb, RiskNeutralSymmetricProblemHasNoSkew) {
  const MmppModel m = refdata::sector_model(0);
  MarketMakerConfig c = unit_config(0.0, 0.0, 1.0);
  c.q_bar = 20.0;
  c.horizon = 0.02;
  c.time_step = 1e-4;
  const ValueGrid g = hjb_solve_euler(m, c, 1000);
  const Matrix& t = g.theta.front();
  const int mid = 20;
  for (int s = 0; s < 4; ++s) {
    EXPECT_NEAR(t(s, mid), t(s, mid + 1), 1e-10);
    EXPECT_NEAR(t(s, mid), t(s, mid - 1), 1e-10);
  }
  const ZeroInventoryQuotes q = zero_inventory_quotes(g, m, c);
  EXPECT_LT((q.bid - q.ask).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EulerHjb, SingleStateMatchesFineExplicitScheme) {
  // Rates of the order of a single bond's flow (a few requests per day).
  const double lb = 2.0, la = 5.0;
  MarketMakerConfig c = unit_config(0.02, 0.1, 1.0);
  c.q_bar = 5.0;
  c.horizon = 0.5;
  c.time_step = 1e-3;
  const ValueGrid g = hjb_solve_euler(single_state(lb, la), c, 1000);
  const std::vector<double> fine = explicit_single_state(lb, la, c, c.time_step / 10);
  for (int i = 0; i < static_cast<int>(fine.size()); ++i) EXPECT_NEAR(g.theta.front()(0, i), fine[i], 1e-4) << i;
}

TEST(EulerHjb, FirstOrderInTimeStep) {
  const MmppModel m = refdata::sector_model(0);
  MarketMakerConfig c = unit_config(0.02, 0.1, 1.0);
  c.horizon = 0.5;
  std::vector<Matrix> theta;
  for (double dt : {2e-3, 1e-3, 5e-4}) {
    c.time_step = dt;
    EulerHjbSolver s(m, c);
    s.advance_to(c.horizon);
    theta.push_back(s.theta());
  }
  const double coarse = (theta[0] - theta[1]).cwiseAbs().maxCoeff();
  const double fine = (theta[1] - theta[2]).cwiseAbs().maxCoeff();
  EXPECT_NEAR(coarse / fine, 2.0, 0.1);
}

TEST(EulerHjb, RejectsUnstableStep) {
  MarketMakerConfig c = unit_config(1e-2, 0.0, 1.0);
  c.time_step = 0.05;
  EXPECT_THROW(EulerHjbSolver(refdata::sector_model(0), c), DomainError);
}

TEST(EulerHjb, ContinuationEqualsLongerSolve) {
  const MmppModel m = refdata::sector_model(1);
  MarketMakerConfig c = unit_config(1e-2, 0.3, 1.0);
  EulerHjbSolver a(m, c);
  a.advance_to(0.1);
  a.advance_to(0.3);
  c.horizon = 0.3;
  const ValueGrid g = hjb_solve_euler(m, c, 300);
  EXPECT_LT((a.theta() - g.theta.front()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Riccati, TerminalConditionsAndConcavity) {
  const MmppModel m = refdata::sector_model(0);
  MarketMakerConfig c = unit_config(1e-2, 0.5, 2.0);
  c.horizon = 1.0;
  const QuadCoeffs q = riccati_solve(m, c);
  const int last = q.last();
  EXPECT_NEAR(q.times.front(), 0.0, 1e-12);
  EXPECT_NEAR(q.times.back(), 1.0, 1e-12);
  EXPECT_EQ(q.A.col(last).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(q.B.col(last).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(q.C.col(last).cwiseAbs().maxCoeff(), 0.0);
  for (int j = 0; j < last; ++j) EXPECT_GT(q.A.col(j).minCoeff(), 0.0);
}

TEST(Riccati, MatchesFineRungeKutta) {
  for (double z : {1.0, refdata::kTradeSize}) {
    const auto& b = refdata::kBonds[0];
    const MmppModel m = refdata::bond_model(b);
    MarketMakerConfig c = refdata::bond_market_maker(b, b.gamma_quad);
    c.z = z;
    c.q_bar = 10 * z;
    c.gamma = b.gamma_quad * refdata::kTradeSize / z;
    c.horizon = 2.0;
    const QuadCoeffs q = riccati_solve(m, c);
    const Abc ref = rk4_riccati(m, c, 1e-4);
    for (int s = 0; s < 4; ++s) {
      // The adaptive solver's 1e-9 per-step tolerance accumulates over the horizon.
      EXPECT_NEAR(q.A(s, 0), ref.A[s], 1e-7 * std::abs(ref.A[s])) << z;
      EXPECT_NEAR(q.B(s, 0), ref.B[s], 1e-7 * (1e-3 + std::abs(ref.B[s]))) << z;
      EXPECT_NEAR(q.C(s, 0), ref.C[s], 1e-7 * std::abs(ref.C[s])) << z;
    }
  }
}

TEST(Riccati, QuadraticHjbResidual) {
  const auto& b = refdata::kBonds[0];
  MarketMakerConfig c = refdata::bond_market_maker(b, b.gamma_quad);
  c.horizon = 5.0;
  const MmppModel m = refdata::bond_model(b);
  EXPECT_LT(quad_residual(riccati_solve(m, c), m, c), 1e-6);
}

TEST(Riccati, SymmetricProblemHasNoLinearTerm) {
  MarketMakerConfig c = unit_config(1e-2, 0.0, 2.0);
  c.horizon = 3.0;
  const QuadCoeffs q = riccati_solve(refdata::sector_model(2), c);
  for (int s : {0, 3}) EXPECT_LT(q.B.row(s).cwiseAbs().maxCoeff(), 1e-12);
  MmppModel m = refdata::sector_model(2);
  m.lambda_b.setConstant(20.0);
  m.lambda_a.setConstant(20.0);
  EXPECT_LT(riccati_solve(m, c).B.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Riccati, RiskNeutralHasNoQuadraticTerm) {
  MarketMakerConfig c = unit_config(0.0, 0.0, 2.0);
  c.horizon = 3.0;
  EXPECT_EQ(riccati_solve(refdata::sector_model(0), c).A.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ErgodicSkew, ExchangeableSymmetries) {
  const auto& b = refdata::kBonds[0];
  const MmppModel m = refdata::bond_model(b);
  const MarketMakerConfig c = refdata::bond_market_maker(b, b.gamma_quad);
  for (SolverMethod method : {SolverMethod::quad, SolverMethod::euler}) {
    const SkewTable t = ergodic_skew(m, c, method);
    EXPECT_NEAR(t.skew(0, 0), 0.0, 1e-6);
    EXPECT_NEAR(t.skew(1, 1), 0.0, 1e-6);
    EXPECT_NEAR(t.skew(0, 1), -t.skew(1, 0), 1e-6);
    // Clients buying (high ask intensity) push the fair price up.
    EXPECT_GT(t.skew(0, 1), 0.0);
  }
}

TEST(ErgodicSkew, StationaryUnderHorizonDoubling) {
  const auto& b = refdata::kBonds[0];
  const MmppModel m = refdata::bond_model(b);
  MarketMakerConfig c = refdata::bond_market_maker(b, b.gamma_quad);
  const ErgodicQuotes e = ergodic_quotes(m, c, SolverMethod::quad);
  c.horizon = 2.0 * e.horizon;
  const SkewTable longer = ergodic_skew(riccati_solve(m, c), m, c);
  EXPECT_LT((longer.skew - e.skew().skew).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ErgodicSkew, ValueGridAndSolverAgree) {
  const MmppModel m = refdata::sector_model(0);
  MarketMakerConfig c = unit_config(1e-2, 0.5, 2.0);
  c.horizon = 0.5;
  EulerHjbSolver s(m, c);
  s.advance_to(0.5);
  const SkewTable a = ergodic_skew(hjb_solve_euler(m, c, 500), m, c);
  EXPECT_LT((a.skew - s.zero_inventory_quotes().skew()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ErgodicSkew, RejectsReducibleChain) {
  MmppModel m = refdata::sector_model(0);
  m.Q.setZero();
  m.Q(1, 2) = 1.0;
  m.Q(1, 1) = -1.0;
  m.Q(2, 1) = 1.0;
  m.Q(2, 2) = -1.0;
  EXPECT_THROW(ergodic_skew(m, unit_config(1e-2, 0.0, 1.0), SolverMethod::quad), InputError);
}

TEST(ErgodicSkew, NonStationaryWithinCapIsAnError) {
  const MmppModel m = refdata::sector_model(3);
  MarketMakerConfig c = unit_config(1e-9, 0.1, 1.0);
  ErgodicOptions o;
  o.max_horizon = 4.0;
  EXPECT_THROW(ergodic_skew(m, c, SolverMethod::quad, o), NumericalError);
}

TEST(Ftp, SymmetricPosteriorGivesMid) {
  SkewTable t{Matrix(2, 2)};
  t.skew << 0.0, 0.3, -0.3, 0.0;
  Vector p(4);
  p << 0.6, 0.0, 0.0, 0.4;
  const FtpEstimate e = ftp(100.0, t, StateDistribution(p));
  EXPECT_EQ(e.mean, 100.0);
  EXPECT_EQ(e.stdev, 0.0);
  p << 0.25, 0.25, 0.25, 0.25;
  EXPECT_NEAR(ftp(100.0, t, StateDistribution(p)).mean, 100.0, 1e-15);
  EXPECT_NEAR(ftp(100.0, t, StateDistribution(p)).stdev, 0.5 * std::sqrt(0.5 * 0.09), 1e-15);
  p << 0.0, 1.0, 0.0, 0.0;
  EXPECT_NEAR(ftp(100.0, t, StateDistribution(p)).mean, 100.15, 1e-12);
}

TEST(Ftp, ShiftingTheMidShiftsTheFtp) {
  SkewTable t{Matrix(2, 2)};
  t.skew << 0.0, 0.3, -0.3, 0.0;
  const StateDistribution p = point_mass(4, 1);
  EXPECT_NEAR(ftp(103.0, t, p).mean - 103.0, ftp(57.0, t, p).mean - 57.0, 1e-12);
}

TEST(Ftp, BondOnePublishedGammas) {
  const auto& b = refdata::kBonds[0];
  const MmppModel m = refdata::bond_model(b);
  const SkewTable euler = ergodic_skew(m, refdata::bond_market_maker(b, b.gamma_euler), SolverMethod::euler);
  const SkewTable quad = ergodic_skew(m, refdata::bond_market_maker(b, b.gamma_quad), SolverMethod::quad);
  const int s21 = m.index(1, 0), s12 = m.index(0, 1);
  const double e21 = ftp(b.mid, euler, point_mass(4, s21)).mean;
  const double e12 = ftp(b.mid, euler, point_mass(4, s12)).mean;
  const double q21 = ftp(b.mid, quad, point_mass(4, s21)).mean;
  const double q12 = ftp(b.mid, quad, point_mass(4, s12)).mean;
  EXPECT_NEAR(e21, b.ftp_21_euler, 0.005);
  EXPECT_NEAR(e12, b.ftp_12_euler, 0.005);
  EXPECT_NEAR(q21, b.ftp_21_quad, 0.005);
  EXPECT_NEAR(q12, b.ftp_12_quad, 0.005);
  EXPECT_NEAR(q21, e21, 0.001);
}

TEST(Ftp, RiskLimitBarelyMattersAtZeroInventory) {
  const auto& b = refdata::kBonds[0];
  const MmppModel m = refdata::bond_model(b);
  MarketMakerConfig c = refdata::bond_market_maker(b, b.gamma_euler);
  const SkewTable base = ergodic_skew(m, c, SolverMethod::euler);
  c.q_bar *= 2.0;
  const SkewTable wide = ergodic_skew(m, c, SolverMethod::euler);
  EXPECT_LT((base.skew - wide.skew).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(CalibrateGamma, HitsTargetSpread) {
  const auto& b = refdata::kBonds[0];
  const MmppModel m = refdata::bond_model(b);
  const MarketMakerConfig c = refdata::bond_market_maker(b, 0.0);
  const GammaCalibration cal = calibrate_gamma(m, c, b.ask - b.bid, SolverMethod::quad);
  EXPECT_NEAR(cal.spread, b.ask - b.bid, 1e-4);
  EXPECT_GT(cal.gamma, 1e-9);
  EXPECT_LT(cal.gamma, 1e-8);
  const Vector w = spread_weights(m, SpreadWeighting::symmetric_stationary);
  EXPECT_EQ(w[1], 0.0);
  EXPECT_NEAR(w.sum(), 1.0, 1e-15);
}

TEST(CalibrateGamma, LargerTargetGivesLargerGamma) {
  const auto& b = refdata::kBonds[0];
  const MmppModel m = refdata::bond_model(b);
  const MarketMakerConfig c = refdata::bond_market_maker(b, 0.0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.95, 1.6);
  for (int i = 0; i < 5; ++i) {
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    const double g_lo = calibrate_gamma(m, c, lo, SolverMethod::quad).gamma;
    const double g_hi = calibrate_gamma(m, c, hi, SolverMethod::quad).gamma;
    EXPECT_LT(g_lo, g_hi) << lo << " " << hi;
  }
}

TEST(CalibrateGamma, ReportsUnreachableTargets) {
  const auto& b = refdata::kBonds[0];
  const MmppModel m = refdata::bond_model(b);
  const MarketMakerConfig c = refdata::bond_market_maker(b, 0.0);
  try {
    calibrate_gamma(m, c, 500.0, SolverMethod::quad);
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("achievable"), std::string::npos);
  }
  EXPECT_THROW(calibrate_gamma(m, c, -1.0, SolverMethod::quad), InputError);
}
