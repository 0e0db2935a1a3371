#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rfqprice/error.hpp"
#include "rfqprice/linalg.hpp"

namespace rfqprice {

enum class Side { bid, ask };

inline Side other(Side s) { return s == Side::bid ? Side::ask : Side::bid; }

/// One request for quote. Time is in trading days (nights and weekends removed).
struct RfqEvent {
  double time = 0.0;
  Side side = Side::bid;
  std::string asset_id;
};

using RfqStream = std::vector<RfqEvent>;

/// Bidimensional Markov-modulated Poisson process. States (j_b, j_a) are
/// enumerated lexicographically: index = j_b * m_a + j_a (zero-based).
struct MmppModel {
  int m_b = 1;
  int m_a = 1;
  Vector lambda_b;  // events/day, ascending
  Vector lambda_a;  // events/day, ascending
  Matrix Q;         // generator of the intensity chain
  bool exchangeable = false;

  int n_states() const { return m_b * m_a; }
  int index(int jb, int ja) const { return jb * m_a + ja; }
  int bid_level(int state) const { return state / m_a; }
  int ask_level(int state) const { return state % m_a; }
};

/// Probability vector over the m_b * m_a hidden states.
struct StateDistribution {
  Vector probs;

  StateDistribution() = default;
  explicit StateDistribution(Vector p) : probs(std::move(p)) {}

  Eigen::Index size() const { return probs.size(); }
  double operator[](Eigen::Index i) const { return probs[i]; }
};

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kDistributionTolerance = 1e-10;

/// Throws StructuralError / InputError when the model breaks an invariant.
/// Ties between intensities are accepted (quantile initialisation can produce
/// them); strictly decreasing levels are not.
/// `allow_zero_rates` admits zero intensities (silent states), which the
/// simulator accepts but the estimators cannot use.
inline void validate(const MmppModel& model, bool allow_zero_rates = false) {
  if (model.m_b < 1 || model.m_a < 1) throw StructuralError("model: m_b and m_a must be >= 1");
  if (model.lambda_b.size() != model.m_b || model.lambda_a.size() != model.m_a)
    throw StructuralError("model: intensity vector length does not match m_b/m_a");
  const int n = model.n_states();
  if (model.Q.rows() != n || model.Q.cols() != n)
    throw StructuralError("model: Q must be (m_b*m_a) x (m_b*m_a)");
  if (!model.Q.allFinite() || !model.lambda_b.allFinite() || !model.lambda_a.allFinite())
    throw InputError("model: non-finite parameter");
  auto check_levels = [allow_zero_rates](const Vector& l, const char* name) {
    for (Eigen::Index i = 0; i < l.size(); ++i) {
      if (!(l[i] > 0.0) && !(allow_zero_rates && l[i] == 0.0)) throw InputError(std::string("model: ") + name + " must be positive");
      if (i > 0 && l[i] < l[i - 1])
        throw InputError(std::string("model: ") + name + " must be sorted ascending");
    }
  };
  check_levels(model.lambda_b, "lambda_b");
  check_levels(model.lambda_a, "lambda_a");
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i != j && model.Q(i, j) < 0.0) throw InputError("model: negative off-diagonal rate in Q");
      row += model.Q(i, j);
    }
    if (std::abs(row) > kRowSumTolerance * std::max(1.0, model.Q.row(i).cwiseAbs().maxCoeff()))
      throw InputError("model: Q rows must sum to zero");
  }
  if (model.exchangeable) {
    if (model.m_b != model.m_a) throw InputError("model: exchangeable requires m_b == m_a");
    if ((model.lambda_b - model.lambda_a).cwiseAbs().maxCoeff() > 1e-12)
      throw InputError("model: exchangeable requires lambda_b == lambda_a");
    const int m = model.m_b;
    for (int jb = 0; jb < m; ++jb)
      for (int ja = 0; ja < m; ++ja)
        for (int kb = 0; kb < m; ++kb)
          for (int ka = 0; ka < m; ++ka) {
            const double a = model.Q(jb * m + ja, kb * m + ka);
            const double b = model.Q(ja * m + jb, ka * m + kb);
            if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
              throw InputError("model: Q violates the exchangeability identity");
          }
  }
}

inline void validate(const StateDistribution& pi, int n_states) {
  if (pi.size() != n_states) throw StructuralError("distribution: wrong number of states");
  if (!pi.probs.allFinite() || pi.probs.minCoeff() < 0.0)
    throw InputError("distribution: entries must be finite and non-negative");
  if (std::abs(pi.probs.sum() - 1.0) > kDistributionTolerance)
    throw InputError("distribution: entries must sum to 1");
}

/// Rebuilds the diagonal of `q` so that every row sums to zero.
inline void fix_diagonal(Matrix& q) {
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    q(i, i) = 0.0;
    q(i, i) = -q.row(i).sum();
  }
}

/// Exchangeable model sharing one set of intensities between both sides.
inline MmppModel make_exchangeable(const Vector& lambda, Matrix q) {
  MmppModel model;
  model.m_b = model.m_a = static_cast<int>(lambda.size());
  model.lambda_b = lambda;
  model.lambda_a = lambda;
  model.Q = std::move(q);
  model.exchangeable = true;
  return model;
}

/// Per-state intensity on one side, in lexicographic state order.
inline Vector side_rates(const MmppModel& model, Side side) {
  Vector r(model.n_states());
  for (int s = 0; s < model.n_states(); ++s)
    r[s] = side == Side::bid ? model.lambda_b[model.bid_level(s)]
                             : model.lambda_a[model.ask_level(s)];
  return r;
}

/// Per-state imbalance lambda_a - lambda_b.
inline Vector imbalance(const MmppModel& model) {
  return side_rates(model, Side::ask) - side_rates(model, Side::bid);
}

/// Model of a single asset in the one-factor multi-asset setting: intensities
/// scaled by the asset's weights, same hidden chain.
inline MmppModel asset_model(const MmppModel& model, double beta_b, double beta_a) {
  if (!(beta_b > 0.0) || !(beta_a > 0.0)) throw DomainError("asset_model: weights must be positive");
  MmppModel out = model;
  out.lambda_b *= beta_b;
  out.lambda_a *= beta_a;
  out.exchangeable = model.exchangeable && beta_b == beta_a;
  return out;
}

/// Kronecker-structured generator of two independent chains.
inline Matrix independent_generator(const Matrix& qb, const Matrix& qa) {
  const auto mb = qb.rows();
  const auto ma = qa.rows();
  Matrix q = Matrix::Zero(mb * ma, mb * ma);
  for (Eigen::Index jb = 0; jb < mb; ++jb)
    for (Eigen::Index kb = 0; kb < mb; ++kb)
      for (Eigen::Index ja = 0; ja < ma; ++ja) q(jb * ma + ja, kb * ma + ja) += qb(jb, kb);
  for (Eigen::Index jb = 0; jb < mb; ++jb)
    for (Eigen::Index ja = 0; ja < ma; ++ja)
      for (Eigen::Index ka = 0; ka < ma; ++ka) q(jb * ma + ja, jb * ma + ka) += qa(ja, ka);
  return q;
}

/// Permutation of the joint state space induced by permutations of the bid
/// and ask levels: new state index -> old state index.
inline std::vector<int> joint_permutation(const std::vector<int>& perm_b,
                                          const std::vector<int>& perm_a) {
  const int mb = static_cast<int>(perm_b.size());
  const int ma = static_cast<int>(perm_a.size());
  std::vector<int> out(static_cast<std::size_t>(mb * ma));
  for (int jb = 0; jb < mb; ++jb)
    for (int ja = 0; ja < ma; ++ja) out[jb * ma + ja] = perm_b[jb] * ma + perm_a[ja];
  return out;
}

/// Relabels the model so that intensities are ascending on each side. If
/// `state_perm` is non-null it receives new-index -> old-index for the joint
/// states, so that distributions can be permuted consistently.
inline MmppModel canonicalize(const MmppModel& model, std::vector<int>* state_perm = nullptr) {
  auto order = [](const Vector& l) {
    std::vector<int> p(static_cast<std::size_t>(l.size()));
    std::iota(p.begin(), p.end(), 0);
    std::stable_sort(p.begin(), p.end(), [&](int x, int y) { return l[x] < l[y]; });
    return p;
  };
  std::vector<int> pb = order(model.lambda_b);
  std::vector<int> pa = model.exchangeable ? pb : order(model.lambda_a);
  const std::vector<int> joint = joint_permutation(pb, pa);
  MmppModel out = model;
  for (int j = 0; j < model.m_b; ++j) out.lambda_b[j] = model.lambda_b[pb[j]];
  for (int j = 0; j < model.m_a; ++j) out.lambda_a[j] = model.lambda_a[pa[j]];
  const int n = model.n_states();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.Q(i, j) = model.Q(joint[i], joint[j]);
  if (state_perm != nullptr) *state_perm = joint;
  return out;
}

inline StateDistribution permute(const StateDistribution& pi, const std::vector<int>& new_to_old) {
  Vector p(pi.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = pi.probs[new_to_old[static_cast<std::size_t>(i)]];
  return StateDistribution(p);
}

/// The (j_b, j_a) -> (j_a, j_b) relabelling of an m x m state space.
inline std::vector<int> swap_permutation(int m) {
  std::vector<int> p(static_cast<std::size_t>(m * m));
  for (int jb = 0; jb < m; ++jb)
    for (int ja = 0; ja < m; ++ja) p[jb * m + ja] = ja * m + jb;
  return p;
}

/// Sorts events by time (stable) and separates identical timestamps by
/// 1e-9 day steps in input order so that times are strictly increasing.
inline RfqStream canonical_stream(RfqStream stream) {
  constexpr double kTieStep = 1e-9;
  std::stable_sort(stream.begin(), stream.end(),
                   [](const RfqEvent& x, const RfqEvent& y) { return x.time < y.time; });
  for (std::size_t i = 1; i < stream.size(); ++i)
    if (stream[i].time <= stream[i - 1].time) stream[i].time = stream[i - 1].time + kTieStep;
  return stream;
}

inline void validate(const RfqStream& stream) {
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!std::isfinite(stream[i].time) || stream[i].time < 0.0)
      throw InputError("stream: event " + std::to_string(i) + " has an invalid time");
    if (i > 0 && stream[i].time < stream[i - 1].time)
      throw InputError("stream: events must be sorted by time (event " + std::to_string(i) + ")");
  }
}

inline RfqStream swap_sides(RfqStream stream) {
  for (auto& e : stream) e.side = other(e.side);
  return stream;
}

}  // namespace rfqprice
