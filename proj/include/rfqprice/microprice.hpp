#pragma once

#include <cmath>
#include <vector>

#include "rfqprice/error.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/mmpp.hpp"
#include "rfqprice/model.hpp"

namespace rfqprice {

/// Split of the lexicographic states of an m x m model into symmetric states
/// (j, j) and asymmetric ones. `reduced[s]` is the position of an asymmetric
/// state in the reduced system, or -1 for a symmetric state.
struct SymmetryMap {
  std::vector<int> symmetric;
  std::vector<int> asymmetric;
  std::vector<int> reduced;
};

inline SymmetryMap symmetry_map(const MmppModel& model) {
  if (model.m_b != model.m_a) throw StructuralError("symmetry_map: requires m_b == m_a");
  SymmetryMap map;
  map.reduced.assign(static_cast<std::size_t>(model.n_states()), -1);
  for (int s = 0; s < model.n_states(); ++s) {
    if (model.bid_level(s) == model.ask_level(s)) {
      map.symmetric.push_back(s);
    } else {
      map.reduced[s] = static_cast<int>(map.asymmetric.size());
      map.asymmetric.push_back(s);
    }
  }
  return map;
}

/// Per-state drift lambda_a - lambda_b.
inline Vector drift_vector(const MmppModel& model) {
  check_dimensions(model);
  return imbalance(model);
}

/// v_T(0) = int_0^T exp(Q s) d ds: expected cumulated imbalance over [0, T]
/// from each state.
inline Vector drift_value_finite(const MmppModel& model, double horizon) {
  if (!(horizon >= 0.0)) throw DomainError("drift_value_finite: horizon must be non-negative");
  const Vector d = drift_vector(model);
  if (horizon == 0.0) return Vector::Zero(d.size());
  return expm_integral(model.Q, d, Matrix::Zero(1, 1), horizon).col(0);
}

/// Limiting expected cumulated imbalance v[j_b][j_a].
struct DriftValueTable {
  Matrix v;

  /// Values in lexicographic state order.
  Vector as_vector() const { return v.transpose().reshaped(); }

  static DriftValueTable from_vector(const Vector& x, int m_b, int m_a) {
    DriftValueTable t;
    t.v = x.reshaped(m_a, m_b).transpose();
    return t;
  }
};

/// Limit of v_T as T grows for an exchangeable model: symmetric states have
/// value zero and the asymmetric ones solve Q^ns v^ns = -d^ns.
inline DriftValueTable drift_value_asymptotic(const MmppModel& model) {
  check_dimensions(model);
  if (!model.exchangeable)
    throw InputError("drift_value_asymptotic: the model must be exchangeable");
  const SymmetryMap map = symmetry_map(model);
  const Vector d = drift_vector(model);
  const int k = static_cast<int>(map.asymmetric.size());
  Vector full = Vector::Zero(model.n_states());
  if (k > 0) {
    for (int s : map.asymmetric) {
      double back = 0.0;
      for (int t : map.symmetric) back += model.Q(s, t);
      if (!(back > 0.0))
        throw DomainError("asymmetric state cannot reach symmetric states: limit may not exist");
    }
    Matrix qns(k, k);
    Vector dns(k);
    for (int i = 0; i < k; ++i) {
      dns[i] = d[map.asymmetric[i]];
      for (int j = 0; j < k; ++j) qns(i, j) = model.Q(map.asymmetric[i], map.asymmetric[j]);
    }
    const Vector vns = qns.partialPivLu().solve(-dns);
    for (int i = 0; i < k; ++i) full[map.asymmetric[i]] = vns[i];
  }
  return DriftValueTable::from_vector(full, model.m_b, model.m_a);
}

struct PriceEstimate {
  double mean = 0.0;
  double stdev = 0.0;
};

/// Posterior mean and standard deviation of mid + kappa v(state).
inline PriceEstimate micro_price(double mid, double kappa, const DriftValueTable& table,
                                 const StateDistribution& pi) {
  const Vector v = table.as_vector();
  validate(pi, static_cast<int>(v.size()));
  const double m1 = pi.probs.dot(v);
  const double m2 = pi.probs.dot(v.cwiseProduct(v));
  return {mid + kappa * m1, std::abs(kappa) * std::sqrt(std::max(m2 - m1 * m1, 0.0))};
}

}  // namespace rfqprice
