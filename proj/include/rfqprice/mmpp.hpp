#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rfqprice/error.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/model.hpp"

namespace rfqprice {

inline void check_dimensions(const MmppModel& model) {
  const int n = model.n_states();
  if (model.m_b < 1 || model.m_a < 1 || model.lambda_b.size() != model.m_b ||
      model.lambda_a.size() != model.m_a || model.Q.rows() != n || model.Q.cols() != n)
    throw StructuralError("model: Q and intensity vectors have inconsistent dimensions");
}

/// G = Q - diag(lambda_b) (x) I - I (x) diag(lambda_a).
inline Matrix build_generator(const MmppModel& model) {
  check_dimensions(model);
  Matrix g = model.Q;
  g.diagonal() -= side_rates(model, Side::bid) + side_rates(model, Side::ask);
  return g;
}

/// exp(G dt): probability of moving between states with no RFQ in between.
inline Matrix transition_kernel(const MmppModel& model, double dt) {
  if (!(dt >= 0.0)) throw DomainError("transition_kernel: dt must be non-negative");
  return expm(build_generator(model) * dt);
}

namespace detail {

/// Smallest total event rate over states. Shifting G by this amount keeps the
/// propagated vectors of order one over long quiet intervals; the shift is a
/// scalar factor exp(shift dt) that normalisation removes.
inline double generator_shift(const MmppModel& model) {
  return (side_rates(model, Side::bid) + side_rates(model, Side::ask)).minCoeff();
}

inline void check_stream_against(const RfqStream& stream) {
  double prev = 0.0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const double t = stream[i].time;
    if (!std::isfinite(t) || t < prev)
      throw InputError("stream: event " + std::to_string(i) +
                       " has a time that is negative or out of order");
    prev = t;
  }
}

}  // namespace detail

/// Sample log-likelihood log(pi0' prod_n exp(G (t_n - t_{n-1})) Lambda^{s_n} e)
/// with t_0 = 0. With `rescale` the running row vector is normalised after
/// every event and the log norms are accumulated.
inline double log_likelihood(const MmppModel& model, const RfqStream& stream,
                             const StateDistribution& pi0, bool rescale = true) {
  check_dimensions(model);
  validate(pi0, model.n_states());
  detail::check_stream_against(stream);
  if (stream.empty()) return 0.0;

  const Matrix g = build_generator(model);
  const Vector rb = side_rates(model, Side::bid);
  const Vector ra = side_rates(model, Side::ask);
  const double shift = rescale ? detail::generator_shift(model) : 0.0;
  const Matrix shifted = g + shift * Matrix::Identity(g.rows(), g.cols());

  Eigen::RowVectorXd alpha = pi0.probs.transpose();
  double loglik = 0.0;
  double prev = 0.0;
  for (std::size_t r = 0; r < stream.size(); ++r) {
    const double dt = stream[r].time - prev;
    prev = stream[r].time;
    alpha = alpha * expm(shifted * dt);
    alpha = alpha.cwiseProduct((stream[r].side == Side::bid ? rb : ra).transpose());
    if (rescale) {
      const double c = alpha.sum();
      if (!(c > 0.0) || !std::isfinite(c))
        throw NumericalError("log_likelihood: scaling factor is not positive and finite",
                             static_cast<long>(r));
      alpha /= c;
      loglik += std::log(c) - shift * dt;
    } else if (!alpha.allFinite()) {
      throw NumericalError("log_likelihood: non-finite forward vector", static_cast<long>(r));
    }
  }
  if (!rescale) loglik = std::log(alpha.sum());
  if (!std::isfinite(loglik))
    throw NumericalError("log_likelihood: non-finite value", static_cast<long>(stream.size()) - 1);
  return loglik;
}

/// Incremental posterior of the hidden state given the RFQs observed so far.
/// Quiet periods propagate the vector with exp(G dt); events multiply it by the
/// intensity of their side. The vector is normalised at every step.
class PosteriorFilter {
 public:
  PosteriorFilter(const MmppModel& model, const StateDistribution& pi0, double t0 = 0.0)
      : model_(model), time_(t0), probs_(pi0.probs.transpose()) {
    check_dimensions(model);
    validate(pi0, model.n_states());
    const Matrix g = build_generator(model);
    generator_ = g + detail::generator_shift(model) * Matrix::Identity(g.rows(), g.cols());
    bid_rates_ = side_rates(model, Side::bid).transpose();
    ask_rates_ = side_rates(model, Side::ask).transpose();
  }

  double time() const { return time_; }
  long events_seen() const { return events_; }
  StateDistribution distribution() const { return StateDistribution(probs_.transpose()); }

  /// Conditions on the absence of events in (time(), t].
  void advance(double t) {
    if (!(t >= time_)) throw DomainError("PosteriorFilter: time must not go backwards");
    if (t > time_) {
      probs_ = probs_ * expm(generator_ * (t - time_));
      normalise();
      time_ = t;
    }
  }

  /// Propagates to the event time, then conditions on an RFQ on `side`.
  void observe(double t, Side side) {
    advance(t);
    probs_ = probs_.cwiseProduct(side == Side::bid ? bid_rates_ : ask_rates_);
    normalise();
    ++events_;
  }

  void observe(const RfqEvent& e) { observe(e.time, e.side); }

 private:
  void normalise() {
    const double c = probs_.sum();
    if (!(c > 0.0) || !std::isfinite(c))
      throw NumericalError("filter: normalisation constant underflowed", events_);
    probs_ /= c;
  }

  MmppModel model_;
  Matrix generator_;
  Eigen::RowVectorXd bid_rates_;
  Eigen::RowVectorXd ask_rates_;
  double time_;
  Eigen::RowVectorXd probs_;
  long events_ = 0;
};

/// Posterior distribution at time t given all events of `stream` (which must
/// not contain events after t), starting from pi0 at time 0.
inline StateDistribution filter_posterior(const MmppModel& model, const RfqStream& stream,
                                          const StateDistribution& pi0, double t) {
  detail::check_stream_against(stream);
  if (!stream.empty() && stream.back().time > t)
    throw DomainError("filter_posterior: stream contains events after t");
  PosteriorFilter filter(model, pi0);
  for (const auto& e : stream) filter.observe(e);
  filter.advance(t);
  return filter.distribution();
}

/// Posterior at each time of an ascending grid. Events exactly at a grid time
/// are included in that row.
inline std::vector<StateDistribution> filter_on_grid(const MmppModel& model,
                                                     const RfqStream& stream,
                                                     const StateDistribution& pi0,
                                                     const std::vector<double>& grid) {
  detail::check_stream_against(stream);
  PosteriorFilter filter(model, pi0);
  std::vector<StateDistribution> out;
  out.reserve(grid.size());
  std::size_t next = 0;
  for (double t : grid) {
    while (next < stream.size() && stream[next].time <= t) filter.observe(stream[next++]);
    filter.advance(t);
    out.push_back(filter.distribution());
  }
  return out;
}

namespace detail {

/// Strongly connected components of the transition graph (edge i -> j when
/// q(i, j) > 0), Tarjan's algorithm. Returns the component id of each node.
inline std::vector<int> strongly_connected(const Matrix& q, int& count) {
  const int n = static_cast<int>(q.rows());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0;
  count = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w = 0; w < n; ++w) {
      if (w == v || !(q(v, w) > 0.0)) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = count;
      } while (w != v);
      ++count;
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  return comp;
}

}  // namespace detail

/// Stationary law of the chain with generator q. For a reducible chain the
/// returned law lives on the closed class containing the lowest state index,
/// and `*reducible` is set.
inline StateDistribution stationary_distribution(const Matrix& q, bool* reducible = nullptr) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n || n == 0) throw StructuralError("stationary_distribution: Q must be square");
  int count = 0;
  const std::vector<int> comp = detail::strongly_connected(q, count);
  if (reducible != nullptr) *reducible = count > 1;

  std::vector<int> members;
  if (count == 1) {
    for (int i = 0; i < n; ++i) members.push_back(i);
  } else {
    std::vector<bool> closed(count, true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && q(i, j) > 0.0 && comp[i] != comp[j]) closed[comp[i]] = false;
    int chosen = -1;
    for (int i = 0; i < n && chosen < 0; ++i)
      if (closed[comp[i]]) chosen = comp[i];
    for (int i = 0; i < n; ++i)
      if (comp[i] == chosen) members.push_back(i);
  }

  const int k = static_cast<int>(members.size());
  Matrix a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = q(members[j], members[i]);
  a.row(k - 1).setOnes();
  Vector rhs = Vector::Zero(k);
  rhs[k - 1] = 1.0;
  const auto lu = a.fullPivLu();
  Vector x = lu.solve(rhs);
  x += lu.solve(rhs - a * x);  // one step of iterative refinement
  x = x.cwiseMax(0.0);
  x /= x.sum();

  Vector pi = Vector::Zero(n);
  for (int i = 0; i < k; ++i) pi[members[i]] = x[i];
  return StateDistribution(pi);
}

inline StateDistribution stationary_distribution(const MmppModel& model,
                                                 bool* reducible = nullptr) {
  check_dimensions(model);
  return stationary_distribution(model.Q, reducible);
}

}  // namespace rfqprice
