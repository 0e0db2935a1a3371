#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rfqprice/error.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/mmpp.hpp"
#include "rfqprice/model.hpp"

namespace rfqprice {

/// Conditional expectations of the complete-data statistics given the RFQs.
/// The (m_b x m_a) matrices are indexed by (j_b, j_a); `transitions` is
/// indexed by lexicographic state.
struct EmSufficientStats {
  Matrix bid_counts;
  Matrix ask_counts;
  Matrix holding_times;
  Matrix transitions;
  double log_likelihood = 0.0;
};

/// E-step by forward/backward recursion. Per interval, the integrals
/// int exp(G s) e_j e_k' exp(G (dt - s)) ds contracted with the scaled forward
/// and backward vectors come out of one block exponential.
inline EmSufficientStats em_expectations(const MmppModel& model, const RfqStream& stream,
                                         const StateDistribution& pi0) {
  check_dimensions(model);
  validate(pi0, model.n_states());
  detail::check_stream_against(stream);

  const int n = model.n_states();
  const std::size_t len = stream.size();
  EmSufficientStats stats;
  stats.bid_counts = Matrix::Zero(model.m_b, model.m_a);
  stats.ask_counts = Matrix::Zero(model.m_b, model.m_a);
  stats.holding_times = Matrix::Zero(model.m_b, model.m_a);
  stats.transitions = Matrix::Zero(n, n);
  if (len == 0) return stats;

  const double shift = detail::generator_shift(model);
  const Matrix g = build_generator(model) + shift * Matrix::Identity(n, n);
  const Vector rb = side_rates(model, Side::bid);
  const Vector ra = side_rates(model, Side::ask);
  auto rates = [&](std::size_t r) -> const Vector& { return stream[r].side == Side::bid ? rb : ra; };

  std::vector<double> dt(len);
  std::vector<double> scale(len);
  std::vector<Eigen::RowVectorXd> alpha(len + 1);
  std::vector<Matrix> kernel(len);
  alpha[0] = pi0.probs.transpose();
  double prev = 0.0;
  for (std::size_t r = 0; r < len; ++r) {
    dt[r] = stream[r].time - prev;
    prev = stream[r].time;
    kernel[r] = expm(g * dt[r]);
    Eigen::RowVectorXd u = (alpha[r] * kernel[r]).cwiseProduct(rates(r).transpose());
    const double c = u.sum();
    if (!(c > 0.0) || !std::isfinite(c))
      throw NumericalError("em_expectations: forward scaling factor underflowed", static_cast<long>(r));
    scale[r] = c;
    alpha[r + 1] = u / c;
    stats.log_likelihood += std::log(c) - shift * dt[r];
  }

  Vector beta = Vector::Ones(n);
  for (std::size_t k = len; k-- > 0;) {
    // Occupancy at event k (alpha[k + 1] is the filtered vector just after it).
    const Vector occupancy = alpha[k + 1].transpose().cwiseProduct(beta);
    Matrix& counts = stream[k].side == Side::bid ? stats.bid_counts : stats.ask_counts;
    for (int s = 0; s < n; ++s) counts(model.bid_level(s), model.ask_level(s)) += occupancy[s];

    const Vector w = rates(k).cwiseProduct(beta);
    if (dt[k] > 0.0) {
      const Matrix m = expm_integral(g, w * alpha[k], g, dt[k]);
      for (int j = 0; j < n; ++j) {
        stats.holding_times(model.bid_level(j), model.ask_level(j)) += m(j, j) / scale[k];
        for (int l = 0; l < n; ++l)
          if (l != j) stats.transitions(j, l) += model.Q(j, l) * m(l, j) / scale[k];
      }
    }
    beta = kernel[k] * w / scale[k];
    if (!beta.allFinite())
      throw NumericalError("em_expectations: backward vector is not finite", static_cast<long>(k));
  }
  stats.bid_counts = stats.bid_counts.cwiseMax(0.0);
  stats.ask_counts = stats.ask_counts.cwiseMax(0.0);
  stats.holding_times = stats.holding_times.cwiseMax(0.0);
  stats.transitions = stats.transitions.cwiseMax(0.0);
  return stats;
}

/// Outcome of an M-step. `frozen` lists lexicographic states whose expected
/// holding time vanished; their parameters were kept from `previous`.
struct EmUpdate {
  MmppModel model;
  std::vector<int> frozen;
};

namespace detail {

inline constexpr double kZeroVisit = 1e-300;

}  // namespace detail

/// M-step of the unconstrained model.
inline EmUpdate em_update_general(const EmSufficientStats& stats, const MmppModel& previous) {
  check_dimensions(previous);
  const int mb = previous.m_b;
  const int ma = previous.m_a;
  const int n = mb * ma;
  if (stats.holding_times.rows() != mb || stats.holding_times.cols() != ma ||
      stats.transitions.rows() != n)
    throw StructuralError("em_update_general: statistics do not match the model dimensions");

  EmUpdate out{previous, {}};
  MmppModel& next = out.model;
  next.exchangeable = false;
  for (int jb = 0; jb < mb; ++jb) {
    const double time = stats.holding_times.row(jb).sum();
    if (time > detail::kZeroVisit) next.lambda_b[jb] = stats.bid_counts.row(jb).sum() / time;
  }
  for (int ja = 0; ja < ma; ++ja) {
    const double time = stats.holding_times.col(ja).sum();
    if (time > detail::kZeroVisit) next.lambda_a[ja] = stats.ask_counts.col(ja).sum() / time;
  }
  for (int j = 0; j < n; ++j) {
    const double time = stats.holding_times(previous.bid_level(j), previous.ask_level(j));
    if (time <= detail::kZeroVisit) {
      out.frozen.push_back(j);
      continue;
    }
    for (int k = 0; k < n; ++k) next.Q(j, k) = j == k ? 0.0 : stats.transitions(j, k) / time;
  }
  fix_diagonal(next.Q);
  return out;
}

/// M-step under exchangeability: bid statistics of level j are pooled with ask
/// statistics of level j, and transitions with their mirror images.
inline EmUpdate em_update_exchangeable(const EmSufficientStats& stats, const MmppModel& previous) {
  check_dimensions(previous);
  if (previous.m_b != previous.m_a)
    throw StructuralError("em_update_exchangeable: requires m_b == m_a");
  const int m = previous.m_b;
  const int n = m * m;
  if (stats.holding_times.rows() != m || stats.holding_times.cols() != m ||
      stats.transitions.rows() != n)
    throw StructuralError("em_update_exchangeable: statistics do not match the model dimensions");

  EmUpdate out{previous, {}};
  MmppModel& next = out.model;
  next.exchangeable = true;
  next.lambda_a = next.lambda_b;
  for (int j = 0; j < m; ++j) {
    const double count = stats.bid_counts.row(j).sum() + stats.ask_counts.col(j).sum();
    const double time = stats.holding_times.row(j).sum() + stats.holding_times.col(j).sum();
    if (time > detail::kZeroVisit) next.lambda_b[j] = next.lambda_a[j] = count / time;
  }
  const std::vector<int> mirror = swap_permutation(m);
  for (int j = 0; j < n; ++j) {
    const int jm = mirror[j];
    const double time = stats.holding_times(j / m, j % m) + stats.holding_times(jm / m, jm % m);
    if (time <= detail::kZeroVisit) {
      out.frozen.push_back(j);
      continue;
    }
    for (int k = 0; k < n; ++k)
      next.Q(j, k) = j == k ? 0.0 : (stats.transitions(j, k) + stats.transitions(jm, mirror[k])) / time;
  }
  fix_diagonal(next.Q);
  return out;
}

enum class EmVariant { general, exchangeable };

struct EmConfig {
  int m = 2;
  EmVariant variant = EmVariant::exchangeable;
  int max_iter = 500;
  double tol = 1e-7;
};

struct EmFitResult {
  MmppModel model;
  StateDistribution pi0;                // prior used throughout, in the final labelling
  std::vector<double> loglik_trace;     // log-likelihood of each iterate, starting with the initial model
  int iterations = 0;
  bool converged = false;
  std::vector<int> frozen_states;       // states frozen at the last update
};

namespace detail {

inline std::string dump(const MmppModel& model) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda_b=[" << model.lambda_b.transpose() << "] lambda_a=[" << model.lambda_a.transpose()
     << "] Q=[" << model.Q.reshaped<Eigen::RowMajor>().transpose() << "]";
  return os.str();
}

}  // namespace detail

/// EM from a given initial model. The prior is the stationary law of the
/// initial model and is held fixed (relabelled along with the states).
inline EmFitResult em_fit(const RfqStream& stream, const MmppModel& initial, const EmConfig& config) {
  if (stream.empty()) throw InputError("em_fit: stream is empty");
  if (config.max_iter < 0 || !(config.tol >= 0.0)) throw InputError("em_fit: invalid configuration");
  const bool exch = config.variant == EmVariant::exchangeable;
  if (exch && initial.m_b != initial.m_a) throw InputError("em_fit: exchangeable variant needs m_b == m_a");
  validate(initial);

  EmFitResult result;
  std::vector<int> perm;
  result.model = canonicalize(initial, &perm);
  result.model.exchangeable = exch;
  result.pi0 = stationary_distribution(result.model);

  double previous = 0.0;
  for (int it = 0;; ++it) {
    EmSufficientStats stats;
    try {
      stats = em_expectations(result.model, stream, result.pi0);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("em_fit: ") + e.what() + "; iterate " + std::to_string(it) +
                               ": " + detail::dump(result.model),
                           it);
    }
    const double ll = stats.log_likelihood;
    if (!std::isfinite(ll))
      throw NumericalError("em_fit: non-finite log-likelihood; " + detail::dump(result.model), it);
    result.loglik_trace.push_back(ll);
    if (it > 0 && std::abs(ll - previous) <= config.tol * std::abs(previous)) {
      result.converged = true;
      break;
    }
    if (it >= config.max_iter) break;
    previous = ll;

    EmUpdate up = exch ? em_update_exchangeable(stats, result.model)
                       : em_update_general(stats, result.model);
    result.frozen_states = up.frozen;
    result.model = canonicalize(up.model, &perm);
    result.pi0 = permute(result.pi0, perm);
    result.iterations = it + 1;
  }
  return result;
}

namespace detail {

/// Sample quantile with linear interpolation between order statistics
/// (the usual "type 7" definition).
inline double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - std::floor(h)) * (x[hi] - x[lo]);
}

inline Matrix birth_death(int m) {
  Matrix q = Matrix::Zero(m, m);
  for (int j = 0; j + 1 < m; ++j) q(j, j + 1) = q(j + 1, j) = 1.0;
  fix_diagonal(q);
  return q;
}

}  // namespace detail

/// Initial model from quantiles of daily RFQ counts (averaged over the two
/// sides): levels at evenly spaced probabilities between 0.1 and 0.9, and
/// independent bid/ask chains moving between adjacent levels at unit rate.
inline MmppModel init_from_quantiles(const RfqStream& stream, int m, bool exchangeable = true) {
  if (m < 1) throw InputError("init_from_quantiles: m must be >= 1");
  if (stream.empty()) throw InputError("init_from_quantiles: stream is empty");
  detail::check_stream_against(stream);
  const auto first = static_cast<long>(std::floor(stream.front().time));
  const auto last = static_cast<long>(std::floor(stream.back().time));
  if (last - first + 1 < 2)
    throw InputError("init_from_quantiles: the stream must span at least 2 days");

  std::vector<double> daily(static_cast<std::size_t>(last - first + 1), 0.0);
  for (const auto& e : stream) daily[static_cast<std::size_t>(std::floor(e.time)) - first] += 0.5;
  double mean = 0.0;
  for (double d : daily) mean += d;
  mean /= static_cast<double>(daily.size());

  Vector lambda(m);
  for (int j = 0; j < m; ++j) {
    const double p = m == 1 ? 0.5 : 0.1 + 0.8 * j / (m - 1);
    lambda[j] = std::max(detail::quantile(daily, p), 1e-3 * mean);
  }
  if (m == 1) lambda[0] = mean;

  const Matrix q1 = detail::birth_death(m);
  MmppModel model = make_exchangeable(lambda, independent_generator(q1, q1));
  model.exchangeable = exchangeable;
  return model;
}

/// em_fit with quantile initialisation.
inline EmFitResult em_fit(const RfqStream& stream, const EmConfig& config) {
  return em_fit(stream, init_from_quantiles(stream, config.m, config.variant == EmVariant::exchangeable),
                config);
}

struct AssetBeta {
  double beta_b = 0.0;
  double beta_a = 0.0;
};

struct BetaEstimate {
  std::map<std::string, AssetBeta> betas;
  bool uniform_bid = false;  // no bid events anywhere: uniform weights used
  bool uniform_ask = false;
};

/// Share of each asset in the total number of RFQs, side by side.
inline BetaEstimate estimate_betas(const std::map<std::string, RfqStream>& streams) {
  if (streams.empty()) throw InputError("estimate_betas: no assets");
  std::map<std::string, std::pair<double, double>> counts;
  double total_b = 0.0;
  double total_a = 0.0;
  for (const auto& [id, s] : streams) {
    auto& c = counts[id];
    for (const auto& e : s) (e.side == Side::bid ? c.first : c.second) += 1.0;
    total_b += c.first;
    total_a += c.second;
  }
  BetaEstimate out;
  out.uniform_bid = total_b == 0.0;
  out.uniform_ask = total_a == 0.0;
  const double uniform = 1.0 / static_cast<double>(streams.size());
  for (const auto& [id, c] : counts)
    out.betas[id] = {out.uniform_bid ? uniform : c.first / total_b,
                     out.uniform_ask ? uniform : c.second / total_a};
  return out;
}

/// Time-ordered union of several streams, asset identity dropped.
inline RfqStream merge_streams(const std::vector<RfqStream>& streams) {
  RfqStream out;
  for (const auto& s : streams) {
    validate(s);
    out.insert(out.end(), s.begin(), s.end());
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RfqEvent& x, const RfqEvent& y) { return x.time < y.time; });
  for (auto& e : out) e.asset_id.clear();
  return out;
}

inline RfqStream merge_streams(const std::map<std::string, RfqStream>& streams) {
  std::vector<RfqStream> v;
  for (const auto& [id, s] : streams) v.push_back(s);
  return merge_streams(v);
}

/// Splits a stream by asset identifier.
inline std::map<std::string, RfqStream> split_by_asset(const RfqStream& stream) {
  std::map<std::string, RfqStream> out;
  for (const auto& e : stream) out[e.asset_id].push_back(e);
  return out;
}

/// Log-likelihood of the multi-asset model in which asset i has intensities
/// beta_b[i] lambda_b and beta_a[i] lambda_a driven by one common chain.
/// Evaluated directly on the joint event sequence, without factorisation.
inline double log_likelihood_multi_asset(const MmppModel& model,
                                         const std::map<std::string, RfqStream>& streams,
                                         const std::map<std::string, AssetBeta>& betas,
                                         const StateDistribution& pi0) {
  check_dimensions(model);
  validate(pi0, model.n_states());
  double sum_b = 0.0;
  double sum_a = 0.0;
  for (const auto& [id, s] : streams) {
    const auto it = betas.find(id);
    if (it == betas.end()) throw InputError("log_likelihood_multi_asset: no weight for asset " + id);
    sum_b += it->second.beta_b;
    sum_a += it->second.beta_a;
  }
  RfqStream all;
  for (const auto& [id, s] : streams) all.insert(all.end(), s.begin(), s.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const RfqEvent& x, const RfqEvent& y) { return x.time < y.time; });

  const Vector rb = side_rates(model, Side::bid);
  const Vector ra = side_rates(model, Side::ask);
  Matrix g = model.Q;
  g.diagonal() -= sum_b * rb + sum_a * ra;
  Eigen::RowVectorXd alpha = pi0.probs.transpose();
  double loglik = 0.0;
  double prev = 0.0;
  for (std::size_t r = 0; r < all.size(); ++r) {
    const AssetBeta& b = betas.at(all[r].asset_id);
    alpha = alpha * expm(g * (all[r].time - prev));
    prev = all[r].time;
    const Vector mult = all[r].side == Side::bid ? Vector(b.beta_b * rb) : Vector(b.beta_a * ra);
    alpha = alpha.cwiseProduct(mult.transpose());
    const double c = alpha.sum();
    if (!(c > 0.0) || !std::isfinite(c))
      throw NumericalError("log_likelihood_multi_asset: scaling factor underflowed", static_cast<long>(r));
    alpha /= c;
    loglik += std::log(c);
  }
  return loglik;
}

}  // namespace rfqprice
