#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "rfqprice/dynamics.hpp"
#include "rfqprice/error.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/mmpp.hpp"
#include "rfqprice/model.hpp"
#include "rfqprice/scurve.hpp"

namespace rfqprice {

/// Threefry-2x64 with 20 rounds (Salmon et al., Random123): a counter-based
/// generator, output = threefry(counter, key). The key is (seed, stream) and the
/// counter is (index, substream), so every component draws from its own
/// sequence and adding draws to one never shifts another.
class Threefry2x64 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint64_t, 2>;

  Threefry2x64(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
      : key_{seed, stream}, substream_(substream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  static Block block(Block ctr, const Block& key) {
    constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const std::uint64_t ks[3] = {key[0], key[1], 0x1BD11BDAA9FC1A22ULL ^ key[0] ^ key[1]};
    std::uint64_t x0 = ctr[0] + ks[0];
    std::uint64_t x1 = ctr[1] + ks[1];
    for (int r = 0; r < 20; ++r) {
      x0 += x1;
      x1 = (x1 << kRot[r % 8]) | (x1 >> (64 - kRot[r % 8]));
      x1 ^= x0;
      if (r % 4 == 3) {
        const std::uint64_t s = static_cast<std::uint64_t>(r / 4 + 1);
        x0 += ks[s % 3];
        x1 += ks[(s + 1) % 3] + s;
      }
    }
    return {x0, x1};
  }

  /// The two words of block `index` of this substream.
  Block at(std::uint64_t index) const { return block({index, substream_}, key_); }

  result_type operator()() {
    if (half_ == 0) buffer_ = at(index_++);
    const result_type out = buffer_[half_];
    half_ ^= 1;
    return out;
  }

  /// Uniform on (0, 1): 52 random bits, shifted off zero.
  static double to_unit(std::uint64_t x) { return (static_cast<double>(x >> 12) + 0.5) * 0x1p-52; }
  double uniform() { return to_unit((*this)()); }
  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  Block key_;
  std::uint64_t substream_;
  std::uint64_t index_ = 0;
  Block buffer_{};
  int half_ = 0;
};

/// Independent random streams of the simulator.
enum class RngStream : std::uint64_t { chain = 1, events = 2, brownian = 3, fills = 4, quotes = 5 };

inline Threefry2x64 make_rng(std::uint64_t seed, RngStream stream, std::uint64_t substream = 0) {
  return Threefry2x64(seed, static_cast<std::uint64_t>(stream), substream);
}

/// Share of the sector flow sent to one asset, per side, and optionally the
/// asset's own price dynamics and starting price.
struct AssetWeights {
  std::string asset_id;
  double beta_b = 1.0;
  double beta_a = 1.0;
  std::optional<PriceDynamicsParams> dynamics{};
  std::optional<double> initial_price{};
};

struct SimScenario {
  MmppModel model;
  std::vector<AssetWeights> assets{{"A", 1.0, 1.0}};
  PriceDynamicsParams dynamics;
  SCurve scurve;
  double horizon = 1.0;  // days
  std::uint64_t seed = 0;
  double price_step = 0.01;  // days
  double initial_price = 100.0;
  std::optional<int> initial_state;  // drawn from the stationary distribution when empty
};

inline void validate(const SimScenario& s) {
  check_dimensions(s.model);
  validate(s.model, true);
  if (!(s.horizon > 0.0) || !std::isfinite(s.horizon)) throw InputError("scenario: horizon must be positive");
  if (!(s.price_step > 0.0)) throw InputError("scenario: price_step must be positive");
  if (s.assets.empty()) throw InputError("scenario: at least one asset is required");
  double sb = 0.0, sa = 0.0;
  for (const auto& a : s.assets) {
    if (!(a.beta_b >= 0.0) || !(a.beta_a >= 0.0)) throw InputError("scenario: asset weights must be non-negative");
    sb += a.beta_b;
    sa += a.beta_a;
  }
  if (std::abs(sb - 1.0) > 1e-9 || std::abs(sa - 1.0) > 1e-9)
    throw InputError("scenario: asset weights must sum to 1 on each side");
  if (s.initial_state && (*s.initial_state < 0 || *s.initial_state >= s.model.n_states()))
    throw InputError("scenario: initial_state out of range");
  auto check = [](const PriceDynamicsParams& d) {
    if (!std::isfinite(d.kappa) || !(d.sigma >= 0.0) || !std::isfinite(d.sigma))
      throw InputError("scenario: kappa must be finite and sigma non-negative");
  };
  check(s.dynamics);
  for (const auto& a : s.assets)
    if (a.dynamics) check(*a.dynamics);
  if (!std::isfinite(s.initial_price)) throw InputError("scenario: initial_price must be finite");
}

/// Piecewise-constant state path: states[k] holds on [times[k], times[k + 1]),
/// the last segment ending at the horizon.
struct StatePath {
  std::vector<double> times;
  std::vector<int> states;
  double horizon = 0.0;

  std::size_t segments() const { return times.size(); }
  double segment_end(std::size_t k) const { return k + 1 < times.size() ? times[k + 1] : horizon; }
  int state_at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return states[static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - times.begin() - 1, 0))];
  }
};

namespace detail {

inline int draw_index(double u, const Vector& weights) {
  const double total = weights.sum();
  double acc = 0.0;
  int last = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    last = static_cast<int>(i);
    acc += weights[i];
    if (u * total < acc) return last;
  }
  return last;
}

}  // namespace detail

/// Exact simulation of the intensity chain: exponential holding times with rate
/// -Q_ss, jumps proportional to the off-diagonal entries of row s.
inline StatePath simulate_chain(const SimScenario& scenario) {
  validate(scenario);
  const Matrix& q = scenario.model.Q;
  Threefry2x64 rng = make_rng(scenario.seed, RngStream::chain);
  int s = scenario.initial_state ? *scenario.initial_state
                                 : detail::draw_index(rng.uniform(), stationary_distribution(scenario.model).probs);
  StatePath path;
  path.horizon = scenario.horizon;
  double t = 0.0;
  for (;;) {
    path.times.push_back(t);
    path.states.push_back(s);
    const double rate = -q(s, s);
    if (!(rate > 0.0)) break;
    t += rng.exponential(rate);
    if (t >= scenario.horizon) break;
    Vector row = q.row(s).transpose();
    row[s] = 0.0;
    s = detail::draw_index(rng.uniform(), row);
  }
  return path;
}

/// RFQs of every asset, merged and time-sorted. Asset i on side x arrives with
/// rate beta^{i,x} lambda^x(state); each (asset, side) pair has its own substream.
inline RfqStream simulate_rfqs(const SimScenario& scenario, const StatePath& path) {
  validate(scenario);
  const Vector rates[2] = {side_rates(scenario.model, Side::bid), side_rates(scenario.model, Side::ask)};
  RfqStream out;
  for (std::size_t i = 0; i < scenario.assets.size(); ++i) {
    const AssetWeights& asset = scenario.assets[i];
    for (int side = 0; side < 2; ++side) {
      const double beta = side == 0 ? asset.beta_b : asset.beta_a;
      Threefry2x64 rng = make_rng(scenario.seed, RngStream::events, 2 * i + static_cast<std::size_t>(side));
      for (std::size_t k = 0; k < path.segments(); ++k) {
        const double rate = beta * rates[side][path.states[k]];
        if (!(rate > 0.0)) continue;
        const double end = path.segment_end(k);
        // Memorylessness: arrivals restart at each segment boundary.
        for (double t = path.times[k] + rng.exponential(rate); t < end; t += rng.exponential(rate))
          out.push_back({t, side == 0 ? Side::bid : Side::ask, asset.asset_id});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RfqEvent& a, const RfqEvent& b) { return a.time < b.time; });
  return out;
}

namespace detail {

inline PriceSeries simulate_price(const SimScenario& scenario, const StatePath& path, const PriceDynamicsParams& dyn,
                                  double initial_price, std::uint64_t substream) {
  validate(scenario);
  const Vector drift = dyn.kappa * imbalance(scenario.model);
  std::vector<double> nodes = regular_grid(0.0, scenario.horizon, scenario.price_step);
  nodes.insert(nodes.end(), path.times.begin(), path.times.end());
  nodes.push_back(scenario.horizon);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Threefry2x64 rng = make_rng(scenario.seed, RngStream::brownian, substream);
  boost::random::normal_distribution<double> normal;
  PriceSeries out;
  out.time = nodes;
  out.mid.resize(nodes.size());
  out.mid[0] = initial_price;
  std::size_t k = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    while (k + 1 < path.segments() && path.times[k + 1] <= nodes[i - 1]) ++k;
    const double h = nodes[i] - nodes[i - 1];
    double move = drift[path.states[k]] * h;
    if (dyn.sigma > 0.0) move += dyn.sigma * std::sqrt(h) * normal(rng);
    out.mid[i] = out.mid[i - 1] + move;
  }
  return out;
}

}  // namespace detail

/// Mid price on the union of the regular grid and the state-change times:
/// dS = kappa (lambda^a - lambda^b)(state) dt + sigma dW, with the drift
/// integrated exactly because the state is constant between nodes.
inline PriceSeries simulate_price(const SimScenario& scenario, const StatePath& path) {
  return detail::simulate_price(scenario, path, scenario.dynamics, scenario.initial_price, 0);
}

/// Price path of one asset, with its own dynamics and starting price when set
/// and its own Brownian substream.
inline PriceSeries simulate_price(const SimScenario& scenario, const StatePath& path, std::size_t asset) {
  if (asset >= scenario.assets.size()) throw InputError("simulate_price: asset index out of range");
  const AssetWeights& a = scenario.assets[asset];
  return detail::simulate_price(scenario, path, a.dynamics.value_or(scenario.dynamics),
                                a.initial_price.value_or(scenario.initial_price), asset);
}

/// Fill outcome of each RFQ quoted at `margins` (units of delta0): event i is
/// filled with probability f(margin_i), drawn from block i of the fills stream.
inline std::vector<bool> simulate_fills(const SimScenario& scenario, const RfqStream& stream,
                                        const std::vector<double>& margins) {
  validate(scenario.scurve);
  if (margins.size() != stream.size()) throw InputError("simulate_fills: one margin per RFQ is required");
  const Threefry2x64 rng = make_rng(scenario.seed, RngStream::fills);
  std::vector<bool> out(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!std::isfinite(margins[i])) throw InputError("simulate_fills: non-finite margin");
    const double p = scenario.scurve(margins[i] * scenario.scurve.delta0);
    out[i] = Threefry2x64::to_unit(rng.at(i)[0]) < p;
  }
  return out;
}

struct Simulation {
  StatePath path;
  RfqStream rfqs;
  PriceSeries price;
};

inline Simulation simulate(const SimScenario& scenario) {
  Simulation out;
  out.path = simulate_chain(scenario);
  out.rfqs = simulate_rfqs(scenario, out.path);
  out.price = simulate_price(scenario, out.path);
  return out;
}

}  // namespace rfqprice
