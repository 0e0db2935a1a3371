#pragma once

// Published reference values for four corporate-bond sectors and sixteen
// bonds (four per sector): fitted MMPP parameters, per-bond dynamics, and the
// micro-prices and fair transfer prices computed from them.

#include <array>
#include <string>

#include "rfqprice/hjb.hpp"
#include "rfqprice/model.hpp"

namespace refdata {

struct SectorParams {
  double lambda_low;
  double lambda_high;
  std::array<std::array<double, 4>, 4> q;
};

inline constexpr std::array<SectorParams, 4> kSectors{{
    {10.83, 73.03,
     {{{-14.01, 4.37, 4.37, 5.27},
       {19.32, -60.91, 12.54, 29.05},
       {19.32, 12.54, -60.91, 29.05},
       {23.67, 15.00, 15.00, -53.67}}}},
    {8.44, 58.28,
     {{{-4.55, 1.00, 1.00, 2.55},
       {18.53, -28.31, 0.13, 9.65},
       {18.53, 0.13, -28.31, 9.65},
       {14.77, 16.73, 16.73, -48.23}}}},
    {15.73, 81.78,
     {{{-9.98, 2.79, 2.79, 4.40},
       {20.53, -23.73, 0.02, 3.18},
       {20.53, 0.02, -23.73, 3.18},
       {9.87, 4.17, 4.17, -18.21}}}},
    {7.33, 28.32,
     {{{-1.67, 0.48, 0.48, 0.71},
       {1.92, -2.02, 0.00, 0.10},
       {1.92, 0.00, -2.02, 0.10},
       {0.84, 0.11, 0.11, -1.06}}}},
}};

inline rfqprice::MmppModel sector_model(int sector) {
  const auto& s = kSectors.at(static_cast<std::size_t>(sector));
  rfqprice::Matrix q(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) q(i, j) = s.q[i][j];
  rfqprice::Vector lambda(2);
  lambda << s.lambda_low, s.lambda_high;
  return rfqprice::make_exchangeable(lambda, q);
}

struct Bond {
  std::string name;
  int sector;     // 0-based
  double beta;    // share of the sector's RFQs
  double kappa;   // $ per unit of intensity imbalance
  double kappa_stdev;
  double sigma;   // $ / sqrt(day)
  double mid;
  double bid;     // composite
  double ask;     // composite
  double micro_21;  // micro-price, all mass on (high bid, low ask)
  double micro_12;  // micro-price, all mass on (low bid, high ask)
  double gamma_euler;
  double gamma_quad;
  double ftp_21_euler;
  double ftp_21_quad;
  double ftp_12_euler;
  double ftp_12_quad;
};

// Two printed values are obvious typos and are replaced here: the composite
// bid of bond 1.2 (printed 96.514 in one place, 96.614 in another; the latter
// is consistent with the mid) and the quadratic FTP of bond 3.2 in state
// (1,2) (printed 94.422; the Euler value 92.423 is used).
inline const std::array<Bond, 16> kBonds{{
    {"1.1", 0, .10, 2.29, .55, 18.39, 103.593, 103.098, 104.088, 101.652, 105.534, 4.5e-9, 5.1e-9, 103.458, 103.458, 103.728, 103.729},
    {"1.2", 0, .10, .25, .49, 15.43, 97.107, 96.614, 97.600, 96.892, 97.322, 8.9e-9, 9.1e-9, 97.092, 97.092, 97.122, 97.122},
    {"1.3", 0, .06, 2.83, 1.66, 22.55, 99.146, 98.631, 99.661, 96.752, 101.541, 4.4e-8, 5.2e-8, 99.038, 99.037, 99.254, 99.255},
    {"1.4", 0, .05, .33, 2.23, 19.75, 94.187, 93.049, 95.325, 93.909, 94.465, 8.5e-7, 1.6e-6, 94.167, 94.172, 94.207, 94.202},
    {"2.1", 1, .19, .57, .19, 13.75, 99.823, 99.291, 100.355, 98.819, 100.827, 6.1e-8, 6.9e-8, 99.682, 99.681, 99.964, 99.965},
    {"2.2", 1, .14, .90, .22, 16.05, 99.270, 98.603, 99.936, 97.700, 100.840, 7.0e-8, 8.3e-8, 99.106, 99.104, 99.433, 99.435},
    {"2.3", 1, .11, .65, .16, 9.80, 99.649, 98.815, 100.483, 98.513, 100.784, 1.1e-7, 1.2e-7, 99.554, 99.553, 99.743, 99.744},
    {"2.4", 1, .10, .86, .68, 20.36, 98.903, 97.570, 100.235, 97.970, 99.835, 1.3e-7, 1.6e-7, 98.824, 98.824, 98.981, 98.981},
    {"3.1", 2, .11, .61, .34, 9.93, 95.338, 94.674, 96.001, 93.634, 97.041, 4.9e-7, 5.6e-7, 95.195, 95.193, 95.480, 95.482},
    {"3.2", 2, .09, .05, .16, 18.41, 92.394, 91.860, 92.927, 92.252, 92.535, 6.1e-7, 7.6e-7, 92.364, 92.365, 92.423, 92.423},
    {"3.3", 2, .06, .11, .08, 12.23, 97.137, 96.484, 97.790, 96.819, 97.455, 7.0e-7, 9.6e-7, 97.104, 97.107, 97.169, 97.166},
    {"3.4", 2, .05, .08, .11, 18.68, 94.839, 94.220, 95.458, 94.810, 94.867, 4.3e-7, 7.7e-7, 94.815, 94.824, 94.860, 94.851},
    {"4.1", 3, .21, .04, .02, 13.00, 102.632, 102.151, 103.112, 102.252, 103.011, 1.2e-7, 1.3e-7, 102.523, 102.525, 102.740, 102.738},
    {"4.2", 3, .12, .01, .01, 24.09, 104.785, 104.327, 105.242, 104.717, 104.853, 1.3e-7, 1.7e-7, 104.691, 104.701, 104.878, 104.868},
    {"4.3", 3, .12, .08, .04, 16.91, 104.824, 104.293, 105.355, 103.994, 105.654, 1.8e-7, 2.2e-7, 104.697, 104.706, 104.951, 104.942},
    {"4.4", 3, .07, .09, .05, 12.67, 108.438, 107.991, 108.884, 107.500, 109.375, 1.5e-8, 1.6e-8, 108.377, 108.377, 108.498, 108.498},
}};

// Fill-probability curve fitted on the pooled quote data.
inline constexpr double kAlphaLogit = -0.7;
inline constexpr double kBetaLogit = 3.1;

// Transaction size behind the published risk-aversion levels.
inline constexpr double kTradeSize = 1e4;

// Bond-level chain: the sector's hidden state with intensities scaled by the
// bond's share of the sector flow.
inline rfqprice::MmppModel bond_model(const Bond& b) {
  return rfqprice::asset_model(sector_model(b.sector), b.beta, b.beta);
}

// Theoretical market maker for one bond: the composite spread scales the
// fill-probability curve, risk limit of ten trades.
inline rfqprice::MarketMakerConfig bond_market_maker(const Bond& b, double gamma) {
  rfqprice::MarketMakerConfig c;
  c.gamma = gamma;
  c.z = kTradeSize;
  c.q_bar = 10 * kTradeSize;
  c.dynamics = {b.kappa, b.kappa_stdev, b.sigma};
  c.bid_curve = rfqprice::SCurve{kAlphaLogit, kBetaLogit, b.ask - b.bid};
  c.ask_curve = c.bid_curve;
  return c;
}

}  // namespace refdata
