#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "rfqprice/rfqprice.hpp"

namespace fs = std::filesystem;
using namespace rfqprice;
using io::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write file");
  return out;
}

json load_json(const std::string& path) {
  std::ifstream in = open_in(path);
  return io::read_json(in, path);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  // nlohmann prints doubles with the shortest round-trip representation.
  out << j.dump(2) << '\n';
}

/// Options shared by the subcommands. Flags override the config file.
struct Options {
  std::string config;
  std::string model;
  std::string input;
  std::string prices;
  std::string posterior;
  std::string out_dir;
  std::string method;
  std::optional<std::uint64_t> seed;
  std::optional<double> max_horizon;
  std::optional<double> gamma;
  std::optional<double> target_spread;
  bool filled_only = false;
  bool grid = false;
  int jobs = 1;
};

io::PipelineConfig pipeline_config(const Options& o) {
  io::PipelineConfig c = o.config.empty() ? io::PipelineConfig{} : io::config_from_json(load_json(o.config), o.config);
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (!o.method.empty()) c.method = o.method;
  if (o.max_horizon) c.max_horizon = *o.max_horizon;
  if (o.gamma) c.gamma = *o.gamma;
  if (o.target_spread) c.target_spread = *o.target_spread;
  io::validate(c);
  return c;
}

io::ModelFile load_model(const Options& o) {
  if (o.model.empty()) throw InputError("--model is required");
  return io::model_file_from_json(load_json(o.model), o.model);
}

std::vector<io::RfqRecord> load_rfqs(const Options& o) {
  if (o.input.empty()) throw InputError("--input is required");
  std::ifstream in = open_in(o.input);
  return io::read_rfq_csv(in, o.input, o.filled_only);
}

StateDistribution prior(const io::ModelFile& f) { return f.pi0 ? *f.pi0 : stationary_distribution(f.model); }

// ------------------------------------------------------------------ simulate

int cmd_simulate(const Options& o) {
  if (o.config.empty()) throw InputError("simulate: --config <scenario.json> is required");
  io::ScenarioFile file = io::scenario_from_json(load_json(o.config), o.config);
  SimScenario& s = file.scenario;
  if (o.seed) s.seed = *o.seed;
  const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);

  const StatePath path = simulate_chain(s);
  const RfqStream rfqs = simulate_rfqs(s, path);
  std::map<std::string, PriceSeries> prices;
  for (std::size_t i = 0; i < s.assets.size(); ++i) prices[s.assets[i].asset_id] = simulate_price(s, path, i);

  std::vector<io::RfqRecord> records;
  for (const auto& e : rfqs) {
    io::RfqRecord r;
    r.event = e;
    const PriceSeries& p = prices.at(e.asset_id);
    r.composite_mid = resample(p, {e.time})[0];
    if (file.has_scurve) {
      r.composite_bid = *r.composite_mid - 0.5 * s.scurve.delta0;
      r.composite_ask = *r.composite_mid + 0.5 * s.scurve.delta0;
    }
    records.push_back(r);
  }
  if (file.margin_range) {
    Threefry2x64 rng = make_rng(s.seed, RngStream::quotes);
    std::vector<double> margins;
    for (std::size_t i = 0; i < rfqs.size(); ++i)
      margins.push_back(file.margin_range->first + (file.margin_range->second - file.margin_range->first) * rng.uniform());
    const std::vector<bool> fills = simulate_fills(s, rfqs, margins);
    for (std::size_t i = 0; i < records.size(); ++i) {
      records[i].quoted_margin = margins[i];
      records[i].filled = fills[i];
    }
  }
  {
    std::ofstream out = open_out(dir / "rfqs.csv");
    io::write_rfq_csv(out, records);
  }
  {
    std::ofstream out = open_out(dir / "prices.csv");
    io::write_price_csv(out, prices);
  }
  {
    std::ofstream out = open_out(dir / "states.csv");
    io::write_row(out, {"time", "state", "j_b", "j_a"});
    for (std::size_t k = 0; k < path.segments(); ++k) {
      const int st = path.states[k];
      io::write_row(out, {io::format_real(path.times[k]), std::to_string(st), std::to_string(s.model.bid_level(st) + 1),
                          std::to_string(s.model.ask_level(st) + 1)});
    }
  }
  std::cout << "simulated " << rfqs.size() << " RFQs over " << s.horizon << " days, " << path.segments()
            << " state segments -> " << dir.string() << "\n";
  return 0;
}

// ------------------------------------------------------------------ estimate

int cmd_estimate(const Options& o) {
  const io::PipelineConfig cfg = pipeline_config(o);
  const std::vector<io::RfqRecord> records = load_rfqs(o);
  if (records.empty()) throw InputError(o.input + ": no RFQ rows");
  const RfqStream all = io::events(records);
  const std::map<std::string, RfqStream> by_asset = split_by_asset(all);
  const RfqStream merged = merge_streams(by_asset);

  EmConfig em;
  em.m = cfg.m;
  em.variant = cfg.em_variant;
  em.max_iter = cfg.max_iter;
  em.tol = cfg.tol;
  const EmFitResult fit = em_fit(merged, em);
  const BetaEstimate betas = estimate_betas(by_asset);

  io::ModelFile out;
  out.model = fit.model;
  out.pi0 = fit.pi0;
  json report = {{"events", merged.size()},
                 {"assets", by_asset.size()},
                 {"iterations", fit.iterations},
                 {"converged", fit.converged},
                 {"loglik_trace", fit.loglik_trace},
                 {"frozen_states", fit.frozen_states}};

  // Prices: an explicit price file, else the composite mids of the RFQ rows.
  std::map<std::string, PriceSeries> prices;
  if (!o.prices.empty()) {
    std::ifstream in = open_in(o.prices);
    prices = io::read_price_csv(in, o.prices);
  } else {
    for (const auto& r : records)
      if (r.composite_mid) {
        prices[r.event.asset_id].time.push_back(r.event.time);
        prices[r.event.asset_id].mid.push_back(*r.composite_mid);
      }
  }
  const Vector drift_values = drift_value_finite(out.model, cfg.kappa_step);
  const StateDistribution pi0 = prior(out);
  json dynamics = json::object();
  for (const auto& [id, b] : betas.betas) {
    io::AssetInfo a;
    a.beta_b = b.beta_b;
    a.beta_a = b.beta_a;
    json d = json::object();
    if (auto it = prices.find(id); it != prices.end()) {
      const PriceSeries& p = it->second;
      try {
        a.sigma = estimate_sigma(p);
      } catch (const InputError& e) {
        d["sigma_error"] = e.what();
      }
      try {
        const std::vector<double> grid = regular_grid(p.time.front(), p.time.back(), cfg.kappa_step);
        const PriceDynamicsParams k =
            estimate_kappa(resample(p, grid), filter_on_grid(out.model, merged, pi0, grid), drift_values);
        a.kappa = k.kappa;
        a.kappa_stdev = k.kappa_stdev;
      } catch (const InputError& e) {
        d["kappa_error"] = e.what();
      }
    } else {
      d["kappa_error"] = "no price data for this asset";
    }
    for (auto r = records.rbegin(); r != records.rend(); ++r)
      if (r->event.asset_id == id && r->composite_bid && r->composite_ask) {
        a.composite_bid = r->composite_bid;
        a.composite_ask = r->composite_ask;
        break;
      }
    if (!d.empty()) dynamics[id] = d;
    out.assets[id] = a;
  }
  if (!dynamics.empty()) report["dynamics_warnings"] = dynamics;

  std::vector<QuoteOutcome> quotes;
  for (const auto& r : records)
    if (r.quoted_margin && r.filled) quotes.push_back({*r.quoted_margin, *r.filled});
  if (!quotes.empty()) {
    try {
      const SCurveFit s = fit_scurve(quotes);
      out.scurve = s.curve;
      report["scurve"] = {{"alpha", s.curve.alpha}, {"beta", s.curve.beta},     {"alpha_stderr", s.alpha_stderr},
                          {"beta_stderr", s.beta_stderr}, {"quotes", quotes.size()}, {"iterations", s.iterations}};
    } catch (const InputError& e) {
      report["scurve_error"] = e.what();
    }
  }

  const fs::path dir = cfg.out_dir;
  write_json(dir / "model.json", io::to_json(out));
  write_json(dir / "estimation_report.json", report);
  std::cout << "EM on " << merged.size() << " events: " << fit.iterations << " iterations, log-likelihood "
            << fit.loglik_trace.back() << (fit.converged ? "" : " (not converged)") << " -> " << dir.string()
            << "\n";
  return 0;
}

// -------------------------------------------------------------------- filter

int cmd_filter(const Options& o) {
  const io::PipelineConfig cfg = pipeline_config(o);
  const io::ModelFile f = load_model(o);
  const RfqStream merged = merge_streams(split_by_asset(io::events(load_rfqs(o))));
  const double end = cfg.horizon ? *cfg.horizon : (merged.empty() ? 0.0 : merged.back().time);
  std::vector<double> grid = regular_grid(0.0, end, cfg.filter_step);
  if (grid.back() < end) grid.push_back(end);
  const std::vector<StateDistribution> post = filter_on_grid(f.model, merged, prior(f), grid);
  std::vector<io::PosteriorRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i], post[i]});
  std::ofstream out = open_out(fs::path(cfg.out_dir) / "posterior.csv");
  io::write_posterior_csv(out, f.model, rows);
  std::cout << "posterior on " << grid.size() << " times -> " << (fs::path(cfg.out_dir) / "posterior.csv").string()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- microprice

/// The two fully imbalanced states: lowest bid / highest ask intensity and the reverse.
std::pair<int, int> extreme_states(const MmppModel& m) {
  return {m.index(0, m.m_a - 1), m.index(m.m_b - 1, 0)};
}

/// Mass p on state `x`, q on state `y`, the rest spread over the symmetric
/// states in proportion to their stationary weight.
StateDistribution sweep_point(const MmppModel& m, double p, double q) {
  const auto [x, y] = extreme_states(m);
  Vector w = spread_weights(m, SpreadWeighting::symmetric_stationary);
  w[x] = 0.0;
  w[y] = 0.0;
  Vector out = (1.0 - p - q) * w / w.sum();
  out[x] += p;
  out[y] += q;
  return StateDistribution(out);
}

template <class F>
void for_each_sweep_point(int n, F&& f) {
  for (int i = 0; i < n; ++i)
    for (int k = 0; k + i < n; ++k) {
      const double p = static_cast<double>(i) / (n - 1);
      const double q = static_cast<double>(k) / (n - 1);
      f(p, std::min(q, 1.0 - p));
    }
}

double asset_kappa(const std::string& id, const io::AssetInfo& a) {
  if (!a.kappa) throw InputError("asset " + id + " has no kappa; run 'estimate' with price data to obtain it");
  return *a.kappa;
}

int cmd_microprice(const Options& o) {
  const io::PipelineConfig cfg = pipeline_config(o);
  const io::ModelFile f = load_model(o);
  const DriftValueTable table = drift_value_asymptotic(f.model);
  const fs::path dir = cfg.out_dir;
  if (o.grid) {
    const auto [x, y] = extreme_states(f.model);
    std::ofstream out = open_out(dir / "microprice_grid.csv");
    io::write_row(out, {"asset_id", io::state_column(f.model.bid_level(x), f.model.ask_level(x)),
                        io::state_column(f.model.bid_level(y), f.model.ask_level(y)), "mid", "micro_price",
                        "micro_stdev"});
    for (const auto& [id, a] : f.assets) {
      if (!a.composite_bid) throw InputError("asset " + id + " has no composite quotes for the grid mid");
      const double kappa = asset_kappa(id, a);
      for_each_sweep_point(cfg.grid_points, [&](double p, double q) {
        const PriceEstimate e = micro_price(a.mid(), kappa, table, sweep_point(f.model, p, q));
        io::write_row(out, {id, io::format_real(p), io::format_real(q), io::format_real(a.mid()),
                            io::format_real(e.mean), io::format_real(e.stdev)});
      });
    }
    std::cout << "micro-price grid -> " << (dir / "microprice_grid.csv").string() << "\n";
    return 0;
  }
  if (o.prices.empty() || o.posterior.empty())
    throw InputError("microprice: --prices and --posterior are required (or use --grid)");
  std::ifstream pin = open_in(o.prices);
  const auto prices = io::read_price_csv(pin, o.prices);
  std::ifstream qin = open_in(o.posterior);
  const auto post = io::read_posterior_csv(qin, o.posterior, f.model);
  std::vector<double> post_times;
  for (const auto& r : post) post_times.push_back(r.time);
  const StateDistribution pi0 = prior(f);
  std::ofstream out = open_out(dir / "microprice.csv");
  io::write_row(out, {"time", "asset_id", "mid", "micro_price", "micro_stdev"});
  for (const auto& [id, series] : prices) {
    const auto it = f.assets.find(id);
    if (it == f.assets.end()) throw InputError(o.prices + ": asset " + id + " is not in the model");
    const double kappa = asset_kappa(id, it->second);
    for (std::size_t i = 0; i < series.size(); ++i) {
      // Latest posterior at or before the price time.
      const auto k = std::upper_bound(post_times.begin(), post_times.end(), series.time[i]) - post_times.begin();
      const StateDistribution& pi = k == 0 ? pi0 : post[static_cast<std::size_t>(k - 1)].pi;
      const PriceEstimate e = micro_price(series.mid[i], kappa, table, pi);
      io::write_row(out, {io::format_real(series.time[i]), id, io::format_real(series.mid[i]), io::format_real(e.mean),
                          io::format_real(e.stdev)});
    }
  }
  std::cout << "micro-prices -> " << (dir / "microprice.csv").string() << "\n";
  return 0;
}

// ----------------------------------------------------------------------- ftp

struct FtpTask {
  std::string asset_id;
  SolverMethod method;
};

struct FtpResult {
  double gamma = 0.0;
  double horizon = 0.0;
  ZeroInventoryQuotes quotes;
  std::string error;
  bool numerical = false;
};

int cmd_ftp(const Options& o) {
  const io::PipelineConfig cfg = pipeline_config(o);
  const io::ModelFile f = load_model(o);
  if (!f.scurve) throw InputError(o.model + ": the model has no S-curve; run 'estimate' on data with quotes and fills");
  std::vector<SolverMethod> methods;
  if (cfg.method != "quad") methods.push_back(SolverMethod::euler);
  if (cfg.method != "euler") methods.push_back(SolverMethod::quad);

  std::vector<FtpTask> tasks;
  for (const auto& [id, a] : f.assets) {
    if (!a.composite_bid) throw InputError("asset " + id + " has no composite quotes (mid and delta0 are required)");
    asset_kappa(id, a);
    if (!a.sigma) throw InputError("asset " + id + " has no sigma; run 'estimate' with price data to obtain it");
    for (SolverMethod m : methods) tasks.push_back({id, m});
  }
  if (tasks.empty()) throw InputError(o.model + ": no assets");

  auto run = [&](const FtpTask& t) {
    const io::AssetInfo& a = f.assets.at(t.asset_id);
    FtpResult r;
    try {
      MarketMakerConfig mm;
      mm.z = cfg.z;
      mm.q_bar = cfg.q_bar * cfg.z;
      mm.time_step = cfg.time_step;
      mm.dynamics = {*a.kappa, a.kappa_stdev.value_or(0.0), *a.sigma};
      mm.bid_curve = mm.ask_curve = SCurve{f.scurve->alpha, f.scurve->beta, a.spread()};
      const MmppModel model = asset_model(f.model, a.beta_b, a.beta_a);
      ErgodicOptions erg;
      erg.max_horizon = cfg.max_horizon;
      std::optional<double> gamma = cfg.gamma;
      if (auto it = cfg.asset_gamma.find(t.asset_id); it != cfg.asset_gamma.end()) gamma = it->second;
      if (gamma) {
        mm.gamma = *gamma;
        const ErgodicQuotes q = ergodic_quotes(model, mm, t.method, erg);
        r.gamma = *gamma;
        r.horizon = q.horizon;
        r.quotes = q.quotes;
      } else {
        double target = cfg.target_spread.value_or(a.spread());
        if (auto it = cfg.asset_target_spread.find(t.asset_id); it != cfg.asset_target_spread.end())
          target = it->second;
        CalibrationOptions cal;
        cal.ergodic = erg;
        const GammaCalibration c = calibrate_gamma(model, mm, target, t.method, cal);
        r.gamma = c.gamma;
        r.horizon = c.quotes.horizon;
        r.quotes = c.quotes.quotes;
      }
    } catch (const NumericalError& e) {
      r.error = "asset " + t.asset_id + " (" + to_string(t.method) + "): " + e.what();
      r.numerical = true;
    } catch (const Error& e) {
      r.error = "asset " + t.asset_id + " (" + to_string(t.method) + "): " + e.what();
    }
    return r;
  };

  // Per-asset solves are independent: a small pool works through them.
  std::vector<FtpResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) {
      results[i] = run(tasks[i]);
      std::lock_guard<std::mutex> lock(log);
      std::cerr << "ftp: " << tasks[i].asset_id << " " << to_string(tasks[i].method)
                << (results[i].error.empty() ? " done" : " failed") << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < std::max(1, o.jobs); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& r : results)
    if (!r.error.empty()) {
      if (r.numerical) throw NumericalError(r.error);
      throw InputError(r.error);
    }

  const fs::path dir = cfg.out_dir;
  const MmppModel& m = f.model;
  {
    std::ofstream out = open_out(dir / "ftp.csv");
    io::write_row(out, {"asset_id", "method", "gamma", "horizon", "mid", "delta0", "state", "bid_margin", "ask_margin",
                        "skew", "ftp"});
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const io::AssetInfo& a = f.assets.at(tasks[i].asset_id);
      const ZeroInventoryQuotes& q = results[i].quotes;
      for (int s = 0; s < m.n_states(); ++s) {
        const int jb = m.bid_level(s), ja = m.ask_level(s);
        const double skew = q.ask(jb, ja) - q.bid(jb, ja);
        io::write_row(out, {tasks[i].asset_id, to_string(tasks[i].method), io::format_real(results[i].gamma),
                            io::format_real(results[i].horizon), io::format_real(a.mid()), io::format_real(a.spread()),
                            io::state_column(jb, ja), io::format_real(q.bid(jb, ja)), io::format_real(q.ask(jb, ja)),
                            io::format_real(skew), io::format_real(a.mid() + 0.5 * skew)});
      }
    }
  }
  {
    const auto [x, y] = extreme_states(m);
    std::ofstream out = open_out(dir / "ftp_grid.csv");
    io::write_row(out, {"asset_id", "method", io::state_column(m.bid_level(x), m.ask_level(x)),
                        io::state_column(m.bid_level(y), m.ask_level(y)), "ftp", "ftp_stdev"});
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const io::AssetInfo& a = f.assets.at(tasks[i].asset_id);
      const SkewTable table{results[i].quotes.skew()};
      for_each_sweep_point(cfg.grid_points, [&](double p, double q) {
        const FtpEstimate e = ftp(a.mid(), table, sweep_point(m, p, q));
        io::write_row(out, {tasks[i].asset_id, to_string(tasks[i].method), io::format_real(p), io::format_real(q),
                            io::format_real(e.mean), io::format_real(e.stdev)});
      });
    }
  }
  if (!o.posterior.empty()) {
    std::ifstream in = open_in(o.posterior);
    const auto post = io::read_posterior_csv(in, o.posterior, m);
    std::ofstream out = open_out(dir / "ftp_posterior.csv");
    io::write_row(out, {"time", "asset_id", "method", "ftp", "ftp_stdev"});
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const io::AssetInfo& a = f.assets.at(tasks[i].asset_id);
      const SkewTable table{results[i].quotes.skew()};
      for (const auto& row : post) {
        const FtpEstimate e = ftp(a.mid(), table, row.pi);
        io::write_row(out, {io::format_real(row.time), tasks[i].asset_id, to_string(tasks[i].method),
                            io::format_real(e.mean), io::format_real(e.stdev)});
      }
    }
  }
  std::cout << "FTPs for " << f.assets.size() << " assets (" << cfg.method << ") -> " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liquidity-state estimation, micro-prices and fair transfer prices from RFQ flow"};
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* c) {
    c->add_option("--config", o.config, "JSON configuration (scenario for simulate)");
    c->add_option("--out-dir", o.out_dir, "output directory");
  };

  CLI::App* sim = app.add_subcommand("simulate", "simulate RFQs and prices from a scenario");
  common(sim);
  sim->add_option("--seed", o.seed, "override the scenario seed");

  CLI::App* est = app.add_subcommand("estimate", "fit the MMPP, asset weights, kappa, sigma and S-curve");
  common(est);
  est->add_option("--input", o.input, "RFQ CSV")->required();
  est->add_option("--prices", o.prices, "price CSV (default: composite_mid column of the RFQ file)");
  est->add_flag("--filled-only", o.filled_only, "keep only RFQs that led to a trade");

  CLI::App* fil = app.add_subcommand("filter", "posterior state probabilities on a time grid");
  common(fil);
  fil->add_option("--model", o.model, "model JSON")->required();
  fil->add_option("--input", o.input, "RFQ CSV")->required();
  fil->add_flag("--filled-only", o.filled_only, "keep only RFQs that led to a trade");

  CLI::App* mic = app.add_subcommand("microprice", "micro-prices from posteriors, or a probability sweep");
  common(mic);
  mic->add_option("--model", o.model, "model JSON")->required();
  mic->add_option("--prices", o.prices, "price CSV");
  mic->add_option("--posterior", o.posterior, "posterior CSV");
  mic->add_flag("--grid", o.grid, "sweep the probabilities of the two imbalanced states");

  CLI::App* ftpc = app.add_subcommand("ftp", "fair transfer prices from the market-making problem");
  common(ftpc);
  ftpc->add_option("--model", o.model, "model JSON")->required();
  ftpc->add_option("--method", o.method, "solver: euler, quad or both")
      ->check(CLI::IsMember({"euler", "quad", "both"}));
  ftpc->add_option("--posterior", o.posterior, "posterior CSV for FTPs over time");
  ftpc->add_option("--gamma", o.gamma, "risk aversion for every asset (skips calibration)");
  ftpc->add_option("--target-spread", o.target_spread, "calibration target for every asset");
  ftpc->add_option("--max-horizon", o.max_horizon, "cap on the ergodic horizon, days");
  ftpc->add_option("--jobs", o.jobs, "parallel solves")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }
  try {
    if (*sim) return cmd_simulate(o);
    if (*est) return cmd_estimate(o);
    if (*fil) return cmd_filter(o);
    if (*mic) return cmd_microprice(o);
    return cmd_ftp(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
