#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfqprice/dynamics.hpp"
#include "rfqprice/error.hpp"
#include "rfqprice/estimation.hpp"
#include "rfqprice/model.hpp"
#include "rfqprice/scurve.hpp"
#include "rfqprice/simulator.hpp"

namespace rfqprice::io {

using nlohmann::json;

/// Shortest-round-trip-safe text for a double: 17 significant digits.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Plain comma-separated table with a header row. Fields are trimmed; quoting
/// is not supported, so fields may not contain commas or quotes.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> lines;  // 1-based line number of each row

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
  std::string where(std::size_t row) const { return source + ":" + std::to_string(lines[row]) + ": "; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (detail::trim(line).empty()) continue;
    if (line.find('"') != std::string::npos)
      throw InputError(source + ":" + std::to_string(number) + ": quoted fields are not supported");
    std::vector<std::string> fields = detail::split(line);
    if (t.header.empty()) {
      std::set<std::string> seen;
      for (const auto& f : fields) {
        if (f.empty()) throw InputError(source + ":" + std::to_string(number) + ": empty column name");
        if (!seen.insert(f).second)
          throw InputError(source + ":" + std::to_string(number) + ": duplicate column '" + f + "'");
      }
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw InputError(source + ":" + std::to_string(number) + ": expected " + std::to_string(t.header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.lines.push_back(number);
  }
  if (t.header.empty()) throw InputError(source + ": empty file (a header row is required)");
  return t;
}

/// Rejects columns outside `allowed` and requires every column of `required`.
inline void check_columns(const CsvTable& t, const std::set<std::string>& required,
                          const std::set<std::string>& allowed) {
  for (const auto& c : t.header)
    if (!allowed.count(c)) throw InputError(t.source + ":1: unknown column '" + c + "'");
  for (const auto& c : required)
    if (t.column(c) < 0) throw InputError(t.source + ":1: missing column '" + c + "'");
}

inline double parse_real(const std::string& s, const std::string& where) {
  double x = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(x))
    throw InputError(where + "'" + s + "' is not a finite number");
  return x;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

// ---------------------------------------------------------------- RFQ file

/// One RFQ row. Optional columns carry the quote, its outcome and the
/// composite (reference) prices at the time of the request.
struct RfqRecord {
  RfqEvent event;
  std::optional<double> quoted_margin;  // units of delta0
  std::optional<bool> filled;
  std::optional<double> composite_bid;
  std::optional<double> composite_ask;
  std::optional<double> composite_mid;
};

inline const std::vector<std::string>& rfq_columns() {
  static const std::vector<std::string> c = {"time",   "asset_id",      "side",          "quoted_margin",
                                             "filled", "composite_bid", "composite_ask", "composite_mid"};
  return c;
}

/// Times are trading days (nights and weekends removed) and must be finite and
/// non-negative. Empty optional fields read as absent. `filled_only` keeps the
/// rows whose `filled` field is 1.
inline std::vector<RfqRecord> read_rfq_csv(std::istream& in, const std::string& source, bool filled_only = false) {
  const CsvTable t = read_csv(in, source);
  check_columns(t, {"time", "asset_id", "side"}, {rfq_columns().begin(), rfq_columns().end()});
  if (filled_only && t.column("filled") < 0) throw InputError(source + ":1: filtering on fills needs a 'filled' column");
  const int c_time = t.column("time"), c_id = t.column("asset_id"), c_side = t.column("side");
  auto optional_real = [&](std::size_t r, const char* name) -> std::optional<double> {
    const int c = t.column(name);
    if (c < 0 || t.rows[r][static_cast<std::size_t>(c)].empty()) return std::nullopt;
    return parse_real(t.rows[r][static_cast<std::size_t>(c)], t.where(r) + name + ": ");
  };
  std::vector<RfqRecord> out;
  double previous = 0.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    RfqRecord rec;
    rec.event.time = parse_real(row[static_cast<std::size_t>(c_time)], t.where(r) + "time: ");
    if (rec.event.time < 0.0) throw InputError(t.where(r) + "time must be non-negative");
    if (rec.event.time < previous) throw InputError(t.where(r) + "rows must be sorted by time");
    previous = rec.event.time;
    rec.event.asset_id = row[static_cast<std::size_t>(c_id)];
    if (rec.event.asset_id.empty()) throw InputError(t.where(r) + "empty asset_id");
    const std::string& side = row[static_cast<std::size_t>(c_side)];
    if (side == "b") {
      rec.event.side = Side::bid;
    } else if (side == "a") {
      rec.event.side = Side::ask;
    } else {
      throw InputError(t.where(r) + "side must be 'b' or 'a', found '" + side + "'");
    }
    rec.quoted_margin = optional_real(r, "quoted_margin");
    if (const int c = t.column("filled"); c >= 0 && !row[static_cast<std::size_t>(c)].empty()) {
      const std::string& f = row[static_cast<std::size_t>(c)];
      if (f != "0" && f != "1") throw InputError(t.where(r) + "filled must be 0 or 1, found '" + f + "'");
      rec.filled = f == "1";
    }
    rec.composite_bid = optional_real(r, "composite_bid");
    rec.composite_ask = optional_real(r, "composite_ask");
    rec.composite_mid = optional_real(r, "composite_mid");
    if (filled_only && !rec.filled.value_or(false)) continue;
    out.push_back(std::move(rec));
  }
  return out;
}

/// Writes the required columns and every optional column present in some row.
inline void write_rfq_csv(std::ostream& out, const std::vector<RfqRecord>& records) {
  bool has[5] = {false, false, false, false, false};
  for (const auto& r : records) {
    has[0] |= r.quoted_margin.has_value();
    has[1] |= r.filled.has_value();
    has[2] |= r.composite_bid.has_value();
    has[3] |= r.composite_ask.has_value();
    has[4] |= r.composite_mid.has_value();
  }
  std::vector<std::string> header = {"time", "asset_id", "side"};
  for (int i = 0; i < 5; ++i)
    if (has[i]) header.push_back(rfq_columns()[static_cast<std::size_t>(3 + i)]);
  write_row(out, header);
  auto real = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string(); };
  for (const auto& r : records) {
    std::vector<std::string> row = {format_real(r.event.time), r.event.asset_id, r.event.side == Side::bid ? "b" : "a"};
    if (has[0]) row.push_back(real(r.quoted_margin));
    if (has[1]) row.push_back(r.filled ? (*r.filled ? "1" : "0") : "");
    if (has[2]) row.push_back(real(r.composite_bid));
    if (has[3]) row.push_back(real(r.composite_ask));
    if (has[4]) row.push_back(real(r.composite_mid));
    write_row(out, row);
  }
}

inline RfqStream events(const std::vector<RfqRecord>& records) {
  RfqStream out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.event);
  return out;
}

// -------------------------------------------------------------- price file

/// Mid prices per asset: columns time, asset_id, mid.
inline std::map<std::string, PriceSeries> read_price_csv(std::istream& in, const std::string& source) {
  const CsvTable t = read_csv(in, source);
  check_columns(t, {"time", "asset_id", "mid"}, {"time", "asset_id", "mid"});
  const auto c_time = static_cast<std::size_t>(t.column("time"));
  const auto c_id = static_cast<std::size_t>(t.column("asset_id"));
  const auto c_mid = static_cast<std::size_t>(t.column("mid"));
  std::map<std::string, PriceSeries> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double time = parse_real(t.rows[r][c_time], t.where(r) + "time: ");
    if (time < 0.0) throw InputError(t.where(r) + "time must be non-negative");
    const std::string& id = t.rows[r][c_id];
    if (id.empty()) throw InputError(t.where(r) + "empty asset_id");
    PriceSeries& s = out[id];
    if (!s.time.empty() && time < s.time.back())
      throw InputError(t.where(r) + "times must be non-decreasing within an asset");
    s.time.push_back(time);
    s.mid.push_back(parse_real(t.rows[r][c_mid], t.where(r) + "mid: "));
  }
  return out;
}

inline void write_price_csv(std::ostream& out, const std::map<std::string, PriceSeries>& prices) {
  write_row(out, {"time", "asset_id", "mid"});
  for (const auto& [id, s] : prices) {
    validate(s);
    for (std::size_t i = 0; i < s.size(); ++i) write_row(out, {format_real(s.time[i]), id, format_real(s.mid[i])});
  }
}

// ---------------------------------------------------------- posterior file

/// Column name of state (j_b, j_a), 1-based as in the usual notation.
inline std::string state_column(int jb, int ja) {
  return "pi_" + std::to_string(jb + 1) + "_" + std::to_string(ja + 1);
}

struct PosteriorRow {
  double time = 0.0;
  StateDistribution pi;
};

inline void write_posterior_csv(std::ostream& out, const MmppModel& model, const std::vector<PosteriorRow>& rows) {
  std::vector<std::string> header = {"time"};
  for (int s = 0; s < model.n_states(); ++s) header.push_back(state_column(model.bid_level(s), model.ask_level(s)));
  write_row(out, header);
  for (const auto& r : rows) {
    validate(r.pi, model.n_states());
    std::vector<std::string> row = {format_real(r.time)};
    for (int s = 0; s < model.n_states(); ++s) row.push_back(format_real(r.pi[s]));
    write_row(out, row);
  }
}

/// Columns must be time followed by every state of the model; rows must sum to 1.
inline std::vector<PosteriorRow> read_posterior_csv(std::istream& in, const std::string& source,
                                                    const MmppModel& model) {
  const CsvTable t = read_csv(in, source);
  std::set<std::string> names = {"time"};
  for (int s = 0; s < model.n_states(); ++s) names.insert(state_column(model.bid_level(s), model.ask_level(s)));
  check_columns(t, names, names);
  std::vector<PosteriorRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    PosteriorRow row;
    row.time = parse_real(t.rows[r][static_cast<std::size_t>(t.column("time"))], t.where(r) + "time: ");
    Vector p(model.n_states());
    for (int s = 0; s < model.n_states(); ++s) {
      const auto c = static_cast<std::size_t>(t.column(state_column(model.bid_level(s), model.ask_level(s))));
      p[s] = parse_real(t.rows[r][c], t.where(r));
    }
    if (p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-9)
      throw InputError(t.where(r) + "probabilities must be non-negative and sum to 1");
    row.pi = StateDistribution(p);
    out.push_back(std::move(row));
  }
  return out;
}

// -------------------------------------------------------------- JSON files

namespace detail {

inline const json& member(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw InputError(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

inline double real(const json& j, const char* key, const std::string& ctx) {
  const json& v = member(j, key, ctx);
  if (!v.is_number()) throw InputError(ctx + ": field '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InputError(ctx + ": field '" + key + "' must be finite");
  return x;
}

inline double real_or(const json& j, const char* key, double fallback, const std::string& ctx) {
  return j.is_object() && j.contains(key) ? real(j, key, ctx) : fallback;
}

inline std::optional<double> real_opt(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return real(j, key, ctx);
}

inline Vector vector(const json& j, const char* key, const std::string& ctx) {
  const json& v = member(j, key, ctx);
  if (!v.is_array()) throw InputError(ctx + ": field '" + key + "' must be an array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw InputError(ctx + ": field '" + key + "' must hold numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

inline Matrix matrix(const json& j, const char* key, const std::string& ctx) {
  const json& v = member(j, key, ctx);
  if (!v.is_array() || v.empty() || !v[0].is_array()) throw InputError(ctx + ": field '" + key + "' must be a matrix");
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v[0].size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != v[0].size())
      throw InputError(ctx + ": field '" + key + "' must be rectangular");
    for (std::size_t k = 0; k < v[i].size(); ++k) {
      if (!v[i][k].is_number()) throw InputError(ctx + ": field '" + key + "' must hold numbers");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[i][k].get<double>();
    }
  }
  return out;
}

/// Runs `f`, reporting JSON type errors (a string where a number belongs, ...)
/// as input errors.
template <class F>
auto json_guard(const std::string& ctx, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InputError(ctx + ": " + e.what());
  }
}

inline json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

}  // namespace detail

inline json model_to_json(const MmppModel& m) {
  return {{"m_b", m.m_b},
          {"m_a", m.m_a},
          {"exchangeable", m.exchangeable},
          {"lambda_b", detail::to_json(m.lambda_b)},
          {"lambda_a", detail::to_json(m.lambda_a)},
          {"Q", detail::to_json(m.Q)}};
}

inline MmppModel model_from_json(const json& j, const std::string& ctx = "model") {
  return detail::json_guard(ctx, [&] {
    MmppModel m;
    m.lambda_b = detail::vector(j, "lambda_b", ctx);
    m.lambda_a = detail::vector(j, "lambda_a", ctx);
    m.m_b = static_cast<int>(m.lambda_b.size());
    m.m_a = static_cast<int>(m.lambda_a.size());
    if (j.contains("m_b") && j.at("m_b") != m.m_b) throw InputError(ctx + ": m_b does not match lambda_b");
    if (j.contains("m_a") && j.at("m_a") != m.m_a) throw InputError(ctx + ": m_a does not match lambda_a");
    m.Q = detail::matrix(j, "Q", ctx);
    m.exchangeable = j.value("exchangeable", false);
    check_dimensions(m);
    return m;
  });
}

/// Per-asset quantities attached to a fitted model.
struct AssetInfo {
  double beta_b = 1.0;
  double beta_a = 1.0;
  std::optional<double> kappa;
  std::optional<double> kappa_stdev;
  std::optional<double> sigma;
  std::optional<double> composite_bid;
  std::optional<double> composite_ask;

  double mid() const { return 0.5 * (composite_bid.value() + composite_ask.value()); }
  double spread() const { return composite_ask.value() - composite_bid.value(); }
};

/// A fitted model with the EM prior, per-asset data and the pooled S-curve
/// (alpha, beta; the reference spread delta0 is per asset).
struct ModelFile {
  MmppModel model;
  std::optional<StateDistribution> pi0;
  std::map<std::string, AssetInfo> assets;
  std::optional<SCurve> scurve;
};

inline json to_json(const ModelFile& f) {
  json j = model_to_json(f.model);
  if (f.pi0) j["pi0"] = detail::to_json(f.pi0->probs);
  if (f.scurve) j["scurve"] = {{"alpha", f.scurve->alpha}, {"beta", f.scurve->beta}};
  json assets = json::object();
  for (const auto& [id, a] : f.assets) {
    json e = {{"beta_b", a.beta_b}, {"beta_a", a.beta_a}};
    auto put = [&e](const char* k, const std::optional<double>& x) {
      if (x) e[k] = *x;
    };
    put("kappa", a.kappa);
    put("kappa_stdev", a.kappa_stdev);
    put("sigma", a.sigma);
    put("composite_bid", a.composite_bid);
    put("composite_ask", a.composite_ask);
    assets[id] = e;
  }
  j["assets"] = assets;
  return j;
}

inline ModelFile model_file_from_json(const json& j, const std::string& ctx = "model") {
  return detail::json_guard(ctx, [&] {
    ModelFile f;
    f.model = model_from_json(j, ctx);
    validate(f.model);
    if (j.contains("pi0")) {
      f.pi0 = StateDistribution(detail::vector(j, "pi0", ctx));
      validate(*f.pi0, f.model.n_states());
    }
    if (j.contains("scurve")) {
      const json& s = j.at("scurve");
      f.scurve = SCurve{detail::real(s, "alpha", ctx + ".scurve"), detail::real(s, "beta", ctx + ".scurve"), 1.0};
      validate(*f.scurve);
    }
    if (j.contains("assets")) {
      if (!j.at("assets").is_object()) throw InputError(ctx + ": 'assets' must be an object keyed by asset id");
      for (const auto& [id, e] : j.at("assets").items()) {
        const std::string c = ctx + ".assets." + id;
        AssetInfo a;
        a.beta_b = detail::real_or(e, "beta_b", 1.0, c);
        a.beta_a = detail::real_or(e, "beta_a", 1.0, c);
        if (!(a.beta_b > 0.0) || !(a.beta_a > 0.0)) throw InputError(c + ": weights must be positive");
        a.kappa = detail::real_opt(e, "kappa", c);
        a.kappa_stdev = detail::real_opt(e, "kappa_stdev", c);
        a.sigma = detail::real_opt(e, "sigma", c);
        a.composite_bid = detail::real_opt(e, "composite_bid", c);
        a.composite_ask = detail::real_opt(e, "composite_ask", c);
        if (a.composite_bid.has_value() != a.composite_ask.has_value())
          throw InputError(c + ": composite_bid and composite_ask come together");
        if (a.composite_bid && !(*a.composite_ask > *a.composite_bid))
          throw InputError(c + ": composite_ask must exceed composite_bid");
        f.assets[id] = a;
      }
    }
    return f;
  });
}

inline json read_json(std::istream& in, const std::string& source) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": invalid JSON: " + e.what());
  }
}

/// Simulation scenario: the model fields at top level, plus assets (list of
/// {asset_id, beta_b, beta_a[, kappa, sigma, initial_price]}), dynamics
/// {kappa, sigma}, scurve {alpha, beta, delta0}, horizon, seed, price_step,
/// initial_price and an optional quote block {margin_low, margin_high} that
/// adds quoted margins (units of delta0) and fills to the simulated RFQs.
struct ScenarioFile {
  SimScenario scenario;
  std::optional<std::pair<double, double>> margin_range;
  bool has_scurve = false;
};

inline ScenarioFile scenario_from_json(const json& j, const std::string& ctx = "scenario") {
  return detail::json_guard(ctx, [&] {
    ScenarioFile f;
    SimScenario& s = f.scenario;
    s.model = model_from_json(j, ctx);
    s.horizon = detail::real(j, "horizon", ctx);
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_integer()) throw InputError(ctx + ": seed must be an integer");
      s.seed = j.at("seed").get<std::uint64_t>();
    }
    s.price_step = detail::real_or(j, "price_step", s.price_step, ctx);
    s.initial_price = detail::real_or(j, "initial_price", s.initial_price, ctx);
    if (j.contains("initial_state")) s.initial_state = j.at("initial_state").get<int>();
    if (j.contains("dynamics")) {
      const json& d = j.at("dynamics");
      s.dynamics.kappa = detail::real_or(d, "kappa", 0.0, ctx + ".dynamics");
      s.dynamics.sigma = detail::real_or(d, "sigma", 0.0, ctx + ".dynamics");
    }
    if (j.contains("scurve")) {
      const json& c = j.at("scurve");
      s.scurve = {detail::real(c, "alpha", ctx + ".scurve"), detail::real(c, "beta", ctx + ".scurve"),
                  detail::real_or(c, "delta0", 1.0, ctx + ".scurve")};
      validate(s.scurve);
      f.has_scurve = true;
    }
    if (j.contains("assets")) {
      const json& a = j.at("assets");
      if (!a.is_array() || a.empty()) throw InputError(ctx + ": 'assets' must be a non-empty array");
      s.assets.clear();
      for (const auto& e : a) {
        const std::string c = ctx + ".assets";
        AssetWeights w;
        w.asset_id = e.value("asset_id", std::string());
        if (w.asset_id.empty() || w.asset_id.find_first_of(",\"") != std::string::npos)
          throw InputError(c + ": asset_id must be non-empty and free of commas and quotes");
        w.beta_b = detail::real(e, "beta_b", c);
        w.beta_a = detail::real(e, "beta_a", c);
        if (e.contains("kappa") || e.contains("sigma"))
          w.dynamics = PriceDynamicsParams{detail::real_or(e, "kappa", s.dynamics.kappa, c), 0.0,
                                           detail::real_or(e, "sigma", s.dynamics.sigma, c)};
        w.initial_price = detail::real_opt(e, "initial_price", c);
        s.assets.push_back(w);
      }
    }
    if (j.contains("quotes")) {
      const json& q = j.at("quotes");
      f.margin_range = {detail::real(q, "margin_low", ctx + ".quotes"), detail::real(q, "margin_high", ctx + ".quotes")};
      if (!(f.margin_range->second >= f.margin_range->first))
        throw InputError(ctx + ".quotes: margin_high must not be below margin_low");
      if (!f.has_scurve) throw InputError(ctx + ": simulated quotes need an 'scurve' block");
    }
    validate(s);
    return f;
  });
}

// ------------------------------------------------------------ pipeline config

/// Settings of the command-line pipeline. Per-asset gamma or target spread
/// overrides go in `asset_gamma` / `asset_target_spread`.
struct PipelineConfig {
  int m = 2;
  EmVariant em_variant = EmVariant::exchangeable;
  int max_iter = 500;
  double tol = 1e-7;
  double kappa_step = 0.1;   // days between price samples in the kappa regression
  double filter_step = 0.1;  // days between posterior rows
  std::optional<double> horizon;  // end of the posterior grid; last event when absent
  std::optional<double> gamma;
  std::optional<double> target_spread;
  std::map<std::string, double> asset_gamma;
  std::map<std::string, double> asset_target_spread;
  double z = 1.0;
  double q_bar = 10.0;  // in units of z
  std::string method = "both";
  double time_step = 1e-3;
  double max_horizon = 100.0;
  int grid_points = 11;  // per axis of the probability sweeps
  std::string out_dir = ".";
};

inline void validate(const PipelineConfig& c) {
  if (c.m < 1) throw InputError("config: m must be >= 1");
  if (c.max_iter < 0) throw InputError("config: max_iter must be non-negative");
  if (!(c.tol >= 0.0)) throw InputError("config: tol must be non-negative");
  for (double x : {c.kappa_step, c.filter_step, c.z, c.q_bar, c.time_step, c.max_horizon})
    if (!(x > 0.0) || !std::isfinite(x))
      throw InputError("config: kappa_step, filter_step, z, q_bar, time_step and max_horizon must be positive");
  if (c.horizon && !(*c.horizon >= 0.0)) throw InputError("config: horizon must be non-negative");
  if (c.gamma && !(*c.gamma >= 0.0)) throw InputError("config: gamma must be non-negative");
  if (c.target_spread && !(*c.target_spread > 0.0)) throw InputError("config: target_spread must be positive");
  if (c.method != "euler" && c.method != "quad" && c.method != "both")
    throw InputError("config: method must be euler, quad or both");
  if (c.grid_points < 2) throw InputError("config: grid_points must be at least 2");
  if (std::abs(c.q_bar - std::round(c.q_bar)) > 1e-9) throw InputError("config: q_bar must be a whole number of z");
}

inline PipelineConfig config_from_json(const json& j, const std::string& ctx = "config") {
  return detail::json_guard(ctx, [&] {
    static const std::set<std::string> known = {
        "m",      "em_variant",    "max_iter",         "tol",    "kappa_step", "filter_step", "horizon",
        "gamma",  "target_spread", "z",                "q_bar",  "method",     "time_step",   "max_horizon",
        "grid_points", "out_dir", "assets"};
    if (!j.is_object()) throw InputError(ctx + ": expected a JSON object");
    for (const auto& [k, v] : j.items())
      if (!known.count(k)) throw InputError(ctx + ": unknown field '" + k + "'");
    PipelineConfig c;
    c.m = j.value("m", c.m);
    if (j.contains("em_variant")) {
      const std::string v = j.at("em_variant").get<std::string>();
      if (v == "general") {
        c.em_variant = EmVariant::general;
      } else if (v != "exchangeable") {
        throw InputError(ctx + ": em_variant must be general or exchangeable");
      }
    }
    c.max_iter = j.value("max_iter", c.max_iter);
    c.tol = detail::real_or(j, "tol", c.tol, ctx);
    c.kappa_step = detail::real_or(j, "kappa_step", c.kappa_step, ctx);
    c.filter_step = detail::real_or(j, "filter_step", c.filter_step, ctx);
    c.horizon = detail::real_opt(j, "horizon", ctx);
    c.gamma = detail::real_opt(j, "gamma", ctx);
    c.target_spread = detail::real_opt(j, "target_spread", ctx);
    c.z = detail::real_or(j, "z", c.z, ctx);
    c.q_bar = detail::real_or(j, "q_bar", c.q_bar, ctx);
    c.method = j.value("method", c.method);
    c.time_step = detail::real_or(j, "time_step", c.time_step, ctx);
    c.max_horizon = detail::real_or(j, "max_horizon", c.max_horizon, ctx);
    c.grid_points = j.value("grid_points", c.grid_points);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("assets")) {
      for (const auto& [id, e] : j.at("assets").items()) {
        if (auto g = detail::real_opt(e, "gamma", ctx + ".assets." + id)) c.asset_gamma[id] = *g;
        if (auto t = detail::real_opt(e, "target_spread", ctx + ".assets." + id)) c.asset_target_spread[id] = *t;
      }
    }
    validate(c);
    return c;
  });
}

}  // namespace rfqprice::io
