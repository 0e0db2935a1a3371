#include <gtest/gtest.h>

#include <sstream>

#include "reference_data.hpp"
#include "rfqprice/io.hpp"

using namespace rfqprice;
using namespace rfqprice::io;

namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST(Csv, FormatRealRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 103.45645645645, -2.5e17}) {
    const std::string s = format_real(x);
    EXPECT_EQ(parse_real(s, ""), x) << s;
  }
}

TEST(Csv, ParseErrorsCarryLineNumbers) {
  std::istringstream in("time,asset_id,side\n0.5,A,b\n\n0.7,A,x\n");
  EXPECT_NE(message_of([&] { read_rfq_csv(in, "rfq.csv"); }).find("rfq.csv:4:"), std::string::npos);
  std::istringstream bad_time("time,asset_id,side\n0.5,A,b\nabc,A,a\n");
  EXPECT_NE(message_of([&] { read_rfq_csv(bad_time, "f"); }).find("f:3: time: 'abc'"), std::string::npos);
  std::istringstream ragged("time,asset_id,side\n0.5,A\n");
  EXPECT_NE(message_of([&] { read_rfq_csv(ragged, "f"); }).find("f:2: expected 3 fields"), std::string::npos);
}

TEST(Csv, RejectsUnknownAndMissingColumns) {
  std::istringstream unknown("time,asset_id,side,price\n");
  EXPECT_NE(message_of([&] { read_rfq_csv(unknown, "f"); }).find("unknown column 'price'"), std::string::npos);
  std::istringstream missing("time,side\n");
  EXPECT_NE(message_of([&] { read_rfq_csv(missing, "f"); }).find("missing column 'asset_id'"), std::string::npos);
}

TEST(Csv, RejectsEmptyFileNegativeTimesAndDisorder) {
  std::istringstream empty("");
  EXPECT_THROW(read_rfq_csv(empty, "f"), InputError);
  std::istringstream negative("time,asset_id,side\n-1,A,b\n");
  EXPECT_THROW(read_rfq_csv(negative, "f"), InputError);
  std::istringstream infinite("time,asset_id,side\ninf,A,b\n");
  EXPECT_THROW(read_rfq_csv(infinite, "f"), InputError);
  std::istringstream unsorted("time,asset_id,side\n2,A,b\n1,A,b\n");
  EXPECT_NE(message_of([&] { read_rfq_csv(unsorted, "f"); }).find("f:3:"), std::string::npos);
}

TEST(RfqCsv, RoundTripWithOptionalColumns) {
  std::vector<RfqRecord> recs(3);
  recs[0].event = {0.125, Side::bid, "FR0001"};
  recs[0].quoted_margin = 0.3;
  recs[0].filled = true;
  recs[0].composite_mid = 100.1;
  recs[1].event = {0.5 + 1e-13, Side::ask, "FR0002"};
  recs[1].filled = false;
  recs[2].event = {2.0 / 3.0, Side::ask, "FR0001"};
  recs[2].composite_bid = 99.9;
  recs[2].composite_ask = 100.3;
  std::stringstream buf;
  write_rfq_csv(buf, recs);
  const auto back = read_rfq_csv(buf, "buf");
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].event.time, recs[i].event.time);
    EXPECT_EQ(back[i].event.side, recs[i].event.side);
    EXPECT_EQ(back[i].event.asset_id, recs[i].event.asset_id);
    EXPECT_EQ(back[i].quoted_margin, recs[i].quoted_margin);
    EXPECT_EQ(back[i].filled, recs[i].filled);
    EXPECT_EQ(back[i].composite_bid, recs[i].composite_bid);
    EXPECT_EQ(back[i].composite_ask, recs[i].composite_ask);
    EXPECT_EQ(back[i].composite_mid, recs[i].composite_mid);
  }
}

TEST(RfqCsv, FilledOnly) {
  std::istringstream in("time,asset_id,side,filled\n0.1,A,b,1\n0.2,A,a,0\n0.3,B,a,1\n");
  const auto recs = read_rfq_csv(in, "f", true);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[1].event.asset_id, "B");
  std::istringstream no_column("time,asset_id,side\n0.1,A,b\n");
  EXPECT_THROW(read_rfq_csv(no_column, "f", true), InputError);
}

TEST(PriceCsv, RoundTrip) {
  std::map<std::string, PriceSeries> prices;
  prices["A"] = {{0.0, 0.1, 0.30000000000000004}, {100.0, 100.01, 99.987654321}};
  prices["B"] = {{0.0}, {97.107}};
  std::stringstream buf;
  write_price_csv(buf, prices);
  const auto back = read_price_csv(buf, "buf");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at("A").time, prices["A"].time);
  EXPECT_EQ(back.at("A").mid, prices["A"].mid);
  EXPECT_EQ(back.at("B").mid, prices["B"].mid);
}

TEST(PosteriorCsv, RoundTripAndValidation) {
  const MmppModel m = refdata::sector_model(0);
  std::vector<PosteriorRow> rows = {{0.0, stationary_distribution(m)},
                                    {0.5, StateDistribution((Vector(4) << 0.1, 0.2, 0.3, 0.4).finished())}};
  std::stringstream buf;
  write_posterior_csv(buf, m, rows);
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), "time,pi_1_1,pi_1_2,pi_2_1,pi_2_2");
  const auto back = read_posterior_csv(buf, "buf", m);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].time, 0.5);
  EXPECT_EQ(back[0].pi.probs, rows[0].pi.probs);
  EXPECT_EQ(back[1].pi.probs, rows[1].pi.probs);
  std::istringstream bad("time,pi_1_1,pi_1_2,pi_2_1,pi_2_2\n0,0.5,0.5,0.5,0\n");
  EXPECT_NE(message_of([&] { read_posterior_csv(bad, "p", m); }).find("p:2:"), std::string::npos);
  std::istringstream wrong_states("time,pi_1_1\n0,1\n");
  EXPECT_THROW(read_posterior_csv(wrong_states, "p", m), InputError);
}

TEST(ModelJson, RoundTrip) {
  ModelFile f;
  f.model = refdata::sector_model(1);
  f.pi0 = stationary_distribution(f.model);
  f.scurve = SCurve{-0.7, 3.1, 1.0};
  io::AssetInfo a;
  a.beta_b = 0.25;
  a.beta_a = 0.3;
  a.kappa = 0.0123456789;
  a.sigma = 0.29;
  a.composite_bid = 103.425;
  a.composite_ask = 103.760;
  f.assets["2.1"] = a;
  f.assets["2.2"] = io::AssetInfo{};
  const json j = json::parse(to_json(f).dump());
  const ModelFile back = model_file_from_json(j);
  EXPECT_EQ(back.model.lambda_b, f.model.lambda_b);
  EXPECT_EQ(back.model.Q, f.model.Q);
  EXPECT_TRUE(back.model.exchangeable);
  EXPECT_EQ(back.pi0->probs, f.pi0->probs);
  EXPECT_EQ(back.scurve->alpha, -0.7);
  EXPECT_EQ(back.scurve->beta, 3.1);
  const io::AssetInfo& b = back.assets.at("2.1");
  EXPECT_EQ(b.beta_b, 0.25);
  EXPECT_EQ(b.kappa, a.kappa);
  EXPECT_EQ(b.composite_ask, a.composite_ask);
  EXPECT_FALSE(back.assets.at("2.2").kappa.has_value());
}

TEST(ModelJson, Errors) {
  json j = model_to_json(refdata::sector_model(0));
  j["Q"][0][0] = 3.0;
  EXPECT_THROW(model_file_from_json(j), InputError);
  j = model_to_json(refdata::sector_model(0));
  j["lambda_b"] = "fast";
  EXPECT_THROW(model_file_from_json(j), InputError);
  j = model_to_json(refdata::sector_model(0));
  j.erase("Q");
  EXPECT_NE(message_of([&] { model_file_from_json(j); }).find("missing field 'Q'"), std::string::npos);
  j = model_to_json(refdata::sector_model(0));
  j["assets"] = {{"A", {{"composite_bid", 100.0}}}};
  EXPECT_THROW(model_file_from_json(j), InputError);
}

TEST(ScenarioJson, ParsesAndValidates) {
  json j = model_to_json(refdata::sector_model(0));
  j["horizon"] = 5.0;
  j["seed"] = 12;
  j["dynamics"] = {{"kappa", 0.003}, {"sigma", 0.2}};
  j["scurve"] = {{"alpha", -0.7}, {"beta", 3.1}, {"delta0", 0.3}};
  j["assets"] = {{{"asset_id", "X"}, {"beta_b", 0.6}, {"beta_a", 0.6}, {"sigma", 0.4}},
                 {{"asset_id", "Y"}, {"beta_b", 0.4}, {"beta_a", 0.4}}};
  j["quotes"] = {{"margin_low", -0.2}, {"margin_high", 0.8}};
  const ScenarioFile f = scenario_from_json(j);
  EXPECT_EQ(f.scenario.seed, 12u);
  EXPECT_EQ(f.scenario.assets.size(), 2u);
  EXPECT_EQ(f.scenario.assets[0].dynamics->sigma, 0.4);
  EXPECT_EQ(f.scenario.assets[0].dynamics->kappa, 0.003);
  EXPECT_FALSE(f.scenario.assets[1].dynamics.has_value());
  EXPECT_EQ(f.scenario.scurve.delta0, 0.3);
  EXPECT_EQ(f.margin_range->second, 0.8);
  j["assets"][1]["beta_b"] = 0.5;
  EXPECT_THROW(scenario_from_json(j), InputError);
}

TEST(ConfigJson, DefaultsOverridesAndErrors) {
  const PipelineConfig d = config_from_json(json::object());
  EXPECT_EQ(d.m, 2);
  EXPECT_EQ(d.method, "both");
  const PipelineConfig c = config_from_json(
      {{"m", 3}, {"em_variant", "general"}, {"z", 1e4}, {"assets", {{"1.1", {{"gamma", 4.5e-9}}}}}});
  EXPECT_EQ(c.m, 3);
  EXPECT_EQ(c.em_variant, EmVariant::general);
  EXPECT_EQ(c.asset_gamma.at("1.1"), 4.5e-9);
  EXPECT_THROW(config_from_json({{"method", "rk4"}}), InputError);
  EXPECT_THROW(config_from_json({{"z", -1.0}}), InputError);
  EXPECT_THROW(config_from_json({{"zz", 1.0}}), InputError);
  EXPECT_THROW(config_from_json({{"m", "two"}}), InputError);
}
