#include <gtest/gtest.h>

#include <cstdio>

#include "hdbell/error.hpp"
#include "hdbell/json_io.hpp"

using namespace hdbell;

TEST(JsonIo, BehaviorRoundTripIsBitExact) {
  const Behavior p = born_behavior(cglmp_reference_model(3));
  const Behavior q = behavior_from_json(Json::parse(to_json(p).dump()));
  EXPECT_EQ(q.scenario(), p.scenario());
  for (std::size_t i = 0; i < p.values().size(); ++i) EXPECT_EQ(q.values()[i], p.values()[i]);
}

TEST(JsonIo, FunctionalRoundTrip) {
  const BellFunctional f = satwap_functional(4);
  const BellFunctional g = functional_from_json(Json::parse(to_json(f).dump()));
  EXPECT_EQ(g.coeffs, f.coeffs);
  EXPECT_EQ(g.offset, f.offset);
  EXPECT_EQ(g.name, f.name);
  EXPECT_EQ(g.layout, f.layout);
  EXPECT_EQ(g.published_lhv_constant, f.published_lhv_constant);
}

TEST(JsonIo, WitnessKeepsLayoutAndEvaluatesIdentically) {
  const Behavior p = binarise_behavior(born_behavior(cglmp_reference_model(3)));
  LocalityOptions o = binarised_locality_options();
  o.noise = binarised_white_noise(Scenario::multi_outcome(3));
  const WitnessReport w = locality_lp(p, o);
  const Json j = witness_to_json(w);
  EXPECT_EQ(j["kind"], "witness");
  const BellFunctional f = witness_from_json(j);
  EXPECT_EQ(f.layout, w.functional.layout);
  EXPECT_NEAR(evaluate(f, p), evaluate(w.functional, p), 1e-15);
  EXPECT_NO_THROW(functional_from_json(j));
}

TEST(JsonIo, StateSpec) {
  const StateSpec s{{0.5686, 0.4204, 0.4204, 0.5686}};
  EXPECT_EQ(state_spec_from_json(to_json(s)).schmidt, s.schmidt);
}

TEST(JsonIo, RejectsWrongKindAndMalformedDocuments) {
  const Json b = to_json(Behavior::uniform(Scenario::multi_outcome(2)));
  EXPECT_THROW(functional_from_json(b), Error);
  EXPECT_THROW(witness_from_json(to_json(cglmp_functional(2))), Error);
  Json short_values = b;
  short_values["values"].erase(0);
  EXPECT_THROW(behavior_from_json(short_values), Error);
  Json no_scenario = b;
  no_scenario.erase("scenario");
  EXPECT_THROW(behavior_from_json(no_scenario), Error);
  Json bad_type = b;
  bad_type["values"] = "x";
  try {
    behavior_from_json(bad_type);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(JsonIo, FileErrors) {
  EXPECT_THROW(load_json_file("/nonexistent/x.json"), Error);
  const std::string path = testing::TempDir() + "bad.json";
  {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    std::fputs("{\"kind\": ", fp);
    std::fclose(fp);
  }
  try {
    load_json_file(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
  save_json_file(path, to_json(cglmp_functional(3)));
  EXPECT_EQ(functional_from_json(load_json_file(path)).coeffs, cglmp_functional(3).coeffs);
}

TEST(JsonIo, ReportsCarryDiagnostics) {
  SeesawConfig c;
  c.dimension = 2;
  c.restarts = 2;
  const Json s = to_json(seesaw(cglmp_functional(2), c));
  EXPECT_EQ(s["trajectory_lengths"].size(), 2u);
  EXPECT_EQ(s["model"]["gram_a"].size(), 2u);
  DimBoundOptions o;
  const Json d = to_json(dim_bound_report(cglmp_functional(3), 2, o));
  EXPECT_EQ(d["kind"], "dim_bound");
  EXPECT_FALSE(d["profiles"].empty());
  EXPECT_TRUE(d["profiles"][0].contains("primal_residual"));
}
