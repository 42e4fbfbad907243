#include <gtest/gtest.h>

#include "support.hpp"

using namespace linkflow;
using testing_support::fixture;
using testing_support::links;

namespace {

Errc parse_error(const std::string& text) {
  try {
    parse_network(text);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;  // sentinel: parsed fine
}

const char* kSmall = R"({
  "format": "linkflow-network", "version": 1, "name": "small",
  "nodes": [1, 2],
  "links": [
    {"id": 10, "tail": null, "head": 1},
    {"id": 11, "tail": 1, "head": 2},
    {"id": 12, "tail": 2, "head": null},
    {"id": 13, "tail": 1, "head": null}
  ],
  "monitored": [10, 12, 13],
  "observed": {"10": 5, "12": 3, "13": 2}
})";

std::string with(const std::string& from, const std::string& to) {
  std::string s = kSmall;
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Parse, ToyFixture) {
  const NetworkDocument d = fixture("toy");
  EXPECT_EQ(d.network.node_count(), 3);
  EXPECT_EQ(d.network.link_count(), 6);
  EXPECT_EQ(d.monitored.indices(), links({1, 2, 4, 5, 6}));
  EXPECT_EQ(d.observation.values()(4), 600.0);
  ASSERT_TRUE(d.ground_truth.has_value());
  EXPECT_EQ(d.ground_truth->at("3"), 300.0);
}

TEST(Parse, IntegerIdentifiersBecomeStrings) {
  const NetworkDocument d = parse_network(kSmall);
  EXPECT_EQ(d.network.links()[1].id, "11");
  EXPECT_EQ(*d.network.links()[1].head, "2");
  EXPECT_FALSE(d.network.links()[0].tail.has_value());
  EXPECT_EQ(d.monitored.size(), 3);
}

TEST(Parse, RejectsInvalidDocuments) {
  EXPECT_EQ(parse_error(with(R"({"id": 13, "tail": 1, "head": null})",
                             R"({"id": 13, "tail": null, "head": null})")),
            Errc::SyntaxError);
  EXPECT_EQ(parse_error(with(R"("tail": 2, "head": null)", R"("tail": 7, "head": null)")),
            Errc::UnknownNode);
  EXPECT_EQ(parse_error(with(R"({"id": 13,)", R"({"id": 12,)")), Errc::DuplicateId);
  EXPECT_EQ(parse_error(with(R"("13": 2)", R"("13": -2)")), Errc::NegativeCount);
  EXPECT_EQ(parse_error(with(R"("monitored": [10, 12, 13])", R"("monitored": [10, 12])")),
            Errc::UnmonitoredObservation);
  EXPECT_EQ(parse_error(with(R"(, "13": 2)", "")), Errc::MissingObservation);
  EXPECT_EQ(parse_error(with(R"("linkflow-network")", R"("something-else")")), Errc::SyntaxError);
  EXPECT_EQ(parse_error(with(R"("version": 1)", R"("version": 2)")), Errc::SyntaxError);
  EXPECT_EQ(parse_error(with(R"("nodes": [1, 2],)", "")), Errc::SyntaxError);
  EXPECT_EQ(parse_error(with(R"("13": 2)", R"("13": "two")")), Errc::SyntaxError);
  EXPECT_EQ(parse_error("[1, 2, 3]"), Errc::SyntaxError);
}

TEST(Parse, SyntaxErrorReportsLine) {
  try {
    parse_network("{\n  \"format\": \"linkflow-network\",\n  \"nodes\": [1,\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(Parse, MissingFileIsReported) {
  EXPECT_THROW(load_network_file("/nonexistent/net.json"), Error);
}

TEST(Serialize, RoundTripIsIdentityOnCanonicalForm) {
  for (const char* name : {"toy", "toy-example2", "parallel", "i405"}) {
    const NetworkDocument d = fixture(name);
    const std::string once = serialize_network(d);
    const NetworkDocument back = parse_network(once);
    EXPECT_EQ(back.network, d.network);
    EXPECT_EQ(back.monitored, d.monitored);
    EXPECT_EQ(back.observation, d.observation);
    EXPECT_EQ(back.ground_truth, d.ground_truth);
    EXPECT_EQ(serialize_network(back), once) << name;
  }
  const NetworkDocument small = parse_network(kSmall);
  EXPECT_EQ(serialize_network(parse_network(serialize_network(small))), serialize_network(small));
}

TEST(Serialize, FractionalCountsSurvive) {
  const NetworkDocument d = parse_network(with(R"("13": 2)", R"("13": 2.25)"));
  EXPECT_EQ(parse_network(serialize_network(d)).observation.values()(2), 2.25);
}

TEST(Format, FixedPointNeverPrintsNegativeZero) {
  EXPECT_EQ(format_fixed(-0.0001, 1), "0.0");
  EXPECT_EQ(format_fixed(-0.4, 0), "0");
  EXPECT_EQ(format_fixed(22.779, 1), "22.8");
  EXPECT_EQ(format_fixed(-342.0, 0), "-342");
  EXPECT_TRUE(std::isnan(percent_difference(5.0, 0.0)));
  EXPECT_NEAR(percent_difference(13661, 11127), 22.773, 1e-3);
}

TEST(Reports, CorrectionJsonAndTable) {
  const NetworkDocument d = fixture("i405");
  const CorrectionResult r = correct_flows(d.network, d.monitored, d.observation);
  const Json j = correction_to_json(d, r);
  EXPECT_EQ(j["format"], "linkflow-correction");
  ASSERT_EQ(j["links"].size(), 18u);
  EXPECT_EQ(j["links"][12]["id"], "13");
  EXPECT_EQ(j["links"][12]["estimate"], 124236);
  EXPECT_TRUE(j["links"][12]["observed"].is_null());
  EXPECT_EQ(j["links"][5]["difference"], 2534);
  EXPECT_EQ(j["suspects"][0]["id"], "5");  // largest absolute difference, 7322
  EXPECT_EQ(network_from_json(j["network"]).network, d.network);

  const std::string table = correction_to_table(d, r);
  EXPECT_NE(table.find("Link ID"), std::string::npos);
  EXPECT_NE(table.find("22.8%"), std::string::npos);
  EXPECT_NE(table.find("N/A"), std::string::npos);
}

TEST(Reports, RecoverabilityWritesInfinityAsText) {
  const Network net({"a", "b"}, {{"1", std::nullopt, "a"}, {"2", "a", std::nullopt}, {"3", "a", "b"}});
  const MonitoredSet m(net, {"1", "3"});
  const RecoverabilityReport rep = certify(net, m, {2});
  const Json j = recoverability_to_json(net, rep);
  EXPECT_EQ(j["value"], "inf");
  EXPECT_EQ(j["degenerate_subset"], true);
  EXPECT_NE(recoverability_to_text(net, rep).find("inf"), std::string::npos);
}

TEST(GroundTruth, MissingObjectIsAnError) {
  try {
    load_ground_truth(R"({"format": "linkflow-truth"})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingGroundTruth);
  }
  EXPECT_EQ(load_ground_truth(R"({"ground_truth": {"1": 4}})").at("1"), 4.0);
}

TEST(Score, ExampleTwoTotalErrorAndBound) {
  const NetworkDocument d = fixture("toy-example2");
  CorrectionOptions opt;
  const CorrectionResult r = correct_flows(d.network, d.monitored, d.observation, opt);
  const Json report = correction_to_json(d, r);
  const Score s = score_report(report, *d.ground_truth, std::vector<std::string>{"6"});
  EXPECT_NEAR(s.l1_error, 12.0, 1e-9);
  EXPECT_NEAR(s.l1_error_raw, 12.0, 6 * 1e-6);  // six entries, each within 1e-6
  ASSERT_TRUE(s.bound.has_value());
  EXPECT_NEAR(*s.bound->lambda, 18.0, 1e-9);
  EXPECT_NEAR(s.bound->noise_l1, 6.0, 1e-12);  // |2| + |1| + |-2| + |1|
  EXPECT_NEAR(*s.bound->bound, 108.0, 1e-9);
  EXPECT_TRUE(*s.bound->holds);
  // Round trip through text keeps the score.
  const Score again = score_report(Json::parse(report.dump()), *d.ground_truth);
  EXPECT_EQ(again.l1_error, s.l1_error);
}

TEST(Score, PerfectEstimateScoresZero) {
  const NetworkDocument d = fixture("toy-example1");
  const CorrectionResult r = correct_flows(d.network, d.monitored, d.observation);
  const Score s = score_report(correction_to_json(d, r), *d.ground_truth);
  EXPECT_EQ(s.l1_error, 0.0);
  for (const auto& l : s.links) EXPECT_EQ(l.error, 0.0);
}

TEST(Score, ParallelHighwayErrorsAreSmallAgainstCorruption) {
  const NetworkDocument d = fixture("parallel");
  const CorrectionResult r = correct_flows(d.network, d.monitored, d.observation);
  const Score s = score_report(correction_to_json(d, r), *d.ground_truth);
  EXPECT_EQ(d.observation.values()(4) - d.ground_truth->at("6"), -15249.0);  // 6 is 5th monitored
  EXPECT_LT(std::abs(s.links[5].error), 300.0);
  EXPECT_LT(std::abs(s.links[15].error), 300.0);
}

TEST(Score, RejectsWrongInputs) {
  const NetworkDocument d = fixture("toy-example1");
  const CorrectionResult r = correct_flows(d.network, d.monitored, d.observation);
  EXPECT_THROW(score_report(Json::object(), *d.ground_truth), Error);
  std::map<std::string, double> partial{{"1", 300}};
  try {
    score_report(correction_to_json(d, r), partial);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingGroundTruth);
  }
}
