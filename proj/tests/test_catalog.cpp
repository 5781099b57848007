#include "fuzzyburst/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace fuzzyburst;

namespace {

const char* kHeader = "trigger_id,t50,t90,f1,f2,f3,f4,p64,p256,p1024\n";

CatalogLoad parse(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return parse_catalog(in, "test.csv");
}

RawBurstRecord unit_record(std::int64_t id) {
  RawBurstRecord r;
  r.trigger_id = id;
  r.t50 = 1.0;
  r.t90 = 2.0;
  r.f1 = r.f2 = r.f3 = r.f4 = 1.0;
  r.p64 = r.p256 = r.p1024 = 3.0;
  return r;
}

} // namespace

TEST(LoadCatalog, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse("").records.empty());
}

TEST(LoadCatalog, BlankFieldIsMissing) {
  const auto load = parse("105,0.5,1.2,1e-7,2e-7,,4E-7,1,2,3\n");
  ASSERT_EQ(load.records.size(), 1u);
  const auto& r = load.records[0];
  EXPECT_EQ(r.trigger_id, 105);
  EXPECT_FALSE(r.f3.has_value());
  EXPECT_DOUBLE_EQ(*r.f4, 4e-7);
  EXPECT_DOUBLE_EQ(*r.t90, 1.2);
}

TEST(LoadCatalog, NegativeCodeIsMissingZeroIsKept) {
  const auto load = parse("7,-1,1,0,1,1,1,1,1,1\n");
  EXPECT_FALSE(load.records[0].t50.has_value());
  ASSERT_TRUE(load.records[0].f1.has_value());
  EXPECT_EQ(*load.records[0].f1, 0.0);
}

TEST(LoadCatalog, ColumnsMatchedByName) {
  std::istringstream in("t90,trigger_id,t50,f1,f2,f3,f4,p64,p256,p1024\n"
                        "9.5,42,3,1,1,1,1,1,1,1\n");
  const auto load = parse_catalog(in);
  EXPECT_EQ(load.records[0].trigger_id, 42);
  EXPECT_DOUBLE_EQ(*load.records[0].t90, 9.5);
  EXPECT_DOUBLE_EQ(*load.records[0].t50, 3.0);
}

TEST(LoadCatalog, MalformedRowReportsLine) {
  try {
    parse("1,1,1,1,1,1,1,1,1,1\n2,1,1,abc,1,1,1,1,1,1\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("test.csv:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("1,1,1\n"), Error);
  EXPECT_THROW(parse("x1,1,1,1,1,1,1,1,1,1\n"), Error);
}

TEST(LoadCatalog, DuplicateTriggerIsAnError) {
  EXPECT_THROW(parse("1,1,1,1,1,1,1,1,1,1\n1,2,2,1,1,1,1,1,1,1\n"), Error);
}

TEST(LoadCatalog, MissingHeaderColumn) {
  std::istringstream in("trigger_id,t50\n1,2\n");
  EXPECT_THROW(parse_catalog(in), Error);
}

TEST(LoadCatalog, DurationOrderViolationIsWarnedAndKept) {
  const auto load = parse("9,5,2,1,1,1,1,1,1,1\n");
  EXPECT_EQ(load.records.size(), 1u);
  ASSERT_EQ(load.warnings.size(), 1u);
  EXPECT_NE(load.warnings[0].find("9"), std::string::npos);
}

TEST(LoadCatalog, MissingFileIsInputFileError) {
  EXPECT_THROW(load_catalog("/nonexistent/catalog.csv"), InputFileError);
}

TEST(LoadCatalog, BundledFixture) {
  const auto load = load_catalog(FUZZYBURST_FIXTURE);
  EXPECT_EQ(load.records.size(), 360u);
  const auto derived = derive_features(load.records);
  EXPECT_EQ(derived.exclusions.size(), 8u);
  EXPECT_EQ(derived.bursts.size() + derived.exclusions.size(), 360u);
}

TEST(DeriveFeatures, UnitFluences) {
  const auto out = derive_features({unit_record(1)});
  ASSERT_EQ(out.bursts.size(), 1u);
  const auto& b = out.bursts[0];
  EXPECT_DOUBLE_EQ(b.total_fluence, 4.0);
  EXPECT_DOUBLE_EQ(b.h32, 1.0);
  EXPECT_DOUBLE_EQ(b.h321, 0.5);
  EXPECT_EQ(b.features[4], 0.0);
  EXPECT_DOUBLE_EQ(b.features[5], std::log10(0.5));
  EXPECT_DOUBLE_EQ(b.features[1], std::log10(2.0));
}

TEST(DeriveFeatures, ExclusionReasons) {
  auto zero_f3 = unit_record(1);
  zero_f3.f3 = 0.0;
  auto zero_f2 = unit_record(2);
  zero_f2.f2 = 0.0;
  auto no_t90 = unit_record(3);
  no_t90.t90.reset();
  auto zero_t50 = unit_record(4);
  zero_t50.t50 = 0.0;
  auto zero_f12 = unit_record(5);
  zero_f12.f1 = 0.0;
  zero_f12.f2 = 0.0;
  auto zero_p = unit_record(6);
  zero_p.p256 = 0.0;
  const auto out =
      derive_features({zero_f3, zero_f2, no_t90, zero_t50, zero_f12, zero_p});
  EXPECT_TRUE(out.bursts.empty());
  ASSERT_EQ(out.exclusions.size(), 6u);
  EXPECT_EQ(out.exclusions[0].reason, "non-finite log H32");
  EXPECT_EQ(out.exclusions[1].reason, "non-finite log H32");
  EXPECT_EQ(out.exclusions[2].reason, "missing t90");
  EXPECT_EQ(out.exclusions[3].reason, "non-finite log T50");
  EXPECT_EQ(out.exclusions[4].reason, "non-finite log H32");
  EXPECT_EQ(out.exclusions[5].reason, "non-finite log P256");
  EXPECT_EQ(format_exclusion_log({out.exclusions[0]}), "1\tnon-finite log H32\n");
}

TEST(DeriveFeatures, EveryRecordAccountedForAndIdempotent) {
  const auto load = load_catalog(FUZZYBURST_FIXTURE);
  const auto first = derive_features(load.records);
  std::set<std::int64_t> seen;
  for (const auto& b : first.bursts)
    EXPECT_TRUE(seen.insert(b.raw.trigger_id).second);
  for (const auto& e : first.exclusions)
    EXPECT_TRUE(seen.insert(e.trigger_id).second);
  EXPECT_EQ(seen.size(), load.records.size());

  std::vector<RawBurstRecord> kept;
  for (const auto& b : first.bursts)
    kept.push_back(b.raw);
  const auto again = derive_features(kept);
  EXPECT_TRUE(again.exclusions.empty());
  ASSERT_EQ(again.bursts.size(), first.bursts.size());
  for (std::size_t i = 0; i < kept.size(); ++i)
    EXPECT_EQ(again.bursts[i].features, first.bursts[i].features);
}

TEST(SummarizeClusters, MeanAndStandardError) {
  auto a = unit_record(1);
  a.t90 = 1.0;
  auto b = unit_record(2);
  b.t90 = 3.0;
  auto c = unit_record(3);
  c.t90 = 7.0;
  const auto bursts = derive_features({a, b, c}).bursts;
  const auto s = summarize_clusters(bursts, HardPartition({1, 1, 2}, 3));
  ASSERT_EQ(s.size(), 3u);
  ASSERT_TRUE(s[0].stats);
  EXPECT_DOUBLE_EQ((*s[0].stats)[1].mean, 2.0);
  EXPECT_DOUBLE_EQ((*s[0].stats)[1].se, 1.0);
  EXPECT_DOUBLE_EQ((*s[0].stats)[3].mean, 4e6);  // F_T x 1e6 of unit fluences
  EXPECT_DOUBLE_EQ((*s[1].stats)[1].mean, 7.0);
  EXPECT_EQ((*s[1].stats)[1].se, 0.0);
  EXPECT_EQ(s[2].size, 0u);
  EXPECT_FALSE(s[2].stats);
  EXPECT_NEAR(s[0].percent + s[1].percent + s[2].percent, 100.0, 1e-9);
}
