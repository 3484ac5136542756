#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "rankstrat/errors.hpp"
#include "rankstrat/ingest.hpp"

using namespace rankstrat;

namespace {

const char* kHeader = "institute_id,name,rank,tlr,rpc,go,oi,pr,score\n";

std::string rows(int n, int skip = 0) {
  std::string csv = kHeader;
  for (int r = 1; r <= n; ++r) {
    if (r == skip) continue;
    csv += "I" + std::to_string(r) + ",Inst " + std::to_string(r) + "," + std::to_string(r) +
           ",50,50,50,50,50,50\n";
  }
  return csv;
}

DatasetManifest manifest(int year = 2018) {
  DatasetManifest m;
  m.path = "<memory>";
  m.year = year;
  return m;
}

}  // namespace

TEST_CASE("fixture parses into 100 records, 25 per class") {
  const auto ds = testing::load_fixture("synthetic_2018.csv", 2018);
  CHECK(ds.size() == 100);
  CHECK(ds.year() == 2018);
  std::vector<int> per(5, 0);
  for (int l : ds.labels()) ++per[static_cast<std::size_t>(l)];
  CHECK(per == std::vector<int>{0, 25, 25, 25, 25});
  for (std::size_t i = 0; i < ds.size(); ++i) CHECK(ds.records()[i].rank == static_cast<int>(i) + 1);
}

TEST_CASE("bundled fixtures validate without mismatches") {
  for (const auto& [name, year] : {std::pair{"synthetic_2018.csv", 2018}, std::pair{"synthetic_2019.csv", 2019}}) {
    const auto ds = testing::load_fixture(name, year, "full");
    const auto report = validate_scores(ds);
    CHECK(report.ok());
    CHECK(report.verifiable);
    CHECK(report.score_mismatches.empty());
    CHECK(report.row_count == 100);
  }
}

TEST_CASE("out-of-range value is a DataError naming line and field") {
  std::string csv = rows(4);
  const auto pos = csv.find("I3,Inst 3,3,50");
  csv.replace(pos, std::string("I3,Inst 3,3,50").size(), "I3,Inst 3,3,101");
  try {
    parse_dataset(manifest(), csv);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("tlr") != std::string::npos);
  }
}

TEST_CASE("rank gap is reported") {
  try {
    parse_dataset(manifest(), rows(100, 50));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("rank gap") != std::string::npos);
  }
  const auto report = validate_records(parse_records(rows(100, 50)));
  CHECK(report.rank_gaps == std::vector<int>{50});
  CHECK_FALSE(report.ok());
}

TEST_CASE("malformed rows carry line numbers") {
  std::string csv = rows(4);
  csv += "I5,Inst 5,5,abc,1,1,1,1,1\n";
  try {
    parse_records(csv);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 6);
  }
  CHECK_THROWS_AS(parse_records(std::string(kHeader) + "I1,x,1,1,1\n"), ParseError);
}

TEST_CASE("missing required column is a SchemaError") {
  try {
    parse_records("institute_id,name,rank,tlr,rpc,go\nI1,x,1,1,1,1\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("'oi'") != std::string::npos);
  }
}

TEST_CASE("header is case-insensitive, any order, optional columns") {
  const auto recs = parse_records(" Rank ,TLR,name,RPC,go,OI,Institute_ID\r\n1,10,\"A, Inc\",20,30,40,A1\r\n", 2019);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].name == "A, Inc");
  CHECK(recs[0].institute_id == "A1");
  CHECK(recs[0].rpc == 20);
  CHECK_FALSE(recs[0].pr.has_value());
  CHECK_FALSE(recs[0].reported_score.has_value());
  CHECK(recs[0].year == 2019);
}

TEST_CASE("extra columns are kept as sub-parameters") {
  const auto ds = testing::load_fixture("synthetic_tlr_sub_2018.csv", 2018);
  const auto& r = ds.records().front();
  CHECK(r.feature("FQE").has_value());
  CHECK(r.feature("SS").has_value());
  CHECK(ds.column("FRU").size() == 100);
}

TEST_CASE("validate_scores on a published row and an injected fault") {
  InstituteRecord r;
  r.institute_id = "R50";
  r.rank = 1;
  r.tlr = 55.17;
  r.rpc = 26.58;
  r.go = 60.60;
  r.oi = 41.85;
  r.pr = 34.67;
  r.reported_score = 44.30;
  CHECK(validate_records({r}).score_mismatches.empty());

  auto bad = r;
  bad.reported_score = composite_score(r, ScoreWeights::full()) + 1.0;
  const auto report = validate_records({bad});
  REQUIRE(report.score_mismatches.size() == 1);
  CHECK(report.score_mismatches[0].delta == doctest::Approx(1.0));
  CHECK(report.score_mismatches[0].institute_id == "R50");
}

TEST_CASE("missing score column makes the report unverifiable") {
  const auto recs = parse_records("institute_id,name,rank,tlr,rpc,go,oi\nA,a,1,1,2,3,4\nB,b,2,1,1,1,1\n");
  const auto report = validate_records(recs);
  CHECK(report.score_mismatches.empty());
  CHECK_FALSE(report.verifiable);
}

TEST_CASE("parse, serialize, parse is the identity") {
  for (const char* name : {"synthetic_2018.csv", "synthetic_tlr_sub_2018.csv"}) {
    const auto ds = testing::load_fixture(name, 2018);
    const auto again = parse_dataset(manifest(), serialize_dataset(ds));
    CHECK(again.records() == ds.records());
    CHECK(again.labels() == ds.labels());
  }
}

TEST_CASE("manifest validation and io errors") {
  auto m = manifest(0);
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = manifest();
  m.weight_profile = "bogus";
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = manifest();
  m.path = "/nonexistent/file.csv";
  CHECK_THROWS_AS(load_dataset(m), IoError);
}
