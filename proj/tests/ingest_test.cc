#include <doctest.h>

#include <cmath>
#include <set>

#include "screenforge/error.h"
#include "screenforge/ingest.h"
#include "screenforge/smiles.h"

using namespace screenforge;

TEST_CASE("smi ingestion reports bad lines and keeps the rest") {
  IngestResult r = ingest_text("c1ccccc1O phenol\nC1CC( broken\nCCO ethanol Ethyl alcohol\n", LibraryFormat::kSmi);
  CHECK(r.stats.read == 3);
  CHECK(r.stats.parsed == 2);
  CHECK(r.stats.parse_errors == 1);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].rfind("line 2:", 0) == 0);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].id == "phenol");
  CHECK(r.records[1].id == "ethanol");
  CHECK(r.records[1].name.value_or("") == "Ethyl alcohol");
  CHECK(r.records[1].canonical_smiles == canonical_smiles(parse_smiles("OCC")));
}

TEST_CASE("comments and blank lines are not counted") {
  IngestResult r = ingest_text("# header\n\nCC a\n   \nCCC b\n", LibraryFormat::kSmi);
  CHECK(r.stats.read == 2);
  CHECK(r.records.size() == 2);
}

TEST_CASE("missing ids fall back to the line number") {
  IngestResult r = ingest_text("CC\n", LibraryFormat::kSmi);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].id == "line1");
}

TEST_CASE("duplicates keep the first occurrence") {
  IngestResult r = ingest_text("OCC first\nCCO second\nC(O)C third\nCCN amine\n", LibraryFormat::kSmi);
  CHECK(r.stats.duplicates_removed == 2);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].id == "first");
  CHECK(r.records[1].id == "amine");
}

TEST_CASE("csv ingestion converts IC50 in nM to pIC50") {
  IngestResult r = ingest_text(
      "ID,SMILES,IC50_nM,target,class\n"
      "a,c1ccccc1O,0.59,PDE4,phenols\n"
      "b,CCO,1,pde7,\n"
      "c,CCN,-3,XO,\n",
      LibraryFormat::kCsv);
  CHECK(r.stats.parse_errors == 1);
  REQUIRE(r.records.size() == 2);
  CHECK(std::abs(*r.records[0].pic50 - 9.229) < 1e-3);
  CHECK(r.records[0].target == Target::kPDE4);
  CHECK(r.records[0].class_label.value_or("") == "phenols");
  CHECK(*r.records[1].pic50 == doctest::Approx(9.0));
  CHECK(r.records[1].target == Target::kPDE7);
  CHECK_FALSE(r.records[1].class_label.has_value());
}

TEST_CASE("csv rows with disagreeing activity values are rejected") {
  IngestResult r = ingest_text("smiles,ic50_nm,pic50\nCC,1,9\nCCC,1,8\n", LibraryFormat::kCsv);
  CHECK(r.records.size() == 1);
  CHECK(r.stats.parse_errors == 1);
}

TEST_CASE("csv column mapping and header errors") {
  IngestResult r = ingest_text("Structure,Compound\nCCO,x1\n", LibraryFormat::kCsv,
                               {{"smiles", "Structure"}, {"id", "compound"}});
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].id == "x1");
  CHECK_THROWS_AS(ingest_text("id,name\n1,a\n", LibraryFormat::kCsv), Error);
  CHECK_THROWS_AS(ingest_text("smiles\nCC\n", LibraryFormat::kCsv, {{"weight", "smiles"}}), Error);
  CHECK_THROWS_AS(ingest_text("smiles\nCC\n", LibraryFormat::kCsv, {{"id", "missing"}}), Error);
  CHECK_THROWS_AS(ingest_text("", LibraryFormat::kCsv), Error);
}

TEST_CASE("quoted csv fields round trip") {
  auto f = split_csv_line("a,\"b,c\",\"say \"\"hi\"\"\",");
  REQUIRE(f.size() == 4);
  CHECK(f[1] == "b,c");
  CHECK(f[2] == "say \"hi\"");
  CHECK(f[3].empty());
  CHECK(csv_field("plain") == "plain");
  CHECK(split_csv_line(csv_field("x,\"y\""))[0] == "x,\"y\"");
  CHECK_THROWS_AS(split_csv_line("\"open"), Error);
}

TEST_CASE("every read line is accounted for on the bundled corpus") {
  IngestResult r = ingest(LibrarySource::from_path(SF_DATA_DIR "/corpus.smi"));
  CHECK(r.stats.read == r.stats.parsed + r.stats.parse_errors);
  CHECK(r.stats.parsed == static_cast<int>(r.records.size()) + r.stats.duplicates_removed);
  std::set<std::string> keys;
  for (const auto& rec : r.records) keys.insert(rec.canonical_smiles);
  CHECK(keys.size() == r.records.size());
  CHECK_THROWS_AS(ingest(LibrarySource::from_path("/nonexistent/library.smi")), Error);
  CHECK(LibrarySource::from_path("x.CSV").format == LibraryFormat::kCsv);
  CHECK(LibrarySource::from_path("x.smi").format == LibraryFormat::kSmi);
}

TEST_CASE("dataset summary") {
  std::vector<DatasetRecord> recs(4);
  recs[0].pic50 = 6.0;
  recs[1].pic50 = 5.9;
  recs[2].active = true;
  DatasetSummary s = summarize_dataset(recs);
  CHECK(s.total == 4);
  CHECK(s.active == 2);
  CHECK(s.inactive == 1);
  CHECK(s.unlabeled == 1);
}
