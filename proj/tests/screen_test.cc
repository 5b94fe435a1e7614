#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "screenforge/cli.h"
#include "screenforge/error.h"
#include "screenforge/ingest.h"
#include "screenforge/pdenet.h"
#include "screenforge/screen.h"
#include "screenforge/similarity.h"
#include "screenforge/smiles.h"
#include "support/screen_fixtures.h"

using namespace screenforge;
using screenforge::testing::mw_linear_model;

namespace {

std::vector<DatasetRecord> corpus() {
  return ingest(LibrarySource::from_path(SF_DATA_DIR "/corpus.smi")).records;
}

std::vector<DatasetRecord> records_of(std::initializer_list<std::pair<const char*, const char*>> items) {
  std::vector<DatasetRecord> out;
  for (const auto& [smiles, id] : items) {
    DatasetRecord r;
    r.id = id;
    r.smiles = smiles;
    r.canonical_smiles = canonical_smiles(parse_smiles(smiles));
    out.push_back(r);
  }
  return out;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "screenforge_screen_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("identical compound sets overlap completely") {
  auto a = records_of({{"c1ccccc1O", "phenol"}, {"CCO", "ethanol"}, {"CC(=O)O", "acetic"}});
  RouteComparison c = compare_routes(a, a);
  CHECK(c.overlap == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(c.tanimoto[i][i] == 1.0);
    CHECK(c.string[i][i] == 1.0);
    CHECK(c.rows[i].max_tanimoto == 1.0);
  }
}

TEST_CASE("disjoint compound sets do not overlap") {
  auto a = records_of({{"c1ccc2ccccc2c1", "naphthalene"}, {"c1ccccc1", "benzene"}});
  auto b = records_of({{"CCCCCCCC", "octane"}, {"OCC(O)CO", "glycerol"}});
  RouteComparison c = compare_routes(a, b);
  CHECK(c.overlap == 0);
  for (const auto& row : c.rows) CHECK(row.max_tanimoto < 0.85);
  CHECK_THROWS_AS(compare_routes(a, {}), Error);
}

TEST_CASE("route comparison matches a direct 2x2 computation") {
  auto a = records_of({{"c1ccccc1O", "phenol"}, {"c1ccccc1N", "aniline"}});
  auto b = records_of({{"c1ccccc1CO", "benzyl alcohol"}, {"Cc1ccccc1", "toluene"}});
  RouteComparison c = compare_routes(a, b, 0.5);
  for (std::size_t i = 0; i < 2; ++i) {
    double best = 0.0, sum = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      auto fa = circular_fingerprint(parse_smiles(a[i].smiles), {});
      auto fb = circular_fingerprint(parse_smiles(b[j].smiles), {});
      // Bit-count oracle, independent of tanimoto().
      int both = 0, either = 0;
      for (int bit = 0; bit < fa.config().nbits; ++bit) {
        both += fa.test(bit) && fb.test(bit);
        either += fa.test(bit) || fb.test(bit);
      }
      const double t = static_cast<double>(both) / either;
      CHECK(c.tanimoto[i][j] == doctest::Approx(t).epsilon(1e-12));
      CHECK(c.string[i][j] == doctest::Approx(string_similarity(a[i].canonical_smiles, b[j].canonical_smiles)));
      best = std::max(best, t);
      sum += t;
    }
    CHECK(c.rows[i].max_tanimoto == doctest::Approx(best));
    CHECK(c.rows[i].mean_tanimoto == doctest::Approx(sum / 2));
  }
  CHECK(c.ids_b[0] == "benzyl alcohol");
}

TEST_CASE("report csv shapes") {
  ScreeningReport empty;
  empty.targets = {"PDE4"};
  const std::string e = emit_report(empty, ReportFormat::kCsv);
  CHECK(count_lines(e) == 1);
  CHECK(e.rfind("id,name,canonical_smiles,formula,mw,PDE4 pIC50,active", 0) == 0);

  ScreeningReport one = empty;
  ReportRow r;
  r.id = "a,b";
  r.canonical_smiles = "CCO";
  r.formula = "C2H6O";
  r.mw = 46.0684;
  r.pic50["PDE4"] = 6.5;
  r.active = true;
  r.cluster_id = 0;
  r.representative = true;
  r.admet.gi_high = true;
  r.admet.bioavailability = 0.55;
  one.rows.push_back(r);
  const std::string o = emit_report(one, ReportFormat::kCsv);
  CHECK(count_lines(o) == 2);
  CHECK(o.find("\"a,b\",,CCO,C2H6O,46.07,6.50,Yes,0,Yes,,High,No,No,0.55\n") != std::string::npos);

  one.header = {{"seed", "7"}};
  const std::string h = emit_report(one, ReportFormat::kCsv);
  CHECK(h.rfind("# seed: 7\n", 0) == 0);
  CHECK(count_lines(h) == 3);
  const std::string md = emit_report(one, ReportFormat::kMarkdown);
  CHECK(md.rfind("- seed: 7\n\n| id |", 0) == 0);
  CHECK(md.find("| --- |") != std::string::npos);
}

TEST_CASE("forecast and compound layouts list representatives only") {
  ScreeningReport rep;
  rep.targets = {"PDE4", "PDE7"};
  for (int i = 0; i < 3; ++i) {
    ReportRow r;
    r.id = "c" + std::to_string(i);
    r.name = i == 0 ? "First" : "";
    r.mw = 100.0 + i;
    r.formula = "CH4";
    r.pic50 = {{"PDE4", 6.0 + i}, {"PDE7", 7.0}};
    r.representative = i != 1;
    rep.rows.push_back(r);
  }
  const std::string f = emit_report(rep, ReportFormat::kCsv, ReportLayout::kForecast);
  CHECK(f == "Compound ID,PDE4 pIC50,PDE7 pIC50\nc0,6.00,7.00\nc2,8.00,7.00\n");
  const std::string c = emit_report(rep, ReportFormat::kCsv, ReportLayout::kCompounds);
  CHECK(c == "Name (En),MW (g/mol),Formula\nFirst,100.00,CH4\nc2,102.00,CH4\n");
  CHECK_THROWS_AS(parse_report_layout("wide"), Error);
  CHECK_THROWS_AS(parse_report_format("xlsx"), Error);
}

TEST_CASE("screen flags one representative per cluster on the corpus") {
  auto lib = corpus();
  REQUIRE(lib.size() == 30);
  ScreenConfig cfg;
  cfg.clusters = 5;
  cfg.picks = 5;
  ScreeningReport r = run_screen(lib, {mw_linear_model(7.0, 0.0)}, std::nullopt, cfg);
  REQUIRE(r.rows.size() == 30);
  std::set<int> clusters, rep_clusters;
  int reps = 0;
  for (const auto& row : r.rows) {
    CHECK(row.active);
    clusters.insert(*row.cluster_id);
    if (row.representative) {
      ++reps;
      rep_clusters.insert(*row.cluster_id);
    }
  }
  CHECK(reps == 5);
  CHECK(clusters.size() == 5);
  CHECK(rep_clusters.size() == 5);
}

TEST_CASE("screen gate, sorting and clamping") {
  auto lib = corpus();
  ScreenConfig cfg;
  cfg.clusters = 34;
  cfg.picks = 16;
  // pIC50 = 2 + 0.01 MW: active above MW 370.
  ScreeningReport r = run_screen(lib, {mw_linear_model(2.0, 0.01)}, std::nullopt, cfg);
  int expected = 0;
  for (const auto& rec : lib) {
    if (2.0 + 0.01 * compute_descriptors(parse_smiles(rec.canonical_smiles)).mw > 5.7) ++expected;
  }
  REQUIRE(expected > 1);
  CHECK(static_cast<int>(r.rows.size()) == expected);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    CHECK(r.rows[i - 1].pic50.at("PDE4") >= r.rows[i].pic50.at("PDE4"));
  }
  for (const auto& row : r.rows) {
    CHECK(row.pic50.at("PDE4") > 5.7);
    // Report rows carry canonical SMILES that re-parse to themselves.
    CHECK(canonical_smiles(parse_smiles(row.canonical_smiles)) == row.canonical_smiles);
  }
  auto header_value = [&](const std::string& key) {
    for (const auto& [k, v] : r.header) {
      if (k == key) return v;
    }
    return std::string();
  };
  CHECK(header_value("clusters") == std::to_string(std::min(34, expected)));
  CHECK(header_value("clusters_requested") == "34");

  // A second model that rejects everything empties the active set.
  ScreeningReport none = run_screen(lib, {mw_linear_model(2.0, 0.01), mw_linear_model(1.0, 0.0, "PDE7")},
                                    std::nullopt, cfg);
  CHECK(none.rows.empty());
  CHECK(count_lines(emit_report(none, ReportFormat::kCsv)) == static_cast<int>(none.header.size()) + 1);

  ScreenConfig bad = cfg;
  bad.picks = 40;
  CHECK_THROWS_AS(run_screen(lib, {mw_linear_model(7.0, 0.0)}, std::nullopt, bad), Error);
  CHECK_THROWS_AS(run_screen(lib, {}, std::nullopt, cfg), Error);
}

TEST_CASE("screen output is deterministic") {
  auto lib = corpus();
  ScreenConfig cfg;
  cfg.clusters = 6;
  cfg.picks = 3;
  std::vector<MlpModel> models{mw_linear_model(5.0, 0.01), mw_linear_model(6.0, 0.0, "PDE7")};
  const std::string a = emit_report(run_screen(lib, models, std::nullopt, cfg), ReportFormat::kCsv);
  const std::string b = emit_report(run_screen(lib, models, std::nullopt, cfg), ReportFormat::kCsv);
  CHECK(a == b);
}

TEST_CASE("replaying the header configuration regenerates the report") {
  auto lib = corpus();
  std::vector<MlpModel> models{mw_linear_model(5.0, 0.01)};
  ScreenConfig cfg;
  cfg.clusters = 7;
  cfg.picks = 3;
  cfg.linkage = Linkage::kComplete;
  cfg.threshold = 6.25;
  cfg.seed = 99;
  cfg.fingerprint = {3, 1024, 5};
  cfg.library = "corpus.smi";
  const std::string original = emit_report(run_screen(lib, models, std::nullopt, cfg), ReportFormat::kCsv);

  std::map<std::string, std::string> header;
  std::istringstream in(original);
  for (std::string line; std::getline(in, line) && line.rfind("# ", 0) == 0;) {
    const auto colon = line.find(": ");
    header[line.substr(2, colon - 2)] = line.substr(colon + 2);
  }
  ScreenConfig replay;
  replay.clusters = std::stoi(header.at("clusters_requested"));
  replay.picks = std::stoi(header.at("picks_requested"));
  replay.linkage = parse_linkage(header.at("linkage"));
  replay.threshold = std::stod(header.at("threshold"));
  replay.seed = std::stoull(header.at("seed"));
  replay.library = header.at("library");
  int radius = 0, nbits = 0;
  unsigned long long hash_seed = 0;
  REQUIRE(std::sscanf(header.at("fingerprint").c_str(), "r%db%ds%llu", &radius, &nbits, &hash_seed) == 3);
  replay.fingerprint = {radius, nbits, hash_seed};
  CHECK(emit_report(run_screen(lib, models, std::nullopt, replay), ReportFormat::kCsv) == original);
}

TEST_CASE("cli exit codes") {
  const auto dir = temp_dir();
  const auto model = dir / "flat.json";
  save_model(mw_linear_model(7.0, 0.0), model);
  const std::string lib = SF_DATA_DIR "/corpus.smi";
  auto run = [](std::vector<std::string> args, std::string* out_text = nullptr) {
    std::vector<const char*> argv{"screenforge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    return rc;
  };
  const std::string report = (dir / "r.csv").string();
  CHECK(run({"screen", lib, "--model", model.string(), "--clusters", "5", "--picks", "5", "--out", report}) ==
        kExitOk);
  CHECK(slurp(report).find("# ingest: read=30,parsed=30") != std::string::npos);
  CHECK(run({"screen", lib, "--model", model.string(), "--clusters", "5", "--picks", "5", "--out", report,
             "--threshold", "9"}) == kExitEmptyActiveSet);
  CHECK(std::filesystem::exists(report));
  CHECK(run({"screen", lib, "--clusters", "5", "--picks", "5", "--out", report}) == kExitConfigError);
  CHECK(run({"screen", lib, "--model", model.string(), "--clusters", "2", "--picks", "5", "--out", report}) ==
        kExitConfigError);
  CHECK(run({"parse", "/nonexistent.smi"}) == kExitInputError);
  CHECK(run({"bogus"}) == kExitConfigError);
  CHECK(run({"--help"}) == kExitOk);
  std::string text;
  CHECK(run({"predict", lib, "--model", model.string()}, &text) == kExitOk);
  CHECK(count_lines(text) == 31);
  CHECK(exit_code_for(Errc::kInvalidK) == kExitConfigError);
  CHECK(exit_code_for(Errc::kSyntax) == kExitInputError);
  CHECK(resolve_seed(std::uint64_t{12}) == 12);
  ::setenv("SCREENFORGE_SEED", "42", 1);
  CHECK(resolve_seed(std::nullopt) == 42);
  CHECK(resolve_seed(std::uint64_t{12}) == 12);
  ::setenv("SCREENFORGE_SEED", "4x", 1);
  CHECK_THROWS_AS(resolve_seed(std::nullopt), Error);
  ::unsetenv("SCREENFORGE_SEED");
  CHECK(resolve_seed(std::nullopt) == 0);
  std::filesystem::remove_all(dir);
}
