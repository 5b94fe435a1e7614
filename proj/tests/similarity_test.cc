#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "screenforge/cluster.h"
#include "screenforge/error.h"
#include "screenforge/similarity.h"
#include "screenforge/util.h"

using namespace screenforge;

namespace {

FingerprintVector bits(std::initializer_list<int> on, int nbits = 64) {
  FingerprintVector v(FingerprintConfig{2, nbits, 0});
  for (int b : on) v.set(b);
  return v;
}

FingerprintVector random_bits(std::mt19937_64& rng, double density, int nbits = 128) {
  FingerprintVector v(FingerprintConfig{2, nbits, 0});
  std::bernoulli_distribution on(density);
  for (int i = 0; i < nbits; ++i) {
    if (on(rng)) v.set(i);
  }
  return v;
}

// Set-based oracle: |A & B| / |A | B|.
double jaccard_oracle(const FingerprintVector& a, const FingerprintVector& b) {
  std::set<int> sa, sb, both, either;
  for (int i = 0; i < a.size(); ++i) {
    if (a.test(i)) sa.insert(i);
    if (b.test(i)) sb.insert(i);
  }
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(both, both.end()));
  std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(either, either.end()));
  return either.empty() ? 1.0 : static_cast<double>(both.size()) / either.size();
}

struct CaptureWarnings {
  std::vector<std::string> seen;
  CaptureWarnings() {
    set_log_sink([this](std::string_view m) { seen.emplace_back(m); });
  }
  ~CaptureWarnings() { set_log_sink(nullptr); }
};

SquareMatrix from_rows(std::vector<std::vector<double>> rows) {
  SquareMatrix m(static_cast<int>(rows.size()));
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

TEST_CASE("tanimoto examples") {
  CHECK(tanimoto(bits({1, 2, 9}), bits({1, 2, 9})) == 1.0);
  CHECK(tanimoto(bits({1, 2}), bits({3, 4})) == 0.0);
  CHECK(tanimoto(bits({0, 1}), bits({0, 2})) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  std::vector<double> a{1, 1, 0}, b{1, 0, 1};
  CHECK(tanimoto(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  std::vector<double> u{0.5, 2.0}, w{1.0, 1.0};
  // 2.5 / (4.25 + 2 - 2.5)
  CHECK(tanimoto(u, w) == doctest::Approx(2.5 / 3.75));
}

TEST_CASE("tanimoto errors and the both-zero convention") {
  CHECK_THROWS_AS(tanimoto(bits({1}, 64), bits({1}, 128)), Error);
  std::vector<double> a{1, 2}, b{1, 2, 3};
  CHECK_THROWS_AS(tanimoto(a, b), Error);

  CaptureWarnings log;
  CHECK(tanimoto(bits({}), bits({})) == 1.0);
  std::vector<double> z{0, 0, 0};
  CHECK(tanimoto(z, z) == 1.0);
  CHECK(log.seen.size() == 2);
}

TEST_CASE("tanimoto matches the set oracle and is symmetric") {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 1000; ++trial) {
    auto a = random_bits(rng, 0.05 + 0.4 * (trial % 10) / 10.0);
    auto b = random_bits(rng, 0.3);
    double t = tanimoto(a, b);
    CHECK(t == doctest::Approx(jaccard_oracle(a, b)).epsilon(1e-15));
    CHECK(t == tanimoto(b, a));
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("jaccard distance obeys the triangle inequality") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    auto a = random_bits(rng, 0.2, 64);
    auto b = random_bits(rng, 0.2, 64);
    auto c = random_bits(rng, 0.2, 64);
    double ab = 1 - tanimoto(a, b), bc = 1 - tanimoto(b, c), ac = 1 - tanimoto(a, c);
    CHECK(ac <= ab + bc + 1e-12);
  }
}

TEST_CASE("string similarity") {
  CHECK(string_similarity("CCO", "CCO") == 1.0);
  CHECK(string_similarity("A", "B") == 0.0);
  CHECK(string_similarity("CCO", "CCC") == doctest::Approx(2.0 / 3.0));
  CHECK(string_similarity("c1ccccc1", "c1ccncc1") == doctest::Approx(14.0 / 16.0));
  CHECK(string_similarity("ABCBDAB", "BDCABA") == doctest::Approx(8.0 / 13.0));
}

TEST_CASE("distance matrix contract") {
  std::vector<FingerprintVector> two{bits({1, 5}), bits({1, 5})};
  auto m2 = distance_matrix(two);
  CHECK(m2.values(0, 1) == 1.0);
  CHECK(m2.distances()(0, 1) == 0.0);

  std::mt19937_64 rng(3);
  std::vector<FingerprintVector> items;
  for (int i = 0; i < 3; ++i) items.push_back(random_bits(rng, 0.3));
  auto m = distance_matrix(items);
  REQUIRE(m.size() == 3);
  m.validate();
  for (int i = 0; i < 3; ++i) {
    CHECK(m.values(i, i) == 1.0);
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(m.values(i, j) == doctest::Approx(jaccard_oracle(items[i], items[j])));
    }
  }

  std::vector<FingerprintVector> one{bits({1})};
  CHECK_THROWS_AS(distance_matrix(one), Error);
  std::vector<FingerprintVector> mixed{bits({1}, 64), bits({1}, 128)};
  CHECK_THROWS_AS(distance_matrix(mixed), Error);

  SimilarityMatrix bad{from_rows({{1, 0.5}, {0.4, 1}})};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("matrix csv export") {
  SquareMatrix m = from_rows({{0, 0.25}, {0.25, 0}});
  std::vector<std::string> ids{"a", "b"};
  CHECK(matrix_to_csv(m, ids) == "id,a,b\na,0.000000,0.250000\nb,0.250000,0.000000\n");
  std::vector<std::string> short_ids{"a"};
  CHECK_THROWS_AS(matrix_to_csv(m, short_ids), Error);
}

TEST_CASE("clustering extremes") {
  std::mt19937_64 rng(11);
  std::vector<FingerprintVector> items;
  for (int i = 0; i < 8; ++i) items.push_back(random_bits(rng, 0.3));
  auto dist = distance_matrix(items).distances();
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    auto all = hier_cluster(dist, l, 8);
    std::vector<int> expect(8);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(all.labels == expect);
    auto one = hier_cluster(dist, l, 1);
    CHECK(one.labels == std::vector<int>(8, 0));
    CHECK(one.k == 1);
  }
  CHECK_THROWS_AS(hier_cluster(dist, Linkage::kAverage, 0), Error);
  CHECK_THROWS_AS(hier_cluster(dist, Linkage::kAverage, 9), Error);
}

TEST_CASE("two separated blobs are recovered") {
  // Items 0,2,4,6,8 and 1,3,5,7,9 form blobs; interleaved on purpose.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> near(0.0, 0.1), far(0.9, 1.0);
  const int n = 10;
  SquareMatrix d(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double v = (i % 2 == j % 2) ? near(rng) : far(rng);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    auto a = hier_cluster(d, l, 2);
    a.validate();
    for (int i = 0; i < n; ++i) CHECK(a.labels[i] == i % 2);
  }
}

TEST_CASE("ties merge the smallest index pair first") {
  // All distances equal: average linkage keeps merging into cluster 0.
  SquareMatrix d(4, 0.5);
  for (int i = 0; i < 4; ++i) d(i, i) = 0.0;
  auto a = hier_cluster(d, Linkage::kAverage, 3);
  CHECK(a.labels == std::vector<int>{0, 0, 1, 2});
  auto b = hier_cluster(d, Linkage::kSingle, 2);
  CHECK(b.labels == std::vector<int>{0, 0, 0, 1});
}

TEST_CASE("linkage names") {
  CHECK(parse_linkage("single") == Linkage::kSingle);
  CHECK(linkage_name(parse_linkage("complete")) == "complete");
  CHECK(linkage_name(Linkage::kAverage) == "average");
  CHECK_THROWS_AS(parse_linkage("ward"), Error);
}

TEST_CASE("medoids") {
  ClusterAssignment single_item{{0, 1}, 2, Linkage::kAverage, {}};
  SquareMatrix d2 = from_rows({{0, 0.7}, {0.7, 0}});
  CHECK(medoid_representatives(single_item, d2) == std::vector<int>{0, 1});

  // 1 is central: 0.2 to each, the outer two are 0.4 apart.
  ClusterAssignment tri{{0, 0, 0}, 1, Linkage::kAverage, {}};
  SquareMatrix d3 = from_rows({{0, 0.2, 0.4}, {0.2, 0, 0.2}, {0.4, 0.2, 0}});
  CHECK(medoid_representatives(tri, d3) == std::vector<int>{1});

  ClusterAssignment pair{{0, 0}, 1, Linkage::kAverage, {}};
  CHECK(medoid_representatives(pair, d2) == std::vector<int>{0});
}

TEST_CASE("funnel yields one pick per requested cluster") {
  std::mt19937_64 rng(179);
  std::vector<FingerprintVector> items;
  for (int i = 0; i < 179; ++i) items.push_back(random_bits(rng, 0.15, 256));
  auto dist = distance_matrix(items).distances();
  auto r = diversity_funnel(dist, Linkage::kAverage, 34, 16);
  r.clusters.validate();
  CHECK(r.clusters.k == 34);
  CHECK(r.clusters.representatives.size() == 34);
  CHECK(r.picks.size() == 16);
  std::set<int> labels;
  for (int p : r.picks) labels.insert(r.clusters.labels[p]);
  CHECK(labels.size() == 16);

  auto all = diversity_funnel(dist, Linkage::kAverage, 34, 0);
  CHECK(all.picks.size() == 34);
  CHECK_THROWS_AS(diversity_funnel(dist, Linkage::kAverage, 10, 11), Error);

  auto again = diversity_funnel(dist, Linkage::kAverage, 34, 16);
  CHECK(again.picks == r.picks);
  CHECK(again.clusters.labels == r.clusters.labels);
}
