#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "screenforge/descriptors.h"
#include "screenforge/error.h"
#include "screenforge/pdenet.h"
#include "screenforge/smiles.h"
#include "support/graph_oracle.h"
#include "support/mlp_oracle.h"

using namespace screenforge;
using sf_test::batch_loss;
using sf_test::linear_fixture;
using sf_test::max_gradient_error;

namespace {

// Plain-loop re-implementation of the affine chain.
double forward_oracle(const MlpModel& m, const std::vector<double>& x) {
  std::vector<double> h = x;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& w = m.layers[l].weights;
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (int i = 0; i < w.rows(); ++i) {
      double s = m.layers[l].bias[i];
      for (int j = 0; j < w.cols(); ++j) s += w(i, j) * h[j];
      if (l + 1 < m.layers.size()) {
        s = m.activation == Activation::kTanh ? std::tanh(s) : std::max(0.0, s);
      }
      z[i] = s;
    }
    h = z;
  }
  return h[0];
}

std::vector<DatasetRecord> corpus_records() {
  std::vector<DatasetRecord> out;
  for (const auto& [smiles, id] : sf_test::corpus_entries()) {
    DatasetRecord r;
    r.id = id;
    r.smiles = smiles;
    r.canonical_smiles = canonical_smiles(parse_smiles(smiles));
    // Synthetic activity that the descriptors can explain.
    r.pic50 = 4.0 + 0.01 * compute_descriptors(parse_smiles(smiles)).mw;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("ic50 conversion") {
  CHECK(ic50_to_pic50(1.0) == 9.0);
  CHECK(ic50_to_pic50(1000.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(std::abs(ic50_to_pic50(0.59) - 9.229) < 0.001);
  for (double bad : {0.0, -1.0, std::nan("")}) {
    try {
      ic50_to_pic50(bad);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kNonPositiveIC50);
    }
  }
}

TEST_CASE("record activity consistency") {
  DatasetRecord r;
  r.id = "x";
  r.ic50_nm = 1.0;
  CHECK(*r.activity() == 9.0);
  r.pic50 = 9.0;
  r.validate();
  r.pic50 = 8.9;
  CHECK_THROWS_AS(r.validate(), Error);
  DatasetRecord none;
  CHECK(!none.activity());
  CHECK(parse_target("pde4") == Target::kPDE4);
  CHECK(target_name(Target::kXO) == "XO");
  CHECK_THROWS_AS(parse_target("PDE5"), Error);
}

TEST_CASE("split sizes, disjointness and determinism") {
  TrainConfig cfg;
  cfg.seed = 17;
  for (auto [n, a, b, c] : {std::tuple{100, 78, 12, 10}, std::tuple{1261, 983, 151, 127},
                            std::tuple{10, 7, 1, 2}, std::tuple{904, 705, 108, 91}}) {
    auto s = split_indices(n, cfg);
    CHECK(static_cast<int>(s.train.size()) == a);
    CHECK(static_cast<int>(s.test.size()) == b);
    CHECK(static_cast<int>(s.holdout.size()) == c);
    std::vector<int> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    all.insert(all.end(), s.holdout.begin(), s.holdout.end());
    std::sort(all.begin(), all.end());
    std::vector<int> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(all == expect);
    auto again = split_indices(n, cfg);
    CHECK(again.train == s.train);
    CHECK(again.holdout == s.holdout);
  }
  TrainConfig other = cfg;
  other.seed = 18;
  CHECK(split_indices(100, other).train != split_indices(100, cfg).train);
  try {
    split_indices(9, cfg);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kTooFewRecords);
  }
}

TEST_CASE("split_dataset partitions records") {
  std::vector<DatasetRecord> recs(20);
  for (int i = 0; i < 20; ++i) recs[i].id = "r" + std::to_string(i);
  auto s = split_dataset(recs, TrainConfig{});
  CHECK(s.train.size() == 15);
  CHECK(s.test.size() == 2);
  CHECK(s.holdout.size() == 3);
  std::set<std::string> ids;
  for (const auto* part : {&s.train, &s.test, &s.holdout}) {
    for (const auto& r : *part) ids.insert(r.id);
  }
  CHECK(ids.size() == 20);
}

TEST_CASE("init_model contract") {
  MlpModel a = init_model({4, 3, 1}, Activation::kRelu, 5);
  MlpModel b = init_model({4, 3, 1}, Activation::kRelu, 5);
  REQUIRE(a.layers.size() == 2);
  CHECK(a.layers[0].weights.rows() == 3);
  CHECK(a.layers[0].weights.cols() == 4);
  CHECK(a.layers[1].weights.rows() == 1);
  CHECK(a.layers[1].weights.cols() == 3);
  for (const auto& l : a.layers) CHECK(l.bias.isZero(0.0));
  CHECK(a.layers[0].weights == b.layers[0].weights);
  CHECK(a.layers[1].weights == b.layers[1].weights);
  CHECK(a.layers[0].weights.cwiseAbs().maxCoeff() <= 0.5);
  CHECK(a.layers[1].weights.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(3.0));
  CHECK(a.adam.step == 0);
  CHECK(model_to_json(a) == model_to_json(b));
  MlpModel c = init_model({4, 3, 1}, Activation::kRelu, 6);
  CHECK(c.layers[0].weights != a.layers[0].weights);
  CHECK_THROWS_AS(init_model({4, 3, 2}, Activation::kRelu, 1), Error);
}

TEST_CASE("forward") {
  MlpModel zero = init_model({3, 2, 1}, Activation::kRelu, 1);
  for (auto& l : zero.layers) l.weights.setZero();
  zero.layers[1].bias[0] = 0.75;
  CHECK(forward(zero, Eigen::Vector3d(1, 2, 3)) == 0.75);

  MlpModel ident = init_model({2, 2, 1}, Activation::kRelu, 1);
  ident.layers[0].weights = Eigen::Matrix2d::Identity();
  ident.layers[1].weights << 1.0, 1.0;
  CHECK(forward(ident, Eigen::Vector2d(0.5, 2.0)) == 2.5);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    for (int trial = 0; trial < 50; ++trial) {
      MlpModel m = init_model({5, 7, 3, 1}, act, static_cast<std::uint64_t>(trial));
      for (auto& l : m.layers) {
        for (int i = 0; i < l.bias.size(); ++i) l.bias[i] = g(rng) * 0.1;
      }
      std::vector<double> x(5);
      for (double& v : x) v = g(rng);
      Eigen::VectorXd xv = Eigen::Map<Eigen::VectorXd>(x.data(), 5);
      CHECK(std::abs(forward(m, xv) - forward_oracle(m, x)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(forward(ident, Eigen::Vector3d(1, 2, 3)), Error);
}

TEST_CASE("mse loss") {
  std::vector<double> a{1, 2, 3}, z{0, 0, 0};
  CHECK(mse_loss(a, a) == 0.0);
  CHECK(mse_loss(a, z) == doctest::Approx(14.0 / 3.0));
  std::vector<double> p{0, 0}, t{1, 1};
  CHECK(mse_loss(p, t) == 1.0);
  std::vector<double> shorter{1};
  CHECK_THROWS_AS(mse_loss(a, shorter), Error);
  std::vector<double> empty;
  CHECK_THROWS_AS(mse_loss(empty, empty), Error);
}

TEST_CASE("backprop matches finite differences") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    CHECK(max_gradient_error(Activation::kRelu, seed) < 1e-5);
    CHECK(max_gradient_error(Activation::kTanh, seed) < 1e-5);
  }
}

TEST_CASE("adam step") {
  MlpModel m = init_model({3, 4, 1}, Activation::kRelu, 9);
  const MlpModel before = m;
  LayerParams zero = before.adam.m;
  adam_step(m, zero, 0.01);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    CHECK(m.layers[l].weights == before.layers[l].weights);
    CHECK(m.layers[l].bias == before.layers[l].bias);
    CHECK(m.adam.m[l].weights.isZero(0.0));
    CHECK(m.adam.v[l].weights.isZero(0.0));
  }
  CHECK(m.adam.step == 1);

  // First step with a constant gradient moves every parameter by lr
  // against the gradient sign, up to the eps term.
  MlpModel f = init_model({3, 4, 1}, Activation::kRelu, 9);
  LayerParams g = f.adam.m;
  g[0].weights.setConstant(0.3);
  g[0].weights(0, 0) = -2.0;
  g[0].bias.setConstant(-0.05);
  g[1].weights.setConstant(7.0);
  g[1].bias.setConstant(1e-3);
  adam_step(f, g, 0.01);
  for (std::size_t l = 0; l < f.layers.size(); ++l) {
    Eigen::MatrixXd dw = f.layers[l].weights - before.layers[l].weights;
    for (int i = 0; i < dw.rows(); ++i) {
      for (int j = 0; j < dw.cols(); ++j) {
        double gij = g[l].weights(i, j);
        CHECK(std::abs(std::abs(dw(i, j)) - 0.01) < 0.01 * 1e-4);
        CHECK((dw(i, j) < 0) == (gij > 0));
      }
    }
    Eigen::VectorXd db = f.layers[l].bias - before.layers[l].bias;
    for (int i = 0; i < db.size(); ++i) {
      CHECK(std::abs(std::abs(db[i]) - 0.01) < 0.01 * 1e-4);
      CHECK((db[i] < 0) == (g[l].bias[i] > 0));
    }
  }

  MlpModel x = init_model({3, 4, 1}, Activation::kRelu, 9);
  MlpModel y = init_model({3, 4, 1}, Activation::kRelu, 9);
  for (int k = 0; k < 5; ++k) {
    adam_step(x, g, 0.01);
    adam_step(y, g, 0.01);
  }
  CHECK(x.layers[0].weights == y.layers[0].weights);

  LayerParams wrong = init_model({3, 5, 1}, Activation::kRelu, 1).adam.m;
  CHECK_THROWS_AS(adam_step(x, wrong, 0.01), Error);
}

TEST_CASE("training overfits a small linear set") {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  linear_fixture(x, y);
  TrainConfig cfg;
  cfg.hidden_layers = {16};
  cfg.learning_rate = 0.01;
  cfg.batch_size = 32;
  cfg.epochs = 2000;
  cfg.seed = 3;
  MlpModel m = init_model({3, 16, 1}, Activation::kRelu, cfg.seed);
  LossCurve curve = train(m, x, y, x, y, cfg);
  REQUIRE(curve.train_mse.size() == 2000);
  CHECK(curve.holdout_mse.size() == 2000);
  CHECK(curve.train_mse.back() < 1e-4);
  CHECK(curve.train_mse.back() < curve.train_mse.front());
  for (double v : curve.train_mse) CHECK(v >= 0.0);
  CHECK(m.meta.epochs == 2000);
}

TEST_CASE("training with zero epochs leaves the model alone") {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  linear_fixture(x, y);
  TrainConfig cfg;
  cfg.epochs = 0;
  MlpModel m = init_model({3, 4, 1}, Activation::kRelu, 1);
  const std::string before = model_to_json(m);
  LossCurve curve = train(m, x, y, x, y, cfg);
  CHECK(curve.train_mse.empty());
  CHECK(model_to_json(m) == before);
}

TEST_CASE("training is deterministic, with and without dropout") {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  linear_fixture(x, y, 40);
  for (double rate : {0.0, 0.3}) {
    TrainConfig cfg;
    cfg.hidden_layers = {8, 4};
    cfg.epochs = 50;
    cfg.batch_size = 7;
    cfg.learning_rate = 0.01;
    cfg.dropout_rate = rate;
    cfg.seed = 11;
    MlpModel a = init_model({3, 8, 4, 1}, Activation::kTanh, 11);
    MlpModel b = init_model({3, 8, 4, 1}, Activation::kTanh, 11);
    auto ca = train(a, x, y, x.leftCols(5), y.head(5), cfg);
    auto cb = train(b, x, y, x.leftCols(5), y.head(5), cfg);
    CHECK(ca.train_mse == cb.train_mse);
    CHECK(ca.holdout_mse == cb.holdout_mse);
    CHECK(ca.train_mse.back() < ca.train_mse.front());
  }
}

TEST_CASE("dropout only acts during training") {
  MlpModel m = init_model({3, 50, 1}, Activation::kRelu, 2);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 4);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
  Rng rng(1);
  double plain = backprop(m, x, y).loss;
  double dropped = backprop(m, x, y, 0.5, &rng).loss;
  CHECK(plain == doctest::Approx(batch_loss(m, x, y)).epsilon(1e-12));
  CHECK(dropped != plain);
}

TEST_CASE("evaluation") {
  std::vector<double> actual{5.0, 6.0, 7.0, 5.5};
  auto perfect = evaluate_predictions(actual, actual);
  CHECK(perfect.mse == 0.0);
  CHECK(perfect.r2 == 1.0);

  std::vector<double> mean(4, 5.875);
  CHECK(evaluate_predictions(mean, actual).r2 == doctest::Approx(0.0).epsilon(1e-12));

  // actual > 5.7: no, yes, yes, no; predicted > 5.7: yes, yes, no, no.
  std::vector<double> predicted{5.8, 6.1, 5.7, 5.0};
  auto e = evaluate_predictions(predicted, actual);
  CHECK(e.confusion.true_positive == 1);
  CHECK(e.confusion.false_positive == 1);
  CHECK(e.confusion.false_negative == 1);
  CHECK(e.confusion.true_negative == 1);
}

TEST_CASE("gate is strict and monotone") {
  auto out = gate_predictions({{"a", 5.69}, {"b", 5.70}, {"c", 5.71}});
  REQUIRE(out.size() == 3);
  CHECK(out[0].id == "c");
  CHECK(out[0].active);
  CHECK(!out[1].active);
  CHECK(!out[2].active);
  CHECK(gate_predictions({}).empty());

  auto tie = gate_predictions({{"z", 6.0}, {"a", 6.0}});
  CHECK(tie[0].id == "a");

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(3.0, 9.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Prediction> ps;
    for (int i = 0; i < 30; ++i) ps.push_back({"m" + std::to_string(i), u(rng), false});
    double lo = u(rng), hi = lo + std::abs(u(rng) - 3.0);
    std::set<std::string> low, high;
    for (const auto& p : gate_predictions(ps, lo)) {
      if (p.active) low.insert(p.id);
    }
    for (const auto& p : gate_predictions(ps, hi)) {
      if (p.active) high.insert(p.id);
    }
    CHECK(std::includes(low.begin(), low.end(), high.begin(), high.end()));
  }
}

TEST_CASE("normalization of training features") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(3.0, 2.0);
  Eigen::MatrixXd raw(5, 40);
  for (int j = 0; j < 40; ++j) {
    for (int i = 0; i < 5; ++i) raw(i, j) = g(rng);
  }
  raw.row(2).setConstant(4.0);
  NormStats s = fit_norm(raw);
  CHECK(s.dropped == std::vector<int>{2});
  CHECK(s.kept == std::vector<int>{0, 1, 3, 4});
  Eigen::MatrixXd z = s.apply_columns(raw);
  for (int i = 0; i < z.rows(); ++i) {
    double mu = z.row(i).mean();
    double sd = std::sqrt((z.row(i).array() - mu).square().mean());
    CHECK(std::abs(mu) < 1e-9);
    CHECK(std::abs(sd - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(s.apply(Eigen::VectorXd::Zero(4)), Error);
}

TEST_CASE("fit, predict and persist on the corpus") {
  auto records = corpus_records();
  TrainConfig cfg;
  cfg.hidden_layers = {16, 8};
  cfg.epochs = 150;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.005;
  cfg.seed = 5;
  FeatureSpec spec = FeatureSpec::defaults();
  spec.fingerprint.nbits = 256;
  PdenetRun run = fit_pdenet(records, Target::kPDE4, cfg, spec);
  CHECK(run.split.train.size() == 23);
  CHECK(run.split.test.size() == 3);
  CHECK(run.split.holdout.size() == 4);
  CHECK(run.model.target == "PDE4");
  CHECK(run.model.input_size() == run.model.norm.size());
  CHECK(!run.model.norm.dropped.empty());
  CHECK(run.curve.train_mse.back() < run.curve.train_mse.front());

  std::vector<NamedMolecule> mols;
  for (const auto& r : records) mols.push_back({r.id, parse_smiles(r.smiles)});
  auto preds = predict_and_gate(run.model, mols);
  CHECK(preds.size() == records.size());
  CHECK(std::is_sorted(preds.begin(), preds.end(),
                       [](const Prediction& a, const Prediction& b) { return a.pic50 > b.pic50; }));

  std::string text = model_to_json(run.model);
  MlpModel loaded = model_from_json(text);
  CHECK(model_to_json(loaded) == text);
  for (const auto& m : mols) CHECK(predict_pic50(loaded, m.mol) == predict_pic50(run.model, m.mol));

  auto path = std::filesystem::temp_directory_path() / "sf_pdenet_test_model.json";
  save_model(run.model, path);
  CHECK(model_to_json(load_model(path)) == text);
  std::filesystem::remove(path);

  PdenetRun again = fit_pdenet(records, Target::kPDE4, cfg, spec);
  CHECK(again.curve.train_mse == run.curve.train_mse);
}

TEST_CASE("model json validation") {
  MlpModel m = init_model({3, 2, 1}, Activation::kTanh, 1);
  m.features.fingerprint.nbits = 64;
  m.features.descriptors = {};
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(64, 4);
  raw(0, 1) = 1;
  raw(5, 2) = 1;
  raw(9, 3) = 1;
  m.norm = fit_norm(raw);
  std::string text = model_to_json(m);
  CHECK(model_from_json(text).activation == Activation::kTanh);

  auto expect_format = [](const std::string& t) {
    try {
      model_from_json(t);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kFormat);
    }
  };
  expect_format("not json");
  expect_format("{}");
  std::string bumped = text;
  bumped.replace(bumped.find("\"format_version\": 1"), 19, "\"format_version\": 2");
  expect_format(bumped);
  std::string shape = text;
  shape.replace(shape.find("\"layer_sizes\": ["), 16, "\"layer_sizes\": [4,");
  expect_format(shape);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), Error);
}
