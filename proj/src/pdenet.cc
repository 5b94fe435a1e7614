#include "screenforge/pdenet.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "screenforge/error.h"
#include "screenforge/smiles.h"

namespace screenforge {

using nlohmann::json;

PdenetRun fit_pdenet(const std::vector<DatasetRecord>& records, Target target, const TrainConfig& cfg,
                     const FeatureSpec& spec) {
  cfg.validate();
  spec.validate();
  std::vector<Eigen::VectorXd> columns;
  std::vector<double> targets;
  for (const auto& r : records) {
    auto y = r.activity();
    if (!y) continue;
    try {
      const std::string& s = r.canonical_smiles.empty() ? r.smiles : r.canonical_smiles;
      columns.push_back(raw_features(parse_smiles(s), spec));
      targets.push_back(*y);
    } catch (const Error& e) {
      log_warning("skipping record " + r.id + ": " + e.what());
    }
  }
  if (columns.size() < 10) {
    throw Error(Errc::kInsufficientTraining, "need at least 10 featurizable records with activity");
  }

  PdenetRun run;
  run.split = split_indices(static_cast<int>(columns.size()), cfg);
  auto gather = [&](const std::vector<int>& idx, Eigen::MatrixXd& x, Eigen::VectorXd& y) {
    x.resize(spec.raw_size(), static_cast<Eigen::Index>(idx.size()));
    y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      x.col(static_cast<Eigen::Index>(k)) = columns[idx[k]];
      y[static_cast<Eigen::Index>(k)] = targets[idx[k]];
    }
  };
  Eigen::MatrixXd raw_train, raw_test, raw_holdout;
  Eigen::VectorXd y_train, y_test, y_holdout;
  gather(run.split.train, raw_train, y_train);
  gather(run.split.test, raw_test, y_test);
  gather(run.split.holdout, raw_holdout, y_holdout);

  NormStats norm = fit_norm(raw_train);
  if (norm.size() == 0) throw Error(Errc::kInsufficientTraining, "every feature is constant on the training set");
  std::vector<int> sizes{norm.size()};
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(1);

  run.model = init_model(sizes, cfg.activation, cfg.seed);
  run.model.target = std::string(target_name(target));
  run.model.features = spec;
  run.model.norm = norm;
  run.curve = train(run.model, norm.apply_columns(raw_train), y_train, norm.apply_columns(raw_holdout), y_holdout, cfg);
  run.test = evaluate(run.model, norm.apply_columns(raw_test), y_test);
  return run;
}

std::vector<Prediction> gate_predictions(std::vector<Prediction> predictions, double threshold) {
  for (auto& p : predictions) p.active = p.pic50 > threshold;
  std::stable_sort(predictions.begin(), predictions.end(), [](const Prediction& a, const Prediction& b) {
    if (a.pic50 != b.pic50) return a.pic50 > b.pic50;
    return a.id < b.id;
  });
  return predictions;
}

double predict_pic50(const MlpModel& model, const Molecule& mol) {
  return forward(model, model.norm.apply_columns(raw_features(mol, model.features)));
}

std::vector<Prediction> predict_and_gate(const MlpModel& model, const std::vector<NamedMolecule>& molecules,
                                         double threshold) {
  std::vector<Prediction> out;
  for (const auto& m : molecules) {
    try {
      out.push_back({m.id, predict_pic50(model, m.mol), false});
    } catch (const Error& e) {
      log_warning("cannot featurize " + m.id + ": " + e.what());
    }
  }
  return gate_predictions(std::move(out), threshold);
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const json& j, Eigen::Index expect, const char* what) {
  auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != expect) {
    throw Error(Errc::kFormat, std::string(what) + " has the wrong length");
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), expect);
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw Error(Errc::kFormat, std::string(what) + " has the wrong row count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) m.row(i) = vector_from(j[i], cols, what).transpose();
  return m;
}

}  // namespace

std::string model_to_json(const MlpModel& model) {
  model.validate();
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["target"] = model.target;
  doc["layer_sizes"] = model.layer_sizes;
  doc["activation"] = std::string(activation_name(model.activation));
  json weights = json::array(), biases = json::array();
  for (const auto& layer : model.layers) {
    weights.push_back(matrix_json(layer.weights));
    biases.push_back(vector_json(layer.bias));
  }
  doc["weights"] = std::move(weights);
  doc["biases"] = std::move(biases);
  doc["feature_config"] = {{"radius", model.features.fingerprint.radius},
                           {"nbits", model.features.fingerprint.nbits},
                           {"hash_seed", model.features.fingerprint.hash_seed},
                           {"descriptors", model.features.descriptors}};
  doc["norm_stats"] = {{"raw_size", model.norm.raw_size},
                       {"kept", model.norm.kept},
                       {"dropped", model.norm.dropped},
                       {"mean", vector_json(model.norm.mean)},
                       {"std", vector_json(model.norm.stddev)}};
  doc["train_meta"] = {{"seed", model.meta.seed},
                       {"epochs", model.meta.epochs},
                       {"lr", model.meta.learning_rate},
                       {"batch_size", model.meta.batch_size},
                       {"dropout_rate", model.meta.dropout_rate}};
  return doc.dump(1) + "\n";
}

MlpModel model_from_json(std::string_view text) {
  try {
    json doc = json::parse(text);
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      throw Error(Errc::kFormat, "unsupported model format_version");
    }
    MlpModel m;
    m.target = doc.at("target").get<std::string>();
    m.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
    m.activation = parse_activation(doc.at("activation").get<std::string>());
    if (m.layer_sizes.size() < 2) throw Error(Errc::kFormat, "model needs at least two layer sizes");
    for (int s : m.layer_sizes) {
      if (s < 1) throw Error(Errc::kFormat, "layer widths must be >= 1");
    }
    const auto& weights = doc.at("weights");
    const auto& biases = doc.at("biases");
    if (weights.size() + 1 != m.layer_sizes.size() || biases.size() + 1 != m.layer_sizes.size()) {
      throw Error(Errc::kFormat, "layer count does not match layer_sizes");
    }
    for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
      m.layers.push_back({matrix_from(weights[l], m.layer_sizes[l + 1], m.layer_sizes[l], "weights"),
                          vector_from(biases[l], m.layer_sizes[l + 1], "bias")});
      m.adam.m.push_back({Eigen::MatrixXd::Zero(m.layer_sizes[l + 1], m.layer_sizes[l]),
                          Eigen::VectorXd::Zero(m.layer_sizes[l + 1])});
    }
    m.adam.v = m.adam.m;

    const auto& fc = doc.at("feature_config");
    m.features.fingerprint.radius = fc.at("radius").get<int>();
    m.features.fingerprint.nbits = fc.at("nbits").get<int>();
    m.features.fingerprint.hash_seed = fc.at("hash_seed").get<std::uint64_t>();
    m.features.descriptors = fc.at("descriptors").get<std::vector<std::string>>();
    m.features.validate();

    const auto& ns = doc.at("norm_stats");
    m.norm.raw_size = ns.at("raw_size").get<int>();
    m.norm.kept = ns.at("kept").get<std::vector<int>>();
    m.norm.dropped = ns.at("dropped").get<std::vector<int>>();
    m.norm.mean = vector_from(ns.at("mean"), m.norm.size(), "mean");
    m.norm.stddev = vector_from(ns.at("std"), m.norm.size(), "std");
    m.norm.validate();
    if (m.norm.raw_size != m.features.raw_size() || m.norm.size() != m.input_size()) {
      throw Error(Errc::kFormat, "normalization does not match the feature config or input layer");
    }

    const auto& tm = doc.at("train_meta");
    m.meta.seed = tm.at("seed").get<std::uint64_t>();
    m.meta.epochs = tm.at("epochs").get<int>();
    m.meta.learning_rate = tm.at("lr").get<double>();
    m.meta.batch_size = tm.at("batch_size").get<int>();
    m.meta.dropout_rate = tm.value("dropout_rate", 0.0);
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::kFormat, std::string("model json: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::kFormat) throw;
    throw Error(Errc::kFormat, e.what());
  }
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out << model_to_json(model);
  if (!out) throw Error(Errc::kIo, "write failed: " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace screenforge
