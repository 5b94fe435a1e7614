#include "screenforge/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "screenforge/error.h"
#include "screenforge/util.h"

namespace screenforge {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view target_name(Target t) {
  switch (t) {
    case Target::kPDE4: return "PDE4";
    case Target::kPDE7: return "PDE7";
    case Target::kXO: return "XO";
    case Target::kCustom: return "custom";
  }
  return "custom";
}

Target parse_target(std::string_view name) {
  std::string u = upper(name);
  if (u == "PDE4") return Target::kPDE4;
  if (u == "PDE7") return Target::kPDE7;
  if (u == "XO") return Target::kXO;
  if (u == "CUSTOM") return Target::kCustom;
  throw Error(Errc::kInvalidConfig, "unknown target: " + std::string(name));
}

double ic50_to_pic50(double ic50_nm) {
  if (!(ic50_nm > 0.0) || !std::isfinite(ic50_nm)) {
    throw Error(Errc::kNonPositiveIC50, "IC50 must be a positive number of nM");
  }
  return 9.0 - std::log10(ic50_nm);
}

std::optional<double> DatasetRecord::activity() const {
  if (pic50) return pic50;
  if (ic50_nm) return ic50_to_pic50(*ic50_nm);
  return std::nullopt;
}

void DatasetRecord::validate() const {
  if (ic50_nm) {
    double converted = ic50_to_pic50(*ic50_nm);
    if (pic50 && std::abs(*pic50 - converted) > 1e-6) {
      throw Error(Errc::kInconsistentActivity,
                  "record " + id + ": pIC50 does not match 9 - log10(IC50)");
    }
  }
}

std::string_view activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw Error(Errc::kInvalidConfig, "unknown activation: " + std::string(name));
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(Errc::kInvalidConfig, "learning rate must be positive");
  if (batch_size < 1) throw Error(Errc::kInvalidConfig, "batch size must be >= 1");
  if (epochs < 0) throw Error(Errc::kInvalidConfig, "epochs must be >= 0");
  for (int w : hidden_layers) {
    if (w < 1) throw Error(Errc::kInvalidConfig, "layer widths must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(Errc::kInvalidConfig, "dropout rate must lie in [0, 1)");
  }
  if (!(train_frac > 0.0 && test_frac >= 0.0 && train_frac + test_frac <= 1.0)) {
    throw Error(Errc::kInvalidConfig, "split fractions must be positive and sum to <= 1");
  }
}

SplitIndices split_indices(int n, const TrainConfig& cfg) {
  cfg.validate();
  if (n < 10) throw Error(Errc::kTooFewRecords, "at least 10 records are needed to split");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(cfg.seed, "split"));
  rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_frac * n + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(cfg.test_frac * n + 1e-9));
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.test.assign(order.begin() + n_train, order.begin() + n_train + n_test);
  s.holdout.assign(order.begin() + n_train + n_test, order.end());
  return s;
}

DatasetSplit split_dataset(const std::vector<DatasetRecord>& records, const TrainConfig& cfg) {
  SplitIndices idx = split_indices(static_cast<int>(records.size()), cfg);
  DatasetSplit out;
  for (int i : idx.train) out.train.push_back(records[i]);
  for (int i : idx.test) out.test.push_back(records[i]);
  for (int i : idx.holdout) out.holdout.push_back(records[i]);
  return out;
}

}  // namespace screenforge
