#ifndef SCREENFORGE_DATASET_H_
#define SCREENFORGE_DATASET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace screenforge {

enum class Target { kPDE4, kPDE7, kXO, kCustom };

std::string_view target_name(Target t);
// Accepts PDE4, PDE7, XO, custom (case-insensitive); Error(kInvalidConfig).
Target parse_target(std::string_view name);

// Screening gate on predicted pIC50 (strict >).
inline constexpr double kActivityGate = 5.7;
// Labeling rule for records whose source carries no active flag.
inline constexpr double kActiveLabelPic50 = 6.0;

struct DatasetRecord {
  std::string id;
  std::optional<std::string> name;
  std::string smiles;
  std::string canonical_smiles;
  std::optional<double> ic50_nm;
  std::optional<double> pic50;
  Target target = Target::kCustom;
  std::optional<bool> active;
  std::optional<std::string> class_label;

  // pic50 if present, else converted from ic50_nm; nullopt when neither.
  std::optional<double> activity() const;
  // Throws Error(kNonPositiveIC50) or Error(kInconsistentActivity) when
  // both values are given and disagree by more than 1e-6.
  void validate() const;
};

// 9 - log10(ic50_nm); Error(kNonPositiveIC50) unless ic50_nm > 0.
double ic50_to_pic50(double ic50_nm);

enum class Activation { kRelu, kTanh };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 100;
  std::vector<int> hidden_layers{256, 64};
  Activation activation = Activation::kRelu;
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;
  double train_frac = 0.78;
  double test_frac = 0.12;

  // Throws Error(kInvalidConfig) on out-of-range values.
  void validate() const;
};

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> test;
  std::vector<int> holdout;
};

// Seeded shuffle of 0..n-1, then floor(train_frac*n) / floor(test_frac*n) /
// remainder. Error(kTooFewRecords) for n < 10.
SplitIndices split_indices(int n, const TrainConfig& cfg);

struct DatasetSplit {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> test;
  std::vector<DatasetRecord> holdout;
};

DatasetSplit split_dataset(const std::vector<DatasetRecord>& records, const TrainConfig& cfg);

}  // namespace screenforge

#endif  // SCREENFORGE_DATASET_H_
