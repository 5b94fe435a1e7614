#ifndef SCREENFORGE_PDENET_H_
#define SCREENFORGE_PDENET_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "screenforge/dataset.h"
#include "screenforge/mlp.h"
#include "screenforge/molecule.h"

namespace screenforge {

struct NamedMolecule {
  std::string id;
  Molecule mol;
};

struct PdenetRun {
  MlpModel model;
  LossCurve curve;
  Evaluation test;
  SplitIndices split;  // indices into the records that carried an activity
};

// Featurizes records with an activity value, splits them, fits the
// normalization on the training part, builds input -> hidden... -> 1 and
// trains with the holdout part as the per-epoch curve. Records that fail to
// parse are skipped with a warning.
PdenetRun fit_pdenet(const std::vector<DatasetRecord>& records, Target target, const TrainConfig& cfg,
                     const FeatureSpec& spec = FeatureSpec::defaults());

struct Prediction {
  std::string id;
  double pic50 = 0.0;
  bool active = false;
};

// Flags value > threshold and sorts by pIC50 descending, ties by id.
std::vector<Prediction> gate_predictions(std::vector<Prediction> predictions,
                                         double threshold = kActivityGate);

// Molecules that cannot be featurized are logged and skipped.
std::vector<Prediction> predict_and_gate(const MlpModel& model, const std::vector<NamedMolecule>& molecules,
                                         double threshold = kActivityGate);

// Raw input -> normalized -> forward.
double predict_pic50(const MlpModel& model, const Molecule& mol);

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON document. Adam moments are not stored; a loaded model
// starts from a zeroed optimizer state.
std::string model_to_json(const MlpModel& model);
// Error(kFormat) on version or shape problems.
MlpModel model_from_json(std::string_view text);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace screenforge

#endif  // SCREENFORGE_PDENET_H_
