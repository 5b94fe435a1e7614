#ifndef SCREENFORGE_PHARMACOPHORE_H_
#define SCREENFORGE_PHARMACOPHORE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "screenforge/molecule.h"

namespace screenforge {

enum class FeatureKind { kHBD, kHBA, kHydrophobe, kAromaticRing, kNegIonizable, kPosIonizable };

std::string_view feature_kind_name(FeatureKind k);
FeatureKind parse_feature_kind(std::string_view name);

struct PharmFeature {
  FeatureKind kind = FeatureKind::kHBD;
  std::vector<int> anchor;  // sorted atom indices

  bool operator==(const PharmFeature&) const = default;
};

// Features of the largest fragment, indexed into that fragment, in the
// order: HBD, HBA, Hydrophobe, AromaticRing, NegIonizable, PosIonizable;
// within a kind by lowest anchor atom.
//   HBD           N or O carrying at least one hydrogen
//   HBA           N or O counted as an acceptor by the descriptor rules
//   Hydrophobe    connected non-aromatic carbon groups of >= 3 atoms
//   AromaticRing  each system of atoms joined by aromatic bonds
//   NegIonizable  carboxylic acids/carboxylates (anchor: the carbon) and
//                 other negatively charged atoms
//   PosIonizable  positively charged atoms without a negative neighbor,
//                 and neutral basic amines (sp3 N, no aryl, carbonyl or
//                 heteroatom neighbor)
std::vector<PharmFeature> detect_features(const Molecule& mol);

// Shortest bond-path distance between each pair of features (minimum over
// anchor atoms). -1 when disconnected.
std::vector<std::vector<int>> feature_distances(const Molecule& mol,
                                                const std::vector<PharmFeature>& features);

struct HypothesisFeature {
  FeatureKind kind = FeatureKind::kHBD;
  double weight = 1.0;
};

struct PairConstraint {
  int i = 0;
  int j = 0;
  double distance = 0.0;
  double tolerance = 1.0;
};

struct HypothesisCosts {
  double null_cost = 0.0;
  double total_cost = 0.0;
  double delta() const { return null_cost - total_cost; }
};

struct GenParams {
  // Recorded for provenance only; distances are topological.
  double energy_threshold_kcal_per_mol = 10.0;
  int max_conformations = 255;
  int max_candidates = 255;
  double tolerance = 1.0;
  double complexity_weight = 0.1;  // cost per feature in total_cost
  int min_features = 3;
  int max_features = 5;

  void validate() const;
};

struct Hypothesis {
  std::vector<HypothesisFeature> features;
  std::vector<PairConstraint> constraints;  // every pair i < j
  double slope = 0.0;
  double intercept = 0.0;
  HypothesisCosts costs;
  GenParams gen;
  std::string seed_id;

  double weight_sum() const;
  double predict(double fit) const { return slope * fit + intercept; }
  // Error(kInvalidConfig) unless 3..6 features, positive weights,
  // non-negative tolerances and one constraint per feature pair.
  void validate() const;
};

// Best injective, kind-preserving assignment of hypothesis features to the
// given molecule features. Each pair scores
//   (w_i + w_j) / (n - 1) * max(0, 1 - |d - c| / (tol + 1)),
// so an exact match scores the weight sum. 0 without a complete mapping.
double fit_value(const Hypothesis& h, const std::vector<PharmFeature>& features,
                 const std::vector<std::vector<int>>& distances);
double fit_value(const Hypothesis& h, const Molecule& mol);

struct TrainingCompound {
  std::string id;
  Molecule mol;
  double pic50 = 0.0;
};

// Feature subsets of the most active compound (ties: first), sized
// min_features..max_features, ordered by size then lexicographically by
// feature index, truncated to max_candidates. Constraints come from the seed's
// distances. Error(kInsufficientTraining) for < 4 compounds or a seed with
// fewer than min_features features.
std::vector<Hypothesis> generate_hypotheses(const std::vector<TrainingCompound>& training,
                                            const GenParams& params = {});

// Least-squares fit of pIC50 on fit value, then
//   total = sum (predicted - actual)^2 + complexity_weight * features
//   null  = sum (mean - actual)^2.
// Constant fits give slope 0 and intercept = mean. Stores the regression
// and costs in h.
HypothesisCosts score_costs(Hypothesis& h, const std::vector<TrainingCompound>& training);

// Largest delta; ties go to fewer features, then the earlier candidate.
// Returns the index into candidates.
std::size_t select_best(const std::vector<Hypothesis>& candidates);

// generate_hypotheses + score_costs on each + select_best.
Hypothesis train_hypothesis(const std::vector<TrainingCompound>& training, const GenParams& params = {});

struct LibraryCompound {
  std::string id;
  Molecule mol;
  std::optional<std::string> class_label;
};

struct FitRow {
  std::string id;
  double fit = 0.0;
  double predicted_pic50 = 0.0;
  std::optional<std::string> class_label;
};

// Sorted by fit descending, ties by id.
std::vector<FitRow> screen_by_fit(const Hypothesis& h, const std::vector<LibraryCompound>& library);

struct ClassSummaryRow {
  std::string classify;  // "A", "B", ...
  std::string type;      // class label
  std::string representative;
  int quantity = 0;
  double degree_of_fit = 0.0;  // fit of the representative
};

// One row per class label: largest classes first (ties by first
// appearance); the representative is the class member with the best fit.
// Rows without a label are grouped as "Other".
std::vector<ClassSummaryRow> summarize_classes(const std::vector<FitRow>& rows);

inline constexpr int kHypothesisFormatVersion = 1;

std::string hypothesis_to_json(const Hypothesis& h);
// Error(kFormat) on malformed documents.
Hypothesis hypothesis_from_json(std::string_view text);
void save_hypothesis(const Hypothesis& h, const std::filesystem::path& path);
Hypothesis load_hypothesis(const std::filesystem::path& path);

}  // namespace screenforge

#endif  // SCREENFORGE_PHARMACOPHORE_H_
