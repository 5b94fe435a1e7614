#ifndef SCREENFORGE_FEATURES_H_
#define SCREENFORGE_FEATURES_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "screenforge/constants.h"
#include "screenforge/fingerprint.h"
#include "screenforge/molecule.h"

namespace screenforge {

// Model input: fingerprint bits followed by the named descriptors.
struct FeatureSpec {
  FingerprintConfig fingerprint;
  std::vector<std::string> descriptors;

  // Fingerprint config defaults plus every descriptor in kDescriptorNames.
  static FeatureSpec defaults();
  int raw_size() const { return fingerprint.nbits + static_cast<int>(descriptors.size()); }
  // Throws Error(kInvalidConfig) for unknown descriptor names.
  void validate() const;

  bool operator==(const FeatureSpec&) const = default;
};

Eigen::VectorXd raw_features(const Molecule& mol, const FeatureSpec& spec,
                             const ConstantsTable& constants = ConstantsTable::defaults());

// Per-feature standardization fitted on the training set. Features whose
// population std is below 1e-12 are dropped and listed in `dropped`.
struct NormStats {
  int raw_size = 0;
  std::vector<int> kept;
  std::vector<int> dropped;
  Eigen::VectorXd mean;  // over kept features
  Eigen::VectorXd stddev;

  int size() const { return static_cast<int>(kept.size()); }
  // Error(kShapeMismatch) when raw has the wrong length.
  Eigen::VectorXd apply(const Eigen::VectorXd& raw) const;
  // One column per sample.
  Eigen::MatrixXd apply_columns(const Eigen::MatrixXd& raw) const;
  void validate() const;
};

// `raw` holds one column per sample (at least one).
NormStats fit_norm(const Eigen::MatrixXd& raw);

}  // namespace screenforge

#endif  // SCREENFORGE_FEATURES_H_
