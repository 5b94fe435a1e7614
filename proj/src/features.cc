#include "screenforge/features.h"

#include <algorithm>
#include <cmath>

#include "screenforge/descriptors.h"
#include "screenforge/error.h"

namespace screenforge {

FeatureSpec FeatureSpec::defaults() {
  FeatureSpec s;
  s.descriptors.assign(kDescriptorNames.begin(), kDescriptorNames.end());
  return s;
}

void FeatureSpec::validate() const {
  fingerprint.validate();
  for (const auto& name : descriptors) {
    if (std::find(kDescriptorNames.begin(), kDescriptorNames.end(), name) == kDescriptorNames.end()) {
      throw Error(Errc::kInvalidConfig, "unknown descriptor feature: " + name);
    }
  }
}

Eigen::VectorXd raw_features(const Molecule& mol, const FeatureSpec& spec,
                             const ConstantsTable& constants) {
  FingerprintVector fp = circular_fingerprint(mol, spec.fingerprint);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.raw_size());
  for (int b = 0; b < fp.size(); ++b) {
    if (fp.test(b)) x[b] = 1.0;
  }
  if (!spec.descriptors.empty()) {
    DescriptorSet d = compute_descriptors(mol, constants);
    d.validate();
    for (std::size_t k = 0; k < spec.descriptors.size(); ++k) {
      x[fp.size() + static_cast<int>(k)] = descriptor_value(d, spec.descriptors[k]);
    }
  }
  return x;
}

Eigen::VectorXd NormStats::apply(const Eigen::VectorXd& raw) const {
  if (raw.size() != raw_size) {
    throw Error(Errc::kShapeMismatch, "feature vector length does not match the model");
  }
  Eigen::VectorXd out(size());
  for (int k = 0; k < size(); ++k) out[k] = (raw[kept[k]] - mean[k]) / stddev[k];
  return out;
}

Eigen::MatrixXd NormStats::apply_columns(const Eigen::MatrixXd& raw) const {
  if (raw.rows() != raw_size) {
    throw Error(Errc::kShapeMismatch, "feature matrix height does not match the model");
  }
  Eigen::MatrixXd out(size(), raw.cols());
  for (int k = 0; k < size(); ++k) {
    out.row(k) = (raw.row(kept[k]).array() - mean[k]) / stddev[k];
  }
  return out;
}

void NormStats::validate() const {
  if (mean.size() != size() || stddev.size() != size()) {
    throw Error(Errc::kShapeMismatch, "normalization statistics have inconsistent lengths");
  }
  if (static_cast<int>(kept.size() + dropped.size()) != raw_size) {
    throw Error(Errc::kShapeMismatch, "kept and dropped features must cover the input");
  }
  for (int k = 0; k < size(); ++k) {
    if (kept[k] < 0 || kept[k] >= raw_size) throw Error(Errc::kShapeMismatch, "feature index out of range");
    if (!(stddev[k] > 0.0)) throw Error(Errc::kShapeMismatch, "retained feature with non-positive std");
  }
}

NormStats fit_norm(const Eigen::MatrixXd& raw) {
  if (raw.cols() < 1) throw Error(Errc::kTooFewRecords, "cannot normalize an empty training set");
  NormStats s;
  s.raw_size = static_cast<int>(raw.rows());
  std::vector<double> means, stds;
  const double n = static_cast<double>(raw.cols());
  for (int f = 0; f < raw.rows(); ++f) {
    double mu = raw.row(f).sum() / n;
    double var = (raw.row(f).array() - mu).square().sum() / n;
    double sd = std::sqrt(var);
    if (sd < 1e-12) {
      s.dropped.push_back(f);
      continue;
    }
    s.kept.push_back(f);
    means.push_back(mu);
    stds.push_back(sd);
  }
  s.mean = Eigen::Map<Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
  s.stddev = Eigen::Map<Eigen::VectorXd>(stds.data(), static_cast<Eigen::Index>(stds.size()));
  return s;
}

}  // namespace screenforge
