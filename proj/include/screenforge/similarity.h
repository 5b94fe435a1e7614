#ifndef SCREENFORGE_SIMILARITY_H_
#define SCREENFORGE_SIMILARITY_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "screenforge/fingerprint.h"

namespace screenforge {

// T(A,B) = A.B / (|A|^2 + |B|^2 - A.B); for bit vectors |A&B| / |A|B|.
// Throws Error(kConfigMismatch) for vectors of different configs. Two
// all-zero vectors give 1.0 and a logged warning.
double tanimoto(const FingerprintVector& a, const FingerprintVector& b);

// Same formula over real-valued vectors (Error(kLengthMismatch) on unequal
// lengths; all-zero pair gives 1.0 with a warning).
double tanimoto(std::span<const double> a, std::span<const double> b);

// 2 * LCS(a, b) / (|a| + |b|): character-sequence similarity of two SMILES.
double string_similarity(std::string_view a, std::string_view b);

// Dense symmetric n x n matrix, row-major.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, double fill = 0.0)
      : n_(n), values_(static_cast<std::size_t>(n) * n, fill) {}

  int size() const { return n_; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator()(int i, int j) { return values_[index(i, j)]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<double> values_;
};

// Similarities in [0,1], symmetric, unit diagonal.
struct SimilarityMatrix {
  SquareMatrix values;

  int size() const { return values.size(); }
  // Throws Error(kInvalidMatrix) when symmetry (1e-12), the unit diagonal
  // or the [0,1] range is violated.
  void validate() const;
  // 1 - similarity, zero diagonal.
  SquareMatrix distances() const;
};

// Pairwise Tanimoto over >= 2 vectors sharing one config.
SimilarityMatrix distance_matrix(std::span<const FingerprintVector> items);

// CSV with a header row of item ids ("id,<id0>,<id1>,...") and one row per
// item; values printed with 6 decimals.
std::string matrix_to_csv(const SquareMatrix& m, std::span<const std::string> ids);

}  // namespace screenforge

#endif  // SCREENFORGE_SIMILARITY_H_
