#include "screenforge/similarity.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "screenforge/error.h"
#include "screenforge/util.h"

namespace screenforge {

double tanimoto(const FingerprintVector& a, const FingerprintVector& b) {
  if (!(a.config() == b.config())) {
    throw Error(Errc::kConfigMismatch,
                a.config().descriptor() + " vs " + b.config().descriptor());
  }
  long both = 0;
  long either = 0;
  const auto& wa = a.words();
  const auto& wb = b.words();
  for (std::size_t k = 0; k < wa.size(); ++k) {
    both += std::popcount(wa[k] & wb[k]);
    either += std::popcount(wa[k] | wb[k]);
  }
  if (either == 0) {
    log_warning("tanimoto of two all-zero fingerprints; returning 1.0");
    return 1.0;
  }
  return static_cast<double>(both) / static_cast<double>(either);
}

double tanimoto(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::kLengthMismatch, "tanimoto over vectors of different length");
  }
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 && bb == 0.0) {
    log_warning("tanimoto of two zero vectors; returning 1.0");
    return 1.0;
  }
  return dot / (aa + bb - dot);
}

double string_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  // Two-row LCS table.
  std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return 2.0 * prev[b.size()] / static_cast<double>(a.size() + b.size());
}

void SimilarityMatrix::validate() const {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    if (values(i, i) != 1.0) throw Error(Errc::kInvalidMatrix, "diagonal must be 1");
    for (int j = 0; j < n; ++j) {
      double v = values(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::kInvalidMatrix, "similarity outside [0,1]");
      if (std::abs(v - values(j, i)) > 1e-12) throw Error(Errc::kInvalidMatrix, "matrix not symmetric");
    }
  }
}

SquareMatrix SimilarityMatrix::distances() const {
  const int n = size();
  SquareMatrix d(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : 1.0 - values(i, j);
  }
  return d;
}

SimilarityMatrix distance_matrix(std::span<const FingerprintVector> items) {
  const int n = static_cast<int>(items.size());
  if (n < 2) throw Error(Errc::kInvalidMatrix, "similarity matrix needs at least two items");
  SimilarityMatrix m{SquareMatrix(n, 0.0)};
  for (int i = 0; i < n; ++i) {
    m.values(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double t = tanimoto(items[i], items[j]);
      m.values(i, j) = t;
      m.values(j, i) = t;
    }
  }
  return m;
}

std::string matrix_to_csv(const SquareMatrix& m, std::span<const std::string> ids) {
  if (static_cast<int>(ids.size()) != m.size()) {
    throw Error(Errc::kLengthMismatch, "one id per matrix row required");
  }
  std::string out = "id";
  for (const auto& id : ids) out += "," + id;
  out += "\n";
  for (int i = 0; i < m.size(); ++i) {
    out += ids[i];
    for (int j = 0; j < m.size(); ++j) out += fmt::format(",{:.6f}", m(i, j));
    out += "\n";
  }
  return out;
}

}  // namespace screenforge
