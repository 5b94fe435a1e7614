#ifndef SCREENFORGE_FINGERPRINT_H_
#define SCREENFORGE_FINGERPRINT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "screenforge/molecule.h"

namespace screenforge {

struct FingerprintConfig {
  int radius = 2;
  int nbits = 2048;
  std::uint64_t hash_seed = 0;

  // Throws Error(kInvalidConfig) unless 0 <= radius <= 6 and nbits is a
  // power of two >= 64.
  void validate() const;
  // "r<radius>b<nbits>s<seed>"
  std::string descriptor() const;

  bool operator==(const FingerprintConfig&) const = default;
};

class FingerprintVector {
 public:
  FingerprintVector() : FingerprintVector(FingerprintConfig{}) {}
  explicit FingerprintVector(FingerprintConfig config);

  const FingerprintConfig& config() const { return config_; }
  int size() const { return config_.nbits; }
  bool test(int bit) const { return (words_[bit / 64] >> (bit % 64)) & 1U; }
  void set(int bit) { words_[bit / 64] |= std::uint64_t{1} << (bit % 64); }
  const std::vector<std::uint64_t>& words() const { return words_; }

  // "r2b2048s0:" followed by nbits/4 hex digits; digit k holds bits
  // 4k..4k+3 with bit 4k as the least significant bit of the digit.
  std::string to_hex() const;
  // Throws Error(kFormat) on malformed text.
  static FingerprintVector from_hex(std::string_view text);

  bool operator==(const FingerprintVector&) const = default;

 private:
  FingerprintConfig config_;
  std::vector<std::uint64_t> words_;
};

// Circular (ECFP-style) fingerprint of the largest fragment. Every heavy
// atom contributes one bit per radius 0..radius: the radius-0 invariant
// hashes (element, charge, aromatic, heavy degree, hydrogen count, isotope);
// each further radius hashes the previous invariant with the sorted
// (bond order, neighbor invariant) pairs.
FingerprintVector circular_fingerprint(const Molecule& mol, const FingerprintConfig& cfg);

int popcount(const FingerprintVector& v);

}  // namespace screenforge

#endif  // SCREENFORGE_FINGERPRINT_H_
