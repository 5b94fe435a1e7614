#include "screenforge/fingerprint.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <utility>

#include "screenforge/error.h"
#include "screenforge/util.h"

namespace screenforge {

void FingerprintConfig::validate() const {
  if (radius < 0 || radius > 6) {
    throw Error(Errc::kInvalidConfig, "radius must lie in [0, 6]");
  }
  if (nbits < 64 || !std::has_single_bit(static_cast<unsigned>(nbits))) {
    throw Error(Errc::kInvalidConfig, "nbits must be a power of two >= 64");
  }
}

std::string FingerprintConfig::descriptor() const {
  return "r" + std::to_string(radius) + "b" + std::to_string(nbits) + "s" +
         std::to_string(hash_seed);
}

FingerprintVector::FingerprintVector(FingerprintConfig config) : config_(config) {
  config_.validate();
  words_.assign(static_cast<std::size_t>(config_.nbits) / 64, 0);
}

std::string FingerprintVector::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = config_.descriptor() + ":";
  out.reserve(out.size() + static_cast<std::size_t>(size()) / 4);
  for (int k = 0; k < size() / 4; ++k) {
    unsigned nibble = (words_[k / 16] >> ((k % 16) * 4)) & 0xFU;
    out += kDigits[nibble];
  }
  return out;
}

namespace {

template <typename T>
bool read_field(std::string_view& s, char tag, T& out) {
  if (s.empty() || s.front() != tag) return false;
  s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr == s.data()) return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  return true;
}

}  // namespace

FingerprintVector FingerprintVector::from_hex(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(Errc::kFormat, "fingerprint lacks a config prefix");
  }
  std::string_view head = text.substr(0, colon);
  std::string_view hex = text.substr(colon + 1);
  FingerprintConfig cfg;
  if (!read_field(head, 'r', cfg.radius) || !read_field(head, 'b', cfg.nbits) ||
      !read_field(head, 's', cfg.hash_seed) || !head.empty()) {
    throw Error(Errc::kFormat, "malformed fingerprint config prefix");
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(Errc::kFormat, e.what());
  }
  if (hex.size() != static_cast<std::size_t>(cfg.nbits) / 4) {
    throw Error(Errc::kFormat, "fingerprint length does not match its config");
  }
  FingerprintVector v(cfg);
  for (std::size_t k = 0; k < hex.size(); ++k) {
    char c = hex[k];
    unsigned nibble;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      nibble = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw Error(Errc::kFormat, "invalid hex digit in fingerprint");
    }
    v.words_[k / 16] |= static_cast<std::uint64_t>(nibble) << ((k % 16) * 4);
  }
  return v;
}

FingerprintVector circular_fingerprint(const Molecule& input, const FingerprintConfig& cfg) {
  FingerprintVector fp(cfg);
  Molecule mol = largest_fragment(input);
  const int n = mol.atom_count();
  const std::uint64_t mask = static_cast<std::uint64_t>(cfg.nbits) - 1;
  const std::uint64_t base = splitmix64(cfg.hash_seed);

  std::vector<std::uint64_t> inv(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!mol.is_heavy(i)) continue;
    const Atom& a = mol.atom(i);
    std::uint64_t h = hash_combine(base, 0);
    h = hash_combine(h, static_cast<std::uint64_t>(a.atomic_number));
    h = hash_combine(h, static_cast<std::uint64_t>(a.formal_charge + 8));
    h = hash_combine(h, a.aromatic ? 1 : 0);
    h = hash_combine(h, static_cast<std::uint64_t>(mol.heavy_degree(i)));
    h = hash_combine(h, static_cast<std::uint64_t>(mol.total_h(i)));
    h = hash_combine(h, static_cast<std::uint64_t>(a.isotope.value_or(0)));
    inv[i] = h;
    fp.set(static_cast<int>(h & mask));
  }

  std::vector<std::uint64_t> next(n, 0);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  for (int r = 1; r <= cfg.radius; ++r) {
    for (int i = 0; i < n; ++i) {
      if (!mol.is_heavy(i)) continue;
      env.clear();
      for (const Neighbor& nb : mol.neighbors(i)) {
        if (!mol.is_heavy(nb.atom)) continue;
        env.emplace_back(static_cast<std::uint64_t>(mol.bond(nb.bond).order), inv[nb.atom]);
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = hash_combine(base, static_cast<std::uint64_t>(r));
      h = hash_combine(h, inv[i]);
      for (const auto& [order, neighbor] : env) {
        h = hash_combine(h, order);
        h = hash_combine(h, neighbor);
      }
      next[i] = h;
      fp.set(static_cast<int>(h & mask));
    }
    inv.swap(next);
  }
  return fp;
}

int popcount(const FingerprintVector& v) {
  int total = 0;
  for (std::uint64_t w : v.words()) total += std::popcount(w);
  return total;
}

}  // namespace screenforge
