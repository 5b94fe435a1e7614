#ifndef SCREENFORGE_CONSTANTS_H_
#define SCREENFORGE_CONSTANTS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace screenforge {

// Versioned key = value table holding the TPSA fragment contributions, the
// logP atom-type contributions and the ADME thresholds.
class ConstantsTable {
 public:
  static constexpr int kFormatVersion = 1;

  // Table compiled from data/admet_constants.txt.
  static const ConstantsTable& defaults();

  // Throws Error(kFormat) on malformed lines or a missing/unsupported
  // format_version.
  static ConstantsTable parse(std::string_view text);
  static ConstantsTable load(const std::filesystem::path& path);

  // Returns a copy of *this with every key of `overrides` replaced.
  ConstantsTable merged(const ConstantsTable& overrides) const;

  std::optional<double> find(std::string_view key) const;
  // Throws Error(kFormat) when the key is absent.
  double get(std::string_view key) const;

  const std::map<std::string, double, std::less<>>& values() const { return values_; }

 private:
  std::map<std::string, double, std::less<>> values_;
};

}  // namespace screenforge

#endif  // SCREENFORGE_CONSTANTS_H_
