#ifndef SCREENFORGE_ELEMENT_H_
#define SCREENFORGE_ELEMENT_H_

#include <span>
#include <string_view>

namespace screenforge {

struct ElementInfo {
  int atomic_number;
  std::string_view symbol;
  // Standard atomic weight, g/mol (IUPAC conventional values).
  double mass;
  // Default valences used for implicit hydrogens on organic-subset atoms,
  // ascending. Empty for elements that must be written in brackets.
  std::span<const int> valences;
  // May appear without brackets in SMILES.
  bool organic_subset;
  // May appear as a lowercase aromatic symbol.
  bool aromatic_allowed;
};

// nullptr when the symbol is not supported. Case-sensitive ("Cl", not "CL").
const ElementInfo* find_element(std::string_view symbol);
const ElementInfo* find_element(int atomic_number);
// Throws Error(kUnknownElement) for unsupported atomic numbers.
const ElementInfo& element(int atomic_number);

inline constexpr int kHydrogen = 1;
inline constexpr int kBoron = 5;
inline constexpr int kCarbon = 6;
inline constexpr int kNitrogen = 7;
inline constexpr int kOxygen = 8;
inline constexpr int kFluorine = 9;
inline constexpr int kPhosphorus = 15;
inline constexpr int kSulfur = 16;
inline constexpr int kChlorine = 17;
inline constexpr int kBromine = 35;
inline constexpr int kIodine = 53;

}  // namespace screenforge

#endif  // SCREENFORGE_ELEMENT_H_
