#ifndef SCREENFORGE_DESCRIPTORS_H_
#define SCREENFORGE_DESCRIPTORS_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "screenforge/constants.h"
#include "screenforge/molecule.h"

namespace screenforge {

struct DescriptorSet {
  double mw = 0.0;     // g/mol
  double tpsa = 0.0;   // A^2
  double wlogp = 0.0;
  int hbd = 0;
  int hba = 0;
  int rotatable_bonds = 0;
  int heavy_atoms = 0;
  // Carboxylic acids / carboxylates; selects the anion bioavailability rule.
  int anionic_groups = 0;

  // Throws Error(kInvalidDescriptors) unless mw > 0, tpsa >= 0, every count
  // >= 0 and all values finite.
  void validate() const;

  bool operator==(const DescriptorSet&) const = default;
};

// Field names in the order used for model features and reports.
inline constexpr std::array<std::string_view, 7> kDescriptorNames{
    "mw", "tpsa", "wlogp", "hbd", "hba", "rotatable_bonds", "heavy_atoms"};
double descriptor_value(const DescriptorSet& d, std::string_view name);

struct AdmetFlags {
  bool gi_high = false;
  bool bbb_permeant = false;
  // Two-rule heuristic (mw and tpsa); always reported as approximate.
  bool pgp_substrate = false;
  double bioavailability = 0.0;  // one of 0.11, 0.17, 0.55, 0.85

  bool operator==(const AdmetFlags&) const = default;
};

// Parses a formula such as "C15H10O6" and sums standard atomic weights.
// Throws Error(kUnknownElement) for unsupported symbols, Error(kFormat) for
// malformed text.
double molecular_weight(std::string_view formula);

double tpsa(const Molecule& mol, const ConstantsTable& constants = ConstantsTable::defaults());

// Key under which an N/O atom's TPSA contribution is tabulated, or an empty
// string for atoms that never contribute.
std::string tpsa_environment(const Molecule& mol, int atom);

struct LogPResult {
  double value = 0.0;
  // Atoms with no typing row; each contributed logp.fallback.
  std::vector<int> untyped_atoms;
};

LogPResult wlogp(const Molecule& mol, const ConstantsTable& constants = ConstantsTable::defaults());

// Reduced Crippen type name for a heavy atom ("c_h", "O_hydroxyl", ...), or
// an empty string when the atom has no type.
std::string logp_atom_type(const Molecule& mol, int atom);
// Type for the hydrogens carried by `atom`.
std::string logp_hydrogen_type(const Molecule& mol, int atom);

struct HBondCounts {
  int hbd = 0;  // hydrogens on N or O
  int hba = 0;  // N and O atoms
};

// hba counts every N and O unless hba.exclude_amide_n is set, in which case
// nitrogens bonded to a carbonyl carbon are skipped.
HBondCounts hbd_hba(const Molecule& mol, const ConstantsTable& constants = ConstantsTable::defaults());
bool is_hbond_acceptor(const Molecule& mol, int atom, const ConstantsTable& constants);

// Non-ring single bonds between two non-terminal heavy atoms, excluding
// bonds to triple-bonded atoms.
int rotatable_bonds(const Molecule& mol);

// C(=O)[OH] and C(=O)[O-] groups.
int carboxylic_acid_count(const Molecule& mol);

// Descriptors of the largest fragment.
DescriptorSet compute_descriptors(const Molecule& mol,
                                  const ConstantsTable& constants = ConstantsTable::defaults());

// Pure function of the descriptors; validates them first.
AdmetFlags admet_flags(const DescriptorSet& d,
                       const ConstantsTable& constants = ConstantsTable::defaults());

int lipinski_violations(const DescriptorSet& d, const ConstantsTable& constants);

}  // namespace screenforge

#endif  // SCREENFORGE_DESCRIPTORS_H_
