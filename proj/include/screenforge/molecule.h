#ifndef SCREENFORGE_MOLECULE_H_
#define SCREENFORGE_MOLECULE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace screenforge {

enum class BondOrder : std::uint8_t { kSingle = 1, kDouble = 2, kTriple = 3, kAromatic = 4 };

// Contribution of a bond to the valence sum of a non-aromatic atom.
int valence_contribution(BondOrder order);

struct Atom {
  int atomic_number = 6;
  int formal_charge = 0;
  std::optional<int> isotope;
  bool aromatic = false;
  // Hydrogen count written inside brackets. Absent for organic-subset atoms,
  // whose hydrogens are derived from default valences.
  std::optional<int> explicit_h;
  // Chirality marker as written ("@", "@@"); recorded, never interpreted.
  std::string chirality;

  bool operator==(const Atom&) const = default;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;
  // '/' or '\\' when the source carried a directional marker, else 0.
  char stereo = 0;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

// Attributed molecular graph. Immutable once constructed; the constructor
// validates every invariant and throws screenforge::Error on violation.
class Molecule {
 public:
  Molecule() = default;
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds);

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Atom& atom(int i) const { return atoms_[i]; }
  const Bond& bond(int i) const { return bonds_[i]; }
  std::span<const Neighbor> neighbors(int i) const { return adjacency_[i]; }
  // -1 when the atoms are not bonded.
  int bond_between(int a, int b) const;

  // Hydrogens carried by the atom itself (bracket count or derived
  // implicit count); excludes explicit [H] neighbor atoms.
  int attached_h(int i) const { return attached_h_[i]; }
  // attached_h plus explicit hydrogen-atom neighbors.
  int total_h(int i) const;
  // Number of non-hydrogen neighbors.
  int heavy_degree(int i) const;
  bool is_heavy(int i) const { return atoms_[i].atomic_number != 1; }
  int heavy_atom_count() const;
  int total_hydrogen_count() const;

  // Minimum cycle basis, each ring as an ordered atom cycle.
  const std::vector<std::vector<int>>& rings() const { return rings_; }
  bool atom_in_ring(int i) const { return atom_ring_count_[i] > 0; }
  int atom_ring_count(int i) const { return atom_ring_count_[i]; }
  bool bond_in_ring(int b) const { return bond_in_ring_[b] != 0; }
  bool atom_in_ring_of_size(int i, int size) const;

  int fragment_count() const { return fragment_count_; }
  // Connected-component index per atom, numbered by lowest member atom.
  const std::vector<int>& fragment_ids() const { return fragment_of_; }

  // Returns the molecule restricted to the given atoms (kept in ascending
  // original order), with every bond whose endpoints are both retained.
  Molecule subgraph(std::span<const int> atoms) const;
  // Relabels atoms: new atom k is old atom order[k].
  Molecule renumbered(std::span<const int> order) const;

 private:
  void validate_and_index();
  void perceive_rings();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<int> attached_h_;
  std::vector<std::vector<int>> rings_;
  std::vector<int> atom_ring_count_;
  std::vector<char> bond_in_ring_;
  std::vector<int> fragment_of_;
  int fragment_count_ = 0;
};

// Implicit hydrogen count an organic-subset atom would receive with the given
// bonds, or nullopt when every default valence is exceeded.
std::optional<int> implicit_hydrogens(const Molecule& mol, int atom);

// Hill-order formula (C, H, then alphabetical; alphabetical throughout when
// no carbon is present). Includes implicit hydrogens; ignores charge.
std::string molecular_formula(const Molecule& mol);

// Sum of standard atomic weights including all hydrogens. Isotope-labelled
// atoms use their mass number.
double molecular_weight(const Molecule& mol);

// Connected component with the most heavy atoms; ties go to the larger
// total mass, then to the component holding the lowest atom index.
Molecule largest_fragment(const Molecule& mol);

}  // namespace screenforge

#endif  // SCREENFORGE_MOLECULE_H_
