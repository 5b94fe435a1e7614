#ifndef SCREENFORGE_SMILES_H_
#define SCREENFORGE_SMILES_H_

#include <string>
#include <string_view>
#include <vector>

#include "screenforge/molecule.h"

namespace screenforge {

// Parses the Daylight organic subset plus bracket atoms carrying isotope,
// chirality, hydrogen count and charge. Bond symbols - = # : / \, branches,
// ring closures (including %nn) and '.'-separated fragments are accepted.
// Stereo markers are stored on the graph but not interpreted. Throws
// screenforge::Error on any failure; never crashes on arbitrary input.
Molecule parse_smiles(std::string_view text);

// Canonical atom ranking: Morgan-style refinement of atom invariants over
// neighbor ranks, with remaining ties broken on the lowest original index
// and refined again until every rank is distinct. rank[i] is in [0, n).
std::vector<int> canonical_ranks(const Molecule& mol);

// SMILES written in canonical rank order. Stereo annotations are not
// emitted. Identical for any atom ordering of the same graph and re-parses
// to an isomorphic molecule.
std::string canonical_smiles(const Molecule& mol);

}  // namespace screenforge

#endif  // SCREENFORGE_SMILES_H_
