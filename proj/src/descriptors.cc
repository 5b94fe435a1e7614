#include "screenforge/descriptors.h"

#include <cctype>
#include <cmath>
#include <string>

#include "screenforge/element.h"
#include "screenforge/error.h"

namespace screenforge {

void DescriptorSet::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(mw) || !finite(tpsa) || !finite(wlogp)) {
    throw Error(Errc::kInvalidDescriptors, "non-finite descriptor value");
  }
  if (mw <= 0.0) throw Error(Errc::kInvalidDescriptors, "mw must be positive");
  if (tpsa < 0.0) throw Error(Errc::kInvalidDescriptors, "tpsa must be non-negative");
  if (hbd < 0 || hba < 0 || rotatable_bonds < 0 || heavy_atoms < 0 || anionic_groups < 0) {
    throw Error(Errc::kInvalidDescriptors, "negative count");
  }
}

double descriptor_value(const DescriptorSet& d, std::string_view name) {
  if (name == "mw") return d.mw;
  if (name == "tpsa") return d.tpsa;
  if (name == "wlogp") return d.wlogp;
  if (name == "hbd") return d.hbd;
  if (name == "hba") return d.hba;
  if (name == "rotatable_bonds") return d.rotatable_bonds;
  if (name == "heavy_atoms") return d.heavy_atoms;
  throw Error(Errc::kInvalidConfig, "unknown descriptor " + std::string(name));
}

double molecular_weight(std::string_view formula) {
  if (formula.empty()) throw Error(Errc::kFormat, "empty formula");
  double total = 0.0;
  std::size_t i = 0;
  while (i < formula.size()) {
    if (!std::isupper(static_cast<unsigned char>(formula[i]))) {
      throw Error(Errc::kFormat, "malformed formula '" + std::string(formula) + "'");
    }
    std::string sym(1, formula[i++]);
    if (i < formula.size() && std::islower(static_cast<unsigned char>(formula[i]))) {
      sym += formula[i++];
    }
    long count = 0;
    int digits = 0;
    while (i < formula.size() && std::isdigit(static_cast<unsigned char>(formula[i]))) {
      if (++digits > 6) throw Error(Errc::kFormat, "element count too large");
      count = count * 10 + (formula[i++] - '0');
    }
    if (digits == 0) count = 1;
    const ElementInfo* info = find_element(sym);
    if (info == nullptr) throw Error(Errc::kUnknownElement, "unsupported element " + sym);
    total += info->mass * static_cast<double>(count);
  }
  return total;
}

namespace {

struct BondProfile {
  int single = 0;
  int dbl = 0;
  int triple = 0;
  int aromatic = 0;
};

BondProfile heavy_bond_profile(const Molecule& mol, int atom) {
  BondProfile p;
  for (const Neighbor& nb : mol.neighbors(atom)) {
    if (!mol.is_heavy(nb.atom)) continue;
    switch (mol.bond(nb.bond).order) {
      case BondOrder::kSingle: ++p.single; break;
      case BondOrder::kDouble: ++p.dbl; break;
      case BondOrder::kTriple: ++p.triple; break;
      case BondOrder::kAromatic: ++p.aromatic; break;
    }
  }
  return p;
}

bool is_carbonyl_carbon(const Molecule& mol, int atom) {
  if (mol.atom(atom).atomic_number != kCarbon) return false;
  for (const Neighbor& nb : mol.neighbors(atom)) {
    if (mol.atom(nb.atom).atomic_number == kOxygen &&
        mol.bond(nb.bond).order == BondOrder::kDouble) {
      return true;
    }
  }
  return false;
}

bool has_aromatic_neighbor(const Molecule& mol, int atom) {
  for (const Neighbor& nb : mol.neighbors(atom)) {
    if (mol.atom(nb.atom).aromatic) return true;
  }
  return false;
}

bool is_amide_nitrogen(const Molecule& mol, int atom) {
  if (mol.atom(atom).atomic_number != kNitrogen || mol.atom(atom).aromatic) return false;
  for (const Neighbor& nb : mol.neighbors(atom)) {
    if (mol.bond(nb.bond).order == BondOrder::kSingle && is_carbonyl_carbon(mol, nb.atom)) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::string tpsa_environment(const Molecule& mol, int atom) {
  const Atom& a = mol.atom(atom);
  if (a.atomic_number != kNitrogen && a.atomic_number != kOxygen) return {};
  std::string key = "tpsa.";
  key += a.atomic_number == kNitrogen ? (a.aromatic ? "n" : "N") : (a.aromatic ? "o" : "O");
  if (a.formal_charge > 0) key += '+';
  if (a.formal_charge < 0) key += '-';
  key += ".h" + std::to_string(mol.total_h(atom)) + ".";
  BondProfile p = heavy_bond_profile(mol, atom);
  auto part = [&](char tag, int count) {
    if (count > 0) key += tag + std::to_string(count);
  };
  part('s', p.single);
  part('d', p.dbl);
  part('t', p.triple);
  part('a', p.aromatic);
  if (mol.atom_in_ring_of_size(atom, 3)) key += ".r3";
  return key;
}

double tpsa(const Molecule& mol, const ConstantsTable& constants) {
  double total = 0.0;
  for (int i = 0; i < mol.atom_count(); ++i) {
    std::string env = tpsa_environment(mol, i);
    if (env.empty()) continue;
    total += constants.find(env).value_or(0.0);
  }
  return total;
}

std::string logp_atom_type(const Molecule& mol, int atom) {
  const Atom& a = mol.atom(atom);
  const int h = mol.total_h(atom);
  BondProfile p = heavy_bond_profile(mol, atom);
  switch (a.atomic_number) {
    case kCarbon: {
      if (a.aromatic) {
        if (h > 0) return "c_h";
        bool hetero_sub = false;
        bool carbon_sub = false;
        for (const Neighbor& nb : mol.neighbors(atom)) {
          if (!mol.is_heavy(nb.atom) || mol.bond(nb.bond).order == BondOrder::kAromatic) continue;
          if (mol.atom(nb.atom).atomic_number != kCarbon ||
              mol.bond(nb.bond).order != BondOrder::kSingle) {
            hetero_sub = true;
          } else {
            carbon_sub = true;
          }
        }
        if (hetero_sub) return "c_hetero";
        if (carbon_sub) return "c_carbon";
        return "c_fused";
      }
      bool hetero_neighbor = false;
      bool multiple_to_hetero = false;
      for (const Neighbor& nb : mol.neighbors(atom)) {
        int z = mol.atom(nb.atom).atomic_number;
        if (z == kCarbon || z == kHydrogen) continue;
        hetero_neighbor = true;
        if (mol.bond(nb.bond).order != BondOrder::kSingle) multiple_to_hetero = true;
      }
      if (multiple_to_hetero) return "C_unsat_hetero";
      if (p.triple > 0) return "C_alkyne";
      if (p.dbl > 0) return "C_alkene";
      if (hetero_neighbor) return h >= 2 ? "C_sp3_hetero" : "C_sp3_hetero_branched";
      return h >= 2 ? "C_sp3" : "C_sp3_branched";
    }
    case kNitrogen:
      if (a.aromatic) return "n_aromatic";
      if (a.formal_charge != 0) return "N_charged";
      if (p.dbl > 0 || p.triple > 0) return "N_unsat";
      if (h >= 2) return "N_primary";
      if (h == 1) return "N_secondary";
      return "N_tertiary";
    case kOxygen:
      if (a.aromatic) return "o_aromatic";
      if (a.formal_charge < 0) return "O_anion";
      if (p.dbl > 0) return has_aromatic_neighbor(mol, atom) ? "O_carbonyl_aromatic" : "O_carbonyl";
      if (h >= 1) return "O_hydroxyl";
      return has_aromatic_neighbor(mol, atom) ? "O_ether_aromatic" : "O_ether";
    case kSulfur:
      if (a.aromatic) return "s_aromatic";
      return p.dbl > 0 ? "S_oxidized" : "S";
    case kPhosphorus: return "P";
    case kFluorine: return "F";
    case kChlorine: return "Cl";
    case kBromine: return "Br";
    case kIodine: return "I";
    default: return {};
  }
}

std::string logp_hydrogen_type(const Molecule& mol, int atom) {
  switch (mol.atom(atom).atomic_number) {
    case kCarbon: return "H_hydrocarbon";
    case kNitrogen: return "H_amine";
    case kOxygen:
      for (const Neighbor& nb : mol.neighbors(atom)) {
        if (is_carbonyl_carbon(mol, nb.atom)) return "H_acid";
      }
      return "H_alcohol";
    default: return "H_other";
  }
}

LogPResult wlogp(const Molecule& mol, const ConstantsTable& constants) {
  LogPResult result;
  const double fallback = constants.find("logp.fallback").value_or(0.0);
  auto lookup = [&](const std::string& type) -> std::optional<double> {
    if (type.empty()) return std::nullopt;
    return constants.find("logp." + type);
  };
  for (int i = 0; i < mol.atom_count(); ++i) {
    if (!mol.is_heavy(i)) {
      // Hydrogens bonded to a heavy atom are counted through that atom.
      if (mol.heavy_degree(i) > 0) continue;
      result.value += lookup("H_other").value_or(fallback);
      continue;
    }
    auto contribution = lookup(logp_atom_type(mol, i));
    if (!contribution) {
      result.untyped_atoms.push_back(i);
      result.value += fallback;
    } else {
      result.value += *contribution;
    }
    int h = mol.total_h(i);
    if (h > 0) result.value += h * lookup(logp_hydrogen_type(mol, i)).value_or(fallback);
  }
  return result;
}

bool is_hbond_acceptor(const Molecule& mol, int atom, const ConstantsTable& constants) {
  int z = mol.atom(atom).atomic_number;
  if (z != kNitrogen && z != kOxygen) return false;
  if (z == kNitrogen && constants.find("hba.exclude_amide_n").value_or(0.0) != 0.0 &&
      is_amide_nitrogen(mol, atom)) {
    return false;
  }
  return true;
}

HBondCounts hbd_hba(const Molecule& mol, const ConstantsTable& constants) {
  HBondCounts c;
  for (int i = 0; i < mol.atom_count(); ++i) {
    int z = mol.atom(i).atomic_number;
    if (z != kNitrogen && z != kOxygen) continue;
    c.hbd += mol.total_h(i);
    if (is_hbond_acceptor(mol, i, constants)) ++c.hba;
  }
  return c;
}

int rotatable_bonds(const Molecule& mol) {
  int count = 0;
  for (int b = 0; b < mol.bond_count(); ++b) {
    const Bond& bond = mol.bond(b);
    if (bond.order != BondOrder::kSingle || mol.bond_in_ring(b)) continue;
    if (!mol.is_heavy(bond.begin) || !mol.is_heavy(bond.end)) continue;
    if (mol.heavy_degree(bond.begin) < 2 || mol.heavy_degree(bond.end) < 2) continue;
    if (heavy_bond_profile(mol, bond.begin).triple > 0 ||
        heavy_bond_profile(mol, bond.end).triple > 0) {
      continue;
    }
    ++count;
  }
  return count;
}

int carboxylic_acid_count(const Molecule& mol) {
  int count = 0;
  for (int i = 0; i < mol.atom_count(); ++i) {
    if (!is_carbonyl_carbon(mol, i) || mol.atom(i).aromatic) continue;
    for (const Neighbor& nb : mol.neighbors(i)) {
      const Atom& o = mol.atom(nb.atom);
      if (o.atomic_number != kOxygen || mol.bond(nb.bond).order != BondOrder::kSingle) continue;
      if (mol.heavy_degree(nb.atom) != 1) continue;
      if (mol.total_h(nb.atom) == 1 || o.formal_charge == -1) {
        ++count;
        break;
      }
    }
  }
  return count;
}

DescriptorSet compute_descriptors(const Molecule& input, const ConstantsTable& constants) {
  Molecule mol = largest_fragment(input);
  DescriptorSet d;
  d.mw = molecular_weight(mol);
  d.tpsa = tpsa(mol, constants);
  d.wlogp = wlogp(mol, constants).value;
  HBondCounts hb = hbd_hba(mol, constants);
  d.hbd = hb.hbd;
  d.hba = hb.hba;
  d.rotatable_bonds = rotatable_bonds(mol);
  d.heavy_atoms = mol.heavy_atom_count();
  d.anionic_groups = carboxylic_acid_count(mol);
  return d;
}

int lipinski_violations(const DescriptorSet& d, const ConstantsTable& constants) {
  int v = 0;
  if (d.mw > constants.get("ro5.mw_max")) ++v;
  if (d.wlogp > constants.get("ro5.wlogp_max")) ++v;
  if (d.hbd > constants.get("ro5.hbd_max")) ++v;
  if (d.hba > constants.get("ro5.hba_max")) ++v;
  return v;
}

AdmetFlags admet_flags(const DescriptorSet& d, const ConstantsTable& constants) {
  d.validate();
  AdmetFlags f;
  f.gi_high = d.tpsa <= constants.get("admet.gi.tpsa_max") &&
              d.wlogp <= constants.get("admet.gi.wlogp_max");
  f.bbb_permeant = d.tpsa <= constants.get("admet.bbb.tpsa_max") &&
                   d.wlogp >= constants.get("admet.bbb.wlogp_min") &&
                   d.wlogp <= constants.get("admet.bbb.wlogp_max");
  f.pgp_substrate = d.mw > constants.get("admet.pgp.mw_min") &&
                    d.tpsa > constants.get("admet.pgp.tpsa_min");
  if (d.anionic_groups > 0) {
    if (d.tpsa < constants.get("bioavailability.anion_tpsa_low")) {
      f.bioavailability = 0.85;
    } else if (d.tpsa <= constants.get("bioavailability.anion_tpsa_high")) {
      f.bioavailability = 0.55;
    } else {
      f.bioavailability = 0.11;
    }
  } else {
    bool ro5_pass = lipinski_violations(d, constants) <= constants.get("ro5.max_violations");
    f.bioavailability = ro5_pass ? 0.55 : 0.17;
  }
  return f;
}

}  // namespace screenforge
