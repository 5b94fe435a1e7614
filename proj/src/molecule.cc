#include "screenforge/molecule.h"

#include <algorithm>
#include <bit>
#include <iterator>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "screenforge/element.h"
#include "screenforge/error.h"

namespace screenforge {

int valence_contribution(BondOrder order) {
  switch (order) {
    case BondOrder::kSingle: return 1;
    case BondOrder::kDouble: return 2;
    case BondOrder::kTriple: return 3;
    case BondOrder::kAromatic: return 1;
  }
  return 1;
}

namespace {

// Valence rule shared by the constructor and implicit_hydrogens(). Aromatic
// atoms count each aromatic bond as 1 and take one extra bond (the pi bond)
// when their default valence leaves room for it; pyrrole-type lone-pair
// donors (aromatic o, s, substituted n) therefore receive no extra bond.
std::optional<int> derive_implicit_h(const Atom& atom, int bond_sum) {
  const ElementInfo& info = element(atom.atomic_number);
  if (!info.organic_subset || atom.formal_charge != 0) return 0;
  for (int valence : info.valences) {
    if (valence < bond_sum) continue;
    if (!atom.aromatic) return valence - bond_sum;
    return valence >= bond_sum + 1 ? valence - bond_sum - 1 : 0;
  }
  return std::nullopt;
}

int bond_sum_for(const Molecule& mol, int atom) {
  int sum = 0;
  for (const Neighbor& nb : mol.neighbors(atom)) {
    sum += valence_contribution(mol.bond(nb.bond).order);
  }
  return sum;
}

using EdgeSet = std::vector<std::uint64_t>;

bool xor_reduce(std::vector<EdgeSet>& basis, std::vector<int>& pivots,
                EdgeSet v) {
  for (std::size_t k = 0; k < basis.size(); ++k) {
    int p = pivots[k];
    if ((v[p / 64] >> (p % 64)) & 1U) {
      for (std::size_t w = 0; w < v.size(); ++w) v[w] ^= basis[k][w];
    }
  }
  for (std::size_t w = 0; w < v.size(); ++w) {
    if (v[w] != 0) {
      int bit = static_cast<int>(w * 64) + std::countr_zero(v[w]);
      // Keep the basis fully reduced on the new pivot.
      for (auto& b : basis) {
        if ((b[bit / 64] >> (bit % 64)) & 1U) {
          for (std::size_t x = 0; x < b.size(); ++x) b[x] ^= v[x];
        }
      }
      basis.push_back(std::move(v));
      pivots.push_back(bit);
      return true;
    }
  }
  return false;
}

}  // namespace

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  validate_and_index();
  perceive_rings();
}

void Molecule::validate_and_index() {
  const int n = atom_count();
  for (const Atom& a : atoms_) {
    if (find_element(a.atomic_number) == nullptr) {
      throw Error(Errc::kUnknownElement,
                  "atomic number " + std::to_string(a.atomic_number));
    }
    if (a.formal_charge < -4 || a.formal_charge > 4) {
      throw Error(Errc::kInvalidCharge,
                  "formal charge " + std::to_string(a.formal_charge));
    }
    if (a.explicit_h && *a.explicit_h < 0) {
      throw Error(Errc::kValenceViolation, "negative hydrogen count");
    }
    if (a.aromatic && !element(a.atomic_number).aromatic_allowed) {
      throw Error(Errc::kSyntax, "element cannot be aromatic");
    }
  }

  adjacency_.assign(n, {});
  for (int b = 0; b < bond_count(); ++b) {
    const Bond& bond = bonds_[b];
    if (bond.begin < 0 || bond.begin >= n || bond.end < 0 || bond.end >= n) {
      throw Error(Errc::kInvalidBond, "bond endpoint out of range");
    }
    if (bond.begin == bond.end) {
      throw Error(Errc::kInvalidBond, "bond joins an atom to itself");
    }
    if (bond.order == BondOrder::kAromatic &&
        !(atoms_[bond.begin].aromatic && atoms_[bond.end].aromatic)) {
      throw Error(Errc::kInvalidBond,
                  "aromatic bond between non-aromatic atoms");
    }
    for (const Neighbor& nb : adjacency_[bond.begin]) {
      if (nb.atom == bond.end) {
        throw Error(Errc::kInvalidBond, "duplicate bond between atoms " +
                                            std::to_string(bond.begin) +
                                            " and " + std::to_string(bond.end));
      }
    }
    adjacency_[bond.begin].push_back({bond.end, b});
    adjacency_[bond.end].push_back({bond.begin, b});
  }

  attached_h_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const Atom& a = atoms_[i];
    if (a.explicit_h) {
      attached_h_[i] = *a.explicit_h;
      continue;
    }
    std::optional<int> h = derive_implicit_h(a, bond_sum_for(*this, i));
    if (!h) {
      throw Error(Errc::kValenceViolation,
                  "atom " + std::to_string(i) + " (" +
                      std::string(element(a.atomic_number).symbol) +
                      ") exceeds every default valence");
    }
    attached_h_[i] = *h;
  }

  fragment_of_.assign(n, -1);
  fragment_count_ = 0;
  for (int start = 0; start < n; ++start) {
    if (fragment_of_[start] >= 0) continue;
    std::queue<int> todo;
    todo.push(start);
    fragment_of_[start] = fragment_count_;
    while (!todo.empty()) {
      int cur = todo.front();
      todo.pop();
      for (const Neighbor& nb : adjacency_[cur]) {
        if (fragment_of_[nb.atom] < 0) {
          fragment_of_[nb.atom] = fragment_count_;
          todo.push(nb.atom);
        }
      }
    }
    ++fragment_count_;
  }
}

// Minimum cycle basis from Horton-style candidates (shortest path from a root
// to each end of an edge), accepted shortest-first while independent over
// GF(2).
void Molecule::perceive_rings() {
  const int n = atom_count();
  const int m = bond_count();
  atom_ring_count_.assign(n, 0);
  bond_in_ring_.assign(m, 0);
  rings_.clear();
  const int cycle_rank = m - n + fragment_count_;
  if (cycle_rank <= 0) return;

  const std::size_t words = (static_cast<std::size_t>(m) + 63) / 64;
  struct Candidate {
    std::vector<int> atoms;
    EdgeSet edges;
  };
  std::vector<Candidate> candidates;
  std::map<EdgeSet, bool> seen;

  std::vector<int> parent(n), parent_bond(n), dist(n);
  for (int root = 0; root < n; ++root) {
    std::fill(parent.begin(), parent.end(), -2);
    std::fill(dist.begin(), dist.end(), -1);
    parent[root] = -1;
    parent_bond[root] = -1;
    dist[root] = 0;
    std::queue<int> todo;
    todo.push(root);
    while (!todo.empty()) {
      int cur = todo.front();
      todo.pop();
      for (const Neighbor& nb : adjacency_[cur]) {
        if (dist[nb.atom] < 0) {
          dist[nb.atom] = dist[cur] + 1;
          parent[nb.atom] = cur;
          parent_bond[nb.atom] = nb.bond;
          todo.push(nb.atom);
        }
      }
    }
    for (int b = 0; b < m; ++b) {
      int x = bonds_[b].begin;
      int y = bonds_[b].end;
      if (dist[x] < 0 || dist[y] < 0) continue;
      if (parent_bond[x] == b || parent_bond[y] == b) continue;
      std::vector<int> path_x, path_y;
      for (int v = x; v != -1; v = parent[v]) path_x.push_back(v);
      for (int v = y; v != -1; v = parent[v]) path_y.push_back(v);
      // Paths must share only the root.
      std::vector<int> sx(path_x.begin(), path_x.end() - 1);
      std::vector<int> sy(path_y.begin(), path_y.end() - 1);
      std::sort(sx.begin(), sx.end());
      std::sort(sy.begin(), sy.end());
      std::vector<int> common;
      std::set_intersection(sx.begin(), sx.end(), sy.begin(), sy.end(),
                            std::back_inserter(common));
      if (!common.empty()) continue;

      Candidate c;
      c.edges.assign(words, 0);
      auto mark = [&](int bond) { c.edges[bond / 64] |= std::uint64_t{1} << (bond % 64); };
      mark(b);
      for (int v = x; parent[v] != -1; v = parent[v]) mark(parent_bond[v]);
      for (int v = y; parent[v] != -1; v = parent[v]) mark(parent_bond[v]);
      if (seen.contains(c.edges)) continue;
      seen[c.edges] = true;
      // root ... x, y ... (toward root)
      c.atoms.assign(path_x.rbegin(), path_x.rend());
      c.atoms.insert(c.atoms.end(), path_y.begin(), path_y.end() - 1);
      candidates.push_back(std::move(c));
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.atoms.size() < b.atoms.size();
                   });

  std::vector<EdgeSet> basis;
  std::vector<int> pivots;
  for (Candidate& c : candidates) {
    if (static_cast<int>(rings_.size()) == cycle_rank) break;
    if (!xor_reduce(basis, pivots, c.edges)) continue;
    for (int b = 0; b < m; ++b) {
      if ((c.edges[b / 64] >> (b % 64)) & 1U) bond_in_ring_[b] = 1;
    }
    for (int a : c.atoms) ++atom_ring_count_[a];
    rings_.push_back(std::move(c.atoms));
  }
}

int Molecule::bond_between(int a, int b) const {
  for (const Neighbor& nb : adjacency_[a]) {
    if (nb.atom == b) return nb.bond;
  }
  return -1;
}

int Molecule::total_h(int i) const {
  int h = attached_h_[i];
  for (const Neighbor& nb : adjacency_[i]) {
    if (atoms_[nb.atom].atomic_number == kHydrogen) ++h;
  }
  return h;
}

int Molecule::heavy_degree(int i) const {
  int d = 0;
  for (const Neighbor& nb : adjacency_[i]) {
    if (atoms_[nb.atom].atomic_number != kHydrogen) ++d;
  }
  return d;
}

int Molecule::heavy_atom_count() const {
  return static_cast<int>(std::count_if(atoms_.begin(), atoms_.end(), [](const Atom& a) {
    return a.atomic_number != kHydrogen;
  }));
}

int Molecule::total_hydrogen_count() const {
  int h = std::accumulate(attached_h_.begin(), attached_h_.end(), 0);
  for (const Atom& a : atoms_) {
    if (a.atomic_number == kHydrogen) ++h;
  }
  return h;
}

bool Molecule::atom_in_ring_of_size(int i, int size) const {
  for (const auto& ring : rings_) {
    if (static_cast<int>(ring.size()) == size &&
        std::find(ring.begin(), ring.end(), i) != ring.end()) {
      return true;
    }
  }
  return false;
}

Molecule Molecule::subgraph(std::span<const int> keep) const {
  std::vector<int> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> new_index(atom_count(), -1);
  std::vector<Atom> atoms;
  atoms.reserve(sorted.size());
  for (int old : sorted) {
    new_index[old] = static_cast<int>(atoms.size());
    atoms.push_back(atoms_[old]);
  }
  std::vector<Bond> bonds;
  for (const Bond& b : bonds_) {
    if (new_index[b.begin] >= 0 && new_index[b.end] >= 0) {
      bonds.push_back({new_index[b.begin], new_index[b.end], b.order, b.stereo});
    }
  }
  return Molecule(std::move(atoms), std::move(bonds));
}

Molecule Molecule::renumbered(std::span<const int> order) const {
  std::vector<int> new_index(atom_count(), -1);
  std::vector<Atom> atoms;
  atoms.reserve(order.size());
  for (int k = 0; k < static_cast<int>(order.size()); ++k) {
    new_index[order[k]] = k;
    atoms.push_back(atoms_[order[k]]);
  }
  std::vector<Bond> bonds;
  bonds.reserve(bonds_.size());
  for (const Bond& b : bonds_) {
    bonds.push_back({new_index[b.begin], new_index[b.end], b.order, b.stereo});
  }
  return Molecule(std::move(atoms), std::move(bonds));
}

std::optional<int> implicit_hydrogens(const Molecule& mol, int atom) {
  return derive_implicit_h(mol.atom(atom), bond_sum_for(mol, atom));
}

std::string molecular_formula(const Molecule& mol) {
  std::map<std::string, int> counts;
  int hydrogens = mol.total_hydrogen_count();
  for (const Atom& a : mol.atoms()) {
    if (a.atomic_number == kHydrogen) continue;
    ++counts[std::string(element(a.atomic_number).symbol)];
  }
  if (hydrogens > 0) counts["H"] = hydrogens;

  auto term = [](const std::string& sym, int count) {
    return count == 1 ? sym : sym + std::to_string(count);
  };
  std::string out;
  if (counts.contains("C")) {
    out += term("C", counts["C"]);
    counts.erase("C");
    if (counts.contains("H")) {
      out += term("H", counts["H"]);
      counts.erase("H");
    }
  }
  for (const auto& [sym, count] : counts) out += term(sym, count);
  return out;
}

namespace {

double atom_mass(const Atom& a) {
  if (a.isotope) return static_cast<double>(*a.isotope);
  return element(a.atomic_number).mass;
}

}  // namespace

double molecular_weight(const Molecule& mol) {
  const double h_mass = element(kHydrogen).mass;
  double total = 0.0;
  for (int i = 0; i < mol.atom_count(); ++i) {
    total += atom_mass(mol.atom(i)) + h_mass * mol.attached_h(i);
  }
  return total;
}

Molecule largest_fragment(const Molecule& mol) {
  if (mol.fragment_count() <= 1) return mol;
  const double h_mass = element(kHydrogen).mass;
  const int k = mol.fragment_count();
  std::vector<int> heavy(k, 0);
  std::vector<double> mass(k, 0.0);
  for (int i = 0; i < mol.atom_count(); ++i) {
    int f = mol.fragment_ids()[i];
    if (mol.is_heavy(i)) ++heavy[f];
    mass[f] += atom_mass(mol.atom(i)) + h_mass * mol.attached_h(i);
  }
  // Fragment ids already follow lowest member index, so a strict comparison
  // keeps the earliest fragment on a full tie.
  int best = 0;
  for (int f = 1; f < k; ++f) {
    if (heavy[f] > heavy[best] ||
        (heavy[f] == heavy[best] && mass[f] > mass[best])) {
      best = f;
    }
  }
  std::vector<int> keep;
  for (int i = 0; i < mol.atom_count(); ++i) {
    if (mol.fragment_ids()[i] == best) keep.push_back(i);
  }
  return mol.subgraph(keep);
}

}  // namespace screenforge
