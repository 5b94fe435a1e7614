#include "screenforge/smiles.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>

#include "screenforge/element.h"
#include "screenforge/error.h"

namespace screenforge {
namespace {

// Symbols of every element, so an unsupported real element is reported as
// UnknownElement rather than as a syntax error.
constexpr std::array<std::string_view, 118> kAllSymbols{
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
    "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
    "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
    "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
    "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

bool is_real_symbol(std::string_view s) {
  return std::find(kAllSymbols.begin(), kAllSymbols.end(), s) != kAllSymbols.end();
}

struct PendingBond {
  BondOrder order = BondOrder::kSingle;
  char stereo = 0;
  bool set = false;
};

struct OpenRing {
  int atom;
  PendingBond bond;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Molecule run() {
    if (text_.empty()) throw Error(Errc::kSyntax, "empty SMILES");
    bool expect_atom_after_paren = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(') {
        if (prev_ < 0) fail(Errc::kSyntax, "branch without a preceding atom");
        if (pending_.set) fail(Errc::kSyntax, "bond symbol before '('");
        branches_.push_back(prev_);
        expect_atom_after_paren = true;
        ++pos_;
      } else if (c == ')') {
        if (branches_.empty()) fail(Errc::kUnbalancedParenthesis, "unmatched ')'");
        if (expect_atom_after_paren) fail(Errc::kSyntax, "empty branch");
        if (pending_.set) fail(Errc::kSyntax, "dangling bond at end of branch");
        prev_ = branches_.back();
        branches_.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (pending_.set) fail(Errc::kSyntax, "bond symbol before '.'");
        if (prev_ < 0) fail(Errc::kSyntax, "empty fragment");
        if (!branches_.empty()) fail(Errc::kUnbalancedParenthesis, "'.' inside a branch");
        prev_ = -1;
        ++pos_;
      } else if (is_bond_symbol(c)) {
        if (prev_ < 0) fail(Errc::kSyntax, "bond symbol without a preceding atom");
        if (pending_.set) fail(Errc::kSyntax, "consecutive bond symbols");
        pending_ = bond_from_symbol(c);
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev_ < 0 || expect_atom_after_paren) {
          fail(Errc::kSyntax, "ring closure without a preceding atom");
        }
        ring_closure(read_ring_number());
      } else if (c == '[') {
        add_atom(read_bracket_atom());
        expect_atom_after_paren = false;
      } else {
        add_atom(read_organic_atom());
        expect_atom_after_paren = false;
      }
    }
    if (pending_.set) fail(Errc::kSyntax, "dangling bond at end of input");
    if (!branches_.empty()) fail(Errc::kUnbalancedParenthesis, "unclosed '('");
    if (!rings_.empty()) {
      fail(Errc::kUnclosedRing,
           "ring closure " + std::to_string(rings_.begin()->first) + " never closed");
    }
    if (prev_ < 0) fail(Errc::kSyntax, "trailing '.'");
    return build();
  }

 private:
  [[noreturn]] void fail(Errc code, const std::string& msg) const {
    throw Error(code, msg + " at position " + std::to_string(pos_));
  }

  static bool is_bond_symbol(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\';
  }

  static PendingBond bond_from_symbol(char c) {
    PendingBond b;
    b.set = true;
    switch (c) {
      case '=': b.order = BondOrder::kDouble; break;
      case '#': b.order = BondOrder::kTriple; break;
      case ':': b.order = BondOrder::kAromatic; break;
      case '/':
      case '\\': b.stereo = c; break;
      default: break;
    }
    return b;
  }

  int read_ring_number() {
    if (text_[pos_] != '%') return text_[pos_++] - '0';
    if (pos_ + 2 >= text_.size() ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
      fail(Errc::kSyntax, "'%' must be followed by two digits");
    }
    int n = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
    pos_ += 3;
    return n;
  }

  void ring_closure(int number) {
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_[number] = {prev_, pending_};
      pending_ = {};
      return;
    }
    OpenRing open = it->second;
    rings_.erase(it);
    PendingBond bond = pending_;
    if (open.bond.set && bond.set &&
        (open.bond.order != bond.order)) {
      fail(Errc::kInvalidBond, "conflicting ring-closure bond orders");
    }
    if (!bond.set) bond = open.bond;
    if (open.atom == prev_) fail(Errc::kInvalidBond, "ring closure to the same atom");
    connect(open.atom, prev_, bond);
    pending_ = {};
  }

  void connect(int a, int b, PendingBond bond) {
    for (const auto& existing : bonds_) {
      if ((existing.begin == a && existing.end == b) ||
          (existing.begin == b && existing.end == a)) {
        fail(Errc::kInvalidBond, "duplicate bond");
      }
    }
    Bond out{a, b, bond.order, bond.stereo};
    if (!bond.set) {
      if (atoms_[a].aromatic && atoms_[b].aromatic) {
        out.order = BondOrder::kAromatic;
        implied_aromatic_.push_back(static_cast<int>(bonds_.size()));
      }
    }
    bonds_.push_back(out);
  }

  void add_atom(Atom atom) {
    atoms_.push_back(std::move(atom));
    int idx = static_cast<int>(atoms_.size()) - 1;
    if (prev_ >= 0) connect(prev_, idx, pending_);
    pending_ = {};
    prev_ = idx;
  }

  Atom read_organic_atom() {
    char c = text_[pos_];
    Atom atom;
    std::string sym;
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      sym = "Cl";
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      sym = "Br";
    } else if (std::string_view("BCNOPSFI").find(c) != std::string_view::npos) {
      sym = std::string(1, c);
    } else if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      sym = std::string(1, static_cast<char>(std::toupper(c)));
      atom.aromatic = true;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      fail(Errc::kUnknownElement,
           std::string("'") + c + "' is not an organic-subset element");
    } else {
      fail(Errc::kSyntax, std::string("unexpected character '") + c + "'");
    }
    pos_ += sym.size();
    atom.atomic_number = find_element(sym)->atomic_number;
    return atom;
  }

  // Reads up to max_digits decimal digits; nullopt when none are present.
  std::optional<int> read_number(int max_digits) {
    int value = 0;
    int digits = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (++digits > max_digits) fail(Errc::kSyntax, "number too long");
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    if (digits == 0) return std::nullopt;
    return value;
  }

  Atom read_bracket_atom() {
    ++pos_;  // '['
    Atom atom;
    atom.isotope = read_number(3);
    if (pos_ >= text_.size()) fail(Errc::kSyntax, "unterminated bracket atom");

    char c = text_[pos_];
    std::string sym;
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
          is_real_symbol(text_.substr(pos_, 2))) {
        sym = std::string(text_.substr(pos_, 2));
      } else {
        sym = std::string(1, c);
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      atom.aromatic = true;
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        std::string two{static_cast<char>(std::toupper(c)), text_[pos_ + 1]};
        if (is_real_symbol(two)) sym = two;
      }
      if (sym.empty()) sym = std::string(1, static_cast<char>(std::toupper(c)));
    } else {
      fail(Errc::kSyntax, "bracket atom without an element symbol");
    }
    if (!is_real_symbol(sym)) fail(Errc::kSyntax, "'" + sym + "' is not an element");
    const ElementInfo* info = find_element(sym);
    if (info == nullptr) fail(Errc::kUnknownElement, "unsupported element " + sym);
    if (atom.aromatic && !info->aromatic_allowed) {
      fail(Errc::kUnknownElement, "unsupported aromatic element " + sym);
    }
    atom.atomic_number = info->atomic_number;
    pos_ += sym.size();

    if (pos_ < text_.size() && text_[pos_] == '@') {
      ++pos_;
      atom.chirality = "@";
      if (pos_ < text_.size() && text_[pos_] == '@') {
        ++pos_;
        atom.chirality = "@@";
      }
    }
    int h = 0;
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      h = read_number(1).value_or(1);
    }
    atom.explicit_h = h;

    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      char sign = text_[pos_++];
      int magnitude = 1;
      if (auto n = read_number(1)) {
        magnitude = *n;
      } else {
        while (pos_ < text_.size() && text_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      atom.formal_charge = sign == '+' ? magnitude : -magnitude;
    }
    if (pos_ >= text_.size()) fail(Errc::kSyntax, "unterminated bracket atom");
    if (text_[pos_] != ']') {
      fail(Errc::kSyntax, std::string("unsupported bracket-atom feature '") + text_[pos_] + "'");
    }
    ++pos_;
    return atom;
  }

  Molecule build() {
    Molecule mol(atoms_, bonds_);
    // An implied bond between two aromatic atoms outside any ring (biaryl
    // link) is single.
    bool changed = false;
    for (int b : implied_aromatic_) {
      if (!mol.bond_in_ring(b)) {
        bonds_[b].order = BondOrder::kSingle;
        changed = true;
      }
    }
    if (!changed) return mol;
    return Molecule(std::move(atoms_), std::move(bonds_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  PendingBond pending_;
  std::vector<int> branches_;
  std::map<int, OpenRing> rings_;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<int> implied_aromatic_;
};

std::vector<int> dense_ranks(const std::vector<std::vector<long>>& keys) {
  std::vector<int> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(keys.size());
  int r = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && keys[order[k]] != keys[order[k - 1]]) ++r;
    rank[order[k]] = r;
  }
  return rank;
}

int class_count(const std::vector<int>& ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
}

std::vector<int> refine(const Molecule& mol, std::vector<int> ranks) {
  const int n = mol.atom_count();
  int classes = class_count(ranks);
  while (true) {
    std::vector<std::vector<long>> keys(n);
    for (int i = 0; i < n; ++i) {
      std::vector<long> nbrs;
      for (const Neighbor& nb : mol.neighbors(i)) {
        nbrs.push_back(static_cast<long>(ranks[nb.atom]) * 8 +
                       static_cast<long>(mol.bond(nb.bond).order));
      }
      std::sort(nbrs.begin(), nbrs.end());
      keys[i].push_back(ranks[i]);
      keys[i].insert(keys[i].end(), nbrs.begin(), nbrs.end());
    }
    std::vector<int> next = dense_ranks(keys);
    int next_classes = class_count(next);
    ranks = std::move(next);
    if (next_classes == classes) return ranks;
    classes = next_classes;
  }
}

std::string atom_token(const Molecule& mol, int i) {
  const Atom& a = mol.atom(i);
  const ElementInfo& info = element(a.atomic_number);
  std::string sym(info.symbol);
  if (a.aromatic) {
    for (char& ch : sym) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  bool bare = info.organic_subset && !a.isotope && a.formal_charge == 0;
  if (bare) {
    std::optional<int> implied = implicit_hydrogens(mol, i);
    bare = implied && *implied == mol.attached_h(i);
  }
  if (bare) return sym;

  std::string out = "[";
  if (a.isotope) out += std::to_string(*a.isotope);
  out += sym;
  int h = mol.attached_h(i);
  if (h == 1) out += "H";
  if (h > 1) out += "H" + std::to_string(h);
  if (a.formal_charge > 0) out += "+";
  if (a.formal_charge < 0) out += "-";
  if (std::abs(a.formal_charge) > 1) out += std::to_string(std::abs(a.formal_charge));
  out += "]";
  return out;
}

std::string bond_token(const Molecule& mol, int b) {
  const Bond& bond = mol.bond(b);
  bool both_aromatic = mol.atom(bond.begin).aromatic && mol.atom(bond.end).aromatic;
  switch (bond.order) {
    case BondOrder::kSingle: return both_aromatic ? "-" : "";
    case BondOrder::kDouble: return "=";
    case BondOrder::kTriple: return "#";
    case BondOrder::kAromatic: return mol.bond_in_ring(b) ? "" : ":";
  }
  return "";
}

class Writer {
 public:
  Writer(const Molecule& mol, std::vector<int> ranks)
      : mol_(mol), ranks_(std::move(ranks)) {}

  std::string run() {
    const int n = mol_.atom_count();
    visited_.assign(n, false);
    bond_used_.assign(mol_.bond_count(), false);
    children_.assign(n, {});
    ring_edges_.assign(n, {});

    std::vector<int> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::sort(by_rank.begin(), by_rank.end(),
              [&](int a, int b) { return ranks_[a] < ranks_[b]; });

    std::string out;
    for (int start : by_rank) {
      if (visited_[start]) continue;
      discover(start, -1);
      if (!out.empty()) out += '.';
      write(start, out);
    }
    return out;
  }

 private:
  std::vector<Neighbor> sorted_neighbors(int atom) const {
    auto span = mol_.neighbors(atom);
    std::vector<Neighbor> nbrs(span.begin(), span.end());
    std::sort(nbrs.begin(), nbrs.end(), [&](const Neighbor& a, const Neighbor& b) {
      return ranks_[a.atom] < ranks_[b.atom];
    });
    return nbrs;
  }

  void discover(int atom, int parent_bond) {
    visited_[atom] = true;
    if (parent_bond >= 0) bond_used_[parent_bond] = true;
    for (const Neighbor& nb : sorted_neighbors(atom)) {
      if (bond_used_[nb.bond]) continue;
      if (visited_[nb.atom]) {
        // Back edge to an ancestor: opens there, closes here.
        bond_used_[nb.bond] = true;
        ring_edges_[nb.atom].push_back(nb.bond);
        ring_edges_[atom].push_back(nb.bond);
        continue;
      }
      children_[atom].push_back(nb);
      discover(nb.atom, nb.bond);
    }
  }

  void write(int atom, std::string& out) {
    out += atom_token(mol_, atom);
    std::vector<int> closes;
    std::vector<int> opens;
    for (int b : ring_edges_[atom]) {
      if (open_digit_.contains(b)) {
        closes.push_back(b);
      } else {
        opens.push_back(b);
      }
    }
    for (int b : closes) {
      int digit = open_digit_[b];
      open_digit_.erase(b);
      free_digits_.push_back(digit);
      out += digit_token(digit);
    }
    std::sort(opens.begin(), opens.end(), [&](int a, int b) {
      return ranks_[mol_.bond(a).other(atom)] < ranks_[mol_.bond(b).other(atom)];
    });
    for (int b : opens) {
      int digit = take_digit();
      open_digit_[b] = digit;
      out += bond_token(mol_, b);
      out += digit_token(digit);
    }
    const auto& kids = children_[atom];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      bool branch = k + 1 < kids.size();
      if (branch) out += '(';
      out += bond_token(mol_, kids[k].bond);
      write(kids[k].atom, out);
      if (branch) out += ')';
    }
  }

  int take_digit() {
    if (free_digits_.empty()) return next_digit_++;
    auto it = std::min_element(free_digits_.begin(), free_digits_.end());
    int d = *it;
    free_digits_.erase(it);
    return d;
  }

  static std::string digit_token(int d) {
    if (d < 10) return std::to_string(d);
    return "%" + std::to_string(d);
  }

  const Molecule& mol_;
  std::vector<int> ranks_;
  std::vector<bool> visited_;
  std::vector<bool> bond_used_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<int>> ring_edges_;
  std::map<int, int> open_digit_;
  std::vector<int> free_digits_;
  int next_digit_ = 1;
};

}  // namespace

Molecule parse_smiles(std::string_view text) { return Parser(text).run(); }

std::vector<int> canonical_ranks(const Molecule& mol) {
  const int n = mol.atom_count();
  std::vector<std::vector<long>> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = mol.atom(i);
    keys[i] = {a.atomic_number,
               a.isotope.value_or(0),
               a.formal_charge,
               a.aromatic ? 1 : 0,
               static_cast<long>(mol.neighbors(i).size()),
               mol.attached_h(i),
               mol.atom_ring_count(i)};
  }
  std::vector<int> ranks = refine(mol, dense_ranks(keys));
  while (class_count(ranks) < n) {
    // Lowest tied class; split off its lowest-index member.
    std::vector<int> members_of_rank(n, 0);
    for (int r : ranks) ++members_of_rank[r];
    int tied = 0;
    while (members_of_rank[tied] < 2) ++tied;
    int chosen = -1;
    for (int i = 0; i < n; ++i) {
      if (ranks[i] == tied) {
        chosen = i;
        break;
      }
    }
    std::vector<std::vector<long>> split(n);
    for (int i = 0; i < n; ++i) {
      split[i] = {static_cast<long>(ranks[i]) * 2 + (i == chosen ? 0 : 1)};
    }
    ranks = refine(mol, dense_ranks(split));
  }
  return ranks;
}

std::string canonical_smiles(const Molecule& mol) {
  if (mol.atom_count() == 0) return "";
  return Writer(mol, canonical_ranks(mol)).run();
}

}  // namespace screenforge
