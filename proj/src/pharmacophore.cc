#include "screenforge/pharmacophore.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "screenforge/constants.h"
#include "screenforge/descriptors.h"
#include "screenforge/element.h"
#include "screenforge/error.h"
#include "screenforge/util.h"

namespace screenforge {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kKindNames{"HBD", "HBA", "Hydrophobe", "AromaticRing",
                                                     "NegIonizable", "PosIonizable"};

bool has_double_to(const Molecule& m, int atom, std::initializer_list<int> elements) {
  for (const Neighbor& nb : m.neighbors(atom)) {
    if (m.bond(nb.bond).order != BondOrder::kDouble) continue;
    int z = m.atom(nb.atom).atomic_number;
    if (std::find(elements.begin(), elements.end(), z) != elements.end()) return true;
  }
  return false;
}

// C(=O)O with the single-bonded oxygen protonated or negatively charged.
bool is_carboxyl_carbon(const Molecule& m, int c) {
  if (m.atom(c).atomic_number != kCarbon || m.atom(c).aromatic) return false;
  bool carbonyl = false, hydroxyl = false;
  for (const Neighbor& nb : m.neighbors(c)) {
    const Atom& o = m.atom(nb.atom);
    if (o.atomic_number != kOxygen) continue;
    BondOrder order = m.bond(nb.bond).order;
    if (order == BondOrder::kDouble) carbonyl = true;
    if (order == BondOrder::kSingle && m.heavy_degree(nb.atom) == 1 &&
        (m.total_h(nb.atom) > 0 || o.formal_charge < 0)) {
      hydroxyl = true;
    }
  }
  return carbonyl && hydroxyl;
}

bool has_charged_neighbor(const Molecule& m, int atom, int sign) {
  for (const Neighbor& nb : m.neighbors(atom)) {
    if (m.atom(nb.atom).formal_charge * sign > 0) return true;
  }
  return false;
}

bool is_basic_amine(const Molecule& m, int n) {
  const Atom& a = m.atom(n);
  if (a.atomic_number != kNitrogen || a.aromatic || a.formal_charge != 0) return false;
  if (m.heavy_degree(n) == 0) return false;
  for (const Neighbor& nb : m.neighbors(n)) {
    if (m.bond(nb.bond).order != BondOrder::kSingle) return false;
    const Atom& x = m.atom(nb.atom);
    if (x.atomic_number == kHydrogen) continue;
    if (x.atomic_number != kCarbon || x.aromatic) return false;
    if (has_double_to(m, nb.atom, {kOxygen, kSulfur, kNitrogen}) ||
        std::any_of(m.neighbors(nb.atom).begin(), m.neighbors(nb.atom).end(), [&](const Neighbor& e) {
          return m.bond(e.bond).order == BondOrder::kTriple;
        })) {
      return false;
    }
  }
  return true;
}

// Connected components of the atoms accepted by `in`, walking only bonds
// accepted by `edge`.
std::vector<std::vector<int>> components(const Molecule& m, const std::function<bool(int)>& in,
                                         const std::function<bool(const Bond&)>& edge) {
  std::vector<int> seen(m.atom_count(), 0);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < m.atom_count(); ++s) {
    if (seen[s] || !in(s)) continue;
    std::vector<int> group, stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      group.push_back(a);
      for (const Neighbor& nb : m.neighbors(a)) {
        if (seen[nb.atom] || !in(nb.atom) || !edge(m.bond(nb.bond))) continue;
        seen[nb.atom] = 1;
        stack.push_back(nb.atom);
      }
    }
    std::sort(group.begin(), group.end());
    out.push_back(std::move(group));
  }
  return out;
}

std::vector<int> bfs_distances(const Molecule& m, int source) {
  std::vector<int> d(m.atom_count(), -1);
  std::queue<int> q;
  d[source] = 0;
  q.push(source);
  while (!q.empty()) {
    int a = q.front();
    q.pop();
    for (const Neighbor& nb : m.neighbors(a)) {
      if (d[nb.atom] < 0) {
        d[nb.atom] = d[a] + 1;
        q.push(nb.atom);
      }
    }
  }
  return d;
}

double pair_score(const Hypothesis& h, const PairConstraint& c, int distance) {
  const int n = static_cast<int>(h.features.size());
  const double w = (h.features[c.i].weight + h.features[c.j].weight) / (n - 1);
  if (distance < 0) return 0.0;
  const double dev = std::abs(distance - c.distance);
  return w * std::max(0.0, 1.0 - dev / (c.tolerance + 1.0));
}

}  // namespace

std::string_view feature_kind_name(FeatureKind k) { return kKindNames[static_cast<int>(k)]; }

FeatureKind parse_feature_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<FeatureKind>(i);
  }
  throw Error(Errc::kFormat, "unknown pharmacophore feature kind: " + std::string(name));
}

std::vector<PharmFeature> detect_features(const Molecule& input) {
  const Molecule m = largest_fragment(input);
  const ConstantsTable& constants = ConstantsTable::defaults();
  std::vector<PharmFeature> out;
  const int n = m.atom_count();

  for (int i = 0; i < n; ++i) {
    int z = m.atom(i).atomic_number;
    if ((z == kNitrogen || z == kOxygen) && m.total_h(i) > 0) out.push_back({FeatureKind::kHBD, {i}});
  }
  for (int i = 0; i < n; ++i) {
    if (m.is_heavy(i) && is_hbond_acceptor(m, i, constants)) out.push_back({FeatureKind::kHBA, {i}});
  }
  auto aliphatic_carbon = [&](int i) {
    return m.atom(i).atomic_number == kCarbon && !m.atom(i).aromatic;
  };
  for (auto& g : components(m, aliphatic_carbon, [](const Bond&) { return true; })) {
    if (g.size() >= 3) out.push_back({FeatureKind::kHydrophobe, std::move(g)});
  }
  auto aromatic = [&](int i) { return m.atom(i).aromatic; };
  auto aromatic_bond = [](const Bond& b) { return b.order == BondOrder::kAromatic; };
  for (auto& g : components(m, aromatic, aromatic_bond)) {
    out.push_back({FeatureKind::kAromaticRing, std::move(g)});
  }

  std::vector<int> in_carboxyl(n, 0);
  std::vector<PharmFeature> negative;
  for (int i = 0; i < n; ++i) {
    if (!is_carboxyl_carbon(m, i)) continue;
    negative.push_back({FeatureKind::kNegIonizable, {i}});
    for (const Neighbor& nb : m.neighbors(i)) {
      if (m.atom(nb.atom).atomic_number == kOxygen) in_carboxyl[nb.atom] = 1;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (m.atom(i).formal_charge < 0 && !in_carboxyl[i] && !has_charged_neighbor(m, i, +1)) {
      negative.push_back({FeatureKind::kNegIonizable, {i}});
    }
  }
  std::sort(negative.begin(), negative.end(),
            [](const PharmFeature& a, const PharmFeature& b) { return a.anchor < b.anchor; });
  out.insert(out.end(), negative.begin(), negative.end());

  for (int i = 0; i < n; ++i) {
    bool cation = m.atom(i).formal_charge > 0 && !has_charged_neighbor(m, i, -1);
    if (cation || is_basic_amine(m, i)) out.push_back({FeatureKind::kPosIonizable, {i}});
  }
  return out;
}

std::vector<std::vector<int>> feature_distances(const Molecule& input,
                                                const std::vector<PharmFeature>& features) {
  const Molecule m = largest_fragment(input);
  const int n = static_cast<int>(features.size());
  std::vector<std::vector<int>> from_atom(m.atom_count());
  auto dist_from = [&](int a) -> const std::vector<int>& {
    if (from_atom[a].empty()) from_atom[a] = bfs_distances(m, a);
    return from_atom[a];
  };
  std::vector<std::vector<int>> out(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int best = -1;
      for (int a : features[i].anchor) {
        const auto& d = dist_from(a);
        for (int b : features[j].anchor) {
          if (d[b] >= 0 && (best < 0 || d[b] < best)) best = d[b];
        }
      }
      out[i][j] = out[j][i] = best;
    }
  }
  return out;
}

void GenParams::validate() const {
  if (max_candidates < 1) throw Error(Errc::kInvalidConfig, "max_candidates must be >= 1");
  if (!(tolerance >= 0.0)) throw Error(Errc::kInvalidConfig, "tolerance must be >= 0");
  if (!(complexity_weight >= 0.0)) throw Error(Errc::kInvalidConfig, "complexity weight must be >= 0");
  if (min_features < 3 || max_features > 6 || min_features > max_features) {
    throw Error(Errc::kInvalidConfig, "hypothesis sizes must lie within [3, 6]");
  }
}

double Hypothesis::weight_sum() const {
  double s = 0.0;
  for (const auto& f : features) s += f.weight;
  return s;
}

void Hypothesis::validate() const {
  const int n = static_cast<int>(features.size());
  if (n < 3 || n > 6) throw Error(Errc::kInvalidConfig, "hypotheses carry 3 to 6 features");
  for (const auto& f : features) {
    if (!(f.weight > 0.0)) throw Error(Errc::kInvalidConfig, "feature weights must be positive");
  }
  if (static_cast<int>(constraints.size()) != n * (n - 1) / 2) {
    throw Error(Errc::kInvalidConfig, "one constraint per feature pair required");
  }
  std::vector<std::vector<int>> seen(n, std::vector<int>(n, 0));
  for (const auto& c : constraints) {
    if (c.i < 0 || c.j <= c.i || c.j >= n || seen[c.i][c.j]++) {
      throw Error(Errc::kInvalidConfig, "constraint pairs must be distinct with i < j");
    }
    if (!(c.tolerance >= 0.0) || !(c.distance >= 0.0)) {
      throw Error(Errc::kInvalidConfig, "constraint distance and tolerance must be >= 0");
    }
  }
}

double fit_value(const Hypothesis& h, const std::vector<PharmFeature>& features,
                 const std::vector<std::vector<int>>& distances) {
  const int n = static_cast<int>(h.features.size());
  const int m = static_cast<int>(features.size());
  // Constraints grouped by their later feature so each is scored as soon
  // as both ends are placed.
  std::vector<std::vector<const PairConstraint*>> closing(n);
  for (const auto& c : h.constraints) closing[c.j].push_back(&c);

  std::vector<int> assign(n, -1);
  std::vector<char> used(m, 0);
  double best = 0.0;
  bool complete = false;
  std::function<void(int, double)> place = [&](int k, double score) {
    if (k == n) {
      if (!complete || score > best) best = score;
      complete = true;
      return;
    }
    for (int f = 0; f < m; ++f) {
      if (used[f] || features[f].kind != h.features[k].kind) continue;
      assign[k] = f;
      double s = score;
      for (const PairConstraint* c : closing[k]) s += pair_score(h, *c, distances[assign[c->i]][f]);
      used[f] = 1;
      place(k + 1, s);
      used[f] = 0;
    }
  };
  place(0, 0.0);
  return complete ? best : 0.0;
}

double fit_value(const Hypothesis& h, const Molecule& mol) {
  auto features = detect_features(mol);
  return fit_value(h, features, feature_distances(mol, features));
}

std::vector<Hypothesis> generate_hypotheses(const std::vector<TrainingCompound>& training,
                                            const GenParams& params) {
  params.validate();
  if (training.size() < 4) {
    throw Error(Errc::kInsufficientTraining, "pharmacophore training needs at least 4 compounds");
  }
  std::size_t seed = 0;
  for (std::size_t i = 1; i < training.size(); ++i) {
    if (training[i].pic50 > training[seed].pic50) seed = i;
  }
  const auto features = detect_features(training[seed].mol);
  const auto dist = feature_distances(training[seed].mol, features);
  const int m = static_cast<int>(features.size());
  if (m < params.min_features) {
    throw Error(Errc::kInsufficientTraining,
                "most active compound " + training[seed].id + " has only " + std::to_string(m) + " features");
  }

  std::vector<Hypothesis> out;
  for (int size = params.min_features; size <= std::min(params.max_features, m); ++size) {
    // Lexicographic k-combinations of 0..m-1.
    std::vector<int> pick(size);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      if (static_cast<int>(out.size()) >= params.max_candidates) return out;
      Hypothesis h;
      h.gen = params;
      h.seed_id = training[seed].id;
      for (int f : pick) h.features.push_back({features[f].kind, 1.0});
      for (int a = 0; a < size; ++a) {
        for (int b = a + 1; b < size; ++b) {
          h.constraints.push_back({a, b, static_cast<double>(dist[pick[a]][pick[b]]), params.tolerance});
        }
      }
      out.push_back(std::move(h));
      int k = size - 1;
      while (k >= 0 && pick[k] == m - size + k) --k;
      if (k < 0) break;
      ++pick[k];
      for (int r = k + 1; r < size; ++r) pick[r] = pick[r - 1] + 1;
    }
  }
  return out;
}

HypothesisCosts score_costs(Hypothesis& h, const std::vector<TrainingCompound>& training) {
  if (training.empty()) throw Error(Errc::kInsufficientTraining, "no training compounds");
  const double n = static_cast<double>(training.size());
  std::vector<double> fit, act;
  for (const auto& t : training) {
    fit.push_back(fit_value(h, t.mol));
    act.push_back(t.pic50);
  }
  const double mx = std::accumulate(fit.begin(), fit.end(), 0.0) / n;
  const double my = std::accumulate(act.begin(), act.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    sxx += (fit[i] - mx) * (fit[i] - mx);
    sxy += (fit[i] - mx) * (act[i] - my);
  }
  if (sxx > 0.0) {
    h.slope = sxy / sxx;
    h.intercept = my - h.slope * mx;
  } else {
    h.slope = 0.0;
    h.intercept = my;
  }
  HypothesisCosts c;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    const double r = h.predict(fit[i]) - act[i];
    c.total_cost += r * r;
    c.null_cost += (my - act[i]) * (my - act[i]);
  }
  c.total_cost += h.gen.complexity_weight * static_cast<double>(h.features.size());
  h.costs = c;
  return c;
}

std::size_t select_best(const std::vector<Hypothesis>& candidates) {
  if (candidates.empty()) throw Error(Errc::kInsufficientTraining, "no candidate hypotheses");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double d = candidates[i].costs.delta(), bd = candidates[best].costs.delta();
    if (d > bd || (d == bd && candidates[i].features.size() < candidates[best].features.size())) best = i;
  }
  return best;
}

Hypothesis train_hypothesis(const std::vector<TrainingCompound>& training, const GenParams& params) {
  auto candidates = generate_hypotheses(training, params);
  for (auto& h : candidates) score_costs(h, training);
  return candidates[select_best(candidates)];
}

std::vector<FitRow> screen_by_fit(const Hypothesis& h, const std::vector<LibraryCompound>& library) {
  std::vector<FitRow> rows;
  for (const auto& c : library) {
    try {
      double f = fit_value(h, c.mol);
      rows.push_back({c.id, f, h.predict(f), c.class_label});
    } catch (const Error& e) {
      log_warning("skipping " + c.id + ": " + e.what());
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const FitRow& a, const FitRow& b) {
    if (a.fit != b.fit) return a.fit > b.fit;
    return a.id < b.id;
  });
  return rows;
}

std::vector<ClassSummaryRow> summarize_classes(const std::vector<FitRow>& rows) {
  std::vector<ClassSummaryRow> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    const std::string label = r.class_label.value_or("Other");
    auto [it, fresh] = index.emplace(label, out.size());
    if (fresh) out.push_back({"", label, r.id, 0, r.fit});
    ClassSummaryRow& s = out[it->second];
    ++s.quantity;
    if (r.fit > s.degree_of_fit) {
      s.degree_of_fit = r.fit;
      s.representative = r.id;
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ClassSummaryRow& a, const ClassSummaryRow& b) { return a.quantity > b.quantity; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].classify = i < 26 ? std::string(1, static_cast<char>('A' + i)) : "Z" + std::to_string(i - 25);
  }
  return out;
}

std::string hypothesis_to_json(const Hypothesis& h) {
  h.validate();
  json doc;
  doc["format_version"] = kHypothesisFormatVersion;
  doc["seed_id"] = h.seed_id;
  json feats = json::array();
  for (const auto& f : h.features) feats.push_back({{"kind", feature_kind_name(f.kind)}, {"weight", f.weight}});
  doc["features"] = std::move(feats);
  json cons = json::array();
  for (const auto& c : h.constraints) {
    cons.push_back({{"i", c.i}, {"j", c.j}, {"distance", c.distance}, {"tolerance", c.tolerance}});
  }
  doc["constraints"] = std::move(cons);
  doc["regression"] = {{"slope", h.slope}, {"intercept", h.intercept}};
  doc["costs"] = {{"null_cost", h.costs.null_cost},
                  {"total_cost", h.costs.total_cost},
                  {"delta", h.costs.delta()}};
  doc["gen_params"] = {{"energy_threshold_kcal_per_mol", h.gen.energy_threshold_kcal_per_mol},
                       {"max_conformations", h.gen.max_conformations},
                       {"max_candidates", h.gen.max_candidates},
                       {"tolerance", h.gen.tolerance},
                       {"complexity_weight", h.gen.complexity_weight},
                       {"min_features", h.gen.min_features},
                       {"max_features", h.gen.max_features}};
  return doc.dump(1) + "\n";
}

Hypothesis hypothesis_from_json(std::string_view text) {
  try {
    json doc = json::parse(text);
    if (doc.at("format_version").get<int>() != kHypothesisFormatVersion) {
      throw Error(Errc::kFormat, "unsupported hypothesis format_version");
    }
    Hypothesis h;
    h.seed_id = doc.value("seed_id", "");
    for (const auto& f : doc.at("features")) {
      h.features.push_back({parse_feature_kind(f.at("kind").get<std::string>()), f.at("weight").get<double>()});
    }
    for (const auto& c : doc.at("constraints")) {
      h.constraints.push_back({c.at("i").get<int>(), c.at("j").get<int>(), c.at("distance").get<double>(),
                               c.at("tolerance").get<double>()});
    }
    h.slope = doc.at("regression").at("slope").get<double>();
    h.intercept = doc.at("regression").at("intercept").get<double>();
    h.costs.null_cost = doc.at("costs").at("null_cost").get<double>();
    h.costs.total_cost = doc.at("costs").at("total_cost").get<double>();
    const auto& g = doc.at("gen_params");
    h.gen.energy_threshold_kcal_per_mol = g.at("energy_threshold_kcal_per_mol").get<double>();
    h.gen.max_conformations = g.at("max_conformations").get<int>();
    h.gen.max_candidates = g.at("max_candidates").get<int>();
    h.gen.tolerance = g.at("tolerance").get<double>();
    h.gen.complexity_weight = g.at("complexity_weight").get<double>();
    h.gen.min_features = g.at("min_features").get<int>();
    h.gen.max_features = g.at("max_features").get<int>();
    h.validate();
    return h;
  } catch (const json::exception& e) {
    throw Error(Errc::kFormat, std::string("hypothesis json: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::kFormat) throw;
    throw Error(Errc::kFormat, e.what());
  }
}

void save_hypothesis(const Hypothesis& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out << hypothesis_to_json(h);
  if (!out) throw Error(Errc::kIo, "write failed: " + path.string());
}

Hypothesis load_hypothesis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return hypothesis_from_json(ss.str());
}

}  // namespace screenforge
