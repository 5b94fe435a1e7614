#include "screenforge/cluster.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "screenforge/error.h"

namespace screenforge {

std::string_view linkage_name(Linkage l) {
  switch (l) {
    case Linkage::kSingle: return "single";
    case Linkage::kComplete: return "complete";
    case Linkage::kAverage: return "average";
  }
  return "average";
}

Linkage parse_linkage(std::string_view name) {
  if (name == "single") return Linkage::kSingle;
  if (name == "complete") return Linkage::kComplete;
  if (name == "average") return Linkage::kAverage;
  throw Error(Errc::kInvalidConfig, "unknown linkage: " + std::string(name));
}

std::vector<std::vector<int>> ClusterAssignment::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    if (labels[i] >= 0 && labels[i] < k) out[labels[i]].push_back(i);
  }
  return out;
}

void ClusterAssignment::validate() const {
  for (int label : labels) {
    if (label < 0 || label >= k) throw Error(Errc::kInvalidMatrix, "cluster label out of range");
  }
  auto groups = members();
  for (const auto& g : groups) {
    if (g.empty()) throw Error(Errc::kInvalidMatrix, "empty cluster");
  }
  if (!representatives.empty()) {
    if (static_cast<int>(representatives.size()) != k) {
      throw Error(Errc::kInvalidMatrix, "one representative per cluster required");
    }
    for (int c = 0; c < k; ++c) {
      int r = representatives[c];
      if (r < 0 || r >= static_cast<int>(labels.size()) || labels[r] != c) {
        throw Error(Errc::kInvalidMatrix, "representative outside its cluster");
      }
    }
  }
}

namespace {

void check_distance_matrix(const SquareMatrix& dist) {
  const int n = dist.size();
  for (int i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) throw Error(Errc::kInvalidMatrix, "distance diagonal must be 0");
    for (int j = 0; j < n; ++j) {
      double v = dist(i, j);
      if (!(v >= 0.0)) throw Error(Errc::kInvalidMatrix, "negative or NaN distance");
      if (std::abs(v - dist(j, i)) > 1e-12) throw Error(Errc::kInvalidMatrix, "distance matrix not symmetric");
    }
  }
}

}  // namespace

ClusterAssignment hier_cluster(const SquareMatrix& dist, Linkage linkage, int k) {
  const int n = dist.size();
  if (n < 1) throw Error(Errc::kInvalidMatrix, "empty distance matrix");
  if (k < 1 || k > n) throw Error(Errc::kInvalidK, "k must lie in [1, n]");
  check_distance_matrix(dist);

  // Clusters are keyed by their lowest member; d holds inter-cluster
  // distances between keys and is updated by the Lance-Williams rule.
  SquareMatrix d = dist;
  std::vector<int> size(n, 1);
  std::vector<int> owner(n);
  std::iota(owner.begin(), owner.end(), 0);
  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);

  while (static_cast<int>(active.size()) > k) {
    double best = std::numeric_limits<double>::infinity();
    int ba = -1, bb = -1;
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        double v = d(active[x], active[y]);
        if (v < best) {
          best = v;
          ba = static_cast<int>(x);
          bb = static_cast<int>(y);
        }
      }
    }
    const int a = active[ba];
    const int b = active[bb];
    for (int c : active) {
      if (c == a || c == b) continue;
      double da = d(a, c), db = d(b, c), merged;
      switch (linkage) {
        case Linkage::kSingle: merged = std::min(da, db); break;
        case Linkage::kComplete: merged = std::max(da, db); break;
        default:
          merged = (size[a] * da + size[b] * db) / static_cast<double>(size[a] + size[b]);
          break;
      }
      d(a, c) = merged;
      d(c, a) = merged;
    }
    size[a] += size[b];
    for (int& o : owner) {
      if (o == b) o = a;
    }
    active.erase(active.begin() + bb);
  }

  ClusterAssignment out;
  out.k = k;
  out.linkage = linkage;
  out.labels.assign(n, -1);
  // active is sorted by key, and a key is its cluster's lowest member.
  for (int i = 0; i < n; ++i) {
    auto it = std::lower_bound(active.begin(), active.end(), owner[i]);
    out.labels[i] = static_cast<int>(it - active.begin());
  }
  return out;
}

std::vector<int> medoid_representatives(const ClusterAssignment& assignment,
                                        const SquareMatrix& dist) {
  if (static_cast<int>(assignment.labels.size()) != dist.size()) {
    throw Error(Errc::kShapeMismatch, "assignment and matrix sizes differ");
  }
  std::vector<int> reps;
  for (const auto& group : assignment.members()) {
    int best = -1;
    double best_sum = std::numeric_limits<double>::infinity();
    for (int i : group) {
      double s = 0.0;
      for (int j : group) s += dist(i, j);
      if (s < best_sum) {
        best_sum = s;
        best = i;
      }
    }
    reps.push_back(best);
  }
  return reps;
}

FunnelResult diversity_funnel(const SquareMatrix& dist, Linkage linkage, int k, int picks) {
  FunnelResult r;
  r.clusters = hier_cluster(dist, linkage, k);
  r.clusters.representatives = medoid_representatives(r.clusters, dist);
  if (picks > k) throw Error(Errc::kInvalidK, "cannot pick more compounds than clusters");
  if (picks <= 0) picks = k;

  auto groups = r.clusters.members();
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return groups[x].size() > groups[y].size();
  });
  for (int c = 0; c < picks; ++c) r.picks.push_back(r.clusters.representatives[order[c]]);
  std::sort(r.picks.begin(), r.picks.end());
  return r;
}

}  // namespace screenforge
