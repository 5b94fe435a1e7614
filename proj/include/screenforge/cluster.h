#ifndef SCREENFORGE_CLUSTER_H_
#define SCREENFORGE_CLUSTER_H_

#include <string>
#include <string_view>
#include <vector>

#include "screenforge/similarity.h"

namespace screenforge {

enum class Linkage { kSingle, kComplete, kAverage };

std::string_view linkage_name(Linkage l);
// Throws Error(kInvalidConfig) for unknown names.
Linkage parse_linkage(std::string_view name);

struct ClusterAssignment {
  std::vector<int> labels;  // per item, dense in [0, k)
  int k = 0;
  Linkage linkage = Linkage::kAverage;
  std::vector<int> representatives;  // one item per cluster, empty until set

  std::vector<std::vector<int>> members() const;
  // Throws Error(kInvalidMatrix) when labels are not dense, a cluster is
  // empty or a representative lies outside its cluster.
  void validate() const;
};

// Agglomerative clustering of a distance matrix down to k clusters. Each
// step merges the closest pair of clusters, ties broken by the smallest
// (i, j) where a cluster is identified by its lowest member index. Labels
// are numbered in order of each cluster's lowest member.
ClusterAssignment hier_cluster(const SquareMatrix& dist, Linkage linkage, int k);

// Per cluster, the member with the smallest summed distance to its
// co-members; ties go to the lowest index.
std::vector<int> medoid_representatives(const ClusterAssignment& assignment,
                                        const SquareMatrix& dist);

struct FunnelResult {
  ClusterAssignment clusters;  // representatives filled in
  std::vector<int> picks;      // sorted item indices
};

// Cluster into k groups, take each medoid, then keep the medoids of the
// `picks` largest clusters (ties by label). picks <= 0 keeps all k.
FunnelResult diversity_funnel(const SquareMatrix& dist, Linkage linkage, int k, int picks);

}  // namespace screenforge

#endif  // SCREENFORGE_CLUSTER_H_
