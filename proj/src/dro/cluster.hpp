#pragma once

#include <vector>

#include "ambiguity/ambiguity.hpp"

namespace cddp {

// One scenario cluster: a contiguous block of a member's lexicographically
// ordered surviving scenarios.
struct Cluster {
    int id = 0;      // global id, member-major
    int member = 0;  // owning ambiguity member
    std::vector<int> scenario_ids;
    std::vector<double> scenario_weights;  // w^omega of the member
    double weight = 0.0;                   // cluster weight, sum of the above
    std::vector<double> within_weights;    // w^omega / cluster weight
};

struct ClusterScheme {
    std::vector<Cluster> clusters;
    std::vector<std::vector<int>> per_member;  // member -> ordered global ids

    int next_global(int c) const { return (c + 1) % static_cast<int>(clusters.size()); }
    int prev_global(int c) const {
        const int n = static_cast<int>(clusters.size());
        return (c + n - 1) % n;
    }
    int next_in_member(int c) const;
    int prev_in_member(int c) const;
};

// Contiguous equal-size blocks (first blocks one longer when sizes do not
// divide). Clusters per member is capped by the member's scenario count.
ClusterScheme build_cluster_scheme(const std::vector<AmbiguityMember>& members, int clusters_per_member);

}  // namespace cddp
