#include "dro/cluster.hpp"

#include "common/errors.hpp"

namespace cddp {

int ClusterScheme::next_in_member(int c) const {
    const auto& ids = per_member[static_cast<std::size_t>(clusters[static_cast<std::size_t>(c)].member)];
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (ids[k] == c) return ids[(k + 1) % ids.size()];
    }
    throw ValidationError("cluster not in its member list");
}

int ClusterScheme::prev_in_member(int c) const {
    const auto& ids = per_member[static_cast<std::size_t>(clusters[static_cast<std::size_t>(c)].member)];
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (ids[k] == c) return ids[(k + ids.size() - 1) % ids.size()];
    }
    throw ValidationError("cluster not in its member list");
}

ClusterScheme build_cluster_scheme(const std::vector<AmbiguityMember>& members, int clusters_per_member) {
    if (clusters_per_member < 1) throw ValidationError("clusters_per_member must be >= 1");
    ClusterScheme scheme;
    scheme.per_member.resize(members.size());
    for (std::size_t p = 0; p < members.size(); ++p) {
        const auto& m = members[p];
        if (m.scenarios.empty()) throw ValidationError("member " + std::to_string(p) + " has no scenarios");
        const int count = std::min<int>(clusters_per_member, static_cast<int>(m.scenarios.size()));
        const int total = static_cast<int>(m.scenarios.size());
        const int base = total / count;
        const int extra = total % count;  // first `extra` blocks take one more
        int pos = 0;
        for (int c = 0; c < count; ++c) {
            Cluster cl;
            cl.id = static_cast<int>(scheme.clusters.size());
            cl.member = static_cast<int>(p);
            const int len = base + (c < extra ? 1 : 0);
            for (int k = 0; k < len; ++k) {
                const auto& ms = m.scenarios[static_cast<std::size_t>(pos++)];
                cl.scenario_ids.push_back(ms.scenario_id);
                cl.scenario_weights.push_back(ms.weight);
                cl.weight += ms.weight;
            }
            cl.within_weights.resize(cl.scenario_ids.size());
            if (cl.weight > 1e-300) {
                for (std::size_t k = 0; k < cl.within_weights.size(); ++k)
                    cl.within_weights[k] = cl.scenario_weights[k] / cl.weight;
            } else {
                // Numerically weightless cluster: fall back to uniform
                // conditional weights; its aggregation share stays ~0.
                for (auto& w : cl.within_weights) w = 1.0 / static_cast<double>(cl.within_weights.size());
            }
            scheme.per_member[p].push_back(cl.id);
            scheme.clusters.push_back(std::move(cl));
        }
    }
    return scheme;
}

}  // namespace cddp
