#pragma once

// Shared helpers for the cross-validation suites: small random instances
// with their ambiguity sets, sized so the brute-force oracle stays exact.

#include <cstdint>
#include <vector>

#include "ambiguity/ambiguity.hpp"
#include "common/rng.hpp"
#include "dro/builders.hpp"
#include "model/generator.hpp"

namespace cddp::testing {

struct TinyCase {
    CddpInstance inst;
    std::vector<AmbiguityMember> members;
};

// Random tiny instance: <=2 doors per side, <=2 levels, <=3 nodes per side,
// <=3 scenarios and at most `max_members` ambiguity members.
inline TinyCase make_tiny_case(std::uint64_t seed, int max_members = 3) {
    Rng shape_rng(seed, "tiny/shape");
    GeneratorOptions opt;
    GroupShape g;
    g.scenarios = 2 + static_cast<int>(shape_rng.next_below(2));
    g.origins = 2 + static_cast<int>(shape_rng.next_below(2));
    g.destinations = 2 + static_cast<int>(shape_rng.next_below(2));
    g.strip_doors = 2;
    g.stack_doors = 2;
    const int cells = g.origins * g.destinations;
    g.h_cells = std::max(2, cells - static_cast<int>(shape_rng.next_below(3)));
    opt.groups = {g};
    opt.seed = seed;
    opt.levels_per_door = 1 + static_cast<int>(shape_rng.next_below(2));
    opt.volume_min = 4.0;
    opt.volume_max = 20.0;
    opt.disruption_prob = 0.3;
    opt.disruption_max = 0.4;

    TinyCase out;
    out.inst = generate_instance(opt);

    AmbiguityOptions aopt;
    aopt.per_family = 2;
    aopt.sigma_eps = 0.15;
    aopt.seed = seed ^ 0x5eedULL;
    aopt.max_members = max_members;
    auto set = build_ambiguity(out.inst, aopt);
    if (set.members.empty()) {
        out.members = {nominal_member(out.inst)};
    } else {
        out.members = set.members;
    }
    return out;
}

// Slack dominance profile: thresholds and caps far above any reachable cost,
// so the SD model collapses onto the RN one.
inline SdConfig slack_sd_config(const CddpInstance& inst, const std::vector<AmbiguityMember>& members) {
    SdConfig cfg;
    double worst = 0.0;
    for (const auto& m : members) {
        for (const auto& ms : m.scenarios) {
            const auto data = member_scenario_data(inst, ms);
            worst = std::max(worst, scenario_outsourcing_cost(inst, data));
        }
    }
    const double big = max_install_cost(inst) + worst;
    cfg.profiles = {SdProfile{big, big, big}};
    return resolve_sd_bounds(inst, members, nullptr, cfg);
}

// Binding profile: threshold between the typical and the outsourcing-driven
// scenario costs, caps tight enough to matter.
inline SdConfig binding_sd_config(const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                                  double threshold, double scenario_cap, double expected_cap) {
    SdConfig cfg;
    cfg.profiles = {SdProfile{threshold, scenario_cap, expected_cap}};
    return resolve_sd_bounds(inst, members, nullptr, cfg);
}

}  // namespace cddp::testing
