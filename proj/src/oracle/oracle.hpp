#pragma once

#include <vector>

#include "ambiguity/ambiguity.hpp"
#include "dro/builders.hpp"
#include "model/instance.hpp"

namespace cddp {

struct OracleLimits {
    long max_designs = 4096;
    long max_assignment_space = 1'000'000;  // per scenario
    unsigned threads = 1;
};

struct OracleResult {
    bool feasible = false;
    double objective = 0.0;
    FirstStageDesign design;
    int selected_member = -1;  // dominance variant only
    // Scenario costs of the reported solution, aligned with each member's
    // surviving scenarios.
    std::vector<std::vector<double>> member_costs;
    // Surplus of the selected member per (scenario, profile).
    std::vector<std::vector<double>> surpluses;
    long designs_enumerated = 0;
};

// Exhaustive ground truth for the risk-neutral model: every first-stage
// design is enumerated, every scenario's assignment space is searched
// depth-first with residual-capacity pruning. Throws ValidationError when
// the enumeration limits are exceeded.
OracleResult enumerate_rn(const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                          const OracleLimits& limits = {});

// Ground truth for the dominance model. Per-scenario optima are not enough
// (the surplus caps couple a member's scenarios and the selected member must
// sit exactly at the robust cost), so achievable scenario-cost combinations
// are enumerated jointly per member.
OracleResult enumerate_sd(const CddpInstance& inst, const std::vector<AmbiguityMember>& members, const SdConfig& sd,
                          const OracleLimits& limits = {});

}  // namespace cddp
