#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ambiguity/ambiguity.hpp"
#include "dro/cluster.hpp"
#include "milp/model.hpp"
#include "model/instance.hpp"

namespace cddp {

enum class Variant { RiskNeutral, StochasticDominance };

Variant variant_from_name(const std::string& name);
std::string variant_name(Variant v);

// One dominance profile: cost threshold, per-scenario surplus cap and
// expected surplus cap.
struct SdProfile {
    double threshold = 0.0;
    double scenario_surplus_cap = 0.0;
    double expected_surplus_cap = 0.0;
};

struct SdConfig {
    std::vector<SdProfile> profiles;
    // Big-M bounds; NaN requests the computed defaults (resolve_sd_bounds).
    double u_lower = std::numeric_limits<double>::quiet_NaN();
    double u_upper = std::numeric_limits<double>::quiet_NaN();
    double c_upper = std::numeric_limits<double>::quiet_NaN();
    bool drop_expected_surplus = false;  // drops rows capping expected surplus

    void validate() const;
};

// Fills the NaN bounds: u_upper/c_upper from the worst all-outsourcing
// scenario, u_lower from the cheapest cluster's RN LP relaxation (a valid
// lower bound on every member's and cluster's conditional cost).
SdConfig resolve_sd_bounds(const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                           const ClusterScheme* scheme, SdConfig cfg);

// First-stage decision: chosen capacity level per door, -1 keeps it closed.
struct FirstStageDesign {
    std::vector<int> strip_level;
    std::vector<int> stack_level;

    double install_cost(const CddpInstance& inst) const;
    double net_capacity_strip(const CddpInstance& inst, int door, double disruption) const;
    double net_capacity_stack(const CddpInstance& inst, int door, double disruption) const;
    void validate(const CddpInstance& inst) const;
    bool operator==(const FirstStageDesign&) const = default;
};

// Canonical variable names (the model's structured-name registry).
namespace names {
std::string alpha(int level, int door);
std::string beta(int level, int door);
std::string alpha_copy(int cluster, int level, int door);
std::string beta_copy(int cluster, int level, int door);
std::string c1();
std::string c1_copy(int cluster);
std::string u();
std::string u_copy(int cluster);
std::string f(int member, int scenario);
std::string x(int member, int scenario, int origin, int door);  // door -1 = outsourcing
std::string y(int member, int scenario, int destination, int door);
std::string v(int member, int scenario, int origin, int door_i, int destination, int door_j);
std::string out_strip(int member, int scenario);  // alpha0
std::string out_stack(int member, int scenario);  // beta0
std::string gamma(int member);
std::string gamma_copy(int cluster);
std::string u_member(int member);    // Fortet product u_p
std::string u_cluster(int cluster);  // Fortet product u_c
std::string c12(int member, int scenario);
std::string c12_sel(int member, int scenario);  // linearized C12 * gamma
std::string surplus(int member, int scenario, int profile);
}  // namespace names

// Full models over the ambiguity set.
milp::Model build_lip_rn(const CddpInstance& inst, const std::vector<AmbiguityMember>& members);
milp::Model build_lip_sd(const CddpInstance& inst, const std::vector<AmbiguityMember>& members, const SdConfig& sd);

// Split-variable equivalents with per-cluster first-stage copies tied by
// circular inequalities.
milp::Model build_svc_model(Variant variant, const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                            const ClusterScheme& scheme, const SdConfig* sd);

// Scenario-cluster submodel for one cluster (conditional weights); the SD
// variant keeps the per-scenario dominance rows, relaxes the member-selection
// row and the expected-surplus rows, and floors the conditional cost at
// u_lower.
milp::Model build_scd_submodel(Variant variant, const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                               const ClusterScheme& scheme, int cluster_id, const SdConfig* sd);

// Per-scenario assignment model with the first stage fixed (net capacities
// become constants); objective is the scenario cost F.
milp::Model build_assignment_block(const CddpInstance& inst, const ScenarioData& data, const FirstStageDesign& design);

// Pins the alpha/beta columns to the design's values. The design must honor
// the level and door-count caps.
void fix_first_stage(milp::Model& model, const CddpInstance& inst, const FirstStageDesign& design);

// Reads a design back from a solved model (cluster < 0 reads the plain
// alpha/beta names, otherwise the cluster copies).
FirstStageDesign design_from_solution(const milp::Model& model, const std::vector<double>& values,
                                      const CddpInstance& inst, int cluster = -1);

// Worst-case (all outsourcing) second-stage cost of one scenario.
double scenario_outsourcing_cost(const CddpInstance& inst, const ScenarioData& data);

// Largest possible first-stage cost (every door at its priciest level).
double max_install_cost(const CddpInstance& inst);

}  // namespace cddp
