#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "math/distributions.hpp"
#include "model/instance.hpp"

namespace cddp {

// rho choices for the proximity distance; kRhoInfinity takes the max over
// shared parameters instead of a power sum.
constexpr int kRhoInfinity = 0;

// Moments of the nominal distribution per uncertain parameter, over the
// scenarios of the groups the parameter belongs to (weights renormalized).
struct NominalMoments {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<char> degenerate;  // zero variance: held constant, density 1

    // Realization of parameter h in scenario sc (0 when the cell is absent).
    static double realization(const CddpInstance& inst, int param, const Scenario& sc);
};

NominalMoments fit_moments(const CddpInstance& inst);

struct MemberScenario {
    int scenario_id = 0;
    double weight = 0.0;                                // w^omega per Eq-style normalization
    std::vector<std::pair<int, double>> realizations;   // (param id, value)
};

struct AmbiguityMember {
    int id = 0;
    Family family = Family::Normal;
    int candidate_index = 0;
    double proximity = 0.0;
    std::vector<MemberScenario> scenarios;  // surviving scenarios, ascending id

    const MemberScenario* find_scenario(int scenario_id) const;
};

struct CandidateInfo {
    Family family = Family::Normal;
    int index = 0;
    double proximity = std::numeric_limits<double>::quiet_NaN();
    bool rejected = false;
    std::string reject_reason;
};

struct AmbiguityOptions {
    std::vector<Family> families = {Family::Normal, Family::Weibull, Family::Gamma, Family::Lognormal};
    int per_family = 20;
    double sigma_eps = 0.05;
    int rho = 2;  // 1, 2 or kRhoInfinity
    double theta = std::numeric_limits<double>::infinity();
    double centile = 0.0;  // when > 0, theta is set to this centile of the proximities
    int max_members = std::numeric_limits<int>::max();
    std::uint64_t seed = 0;
    double cdf_cap = 1e-9;  // u > 1 clamps to 1 - cdf_cap before inversion
    std::vector<double> stat_centiles = {5.0, 10.0};
    unsigned threads = 1;
};

struct AmbiguitySet {
    AmbiguityOptions options;
    double theta_used = 0.0;
    std::vector<AmbiguityMember> members;     // ascending proximity
    std::vector<CandidateInfo> candidates;    // every scored candidate
};

// Candidate generation, weighting, scoring and selection in one pass.
// Deterministic for a fixed seed regardless of thread count.
AmbiguitySet build_ambiguity(const CddpInstance& inst, const AmbiguityOptions& opts);

// Normalized weights per Eq-style likelihood aggregation (log domain with
// per-group max subtraction). Returns false with a reason when the member
// must be rejected (a whole scenario group lost, or likelihood underflow).
bool compute_member_weights(const CddpInstance& inst, const NominalMoments& nm, Family family,
                            std::vector<MemberScenario>& scenarios, std::string* reject_reason);

// Optimal value of the balanced transportation problem between the member
// and the nominal scenarios. Lanes whose scenario groups share no parameter
// are forbidden. Throws ValidationError on imbalance beyond 1e-9.
double wasserstein_proximity(const CddpInstance& inst, const AmbiguityMember& member, int rho);

// The nominal distribution itself packaged as a member (proximity 0).
AmbiguityMember nominal_member(const CddpInstance& inst);

// Scenario model data for one member (overrides applied per scenario).
ScenarioData member_scenario_data(const CddpInstance& inst, const MemberScenario& ms);

// Table-style summary of the candidate proximities: one row per family and
// one for the pooled set; columns Min, centiles, quartiles, Median, Mean, Max.
std::string proximity_stats_csv(const AmbiguitySet& set);

std::string ambiguity_to_json_text(const AmbiguitySet& set);
AmbiguitySet ambiguity_from_json_text(const std::string& text);
void write_ambiguity(const AmbiguitySet& set, const std::string& path);
AmbiguitySet read_ambiguity(const std::string& path);

}  // namespace cddp
