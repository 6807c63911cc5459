#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "common/errors.hpp"
#include "milp/solver.hpp"
#include "oracle/oracle.hpp"
#include "tiny_cases.hpp"

using namespace cddp;
using cddp::testing::make_tiny_case;
using cddp::testing::slack_sd_config;

namespace {

// Single door per side, one level, one scenario with one commodity cell.
CddpInstance one_lane_instance(double install_strip, double install_stack, double penalty) {
    CddpInstance inst;
    inst.strip.max_doors = 1;
    inst.strip.doors = {Door{{{100.0, install_strip}}}};
    inst.stack.max_doors = 1;
    inst.stack.doors = {Door{{{100.0, install_stack}}}};
    inst.distance = {{2.0}};
    inst.cost_rate = 1.0;
    inst.outsourcing_penalty = penalty;
    ScenarioGroup g;
    g.id = 0;
    g.weight = 1.0;
    g.scenarios = {0};
    inst.groups.push_back(g);
    Scenario s;
    s.id = 0;
    s.group = 0;
    s.weight = 1.0;
    s.origins = {0};
    s.destinations = {0};
    s.volumes = {{0, 0, 10.0}};
    s.strip_disruption = {0.0};
    s.stack_disruption = {0.0};
    inst.scenarios.push_back(std::move(s));
    inst.params = {{0, 0, 0, {0}}};
    inst.validate();
    return inst;
}

}  // namespace

TEST_CASE("oracle rn: opening doors pays off exactly when the penalty saved exceeds the install cost") {
    // Standard assignment costs 2*10=20 plus installs; full outsourcing costs
    // penalty*(2 indicators + 1 pair) = 3*penalty.
    {
        auto inst = one_lane_instance(5.0, 5.0, 100.0);  // open: 20+10=30, outsource: 300
        auto res = enumerate_rn(inst, {nominal_member(inst)});
        CHECK(res.objective == doctest::Approx(30.0));
        CHECK(res.design.strip_level[0] == 0);
        CHECK(res.design.stack_level[0] == 0);
    }
    {
        auto inst = one_lane_instance(500.0, 500.0, 100.0);  // open: 1020, outsource: 300
        auto res = enumerate_rn(inst, {nominal_member(inst)});
        CHECK(res.objective == doctest::Approx(300.0));
        CHECK(res.design.strip_level[0] == -1);
        CHECK(res.design.stack_level[0] == -1);
    }
}

TEST_CASE("oracle rn: zero capacity forces full outsourcing") {
    auto inst = one_lane_instance(5.0, 5.0, 100.0);
    inst.strip.doors[0].levels[0].capacity = 0.0;
    inst.validate();
    auto res = enumerate_rn(inst, {nominal_member(inst)});
    // Inbound side outsourced (indicator + pair through i=0): the stack door
    // cannot help because every pair through i=0 already costs the penalty.
    CHECK(res.design.strip_level[0] == -1);
    CHECK(res.objective == doctest::Approx(200.0));  // alpha0 + one pair lane
}

TEST_CASE("oracle rn: monotone in the penalty and in capacity") {
    auto base = make_tiny_case(301);
    auto res = enumerate_rn(base.inst, base.members);

    auto dearer = base.inst;
    dearer.outsourcing_penalty *= 2.0;
    auto res2 = enumerate_rn(dearer, base.members);
    CHECK(res2.objective >= res.objective - 1e-9);

    auto roomier = base.inst;
    for (auto& d : roomier.strip.doors) {
        for (auto& lvl : d.levels) lvl.capacity *= 2.0;
    }
    auto res3 = enumerate_rn(roomier, base.members);
    CHECK(res3.objective <= res.objective + 1e-9);
}

TEST_CASE("oracle rn: invariant under member reordering") {
    auto c = make_tiny_case(77, 3);
    if (c.members.size() < 2) return;
    auto res = enumerate_rn(c.inst, c.members);
    auto reordered = c.members;
    std::reverse(reordered.begin(), reordered.end());
    auto res2 = enumerate_rn(c.inst, reordered);
    CHECK(res2.objective == doctest::Approx(res.objective).epsilon(1e-12));
}

TEST_CASE("oracle rn: matches the milp solve on random tiny instances") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u, 16u, 17u, 18u}) {
        auto c = make_tiny_case(seed);
        auto oracle = enumerate_rn(c.inst, c.members);
        auto model = build_lip_rn(c.inst, c.members);
        auto sol = milp::solve_milp(model);
        REQUIRE(sol.status == milp::Status::Optimal);
        INFO("seed ", seed);
        CHECK(std::fabs(sol.objective - oracle.objective) <= 1e-6);
    }
}

TEST_CASE("oracle sd: slack caps reproduce the rn optimum") {
    auto c = make_tiny_case(401);
    auto rn = enumerate_rn(c.inst, c.members);
    auto sd = enumerate_sd(c.inst, c.members, slack_sd_config(c.inst, c.members));
    REQUIRE(sd.feasible);
    CHECK(sd.objective == doctest::Approx(rn.objective).epsilon(1e-10));
}

TEST_CASE("oracle sd: unreachable caps are reported infeasible") {
    auto c = make_tiny_case(402);
    SdConfig cfg;
    cfg.profiles = {SdProfile{0.0, 0.0, 0.0}};  // no cost surplus allowed over zero
    cfg = resolve_sd_bounds(c.inst, c.members, nullptr, cfg);
    auto sd = enumerate_sd(c.inst, c.members, cfg);
    CHECK(!sd.feasible);
}

TEST_CASE("oracle sd: matches the milp solve on random tiny instances") {
    for (std::uint64_t seed : {21u, 22u, 23u, 24u}) {
        auto c = make_tiny_case(seed);
        auto rn = enumerate_rn(c.inst, c.members);
        // Threshold between the best robust cost and the outsourcing scale
        // makes the dominance rows bite without going infeasible everywhere.
        auto cfg = cddp::testing::binding_sd_config(c.inst, c.members, rn.objective * 1.05, rn.objective * 0.8,
                                                    rn.objective * 0.4);
        auto oracle = enumerate_sd(c.inst, c.members, cfg);
        auto model = build_lip_sd(c.inst, c.members, cfg);
        auto sol = milp::solve_milp(model);
        INFO("seed ", seed);
        if (oracle.feasible) {
            REQUIRE(sol.status == milp::Status::Optimal);
            CHECK(std::fabs(sol.objective - oracle.objective) <= 1e-6);
            CHECK(sol.objective >= rn.objective - 1e-9);
        } else {
            CHECK(sol.status == milp::Status::Infeasible);
        }
    }
}

TEST_CASE("oracle: refuses oversized enumerations") {
    auto c = make_tiny_case(55);
    OracleLimits lim;
    lim.max_designs = 2;
    CHECK_THROWS_AS(enumerate_rn(c.inst, c.members, lim), ValidationError);
    lim = OracleLimits{};
    lim.max_assignment_space = 4;
    CHECK_THROWS_AS(enumerate_rn(c.inst, c.members, lim), ValidationError);
}
