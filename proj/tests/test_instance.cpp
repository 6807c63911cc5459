#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common/errors.hpp"
#include "model/generator.hpp"
#include "model/instance.hpp"

using namespace cddp;

namespace {

// Hand-written two-door fixture shared by several suites.
CddpInstance tiny_fixture() {
    CddpInstance inst;
    inst.strip.max_doors = 2;
    inst.strip.doors = {Door{{{10, 4}, {20, 7}}}, Door{{{15, 5}}}};
    inst.stack.max_doors = 2;
    inst.stack.doors = {Door{{{12, 3}}}, Door{{{18, 6}}}};
    inst.distance = {{2.0, 3.0}, {1.0, 2.5}};
    inst.cost_rate = 1.0;
    inst.outsourcing_penalty = 1000.0;
    ScenarioGroup g;
    g.id = 0;
    g.scenarios = {0, 1};
    g.weight = 1.0;
    inst.groups.push_back(g);
    Scenario s0;
    s0.id = 0;
    s0.group = 0;
    s0.weight = 0.5;
    s0.origins = {0, 1};
    s0.destinations = {0, 1};
    s0.volumes = {{0, 0, 5.0}, {1, 1, 7.0}};
    s0.strip_disruption = {0.0, 0.0};
    s0.stack_disruption = {0.0, 0.0};
    Scenario s1 = s0;
    s1.id = 1;
    s1.weight = 0.5;
    s1.volumes = {{0, 0, 12.0}, {0, 1, 2.0}};
    s1.strip_disruption = {0.5, 0.0};
    inst.scenarios = {s0, s1};
    inst.params = {{0, 0, 0, {0}}, {1, 1, 1, {0}}, {2, 0, 1, {0}}};
    inst.validate();
    return inst;
}

}  // namespace

TEST_CASE("derive: row and column sums are exact") {
    auto inst = tiny_fixture();
    auto sd = derive_scenario_data(inst, inst.scenarios[0]);
    CHECK(sd.inbound[0] == 5.0);
    CHECK(sd.inbound[1] == 7.0);
    CHECK(sd.outbound[0] == 5.0);
    CHECK(sd.outbound[1] == 7.0);
}

TEST_CASE("derive: zero volumes accept every door") {
    auto inst = tiny_fixture();
    Scenario s = inst.scenarios[0];
    s.volumes.clear();
    auto sd = derive_scenario_data(inst, s);
    CHECK(sd.inbound[0] == 0.0);
    CHECK(sd.strip_accepted[0].size() == 2);
    CHECK(sd.stack_accepted[1].size() == 2);
}

TEST_CASE("derive: pair cost is rate times distance times volume") {
    auto inst = tiny_fixture();
    auto sd = derive_scenario_data(inst, inst.scenarios[0]);
    CHECK(sd.pair_cost(inst, 0, 0, 0, 1) == doctest::Approx(5.0 * 3.0));
    CHECK(sd.pair_cost(inst, 0, kOutsourcingDoor, 0, 1) == inst.outsourcing_penalty);
}

TEST_CASE("derive: disruption shrinks accepted sets per the membership rule") {
    auto inst = tiny_fixture();
    // Scenario 1: door 0 has levels {10,20}, disruption 0.5 -> best net 10;
    // origin 0 carries 14 > 10, so door 0 is rejected; door 1 offers 15 >= 14.
    auto sd = derive_scenario_data(inst, inst.scenarios[1]);
    CHECK(sd.inbound[0] == doctest::Approx(14.0));
    CHECK(sd.strip_accepted[0] == std::vector<int>{1});

    // Monotonicity: raising the disruption never adds members.
    Scenario s = inst.scenarios[1];
    for (double d = 0.0; d <= 1.0; d += 0.1) {
        s.strip_disruption[0] = d;
        auto lo = derive_scenario_data(inst, s);
        s.strip_disruption[0] = std::min(1.0, d + 0.05);
        auto hi = derive_scenario_data(inst, s);
        for (std::size_t m = 0; m < lo.strip_accepted.size(); ++m) {
            for (int door : hi.strip_accepted[m]) {
                CHECK(std::find(lo.strip_accepted[m].begin(), lo.strip_accepted[m].end(), door) !=
                      lo.strip_accepted[m].end());
            }
        }
    }
}

TEST_CASE("derive: member overrides replace parameter cells") {
    auto inst = tiny_fixture();
    auto sd = derive_scenario_data(inst, inst.scenarios[0], {{0, 9.5}, {2, 1.5}});
    CHECK(sd.volume[0][0] == 9.5);
    CHECK(sd.volume[0][1] == 1.5);
    CHECK(sd.inbound[0] == doctest::Approx(11.0));
    CHECK_THROWS_AS(derive_scenario_data(inst, inst.scenarios[0], {{0, -1.0}}), ValidationError);
}

TEST_CASE("instance json: round trip preserves structure") {
    auto inst = tiny_fixture();
    const std::string text = instance_to_json_text(inst);
    auto back = instance_from_json_text(text);
    CHECK(instance_to_json_text(back) == text);
    CHECK(back.scenarios.size() == 2);
    CHECK(back.params.size() == 3);
    CHECK(back.strip.doors[0].levels[1].capacity == 20.0);
}

TEST_CASE("instance json: missing field is named") {
    auto inst = tiny_fixture();
    std::string text = instance_to_json_text(inst);
    const auto pos = text.find("\"outsourcing_penalty\"");
    REQUIRE(pos != std::string::npos);
    // Drop the field (it sits on one line).
    const auto end = text.find('\n', pos);
    text.erase(pos, end - pos + 1);
    CHECK_THROWS_WITH_AS(instance_from_json_text(text), doctest::Contains("outsourcing_penalty"), ParseError);
}

TEST_CASE("instance validation: big-M dominance is enforced") {
    auto inst = tiny_fixture();
    inst.outsourcing_penalty = 10.0;  // below worst standard cost
    CHECK_THROWS_AS(inst.validate(), ValidationError);
}

TEST_CASE("generator: deterministic and shape-faithful") {
    GeneratorOptions opt;
    opt.groups = parse_shape("5x8x8x4x4x17");
    opt.seed = 42;
    auto a = generate_instance(opt);
    auto b = generate_instance(opt);
    CHECK(instance_to_json_text(a) == instance_to_json_text(b));

    CHECK(a.scenarios.size() == 5);
    CHECK(a.num_strip() == 4);
    CHECK(a.num_stack() == 4);
    for (const auto& s : a.scenarios) {
        CHECK(s.weight == doctest::Approx(0.2));
        CHECK(s.volumes.size() == 17);
        for (const auto& c : s.volumes) CHECK(c.volume > 0.0);
    }
    CHECK(a.params.size() == 17);

    opt.seed = 43;
    auto c = generate_instance(opt);
    CHECK(instance_to_json_text(c) != instance_to_json_text(a));
}

TEST_CASE("generator: multi-group shapes disrupt unknown doors fully") {
    GeneratorOptions opt;
    opt.groups = parse_shape("I3");
    opt.seed = 7;
    auto inst = generate_instance(opt);
    CHECK(inst.scenarios.size() == 10);
    CHECK(inst.num_strip() == 5);
    // Group 0 knows 4 strip doors; door 4 must be fully disrupted there.
    for (int id : inst.groups[0].scenarios) {
        CHECK(inst.scenario_by_id(id).strip_disruption[4] == 1.0);
    }
    for (int id : inst.groups[1].scenarios) {
        CHECK(inst.scenario_by_id(id).strip_disruption[4] < 1.0);
    }
    // Group weights aggregate the rational scenario weights exactly.
    double sum = 0.0;
    for (const auto& g : inst.groups) sum += g.weight;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
    // Shared cells between groups become shared parameters.
    int shared = 0;
    for (const auto& p : inst.params) {
        if (p.groups.size() > 1) ++shared;
    }
    CHECK(inst.params.size() == 17 + 26 - static_cast<std::size_t>(shared));
}

TEST_CASE("generator: dense boundary and shape errors") {
    GeneratorOptions opt;
    opt.groups = {{2, 2, 2, 1, 1, 4}};  // fully dense H
    opt.seed = 1;
    auto inst = generate_instance(opt);
    CHECK(inst.scenarios[0].volumes.size() == 4);

    opt.groups = {{2, 2, 2, 1, 1, 5}};  // |H| > nM*nN
    CHECK_THROWS_AS(generate_instance(opt), ValidationError);
}
