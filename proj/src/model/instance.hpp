#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cddp {

// Cross-dock problem data. Door indices are 0-based; the artificial
// outsourcing door is represented as index -1 wherever a door id appears.
constexpr int kOutsourcingDoor = -1;

struct CapacityLevel {
    double capacity = 0.0;      // nominal capacity of the level
    double install_cost = 0.0;  // first-stage cost of installing it
};

struct Door {
    std::vector<CapacityLevel> levels;  // strictly increasing capacity
};

struct DoorSide {
    std::vector<Door> doors;
    int max_doors = 1;  // cap on the number of doors that may be opened
};

struct HCell {
    int origin = 0;
    int destination = 0;
    double volume = 0.0;
};

struct Scenario {
    int id = 0;
    int group = 0;
    double weight = 0.0;  // nominal weight
    std::vector<int> origins;
    std::vector<int> destinations;
    std::vector<HCell> volumes;  // sparse commodity volumes
    std::vector<double> strip_disruption;  // per strip door, in [0,1]
    std::vector<double> stack_disruption;  // per stack door
};

struct ScenarioGroup {
    int id = 0;
    std::vector<int> scenarios;  // ascending scenario ids
    double weight = 0.0;         // sum of member scenario weights
};

// Uncertain-parameter registry: parameter h is the commodity volume of one
// origin-destination cell; it may belong to several scenario groups.
struct NominalParam {
    int id = 0;
    int origin = 0;
    int destination = 0;
    std::vector<int> groups;
};

struct CddpInstance {
    int version = 1;
    DoorSide strip;
    DoorSide stack;
    std::vector<std::vector<double>> distance;  // strip x stack
    double outsourcing_penalty = 0.0;           // F0
    double cost_rate = 1.0;                     // G = cost_rate * E * H
    std::vector<ScenarioGroup> groups;
    std::vector<Scenario> scenarios;
    std::vector<NominalParam> params;

    int num_strip() const { return static_cast<int>(strip.doors.size()); }
    int num_stack() const { return static_cast<int>(stack.doors.size()); }
    const Scenario& scenario_by_id(int id) const;
    const ScenarioGroup& group_by_id(int id) const;
    int param_by_cell(int origin, int destination) const;  // -1 when absent

    void validate() const;  // throws ValidationError
};

// Quantities derived from one scenario realization (nominal or perturbed).
struct ScenarioData {
    std::vector<int> origins;
    std::vector<int> destinations;
    std::vector<std::vector<double>> volume;  // dense, [origin pos][dest pos]
    std::vector<double> inbound;              // S_m by origin position
    std::vector<double> outbound;             // R_n by destination position
    std::vector<double> strip_disruption;
    std::vector<double> stack_disruption;
    std::vector<std::vector<int>> strip_accepted;  // per origin position
    std::vector<std::vector<int>> stack_accepted;  // per destination position

    // Standard handling cost G for one assigned pair; door -1 is the
    // outsourcing lane and costs the flat penalty.
    double pair_cost(const CddpInstance& inst, int m_pos, int door_i, int n_pos, int door_j) const;
};

// Derives S/R totals, accepted door sets and the dense volume table.
// `overrides` replaces parameter cells (by param id) with member realizations.
ScenarioData derive_scenario_data(const CddpInstance& inst, const Scenario& sc,
                                  const std::vector<std::pair<int, double>>& overrides = {});

// Largest net capacity a door can offer under disruption d.
double door_best_net_capacity(const Door& door, double disruption);

// JSON document I/O (schema documented in the README).
CddpInstance instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const CddpInstance& inst);
CddpInstance read_instance(const std::string& path);
void write_instance(const CddpInstance& inst, const std::string& path);

}  // namespace cddp
