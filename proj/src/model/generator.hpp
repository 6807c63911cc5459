#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model/instance.hpp"

namespace cddp {

// One scenario group of the synthetic testbed: |Omega|, node counts, door
// counts available to the group (doors beyond them are fully disrupted for
// the group's scenarios) and the number of uncertain volume cells.
struct GroupShape {
    int scenarios = 0;
    int origins = 0;
    int destinations = 0;
    int strip_doors = 0;
    int stack_doors = 0;
    int h_cells = 0;
};

struct GeneratorOptions {
    std::vector<GroupShape> groups;
    std::uint64_t seed = 0;
    int levels_per_door = 2;
    double volume_min = 5.0;
    double volume_max = 50.0;
    double distance_min = 1.0;
    double distance_max = 5.0;
    double disruption_prob = 0.25;  // chance a usable door is partially disrupted
    double disruption_max = 0.3;
    double install_cost_rate = 0.25;  // install cost per capacity unit
};

// Named preset shapes reproducing the experiment testbed dimensions
// ("I1", "I3", "I7"); throws ValidationError for unknown names.
std::vector<GroupShape> preset_shape(const std::string& name);

// Parses "5x8x8x4x4x17;5x10x10x5x5x26" style inline shapes.
std::vector<GroupShape> parse_shape(const std::string& text);

// Deterministic for fixed options: every random draw comes from a named
// substream keyed by (group, scenario, cell/door), so shapes can be extended
// without shifting existing draws.
CddpInstance generate_instance(const GeneratorOptions& opts);

}  // namespace cddp
