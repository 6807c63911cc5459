#include "model/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "common/errors.hpp"
#include "common/rng.hpp"

namespace cddp {

std::vector<GroupShape> preset_shape(const std::string& name) {
    if (name == "I1") return {{5, 8, 8, 4, 4, 17}};
    if (name == "I3") return {{5, 8, 8, 4, 4, 17}, {5, 10, 10, 5, 5, 26}};
    if (name == "I7")
        return {{5, 8, 8, 4, 4, 17}, {5, 10, 10, 5, 5, 26}, {5, 15, 15, 6, 6, 57}, {5, 20, 20, 10, 10, 101}};
    throw ValidationError("unknown shape preset: " + name);
}

std::vector<GroupShape> parse_shape(const std::string& text) {
    if (text == "I1" || text == "I3" || text == "I7") return preset_shape(text);
    std::vector<GroupShape> out;
    std::istringstream is(text);
    std::string part;
    while (std::getline(is, part, ';')) {
        if (part.empty()) continue;
        GroupShape g;
        int fields[6];
        std::size_t pos = 0;
        for (int k = 0; k < 6; ++k) {
            std::size_t next = part.find('x', pos);
            const std::string tok = part.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            try {
                fields[k] = std::stoi(tok);
            } catch (...) {
                throw ValidationError("bad shape literal: " + text);
            }
            if (next == std::string::npos && k < 5) throw ValidationError("shape needs 6 fields: " + part);
            pos = next == std::string::npos ? part.size() : next + 1;
        }
        g.scenarios = fields[0];
        g.origins = fields[1];
        g.destinations = fields[2];
        g.strip_doors = fields[3];
        g.stack_doors = fields[4];
        g.h_cells = fields[5];
        out.push_back(g);
    }
    if (out.empty()) throw ValidationError("empty shape: " + text);
    return out;
}

namespace {

double round1(double v) { return std::round(v * 10.0) / 10.0; }

std::string label(const std::string& head, long a = -1, long b = -1, long c = -1) {
    std::string s = head;
    if (a >= 0) s += "/" + std::to_string(a);
    if (b >= 0) s += "/" + std::to_string(b);
    if (c >= 0) s += "/" + std::to_string(c);
    return s;
}

}  // namespace

CddpInstance generate_instance(const GeneratorOptions& opts) {
    if (opts.groups.empty()) throw ValidationError("generator: no groups in shape");
    for (const auto& g : opts.groups) {
        if (g.scenarios < 1 || g.origins < 1 || g.destinations < 1 || g.strip_doors < 1 || g.stack_doors < 1)
            throw ValidationError("generator: shape fields must be positive");
        if (g.h_cells < 1 || g.h_cells > g.origins * g.destinations)
            throw ValidationError("generator: |H| must lie in [1, origins*destinations]");
    }
    if (opts.levels_per_door < 1) throw ValidationError("generator: levels_per_door must be >= 1");
    if (opts.volume_min <= 0.0 || opts.volume_max < opts.volume_min)
        throw ValidationError("generator: bad volume range");

    const std::uint64_t seed = opts.seed;
    CddpInstance inst;
    int num_strip = 0, num_stack = 0;
    for (const auto& g : opts.groups) {
        num_strip = std::max(num_strip, g.strip_doors);
        num_stack = std::max(num_stack, g.stack_doors);
    }

    // Distances.
    inst.distance.assign(static_cast<std::size_t>(num_strip), std::vector<double>(static_cast<std::size_t>(num_stack)));
    for (int i = 0; i < num_strip; ++i) {
        for (int j = 0; j < num_stack; ++j) {
            Rng r(seed, label("gen/dist", i, j));
            inst.distance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                round1(r.uniform(opts.distance_min, opts.distance_max));
        }
    }

    // Uncertain cells per group, sampled without replacement.
    std::vector<std::vector<std::pair<int, int>>> group_cells(opts.groups.size());
    for (std::size_t gi = 0; gi < opts.groups.size(); ++gi) {
        const auto& g = opts.groups[gi];
        std::vector<int> all(static_cast<std::size_t>(g.origins * g.destinations));
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
        Rng r(seed, label("gen/cells", static_cast<long>(gi)));
        for (int k = 0; k < g.h_cells; ++k) {
            const auto pick = static_cast<std::size_t>(k) + r.next_below(all.size() - static_cast<std::size_t>(k));
            std::swap(all[static_cast<std::size_t>(k)], all[pick]);
            group_cells[gi].emplace_back(all[static_cast<std::size_t>(k)] / g.destinations,
                                         all[static_cast<std::size_t>(k)] % g.destinations);
        }
        std::sort(group_cells[gi].begin(), group_cells[gi].end());
    }

    // Parameter registry over the union of group cells, ids lexicographic.
    std::map<std::pair<int, int>, std::vector<int>> cell_groups;
    for (std::size_t gi = 0; gi < opts.groups.size(); ++gi) {
        for (const auto& cell : group_cells[gi]) cell_groups[cell].push_back(static_cast<int>(gi));
    }
    for (const auto& [cell, gs] : cell_groups) {
        NominalParam p;
        p.id = static_cast<int>(inst.params.size());
        p.origin = cell.first;
        p.destination = cell.second;
        p.groups = gs;
        inst.params.push_back(std::move(p));
    }

    // Scenarios: equiprobable, contiguous ids per group.
    int total_scenarios = 0;
    for (const auto& g : opts.groups) total_scenarios += g.scenarios;
    const double w = 1.0 / static_cast<double>(total_scenarios);

    double max_total_volume = 0.0;
    double max_inbound = 0.0, max_outbound = 0.0;
    int scenario_id = 0;
    for (std::size_t gi = 0; gi < opts.groups.size(); ++gi) {
        const auto& g = opts.groups[gi];
        ScenarioGroup sg;
        sg.id = static_cast<int>(gi);
        sg.weight = static_cast<double>(g.scenarios) / static_cast<double>(total_scenarios);
        for (int k = 0; k < g.scenarios; ++k) {
            Scenario sc;
            sc.id = scenario_id++;
            sc.group = sg.id;
            sc.weight = w;
            sc.origins.resize(static_cast<std::size_t>(g.origins));
            sc.destinations.resize(static_cast<std::size_t>(g.destinations));
            for (int m = 0; m < g.origins; ++m) sc.origins[static_cast<std::size_t>(m)] = m;
            for (int n = 0; n < g.destinations; ++n) sc.destinations[static_cast<std::size_t>(n)] = n;

            std::vector<double> inbound(static_cast<std::size_t>(g.origins), 0.0);
            std::vector<double> outbound(static_cast<std::size_t>(g.destinations), 0.0);
            double total = 0.0;
            for (const auto& [m, n] : group_cells[gi]) {
                Rng r(seed, label("gen/h", static_cast<long>(gi), k, static_cast<long>(m) * 10000 + n));
                const double v = round1(r.uniform(opts.volume_min, opts.volume_max));
                sc.volumes.push_back(HCell{m, n, v});
                inbound[static_cast<std::size_t>(m)] += v;
                outbound[static_cast<std::size_t>(n)] += v;
                total += v;
            }
            max_total_volume = std::max(max_total_volume, total);
            for (double v : inbound) max_inbound = std::max(max_inbound, v);
            for (double v : outbound) max_outbound = std::max(max_outbound, v);

            sc.strip_disruption.assign(static_cast<std::size_t>(num_strip), 0.0);
            for (int i = 0; i < num_strip; ++i) {
                if (i >= g.strip_doors) {
                    // Doors the group does not know are fully disrupted.
                    sc.strip_disruption[static_cast<std::size_t>(i)] = 1.0;
                } else {
                    Rng r(seed, label("gen/dstrip", static_cast<long>(gi), k, i));
                    if (r.next_double() < opts.disruption_prob)
                        sc.strip_disruption[static_cast<std::size_t>(i)] = round1(r.uniform(0.0, opts.disruption_max));
                }
            }
            sc.stack_disruption.assign(static_cast<std::size_t>(num_stack), 0.0);
            for (int j = 0; j < num_stack; ++j) {
                if (j >= g.stack_doors) {
                    sc.stack_disruption[static_cast<std::size_t>(j)] = 1.0;
                } else {
                    Rng r(seed, label("gen/dstack", static_cast<long>(gi), k, j));
                    if (r.next_double() < opts.disruption_prob)
                        sc.stack_disruption[static_cast<std::size_t>(j)] = round1(r.uniform(0.0, opts.disruption_max));
                }
            }
            sg.scenarios.push_back(sc.id);
            inst.scenarios.push_back(std::move(sc));
        }
        inst.groups.push_back(std::move(sg));
    }

    // Capacity levels sized against the observed loads: the top level of a
    // door can absorb the heaviest single node, lower levels force choices.
    const auto make_side = [&](int count, double heaviest, const char* tag) {
        DoorSide side;
        side.max_doors = count;
        const double ref = std::max(heaviest, max_total_volume / static_cast<double>(count));
        for (int d = 0; d < count; ++d) {
            Rng r(seed, label(tag, d));
            const double jitter = r.uniform(0.95, 1.1);
            Door door;
            for (int k = 0; k < opts.levels_per_door; ++k) {
                const double frac =
                    static_cast<double>(k + 1) / static_cast<double>(opts.levels_per_door);  // 1/L, 2/L, ..., 1
                CapacityLevel lvl;
                lvl.capacity = std::ceil(ref * jitter * (0.6 + 0.7 * frac));
                Rng rc(seed, label(tag, d, k));
                lvl.install_cost = std::ceil(opts.install_cost_rate * lvl.capacity * rc.uniform(0.9, 1.1));
                door.levels.push_back(lvl);
            }
            // Strictly increasing capacities after rounding.
            for (std::size_t k = 1; k < door.levels.size(); ++k) {
                if (door.levels[k].capacity <= door.levels[k - 1].capacity)
                    door.levels[k].capacity = door.levels[k - 1].capacity + 1.0;
            }
            side.doors.push_back(std::move(door));
        }
        return side;
    };
    inst.strip = make_side(num_strip, max_inbound, "gen/capstrip");
    inst.stack = make_side(num_stack, max_outbound, "gen/capstack");

    double max_distance = 0.0;
    for (const auto& row : inst.distance) {
        for (double e : row) max_distance = std::max(max_distance, e);
    }
    inst.outsourcing_penalty = std::ceil(inst.cost_rate * max_distance * max_total_volume) + 1.0;

    inst.validate();
    return inst;
}

}  // namespace cddp
