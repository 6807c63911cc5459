#include "model/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "common/errors.hpp"

namespace cddp {

using nlohmann::json;

const Scenario& CddpInstance::scenario_by_id(int id) const {
    for (const auto& s : scenarios) {
        if (s.id == id) return s;
    }
    throw ValidationError("unknown scenario id " + std::to_string(id));
}

const ScenarioGroup& CddpInstance::group_by_id(int id) const {
    for (const auto& g : groups) {
        if (g.id == id) return g;
    }
    throw ValidationError("unknown scenario group id " + std::to_string(id));
}

int CddpInstance::param_by_cell(int origin, int destination) const {
    for (const auto& p : params) {
        if (p.origin == origin && p.destination == destination) return p.id;
    }
    return -1;
}

namespace {

void validate_side(const DoorSide& side, const char* name) {
    if (side.max_doors < 1) throw ValidationError(std::string(name) + ": max_doors must be >= 1");
    for (std::size_t i = 0; i < side.doors.size(); ++i) {
        const auto& d = side.doors[i];
        double prev = -1.0;
        for (const auto& lvl : d.levels) {
            if (lvl.capacity <= prev)
                throw ValidationError(std::string(name) + " door " + std::to_string(i) +
                                      ": capacity levels must be strictly increasing");
            if (lvl.install_cost < 0.0)
                throw ValidationError(std::string(name) + " door " + std::to_string(i) + ": negative install cost");
            prev = lvl.capacity;
        }
    }
}

}  // namespace

void CddpInstance::validate() const {
    validate_side(strip, "strip");
    validate_side(stack, "stack");
    if (distance.size() != strip.doors.size())
        throw ValidationError("distance matrix rows do not match strip door count");
    double max_distance = 0.0;
    for (const auto& row : distance) {
        if (row.size() != stack.doors.size())
            throw ValidationError("distance matrix columns do not match stack door count");
        for (double e : row) {
            if (e < 0.0) throw ValidationError("negative distance");
            max_distance = std::max(max_distance, e);
        }
    }

    double group_weight = 0.0;
    std::set<int> seen_scenarios;
    for (const auto& g : groups) {
        group_weight += g.weight;
        int prev = -1;
        for (int id : g.scenarios) {
            if (id <= prev) throw ValidationError("scenario ids within a group must be strictly increasing");
            prev = id;
            if (!seen_scenarios.insert(id).second)
                throw ValidationError("scenario " + std::to_string(id) + " appears in more than one group");
        }
    }
    if (std::fabs(group_weight - 1.0) > 1e-12) throw ValidationError("group weights must sum to 1");

    double max_total_volume = 0.0;
    double weight_sum = 0.0;
    for (const auto& s : scenarios) {
        if (seen_scenarios.count(s.id) == 0)
            throw ValidationError("scenario " + std::to_string(s.id) + " belongs to no group");
        weight_sum += s.weight;
        if (s.weight <= 0.0) throw ValidationError("scenario " + std::to_string(s.id) + ": weight must be positive");
        if (s.strip_disruption.size() != strip.doors.size() || s.stack_disruption.size() != stack.doors.size())
            throw ValidationError("scenario " + std::to_string(s.id) + ": disruption vector size mismatch");
        for (double d : s.strip_disruption) {
            if (d < 0.0 || d > 1.0)
                throw ValidationError("scenario " + std::to_string(s.id) + ": strip disruption outside [0,1]");
        }
        for (double d : s.stack_disruption) {
            if (d < 0.0 || d > 1.0)
                throw ValidationError("scenario " + std::to_string(s.id) + ": stack disruption outside [0,1]");
        }
        double total = 0.0;
        for (const auto& c : s.volumes) {
            if (c.volume < 0.0)
                throw ValidationError("scenario " + std::to_string(s.id) + " cell (" + std::to_string(c.origin) + "," +
                                      std::to_string(c.destination) + "): negative volume");
            if (std::find(s.origins.begin(), s.origins.end(), c.origin) == s.origins.end() ||
                std::find(s.destinations.begin(), s.destinations.end(), c.destination) == s.destinations.end())
                throw ValidationError("scenario " + std::to_string(s.id) + ": volume cell outside node sets");
            total += c.volume;
        }
        max_total_volume = std::max(max_total_volume, total);
    }
    if (!scenarios.empty() && std::fabs(weight_sum - 1.0) > 1e-12)
        throw ValidationError("scenario weights must sum to 1");

    // Big-M dominance: the outsourcing penalty must exceed any achievable
    // standard assignment cost.
    if (outsourcing_penalty <= cost_rate * max_distance * max_total_volume)
        throw ValidationError("outsourcing_penalty does not dominate standard assignment costs");

    for (const auto& p : params) {
        for (int g : p.groups) group_by_id(g);
    }
}

double door_best_net_capacity(const Door& door, double disruption) {
    double best = 0.0;
    for (const auto& lvl : door.levels) best = std::max(best, (1.0 - disruption) * lvl.capacity);
    return best;
}

double ScenarioData::pair_cost(const CddpInstance& inst, int m_pos, int door_i, int n_pos, int door_j) const {
    if (door_i == kOutsourcingDoor || door_j == kOutsourcingDoor) return inst.outsourcing_penalty;
    return inst.cost_rate * inst.distance[static_cast<std::size_t>(door_i)][static_cast<std::size_t>(door_j)] *
           volume[static_cast<std::size_t>(m_pos)][static_cast<std::size_t>(n_pos)];
}

ScenarioData derive_scenario_data(const CddpInstance& inst, const Scenario& sc,
                                  const std::vector<std::pair<int, double>>& overrides) {
    ScenarioData out;
    out.origins = sc.origins;
    out.destinations = sc.destinations;
    out.strip_disruption = sc.strip_disruption;
    out.stack_disruption = sc.stack_disruption;

    const std::size_t nm = sc.origins.size();
    const std::size_t nn = sc.destinations.size();
    out.volume.assign(nm, std::vector<double>(nn, 0.0));

    const auto origin_pos = [&](int node) {
        for (std::size_t i = 0; i < nm; ++i) {
            if (sc.origins[i] == node) return static_cast<int>(i);
        }
        return -1;
    };
    const auto dest_pos = [&](int node) {
        for (std::size_t i = 0; i < nn; ++i) {
            if (sc.destinations[i] == node) return static_cast<int>(i);
        }
        return -1;
    };

    for (const auto& c : sc.volumes) {
        if (c.volume < 0.0)
            throw ValidationError("scenario " + std::to_string(sc.id) + " cell (" + std::to_string(c.origin) + "," +
                                  std::to_string(c.destination) + "): negative volume");
        const int mp = origin_pos(c.origin);
        const int np = dest_pos(c.destination);
        if (mp < 0 || np < 0)
            throw ValidationError("scenario " + std::to_string(sc.id) + ": volume cell outside node sets");
        out.volume[static_cast<std::size_t>(mp)][static_cast<std::size_t>(np)] = c.volume;
    }
    for (const auto& [param_id, value] : overrides) {
        if (param_id < 0 || param_id >= static_cast<int>(inst.params.size()))
            throw ValidationError("override references unknown parameter " + std::to_string(param_id));
        if (value < 0.0)
            throw ValidationError("scenario " + std::to_string(sc.id) + " parameter " + std::to_string(param_id) +
                                  ": negative volume");
        const auto& p = inst.params[static_cast<std::size_t>(param_id)];
        const int mp = origin_pos(p.origin);
        const int np = dest_pos(p.destination);
        if (mp < 0 || np < 0) continue;  // parameter not active in this scenario
        out.volume[static_cast<std::size_t>(mp)][static_cast<std::size_t>(np)] = value;
    }

    for (std::size_t d = 0; d < sc.strip_disruption.size(); ++d) {
        const double v = sc.strip_disruption[d];
        if (v < 0.0 || v > 1.0)
            throw ValidationError("scenario " + std::to_string(sc.id) + " strip door " + std::to_string(d) +
                                  ": disruption outside [0,1]");
    }
    for (std::size_t d = 0; d < sc.stack_disruption.size(); ++d) {
        const double v = sc.stack_disruption[d];
        if (v < 0.0 || v > 1.0)
            throw ValidationError("scenario " + std::to_string(sc.id) + " stack door " + std::to_string(d) +
                                  ": disruption outside [0,1]");
    }

    out.inbound.assign(nm, 0.0);
    out.outbound.assign(nn, 0.0);
    for (std::size_t m = 0; m < nm; ++m) {
        for (std::size_t n = 0; n < nn; ++n) {
            out.inbound[m] += out.volume[m][n];
            out.outbound[n] += out.volume[m][n];
        }
    }

    // Accepted door sets: a door qualifies when some level keeps enough net
    // capacity for the node's whole flow.
    out.strip_accepted.assign(nm, {});
    for (std::size_t m = 0; m < nm; ++m) {
        for (int i = 0; i < inst.num_strip(); ++i) {
            if (out.inbound[m] <= door_best_net_capacity(inst.strip.doors[static_cast<std::size_t>(i)],
                                                         sc.strip_disruption[static_cast<std::size_t>(i)]))
                out.strip_accepted[m].push_back(i);
        }
    }
    out.stack_accepted.assign(nn, {});
    for (std::size_t n = 0; n < nn; ++n) {
        for (int j = 0; j < inst.num_stack(); ++j) {
            if (out.outbound[n] <= door_best_net_capacity(inst.stack.doors[static_cast<std::size_t>(j)],
                                                          sc.stack_disruption[static_cast<std::size_t>(j)]))
                out.stack_accepted[n].push_back(j);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON document I/O

namespace {

const json& need(const json& j, const char* field, const std::string& where) {
    auto it = j.find(field);
    if (it == j.end()) throw ParseError(where + ": missing field `" + field + "`");
    return *it;
}

DoorSide side_from_json(const json& j, const std::string& where) {
    DoorSide side;
    side.max_doors = need(j, "max_doors", where).get<int>();
    for (const auto& dj : need(j, "doors", where)) {
        Door d;
        for (const auto& lj : need(dj, "levels", where + ".doors")) {
            CapacityLevel lvl;
            lvl.capacity = need(lj, "capacity", where + ".levels").get<double>();
            lvl.install_cost = need(lj, "install_cost", where + ".levels").get<double>();
            d.levels.push_back(lvl);
        }
        side.doors.push_back(std::move(d));
    }
    return side;
}

json side_to_json(const DoorSide& side) {
    json doors = json::array();
    for (const auto& d : side.doors) {
        json levels = json::array();
        for (const auto& lvl : d.levels)
            levels.push_back({{"capacity", lvl.capacity}, {"install_cost", lvl.install_cost}});
        doors.push_back({{"levels", std::move(levels)}});
    }
    return {{"max_doors", side.max_doors}, {"doors", std::move(doors)}};
}

}  // namespace

CddpInstance instance_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("instance JSON: ") + e.what());
    }
    CddpInstance inst;
    inst.version = need(j, "version", "instance").get<int>();
    if (inst.version != 1) throw ParseError("unsupported instance schema version " + std::to_string(inst.version));
    inst.strip = side_from_json(need(j, "strip", "instance"), "strip");
    inst.stack = side_from_json(need(j, "stack", "instance"), "stack");
    inst.distance = need(j, "distance", "instance").get<std::vector<std::vector<double>>>();
    inst.outsourcing_penalty = need(j, "outsourcing_penalty", "instance").get<double>();
    inst.cost_rate = need(j, "cost_rate", "instance").get<double>();
    for (const auto& gj : need(j, "scenario_groups", "instance")) {
        ScenarioGroup g;
        g.id = need(gj, "id", "scenario_groups").get<int>();
        g.scenarios = need(gj, "scenarios", "scenario_groups").get<std::vector<int>>();
        g.weight = need(gj, "weight", "scenario_groups").get<double>();
        inst.groups.push_back(std::move(g));
    }
    for (const auto& sj : need(j, "scenarios", "instance")) {
        Scenario s;
        s.id = need(sj, "id", "scenarios").get<int>();
        s.group = need(sj, "group", "scenarios").get<int>();
        s.weight = need(sj, "weight", "scenarios").get<double>();
        s.origins = need(sj, "origins", "scenarios").get<std::vector<int>>();
        s.destinations = need(sj, "destinations", "scenarios").get<std::vector<int>>();
        for (const auto& vj : need(sj, "volumes", "scenarios")) {
            if (!vj.is_array() || vj.size() != 3)
                throw ParseError("scenarios.volumes: expected [origin, destination, value]");
            s.volumes.push_back(HCell{vj[0].get<int>(), vj[1].get<int>(), vj[2].get<double>()});
        }
        s.strip_disruption = need(sj, "strip_disruption", "scenarios").get<std::vector<double>>();
        s.stack_disruption = need(sj, "stack_disruption", "scenarios").get<std::vector<double>>();
        inst.scenarios.push_back(std::move(s));
    }
    const auto& nom = need(j, "nominal", "instance");
    for (const auto& pj : need(nom, "parameters", "nominal")) {
        NominalParam p;
        p.id = need(pj, "id", "nominal.parameters").get<int>();
        p.origin = need(pj, "origin", "nominal.parameters").get<int>();
        p.destination = need(pj, "destination", "nominal.parameters").get<int>();
        p.groups = need(pj, "groups", "nominal.parameters").get<std::vector<int>>();
        inst.params.push_back(std::move(p));
    }
    inst.validate();
    return inst;
}

std::string instance_to_json_text(const CddpInstance& inst) {
    json j;
    j["version"] = inst.version;
    j["strip"] = side_to_json(inst.strip);
    j["stack"] = side_to_json(inst.stack);
    j["distance"] = inst.distance;
    j["outsourcing_penalty"] = inst.outsourcing_penalty;
    j["cost_rate"] = inst.cost_rate;
    json groups = json::array();
    for (const auto& g : inst.groups) groups.push_back({{"id", g.id}, {"scenarios", g.scenarios}, {"weight", g.weight}});
    j["scenario_groups"] = std::move(groups);
    json scenarios = json::array();
    for (const auto& s : inst.scenarios) {
        json vols = json::array();
        for (const auto& c : s.volumes) vols.push_back({c.origin, c.destination, c.volume});
        scenarios.push_back({{"id", s.id},
                             {"group", s.group},
                             {"weight", s.weight},
                             {"origins", s.origins},
                             {"destinations", s.destinations},
                             {"volumes", std::move(vols)},
                             {"strip_disruption", s.strip_disruption},
                             {"stack_disruption", s.stack_disruption}});
    }
    j["scenarios"] = std::move(scenarios);
    json params = json::array();
    for (const auto& p : inst.params)
        params.push_back({{"id", p.id}, {"origin", p.origin}, {"destination", p.destination}, {"groups", p.groups}});
    j["nominal"] = {{"parameters", std::move(params)}};
    return j.dump(2) + "\n";
}

CddpInstance read_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return instance_from_json_text(buf.str());
}

void write_instance(const CddpInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << instance_to_json_text(inst);
}

}  // namespace cddp
