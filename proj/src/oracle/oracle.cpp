#include "oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/errors.hpp"
#include "common/parallel.hpp"

namespace cddp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Depth-first search over one scenario's assignment space for a fixed
// design. Pruning uses the running best only, which keeps the oracle
// logically independent of the LP machinery.
class AssignmentSearch {
public:
    AssignmentSearch(const CddpInstance& inst, const ScenarioData& sd, const FirstStageDesign& design)
        : inst_(inst), sd_(sd) {
        const int nm = static_cast<int>(sd.origins.size());
        const int nn = static_cast<int>(sd.destinations.size());
        strip_net_.resize(inst.strip.doors.size());
        for (std::size_t i = 0; i < strip_net_.size(); ++i)
            strip_net_[i] = design.net_capacity_strip(inst, static_cast<int>(i), sd.strip_disruption[i]);
        stack_net_.resize(inst.stack.doors.size());
        for (std::size_t j = 0; j < stack_net_.size(); ++j)
            stack_net_[j] = design.net_capacity_stack(inst, static_cast<int>(j), sd.stack_disruption[j]);
        xdoor_.assign(static_cast<std::size_t>(nm), kOutsourcingDoor);
        ydoor_.assign(static_cast<std::size_t>(nn), kOutsourcingDoor);
    }

    // Minimum achievable scenario cost.
    double min_cost() {
        best_ = kInf;
        collect_ = nullptr;
        dfs_x(0);
        return best_;
    }

    // Every achievable cost value (sorted, deduplicated).
    std::vector<double> all_costs() {
        best_ = kInf;
        std::vector<double> out;
        collect_ = &out;
        dfs_x(0);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    void dfs_x(std::size_t m) {
        if (m == xdoor_.size()) {
            dfs_y(0, 0.0);
            return;
        }
        for (int i : sd_.strip_accepted[m]) {
            if (sd_.inbound[m] > strip_net_[static_cast<std::size_t>(i)] + 1e-9) continue;
            strip_net_[static_cast<std::size_t>(i)] -= sd_.inbound[m];
            xdoor_[m] = i;
            dfs_x(m + 1);
            strip_net_[static_cast<std::size_t>(i)] += sd_.inbound[m];
        }
        xdoor_[m] = kOutsourcingDoor;
        dfs_x(m + 1);
    }

    double pair_cost(std::size_t m, std::size_t n, int i, int j) const {
        if (i == kOutsourcingDoor || j == kOutsourcingDoor) return inst_.outsourcing_penalty;
        return inst_.cost_rate * inst_.distance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
               sd_.volume[m][n];
    }

    void dfs_y(std::size_t n, double partial) {
        if (collect_ == nullptr && partial >= best_) return;
        if (n == ydoor_.size()) {
            double total = partial;
            bool out_x = false, out_y = false;
            for (int i : xdoor_) out_x = out_x || i == kOutsourcingDoor;
            for (int j : ydoor_) out_y = out_y || j == kOutsourcingDoor;
            if (out_x) total += inst_.outsourcing_penalty;
            if (out_y) total += inst_.outsourcing_penalty;
            if (collect_) {
                collect_->push_back(total);
            } else {
                best_ = std::min(best_, total);
            }
            return;
        }
        for (int j : sd_.stack_accepted[n]) {
            if (sd_.outbound[n] > stack_net_[static_cast<std::size_t>(j)] + 1e-9) continue;
            double add = 0.0;
            for (std::size_t m = 0; m < xdoor_.size(); ++m) add += pair_cost(m, n, xdoor_[m], j);
            stack_net_[static_cast<std::size_t>(j)] -= sd_.outbound[n];
            ydoor_[n] = j;
            dfs_y(n + 1, partial + add);
            stack_net_[static_cast<std::size_t>(j)] += sd_.outbound[n];
        }
        double add = 0.0;
        for (std::size_t m = 0; m < xdoor_.size(); ++m) add += pair_cost(m, n, xdoor_[m], kOutsourcingDoor);
        ydoor_[n] = kOutsourcingDoor;
        dfs_y(n + 1, partial + add);
    }

    const CddpInstance& inst_;
    const ScenarioData& sd_;
    std::vector<double> strip_net_, stack_net_;
    std::vector<int> xdoor_, ydoor_;
    double best_ = kInf;
    std::vector<double>* collect_ = nullptr;
};

std::vector<FirstStageDesign> enumerate_designs(const CddpInstance& inst, const OracleLimits& limits) {
    double count = 1.0;
    for (const auto& d : inst.strip.doors) count *= static_cast<double>(d.levels.size() + 1);
    for (const auto& d : inst.stack.doors) count *= static_cast<double>(d.levels.size() + 1);
    if (count > static_cast<double>(limits.max_designs))
        throw ValidationError("oracle: design space " + std::to_string(count) + " exceeds the limit");

    std::vector<FirstStageDesign> out;
    FirstStageDesign cur;
    cur.strip_level.assign(inst.strip.doors.size(), -1);
    cur.stack_level.assign(inst.stack.doors.size(), -1);
    const std::size_t total = inst.strip.doors.size() + inst.stack.doors.size();
    const std::function<void(std::size_t)> rec = [&](std::size_t slot) {
        if (slot == total) {
            int open_strip = 0, open_stack = 0;
            for (int l : cur.strip_level) open_strip += l >= 0 ? 1 : 0;
            for (int l : cur.stack_level) open_stack += l >= 0 ? 1 : 0;
            if (open_strip <= inst.strip.max_doors && open_stack <= inst.stack.max_doors) out.push_back(cur);
            return;
        }
        const bool strip = slot < inst.strip.doors.size();
        const std::size_t door = strip ? slot : slot - inst.strip.doors.size();
        const int levels =
            static_cast<int>(strip ? inst.strip.doors[door].levels.size() : inst.stack.doors[door].levels.size());
        for (int l = -1; l < levels; ++l) {
            (strip ? cur.strip_level[door] : cur.stack_level[door]) = l;
            rec(slot + 1);
        }
        (strip ? cur.strip_level[door] : cur.stack_level[door]) = -1;
    };
    rec(0);
    return out;
}

void check_assignment_space(const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                            const std::vector<std::vector<ScenarioData>>& data, const OracleLimits& limits) {
    (void)inst;
    for (std::size_t p = 0; p < members.size(); ++p) {
        for (const auto& sd : data[p]) {
            double space = 1.0;
            for (const auto& acc : sd.strip_accepted) space *= static_cast<double>(acc.size() + 1);
            for (const auto& acc : sd.stack_accepted) space *= static_cast<double>(acc.size() + 1);
            if (space > static_cast<double>(limits.max_assignment_space))
                throw ValidationError("oracle: assignment space " + std::to_string(space) + " exceeds the limit");
        }
    }
}

}  // namespace

OracleResult enumerate_rn(const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                          const OracleLimits& limits) {
    if (members.empty()) throw ValidationError("oracle: empty ambiguity set");
    std::vector<std::vector<ScenarioData>> data(members.size());
    for (std::size_t p = 0; p < members.size(); ++p) {
        for (const auto& ms : members[p].scenarios) data[p].push_back(member_scenario_data(inst, ms));
    }
    check_assignment_space(inst, members, data, limits);
    const auto designs = enumerate_designs(inst, limits);

    struct Eval {
        double objective = kInf;
        std::vector<std::vector<double>> costs;
    };
    std::vector<Eval> evals(designs.size());
    parallel_for(designs.size(), limits.threads, [&](std::size_t d) {
        Eval e;
        e.costs.resize(members.size());
        const double c1 = designs[d].install_cost(inst);
        double worst = -kInf;
        for (std::size_t p = 0; p < members.size(); ++p) {
            double expected = 0.0;
            for (std::size_t k = 0; k < data[p].size(); ++k) {
                AssignmentSearch search(inst, data[p][k], designs[d]);
                const double f = search.min_cost();
                e.costs[p].push_back(f);
                expected += members[p].scenarios[k].weight * f;
            }
            worst = std::max(worst, c1 + expected);
        }
        e.objective = worst;
        evals[d] = std::move(e);
    });

    OracleResult out;
    out.designs_enumerated = static_cast<long>(designs.size());
    std::size_t best = 0;
    for (std::size_t d = 1; d < designs.size(); ++d) {
        if (evals[d].objective < evals[best].objective - 1e-12) best = d;
    }
    out.feasible = true;
    out.objective = evals[best].objective;
    out.design = designs[best];
    out.member_costs = std::move(evals[best].costs);
    return out;
}

OracleResult enumerate_sd(const CddpInstance& inst, const std::vector<AmbiguityMember>& members, const SdConfig& sd,
                          const OracleLimits& limits) {
    if (members.empty()) throw ValidationError("oracle: empty ambiguity set");
    if (members.size() > 4) throw ValidationError("oracle: dominance enumeration limited to 4 members");
    sd.validate();
    std::vector<std::vector<ScenarioData>> data(members.size());
    for (std::size_t p = 0; p < members.size(); ++p) {
        for (const auto& ms : members[p].scenarios) data[p].push_back(member_scenario_data(inst, ms));
    }
    check_assignment_space(inst, members, data, limits);
    const auto designs = enumerate_designs(inst, limits);

    struct MemberPick {
        bool feasible = false;
        double cost = kInf;                // expected member cost at the pick
        std::vector<std::size_t> choice;   // picked cost index per scenario
    };

    struct Eval {
        bool feasible = false;
        double objective = kInf;
        int selected = -1;
        std::vector<std::vector<double>> costs;      // chosen (or minimal) F per scenario
        std::vector<std::vector<double>> surpluses;  // selected member, per (scenario, profile)
    };

    std::vector<Eval> evals(designs.size());
    parallel_for(designs.size(), limits.threads, [&](std::size_t d) {
        Eval e;
        const double c1 = designs[d].install_cost(inst);

        // Achievable scenario costs per member scenario.
        std::vector<std::vector<std::vector<double>>> options(members.size());
        bool any_empty = false;
        for (std::size_t p = 0; p < members.size() && !any_empty; ++p) {
            options[p].resize(data[p].size());
            for (std::size_t k = 0; k < data[p].size(); ++k) {
                AssignmentSearch search(inst, data[p][k], designs[d]);
                options[p][k] = search.all_costs();
                if (options[p][k].empty()) any_empty = true;
            }
        }
        if (any_empty) {
            evals[d] = std::move(e);  // outsourcing always exists, so this cannot happen
            return;
        }

        // Floor: the robust cost may not undercut any member's cheapest cost.
        double floor = -kInf;
        for (std::size_t p = 0; p < members.size(); ++p) {
            double expected = 0.0;
            for (std::size_t k = 0; k < options[p].size(); ++k)
                expected += members[p].scenarios[k].weight * options[p][k].front();
            floor = std::max(floor, c1 + expected);
        }

        // Cheapest selectable combination per member: honors the per-scenario
        // surplus caps, the expected-surplus caps and the floor.
        const auto pick_member = [&](std::size_t p) {
            MemberPick pick;
            const std::size_t ns = options[p].size();
            std::vector<double> min_rest(ns + 1, 0.0);
            for (std::size_t k = ns; k-- > 0;)
                min_rest[k] = min_rest[k + 1] + members[p].scenarios[k].weight * options[p][k].front();
            std::vector<std::size_t> choice(ns, 0);
            std::vector<double> best_cost{kInf};
            std::vector<std::size_t> best_choice;
            const std::function<void(std::size_t, double, std::vector<double>)> rec =
                [&](std::size_t k, double expected, std::vector<double> surplus_used) {
                    if (c1 + expected + min_rest[k] >= best_cost[0]) return;
                    if (k == ns) {
                        const double total = c1 + expected;
                        if (total < floor - 1e-9) return;
                        best_cost[0] = total;
                        best_choice = choice;
                        return;
                    }
                    const double w = members[p].scenarios[k].weight;
                    for (std::size_t c = 0; c < options[p][k].size(); ++c) {
                        const double f = options[p][k][c];
                        const double c12 = c1 + f;
                        bool ok = true;
                        auto used = surplus_used;
                        for (std::size_t b = 0; b < sd.profiles.size() && ok; ++b) {
                            const double surplus = std::max(0.0, c12 - sd.profiles[b].threshold);
                            if (surplus > sd.profiles[b].scenario_surplus_cap + 1e-9) ok = false;
                            used[b] += w * surplus;
                            if (!sd.drop_expected_surplus && used[b] > sd.profiles[b].expected_surplus_cap + 1e-9)
                                ok = false;
                        }
                        if (!ok) continue;
                        choice[k] = c;
                        rec(k + 1, expected + w * f, used);
                    }
                };
            rec(0, 0.0, std::vector<double>(sd.profiles.size(), 0.0));
            if (best_cost[0] < kInf) {
                pick.feasible = true;
                pick.cost = best_cost[0];
                pick.choice = best_choice;
            }
            return pick;
        };

        int selected = -1;
        MemberPick best_pick;
        for (std::size_t p = 0; p < members.size(); ++p) {
            const auto pick = pick_member(p);
            if (pick.feasible && pick.cost < best_pick.cost - 1e-12) {
                best_pick = pick;
                selected = static_cast<int>(p);
            }
        }
        if (selected < 0) {
            evals[d] = std::move(e);
            return;
        }
        e.feasible = true;
        e.objective = best_pick.cost;
        e.selected = selected;
        e.costs.resize(members.size());
        for (std::size_t p = 0; p < members.size(); ++p) {
            for (std::size_t k = 0; k < options[p].size(); ++k) {
                const double f = p == static_cast<std::size_t>(selected) ? options[p][k][best_pick.choice[k]]
                                                                         : options[p][k].front();
                e.costs[p].push_back(f);
            }
        }
        e.surpluses.resize(options[static_cast<std::size_t>(selected)].size());
        for (std::size_t k = 0; k < options[static_cast<std::size_t>(selected)].size(); ++k) {
            const double c12 = c1 + e.costs[static_cast<std::size_t>(selected)][k];
            std::vector<double> row;
            for (const auto& prof : sd.profiles) row.push_back(std::max(0.0, c12 - prof.threshold));
            e.surpluses[k] = std::move(row);
        }
        evals[d] = std::move(e);
    });

    OracleResult out;
    out.designs_enumerated = static_cast<long>(designs.size());
    int best = -1;
    for (std::size_t d = 0; d < designs.size(); ++d) {
        if (!evals[d].feasible) continue;
        if (best < 0 || evals[d].objective < evals[static_cast<std::size_t>(best)].objective - 1e-12)
            best = static_cast<int>(d);
    }
    if (best < 0) {
        out.feasible = false;
        return out;
    }
    auto& win = evals[static_cast<std::size_t>(best)];
    out.feasible = true;
    out.objective = win.objective;
    out.design = designs[static_cast<std::size_t>(best)];
    out.selected_member = win.selected;
    out.member_costs = std::move(win.costs);
    out.surpluses = std::move(win.surpluses);
    return out;
}

}  // namespace cddp
