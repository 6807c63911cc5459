#include "dro/builders.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "common/errors.hpp"
#include "milp/solver.hpp"

namespace cddp {

Variant variant_from_name(const std::string& name) {
    if (name == "rn" || name == "RN") return Variant::RiskNeutral;
    if (name == "sd" || name == "SD") return Variant::StochasticDominance;
    throw ValidationError("unknown model variant: " + name);
}

std::string variant_name(Variant v) { return v == Variant::RiskNeutral ? "rn" : "sd"; }

void SdConfig::validate() const {
    if (profiles.empty()) throw ValidationError("sd config: at least one profile required");
    for (const auto& p : profiles) {
        if (p.threshold < 0.0) throw ValidationError("sd config: threshold must be nonnegative");
        if (p.scenario_surplus_cap < 0.0) throw ValidationError("sd config: scenario surplus cap must be nonnegative");
        if (p.expected_surplus_cap > p.scenario_surplus_cap + 1e-12)
            throw ValidationError("sd config: expected surplus cap must not exceed the scenario cap");
        if (p.expected_surplus_cap < 0.0) throw ValidationError("sd config: expected surplus cap must be nonnegative");
    }
    if (!std::isnan(u_lower) && !std::isnan(u_upper) && u_lower > u_upper)
        throw ValidationError("sd config: u_lower > u_upper");
    if (!std::isnan(c_upper)) {
        for (const auto& p : profiles) {
            if (p.scenario_surplus_cap > c_upper)
                throw ValidationError("sd config: scenario surplus cap exceeds the total-cost bound");
        }
    }
}

double max_install_cost(const CddpInstance& inst) {
    double total = 0.0;
    for (const auto& d : inst.strip.doors) {
        double best = 0.0;
        for (const auto& lvl : d.levels) best = std::max(best, lvl.install_cost);
        total += best;
    }
    for (const auto& d : inst.stack.doors) {
        double best = 0.0;
        for (const auto& lvl : d.levels) best = std::max(best, lvl.install_cost);
        total += best;
    }
    return total;
}

double scenario_outsourcing_cost(const CddpInstance& inst, const ScenarioData& data) {
    const double pairs = static_cast<double>(data.origins.size()) * static_cast<double>(data.destinations.size());
    return inst.outsourcing_penalty * (2.0 + pairs);
}

// ---------------------------------------------------------------------------
// Names

namespace names {
std::string alpha(int level, int door) { return "alpha[" + std::to_string(level) + "," + std::to_string(door) + "]"; }
std::string beta(int level, int door) { return "beta[" + std::to_string(level) + "," + std::to_string(door) + "]"; }
std::string alpha_copy(int cluster, int level, int door) {
    return "alpha.c" + std::to_string(cluster) + "[" + std::to_string(level) + "," + std::to_string(door) + "]";
}
std::string beta_copy(int cluster, int level, int door) {
    return "beta.c" + std::to_string(cluster) + "[" + std::to_string(level) + "," + std::to_string(door) + "]";
}
std::string c1() { return "C1"; }
std::string c1_copy(int cluster) { return "C1.c" + std::to_string(cluster); }
std::string u() { return "u"; }
std::string u_copy(int cluster) { return "u.c" + std::to_string(cluster); }
namespace {
std::string pw(int member, int scenario) { return std::to_string(member) + "," + std::to_string(scenario); }
}  // namespace
std::string f(int member, int scenario) { return "F[" + pw(member, scenario) + "]"; }
std::string x(int member, int scenario, int origin, int door) {
    return "x[" + pw(member, scenario) + "," + std::to_string(origin) + "," +
           (door == kOutsourcingDoor ? std::string("o") : std::to_string(door)) + "]";
}
std::string y(int member, int scenario, int destination, int door) {
    return "y[" + pw(member, scenario) + "," + std::to_string(destination) + "," +
           (door == kOutsourcingDoor ? std::string("o") : std::to_string(door)) + "]";
}
std::string v(int member, int scenario, int origin, int door_i, int destination, int door_j) {
    return "v[" + pw(member, scenario) + "," + std::to_string(origin) + "," +
           (door_i == kOutsourcingDoor ? std::string("o") : std::to_string(door_i)) + "," +
           std::to_string(destination) + "," +
           (door_j == kOutsourcingDoor ? std::string("o") : std::to_string(door_j)) + "]";
}
std::string out_strip(int member, int scenario) { return "a0[" + pw(member, scenario) + "]"; }
std::string out_stack(int member, int scenario) { return "b0[" + pw(member, scenario) + "]"; }
std::string gamma(int member) { return "gamma[" + std::to_string(member) + "]"; }
std::string gamma_copy(int cluster) { return "gamma.c" + std::to_string(cluster); }
std::string u_member(int member) { return "up[" + std::to_string(member) + "]"; }
std::string u_cluster(int cluster) { return "uc[" + std::to_string(cluster) + "]"; }
std::string c12(int member, int scenario) { return "C12[" + pw(member, scenario) + "]"; }
std::string c12_sel(int member, int scenario) { return "C12g[" + pw(member, scenario) + "]"; }
std::string surplus(int member, int scenario, int profile) {
    return "s[" + pw(member, scenario) + "," + std::to_string(profile) + "]";
}
}  // namespace names

// ---------------------------------------------------------------------------
// First-stage design

double FirstStageDesign::install_cost(const CddpInstance& inst) const {
    double total = 0.0;
    for (std::size_t i = 0; i < strip_level.size(); ++i) {
        if (strip_level[i] >= 0) total += inst.strip.doors[i].levels[static_cast<std::size_t>(strip_level[i])].install_cost;
    }
    for (std::size_t j = 0; j < stack_level.size(); ++j) {
        if (stack_level[j] >= 0) total += inst.stack.doors[j].levels[static_cast<std::size_t>(stack_level[j])].install_cost;
    }
    return total;
}

double FirstStageDesign::net_capacity_strip(const CddpInstance& inst, int door, double disruption) const {
    const int lvl = strip_level[static_cast<std::size_t>(door)];
    if (lvl < 0) return 0.0;
    return (1.0 - disruption) * inst.strip.doors[static_cast<std::size_t>(door)].levels[static_cast<std::size_t>(lvl)].capacity;
}

double FirstStageDesign::net_capacity_stack(const CddpInstance& inst, int door, double disruption) const {
    const int lvl = stack_level[static_cast<std::size_t>(door)];
    if (lvl < 0) return 0.0;
    return (1.0 - disruption) * inst.stack.doors[static_cast<std::size_t>(door)].levels[static_cast<std::size_t>(lvl)].capacity;
}

void FirstStageDesign::validate(const CddpInstance& inst) const {
    if (strip_level.size() != inst.strip.doors.size() || stack_level.size() != inst.stack.doors.size())
        throw ValidationError("design size does not match door counts");
    int open_strip = 0, open_stack = 0;
    for (std::size_t i = 0; i < strip_level.size(); ++i) {
        if (strip_level[i] >= static_cast<int>(inst.strip.doors[i].levels.size()))
            throw ValidationError("design strip level out of range");
        if (strip_level[i] >= 0) ++open_strip;
    }
    for (std::size_t j = 0; j < stack_level.size(); ++j) {
        if (stack_level[j] >= static_cast<int>(inst.stack.doors[j].levels.size()))
            throw ValidationError("design stack level out of range");
        if (stack_level[j] >= 0) ++open_stack;
    }
    if (open_strip > inst.strip.max_doors || open_stack > inst.stack.max_doors)
        throw ValidationError("design violates the door-count caps");
}

// ---------------------------------------------------------------------------
// Block construction

namespace {

// Column handles for the first-stage variables a block's capacity rows link
// to; when `fixed` is set the capacities are constants instead.
struct FirstStageRef {
    const std::vector<std::vector<int>>* alpha = nullptr;  // [door][level]
    const std::vector<std::vector<int>>* beta = nullptr;
    const FirstStageDesign* fixed = nullptr;
};

int add_second_stage_block(milp::Model& model, const CddpInstance& inst, const ScenarioData& sd, int p, int w,
                           const FirstStageRef& fs) {
    using milp::RowSense;
    const int nm = static_cast<int>(sd.origins.size());
    const int nn = static_cast<int>(sd.destinations.size());
    const std::string tag = std::to_string(p) + "," + std::to_string(w);

    const int a0 = model.add_binary(names::out_strip(p, w));
    const int b0 = model.add_binary(names::out_stack(p, w));
    const int fcol = model.add_continuous(names::f(p, w), 0.0, milp::kInf);

    // Assignment binaries over the accepted doors plus the outsourcing lane.
    std::vector<std::vector<int>> xcol(static_cast<std::size_t>(nm));
    std::vector<std::vector<int>> xdoor(static_cast<std::size_t>(nm));
    for (int m = 0; m < nm; ++m) {
        for (int i : sd.strip_accepted[static_cast<std::size_t>(m)]) {
            xdoor[static_cast<std::size_t>(m)].push_back(i);
            xcol[static_cast<std::size_t>(m)].push_back(model.add_binary(names::x(p, w, m, i)));
        }
        xdoor[static_cast<std::size_t>(m)].push_back(kOutsourcingDoor);
        xcol[static_cast<std::size_t>(m)].push_back(model.add_binary(names::x(p, w, m, kOutsourcingDoor)));
    }
    std::vector<std::vector<int>> ycol(static_cast<std::size_t>(nn));
    std::vector<std::vector<int>> ydoor(static_cast<std::size_t>(nn));
    for (int n = 0; n < nn; ++n) {
        for (int j : sd.stack_accepted[static_cast<std::size_t>(n)]) {
            ydoor[static_cast<std::size_t>(n)].push_back(j);
            ycol[static_cast<std::size_t>(n)].push_back(model.add_binary(names::y(p, w, n, j)));
        }
        ydoor[static_cast<std::size_t>(n)].push_back(kOutsourcingDoor);
        ycol[static_cast<std::size_t>(n)].push_back(model.add_binary(names::y(p, w, n, kOutsourcingDoor)));
    }

    // Linearization flows v >= 0 and the cost expression terms.
    std::vector<std::pair<int, double>> fdef;
    fdef.emplace_back(fcol, 1.0);
    fdef.emplace_back(a0, -inst.outsourcing_penalty);
    fdef.emplace_back(b0, -inst.outsourcing_penalty);
    std::vector<std::vector<std::vector<int>>> vcol(static_cast<std::size_t>(nm));
    for (int m = 0; m < nm; ++m) {
        vcol[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(nn));
        for (int n = 0; n < nn; ++n) {
            auto& cell = vcol[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
            for (std::size_t ii = 0; ii < xdoor[static_cast<std::size_t>(m)].size(); ++ii) {
                for (std::size_t jj = 0; jj < ydoor[static_cast<std::size_t>(n)].size(); ++jj) {
                    const int di = xdoor[static_cast<std::size_t>(m)][ii];
                    const int dj = ydoor[static_cast<std::size_t>(n)][jj];
                    const int col = model.add_continuous(names::v(p, w, m, di, n, dj), 0.0, 1.0);
                    cell.push_back(col);
                    const double g = sd.pair_cost(inst, m, di, n, dj);
                    if (g != 0.0) fdef.emplace_back(col, -g);
                }
            }
        }
    }

    // Each origin assigned exactly once; outsourcing flips the indicator.
    for (int m = 0; m < nm; ++m) {
        std::vector<std::pair<int, double>> row;
        for (int col : xcol[static_cast<std::size_t>(m)]) row.emplace_back(col, 1.0);
        model.add_row("assign_x[" + tag + "," + std::to_string(m) + "]", std::move(row), RowSense::EQ, 1.0);
        model.add_row("out_x[" + tag + "," + std::to_string(m) + "]",
                      {{xcol[static_cast<std::size_t>(m)].back(), 1.0}, {a0, -1.0}}, RowSense::LE, 0.0);
    }
    for (int n = 0; n < nn; ++n) {
        std::vector<std::pair<int, double>> row;
        for (int col : ycol[static_cast<std::size_t>(n)]) row.emplace_back(col, 1.0);
        model.add_row("assign_y[" + tag + "," + std::to_string(n) + "]", std::move(row), RowSense::EQ, 1.0);
        model.add_row("out_y[" + tag + "," + std::to_string(n) + "]",
                      {{ycol[static_cast<std::size_t>(n)].back(), 1.0}, {b0, -1.0}}, RowSense::LE, 0.0);
    }

    // Door capacity under disruption, linked to the installed level.
    for (int i = 0; i < inst.num_strip(); ++i) {
        std::vector<std::pair<int, double>> row;
        for (int m = 0; m < nm; ++m) {
            for (std::size_t ii = 0; ii < xdoor[static_cast<std::size_t>(m)].size(); ++ii) {
                if (xdoor[static_cast<std::size_t>(m)][ii] == i)
                    row.emplace_back(xcol[static_cast<std::size_t>(m)][ii], sd.inbound[static_cast<std::size_t>(m)]);
            }
        }
        const double net = 1.0 - sd.strip_disruption[static_cast<std::size_t>(i)];
        double rhs = 0.0;
        if (fs.fixed) {
            rhs = fs.fixed->net_capacity_strip(inst, i, sd.strip_disruption[static_cast<std::size_t>(i)]);
        } else {
            const auto& levels = inst.strip.doors[static_cast<std::size_t>(i)].levels;
            for (std::size_t k = 0; k < levels.size(); ++k)
                row.emplace_back((*fs.alpha)[static_cast<std::size_t>(i)][k], -net * levels[k].capacity);
        }
        model.add_row("cap_strip[" + tag + "," + std::to_string(i) + "]", std::move(row), RowSense::LE, rhs);
    }
    for (int j = 0; j < inst.num_stack(); ++j) {
        std::vector<std::pair<int, double>> row;
        for (int n = 0; n < nn; ++n) {
            for (std::size_t jj = 0; jj < ydoor[static_cast<std::size_t>(n)].size(); ++jj) {
                if (ydoor[static_cast<std::size_t>(n)][jj] == j)
                    row.emplace_back(ycol[static_cast<std::size_t>(n)][jj], sd.outbound[static_cast<std::size_t>(n)]);
            }
        }
        const double net = 1.0 - sd.stack_disruption[static_cast<std::size_t>(j)];
        double rhs = 0.0;
        if (fs.fixed) {
            rhs = fs.fixed->net_capacity_stack(inst, j, sd.stack_disruption[static_cast<std::size_t>(j)]);
        } else {
            const auto& levels = inst.stack.doors[static_cast<std::size_t>(j)].levels;
            for (std::size_t k = 0; k < levels.size(); ++k)
                row.emplace_back((*fs.beta)[static_cast<std::size_t>(j)][k], -net * levels[k].capacity);
        }
        model.add_row("cap_stack[" + tag + "," + std::to_string(j) + "]", std::move(row), RowSense::LE, rhs);
    }

    // Flow marginals tie v to x and y; together they make v equal the
    // assignment product at binary points.
    for (int m = 0; m < nm; ++m) {
        const auto& doors_m = xdoor[static_cast<std::size_t>(m)];
        for (std::size_t ii = 0; ii < doors_m.size(); ++ii) {
            for (int n = 0; n < nn; ++n) {
                std::vector<std::pair<int, double>> row;
                const auto& cell = vcol[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
                const std::size_t stride = ydoor[static_cast<std::size_t>(n)].size();
                for (std::size_t jj = 0; jj < stride; ++jj) row.emplace_back(cell[ii * stride + jj], 1.0);
                row.emplace_back(xcol[static_cast<std::size_t>(m)][ii], -1.0);
                model.add_row("vmx[" + tag + "," + std::to_string(m) + "," + std::to_string(doors_m[ii]) + "," +
                                  std::to_string(n) + "]",
                              std::move(row), RowSense::EQ, 0.0);
            }
        }
    }
    for (int n = 0; n < nn; ++n) {
        const auto& doors_n = ydoor[static_cast<std::size_t>(n)];
        for (std::size_t jj = 0; jj < doors_n.size(); ++jj) {
            for (int m = 0; m < nm; ++m) {
                std::vector<std::pair<int, double>> row;
                const auto& cell = vcol[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
                const std::size_t stride = doors_n.size();
                for (std::size_t ii = 0; ii < xdoor[static_cast<std::size_t>(m)].size(); ++ii)
                    row.emplace_back(cell[ii * stride + jj], 1.0);
                row.emplace_back(ycol[static_cast<std::size_t>(n)][jj], -1.0);
                model.add_row("vmy[" + tag + "," + std::to_string(m) + "," + std::to_string(n) + "," +
                                  std::to_string(doors_n[jj]) + "]",
                              std::move(row), RowSense::EQ, 0.0);
            }
        }
    }

    model.add_row("fdef[" + tag + "]", std::move(fdef), RowSense::EQ, 0.0);
    return fcol;
}

// First-stage level/count rows plus the C1 definition for one set of
// alpha/beta columns; returns the C1 column.
int add_first_stage(milp::Model& model, const CddpInstance& inst, const std::string& suffix,
                    std::vector<std::vector<int>>& alpha, std::vector<std::vector<int>>& beta,
                    const std::function<std::string(bool, int, int)>& namer) {
    using milp::RowSense;
    alpha.assign(inst.strip.doors.size(), {});
    beta.assign(inst.stack.doors.size(), {});
    std::vector<std::pair<int, double>> count_strip, count_stack, c1def;
    const int c1 = model.add_continuous(suffix.empty() ? names::c1() : names::c1_copy(std::stoi(suffix)), 0.0, milp::kInf);
    c1def.emplace_back(c1, 1.0);
    for (std::size_t i = 0; i < inst.strip.doors.size(); ++i) {
        std::vector<std::pair<int, double>> one_level;
        for (std::size_t k = 0; k < inst.strip.doors[i].levels.size(); ++k) {
            const int col = model.add_binary(namer(true, static_cast<int>(k), static_cast<int>(i)));
            alpha[i].push_back(col);
            one_level.emplace_back(col, 1.0);
            count_strip.emplace_back(col, 1.0);
            c1def.emplace_back(col, -inst.strip.doors[i].levels[k].install_cost);
        }
        model.add_row("level_strip" + suffix + "[" + std::to_string(i) + "]", std::move(one_level), RowSense::LE, 1.0);
    }
    for (std::size_t j = 0; j < inst.stack.doors.size(); ++j) {
        std::vector<std::pair<int, double>> one_level;
        for (std::size_t k = 0; k < inst.stack.doors[j].levels.size(); ++k) {
            const int col = model.add_binary(namer(false, static_cast<int>(k), static_cast<int>(j)));
            beta[j].push_back(col);
            one_level.emplace_back(col, 1.0);
            count_stack.emplace_back(col, 1.0);
            c1def.emplace_back(col, -inst.stack.doors[j].levels[k].install_cost);
        }
        model.add_row("level_stack" + suffix + "[" + std::to_string(j) + "]", std::move(one_level), RowSense::LE, 1.0);
    }
    model.add_row("count_strip" + suffix, std::move(count_strip), RowSense::LE, static_cast<double>(inst.strip.max_doors));
    model.add_row("count_stack" + suffix, std::move(count_stack), RowSense::LE, static_cast<double>(inst.stack.max_doors));
    model.add_row("c1def" + suffix, std::move(c1def), RowSense::EQ, 0.0);
    return c1;
}

// Dominance rows shared by the full SD model and its split version.
// `gamma_of` maps a (member, scenario) to the selection binary the Fortet
// rows use; `c1_col` is the C1 column feeding the total cost definition.
void add_sd_cost_rows(milp::Model& model, const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                      const SdConfig& sd, int c1_col, const std::function<int(int, int)>& gamma_of,
                      bool include_expected_rows) {
    using milp::RowSense;
    const double cbar = sd.c_upper;
    for (std::size_t p = 0; p < members.size(); ++p) {
        for (const auto& ms : members[p].scenarios) {
            const int w = ms.scenario_id;
            const int c12 = model.add_continuous(names::c12(static_cast<int>(p), w), 0.0, milp::kInf);
            const int c12g = model.add_continuous(names::c12_sel(static_cast<int>(p), w), 0.0, milp::kInf);
            const int fcol = model.column_checked(names::f(static_cast<int>(p), w));
            const std::string tag = std::to_string(p) + "," + std::to_string(w);
            model.add_row("c12def[" + tag + "]", {{c12, 1.0}, {c1_col, -1.0}, {fcol, -1.0}}, RowSense::EQ, 0.0);
            const int g = gamma_of(static_cast<int>(p), w);
            model.add_row("c12sel_cap[" + tag + "]", {{c12g, 1.0}, {g, -cbar}}, RowSense::LE, 0.0);
            model.add_row("c12sel_le[" + tag + "]", {{c12g, 1.0}, {c12, -1.0}}, RowSense::LE, 0.0);
            model.add_row("c12sel_ge[" + tag + "]", {{c12, 1.0}, {c12g, -1.0}, {g, cbar}}, RowSense::LE, cbar);
            for (std::size_t b = 0; b < sd.profiles.size(); ++b) {
                const auto& prof = sd.profiles[b];
                const int s = model.add_continuous(names::surplus(static_cast<int>(p), w, static_cast<int>(b)), 0.0,
                                                   prof.scenario_surplus_cap);
                model.add_row("surplus[" + tag + "," + std::to_string(b) + "]", {{c12g, 1.0}, {s, -1.0}}, RowSense::LE,
                              prof.threshold);
            }
        }
        if (include_expected_rows && !sd.drop_expected_surplus) {
            for (std::size_t b = 0; b < sd.profiles.size(); ++b) {
                std::vector<std::pair<int, double>> row;
                for (const auto& ms : members[p].scenarios) {
                    row.emplace_back(
                        model.column_checked(names::surplus(static_cast<int>(p), ms.scenario_id, static_cast<int>(b))),
                        ms.weight);
                }
                model.add_row("exp_surplus[" + std::to_string(p) + "," + std::to_string(b) + "]", std::move(row),
                              RowSense::LE, sd.profiles[b].expected_surplus_cap);
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Full models

milp::Model build_lip_rn(const CddpInstance& inst, const std::vector<AmbiguityMember>& members) {
    if (members.empty()) throw ValidationError("build: empty ambiguity set");
    for (std::size_t p = 0; p < members.size(); ++p) {
        if (members[p].scenarios.empty())
            throw ValidationError("build: member " + std::to_string(p) + " has no scenarios");
    }
    milp::Model model;
    const int u = model.add_continuous(names::u(), 0.0, milp::kInf, 1.0);
    std::vector<std::vector<int>> alpha, beta;
    const int c1 = add_first_stage(model, inst, "", alpha, beta, [](bool strip, int k, int d) {
        return strip ? names::alpha(k, d) : names::beta(k, d);
    });
    FirstStageRef fs;
    fs.alpha = &alpha;
    fs.beta = &beta;
    for (std::size_t p = 0; p < members.size(); ++p) {
        std::vector<std::pair<int, double>> robust{{c1, 1.0}, {u, -1.0}};
        for (const auto& ms : members[p].scenarios) {
            const auto sd = member_scenario_data(inst, ms);
            const int fcol = add_second_stage_block(model, inst, sd, static_cast<int>(p), ms.scenario_id, fs);
            robust.emplace_back(fcol, ms.weight);
        }
        model.add_row("robust[" + std::to_string(p) + "]", std::move(robust), milp::RowSense::LE, 0.0);
    }
    model.validate();
    return model;
}

milp::Model build_lip_sd(const CddpInstance& inst, const std::vector<AmbiguityMember>& members, const SdConfig& sd) {
    sd.validate();
    if (std::isnan(sd.u_lower) || std::isnan(sd.u_upper) || std::isnan(sd.c_upper))
        throw ValidationError("build_lip_sd: bounds not resolved (use resolve_sd_bounds)");
    milp::Model model = build_lip_rn(inst, members);
    const int u = model.column_checked(names::u());
    const int c1 = model.column_checked(names::c1());

    std::vector<int> gammas;
    std::vector<std::pair<int, double>> s1;
    for (std::size_t p = 0; p < members.size(); ++p) {
        const int g = model.add_binary(names::gamma(static_cast<int>(p)));
        gammas.push_back(g);
        s1.emplace_back(g, 1.0);
        const int up = model.add_continuous(names::u_member(static_cast<int>(p)), 0.0, milp::kInf);
        // Selected member's expected cost is pinned to u from below; others
        // only need to clear the floor.
        std::vector<std::pair<int, double>> lower{{up, 1.0}, {g, -sd.u_lower}, {c1, -1.0}};
        for (const auto& ms : members[p].scenarios)
            lower.emplace_back(model.column_checked(names::f(static_cast<int>(p), ms.scenario_id)), -ms.weight);
        model.add_row("sd_lower[" + std::to_string(p) + "]", std::move(lower), milp::RowSense::LE, -sd.u_lower);
        model.add_row("fortet_u_cap[" + std::to_string(p) + "]", {{up, 1.0}, {g, -sd.u_upper}}, milp::RowSense::LE, 0.0);
        model.add_row("fortet_u_le[" + std::to_string(p) + "]", {{up, 1.0}, {u, -1.0}}, milp::RowSense::LE, 0.0);
        model.add_row("fortet_u_ge[" + std::to_string(p) + "]", {{u, 1.0}, {up, -1.0}, {g, sd.u_upper}},
                      milp::RowSense::LE, sd.u_upper);
    }
    model.add_row("s1", std::move(s1), milp::RowSense::EQ, 1.0);
    model.add_sos1(gammas);

    add_sd_cost_rows(model, inst, members, sd, c1, [&](int p, int) { return gammas[static_cast<std::size_t>(p)]; },
                     true);
    model.validate();
    return model;
}

milp::Model build_svc_model(Variant variant, const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                            const ClusterScheme& scheme, const SdConfig* sd) {
    if (variant == Variant::StochasticDominance) {
        if (sd == nullptr) throw ValidationError("svc: sd config required");
        sd->validate();
        if (std::isnan(sd->u_lower) || std::isnan(sd->u_upper) || std::isnan(sd->c_upper))
            throw ValidationError("svc: sd bounds not resolved");
    }
    if (scheme.per_member.size() != members.size()) throw ValidationError("svc: scheme does not match member count");
    milp::Model model;
    const int nc = static_cast<int>(scheme.clusters.size());

    // Per-cluster first-stage copies and u copies.
    std::vector<std::vector<std::vector<int>>> alpha(static_cast<std::size_t>(nc)), beta(static_cast<std::size_t>(nc));
    std::vector<int> c1c(static_cast<std::size_t>(nc)), uc(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        uc[static_cast<std::size_t>(c)] = model.add_continuous(names::u_copy(c), 0.0, milp::kInf, c == 0 ? 1.0 : 0.0);
        c1c[static_cast<std::size_t>(c)] =
            add_first_stage(model, inst, std::to_string(c), alpha[static_cast<std::size_t>(c)],
                            beta[static_cast<std::size_t>(c)], [c](bool strip, int k, int d) {
                                return strip ? names::alpha_copy(c, k, d) : names::beta_copy(c, k, d);
                            });
    }

    // Scenario blocks reference their cluster's copies.
    for (std::size_t p = 0; p < members.size(); ++p) {
        for (const auto& ms : members[p].scenarios) {
            int cluster = -1;
            for (int c : scheme.per_member[p]) {
                const auto& ids = scheme.clusters[static_cast<std::size_t>(c)].scenario_ids;
                if (std::find(ids.begin(), ids.end(), ms.scenario_id) != ids.end()) {
                    cluster = c;
                    break;
                }
            }
            if (cluster < 0) throw ValidationError("svc: scenario missing from the cluster scheme");
            FirstStageRef fs;
            fs.alpha = &alpha[static_cast<std::size_t>(cluster)];
            fs.beta = &beta[static_cast<std::size_t>(cluster)];
            const auto data = member_scenario_data(inst, ms);
            add_second_stage_block(model, inst, data, static_cast<int>(p), ms.scenario_id, fs);
        }
    }

    // Circular split rows over the whole cluster set.
    for (int c = 0; c < nc; ++c) {
        const int n = scheme.next_global(c);
        if (n == c) continue;  // single cluster: rows are tautological
        for (std::size_t i = 0; i < inst.strip.doors.size(); ++i) {
            for (std::size_t k = 0; k < inst.strip.doors[i].levels.size(); ++k) {
                model.add_row("svc_a[" + std::to_string(c) + "," + std::to_string(k) + "," + std::to_string(i) + "]",
                              {{alpha[static_cast<std::size_t>(c)][i][k], 1.0},
                               {alpha[static_cast<std::size_t>(n)][i][k], -1.0}},
                              milp::RowSense::LE, 0.0);
            }
        }
        for (std::size_t j = 0; j < inst.stack.doors.size(); ++j) {
            for (std::size_t k = 0; k < inst.stack.doors[j].levels.size(); ++k) {
                model.add_row("svc_b[" + std::to_string(c) + "," + std::to_string(k) + "," + std::to_string(j) + "]",
                              {{beta[static_cast<std::size_t>(c)][j][k], 1.0},
                               {beta[static_cast<std::size_t>(n)][j][k], -1.0}},
                              milp::RowSense::LE, 0.0);
            }
        }
        model.add_row("svc_u[" + std::to_string(c) + "]",
                      {{uc[static_cast<std::size_t>(c)], 1.0}, {uc[static_cast<std::size_t>(n)], -1.0}},
                      milp::RowSense::LE, 0.0);
    }

    // Member-level robust rows against the designated cluster's copies.
    const int cbar = 0;
    for (std::size_t p = 0; p < members.size(); ++p) {
        std::vector<std::pair<int, double>> robust{{c1c[cbar], 1.0}, {uc[cbar], -1.0}};
        for (const auto& ms : members[p].scenarios)
            robust.emplace_back(model.column_checked(names::f(static_cast<int>(p), ms.scenario_id)), ms.weight);
        model.add_row("robust[" + std::to_string(p) + "]", std::move(robust), milp::RowSense::LE, 0.0);
    }

    if (variant == Variant::StochasticDominance) {
        // Per-cluster selection copies with a per-member circular chain.
        std::vector<int> gc(static_cast<std::size_t>(nc)), ucf(static_cast<std::size_t>(nc));
        for (int c = 0; c < nc; ++c) {
            gc[static_cast<std::size_t>(c)] = model.add_binary(names::gamma_copy(c));
            ucf[static_cast<std::size_t>(c)] = model.add_continuous(names::u_cluster(c), 0.0, milp::kInf);
        }
        for (int c = 0; c < nc; ++c) {
            const int n = scheme.next_in_member(c);
            if (n != c)
                model.add_row("svc_g[" + std::to_string(c) + "]",
                              {{gc[static_cast<std::size_t>(c)], 1.0}, {gc[static_cast<std::size_t>(n)], -1.0}},
                              milp::RowSense::LE, 0.0);
        }
        std::vector<std::pair<int, double>> s1;
        std::vector<int> first_cluster(members.size());
        for (std::size_t p = 0; p < members.size(); ++p) {
            first_cluster[p] = scheme.per_member[p].front();
            s1.emplace_back(gc[static_cast<std::size_t>(first_cluster[p])], 1.0);
        }
        model.add_row("s1", std::move(s1), milp::RowSense::EQ, 1.0);

        for (std::size_t p = 0; p < members.size(); ++p) {
            // Member expected-cost expression reused by the linking rows.
            std::vector<std::pair<int, double>> expr{{c1c[cbar], 1.0}};
            for (const auto& ms : members[p].scenarios)
                expr.emplace_back(model.column_checked(names::f(static_cast<int>(p), ms.scenario_id)), ms.weight);
            for (int c : scheme.per_member[p]) {
                std::vector<std::pair<int, double>> lower{{ucf[static_cast<std::size_t>(c)], 1.0},
                                                          {gc[static_cast<std::size_t>(c)], -sd->u_lower}};
                for (const auto& [col, coef] : expr) lower.emplace_back(col, -coef);
                model.add_row("sd_lower.c" + std::to_string(c), std::move(lower), milp::RowSense::LE, -sd->u_lower);
                model.add_row("fortet_u_cap.c" + std::to_string(c),
                              {{ucf[static_cast<std::size_t>(c)], 1.0}, {gc[static_cast<std::size_t>(c)], -sd->u_upper}},
                              milp::RowSense::LE, 0.0);
                model.add_row("fortet_u_le.c" + std::to_string(c),
                              {{ucf[static_cast<std::size_t>(c)], 1.0}, {uc[static_cast<std::size_t>(c)], -1.0}},
                              milp::RowSense::LE, 0.0);
                model.add_row("fortet_u_ge.c" + std::to_string(c),
                              {{uc[static_cast<std::size_t>(c)], 1.0},
                               {ucf[static_cast<std::size_t>(c)], -1.0},
                               {gc[static_cast<std::size_t>(c)], sd->u_upper}},
                              milp::RowSense::LE, sd->u_upper);
            }
        }
        add_sd_cost_rows(model, inst, members, *sd, c1c[cbar],
                         [&](int p, int w) {
                             for (int c : scheme.per_member[static_cast<std::size_t>(p)]) {
                                 const auto& ids = scheme.clusters[static_cast<std::size_t>(c)].scenario_ids;
                                 if (std::find(ids.begin(), ids.end(), w) != ids.end())
                                     return gc[static_cast<std::size_t>(c)];
                             }
                             throw ValidationError("svc: scenario missing from scheme");
                         },
                         true);
    }
    model.validate();
    return model;
}

milp::Model build_scd_submodel(Variant variant, const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                               const ClusterScheme& scheme, int cluster_id, const SdConfig* sd) {
    const auto& cl = scheme.clusters.at(static_cast<std::size_t>(cluster_id));
    const auto& member = members.at(static_cast<std::size_t>(cl.member));
    if (variant == Variant::StochasticDominance) {
        if (sd == nullptr) throw ValidationError("scd: sd config required");
        sd->validate();
        if (std::isnan(sd->u_lower) || std::isnan(sd->c_upper)) throw ValidationError("scd: sd bounds not resolved");
    }
    milp::Model model;
    const int u = model.add_continuous(names::u(), 0.0, milp::kInf, 1.0);
    std::vector<std::vector<int>> alpha, beta;
    const int c1 = add_first_stage(model, inst, "", alpha, beta, [](bool strip, int k, int d) {
        return strip ? names::alpha(k, d) : names::beta(k, d);
    });
    FirstStageRef fs;
    fs.alpha = &alpha;
    fs.beta = &beta;

    std::vector<AmbiguityMember> restricted{member};
    restricted[0].scenarios.clear();
    std::vector<std::pair<int, double>> cond{{c1, 1.0}, {u, -1.0}};
    for (std::size_t k = 0; k < cl.scenario_ids.size(); ++k) {
        const MemberScenario* ms = member.find_scenario(cl.scenario_ids[k]);
        if (ms == nullptr) throw ValidationError("scd: cluster scenario missing from member");
        MemberScenario copy = *ms;
        copy.weight = cl.within_weights[k];  // conditional weight inside the cluster
        restricted[0].scenarios.push_back(copy);
        const auto data = member_scenario_data(inst, *ms);
        const int fcol = add_second_stage_block(model, inst, data, cl.member, ms->scenario_id, fs);
        cond.emplace_back(fcol, cl.within_weights[k]);
    }
    model.add_row("cond_cost", std::move(cond), milp::RowSense::LE, 0.0);

    if (variant == Variant::StochasticDominance) {
        // Conditional cost floored at u_lower (the second side of the
        // two-sided row; the first side is cond_cost above).
        std::vector<std::pair<int, double>> floor_row{{c1, 1.0}};
        for (std::size_t k = 0; k < cl.scenario_ids.size(); ++k) {
            floor_row.emplace_back(model.column_checked(names::f(cl.member, cl.scenario_ids[k])),
                                   cl.within_weights[k]);
        }
        model.add_row("cond_floor", std::move(floor_row), milp::RowSense::GE, sd->u_lower);
        // Selection stays a free binary here: the member-selection row is relaxed.
        const int g = model.add_binary(names::gamma(cl.member));
        SdConfig local = *sd;
        local.drop_expected_surplus = true;  // expected-surplus rows are relaxed in submodels
        add_sd_cost_rows(model, inst, restricted, local, c1, [&](int, int) { return g; }, false);
    }
    model.validate();
    return model;
}

milp::Model build_assignment_block(const CddpInstance& inst, const ScenarioData& data, const FirstStageDesign& design) {
    design.validate(inst);
    milp::Model model;
    FirstStageRef fs;
    fs.fixed = &design;
    const int fcol = add_second_stage_block(model, inst, data, 0, 0, fs);
    model.set_objective(fcol, 1.0);
    model.validate();
    return model;
}

void fix_first_stage(milp::Model& model, const CddpInstance& inst, const FirstStageDesign& design) {
    design.validate(inst);
    for (std::size_t i = 0; i < inst.strip.doors.size(); ++i) {
        for (std::size_t k = 0; k < inst.strip.doors[i].levels.size(); ++k) {
            const double v = design.strip_level[i] == static_cast<int>(k) ? 1.0 : 0.0;
            model.set_bounds(model.column_checked(names::alpha(static_cast<int>(k), static_cast<int>(i))), v, v);
        }
    }
    for (std::size_t j = 0; j < inst.stack.doors.size(); ++j) {
        for (std::size_t k = 0; k < inst.stack.doors[j].levels.size(); ++k) {
            const double v = design.stack_level[j] == static_cast<int>(k) ? 1.0 : 0.0;
            model.set_bounds(model.column_checked(names::beta(static_cast<int>(k), static_cast<int>(j))), v, v);
        }
    }
}

FirstStageDesign design_from_solution(const milp::Model& model, const std::vector<double>& values,
                                      const CddpInstance& inst, int cluster) {
    FirstStageDesign d;
    d.strip_level.assign(inst.strip.doors.size(), -1);
    d.stack_level.assign(inst.stack.doors.size(), -1);
    for (std::size_t i = 0; i < inst.strip.doors.size(); ++i) {
        for (std::size_t k = 0; k < inst.strip.doors[i].levels.size(); ++k) {
            const std::string name = cluster < 0 ? names::alpha(static_cast<int>(k), static_cast<int>(i))
                                                 : names::alpha_copy(cluster, static_cast<int>(k), static_cast<int>(i));
            if (values[static_cast<std::size_t>(model.column_checked(name))] > 0.5)
                d.strip_level[i] = static_cast<int>(k);
        }
    }
    for (std::size_t j = 0; j < inst.stack.doors.size(); ++j) {
        for (std::size_t k = 0; k < inst.stack.doors[j].levels.size(); ++k) {
            const std::string name = cluster < 0 ? names::beta(static_cast<int>(k), static_cast<int>(j))
                                                 : names::beta_copy(cluster, static_cast<int>(k), static_cast<int>(j));
            if (values[static_cast<std::size_t>(model.column_checked(name))] > 0.5)
                d.stack_level[j] = static_cast<int>(k);
        }
    }
    return d;
}

SdConfig resolve_sd_bounds(const CddpInstance& inst, const std::vector<AmbiguityMember>& members,
                           const ClusterScheme* scheme, SdConfig cfg) {
    const double c1max = max_install_cost(inst);
    if (std::isnan(cfg.u_upper) || std::isnan(cfg.c_upper)) {
        double worst = 0.0;
        for (const auto& m : members) {
            for (const auto& ms : m.scenarios) {
                const auto data = member_scenario_data(inst, ms);
                worst = std::max(worst, scenario_outsourcing_cost(inst, data));
            }
        }
        if (std::isnan(cfg.u_upper)) cfg.u_upper = c1max + worst;
        if (std::isnan(cfg.c_upper)) cfg.c_upper = c1max + worst;
    }
    if (std::isnan(cfg.u_lower)) {
        ClusterScheme trivial;
        const ClusterScheme* use = scheme;
        if (use == nullptr) {
            trivial = build_cluster_scheme(members, 1);
            use = &trivial;
        }
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& cl : use->clusters) {
            auto sub = build_scd_submodel(Variant::RiskNeutral, inst, members, *use, cl.id, nullptr);
            auto sol = milp::solve_lp(sub);
            if (sol.status != milp::Status::Optimal)
                throw ValidationError("sd bounds: cluster LP relaxation failed: " + milp::status_name(sol.status));
            lo = std::min(lo, sol.objective);
        }
        // Small safety margin keeps the floor strictly valid under LP noise.
        cfg.u_lower = std::max(0.0, lo - 1e-6 * std::max(1.0, std::fabs(lo)));
    }
    cfg.validate();
    return cfg;
}

}  // namespace cddp
