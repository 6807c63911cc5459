#include <algorithm>
#include <cmath>
#include <queue>

#include "milp/simplex_internal.hpp"

namespace cddp::milp {

namespace {

struct BoundChange {
    int col;
    double lb, ub;
};

struct Node {
    double bound;
    int depth;
    long id;
    std::vector<BoundChange> changes;  // cumulative from the root
};

struct NodeOrder {
    // Best-first: lowest bound; ties broken by deeper node, then lower id.
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id > b.id;
    }
};

void snap_binaries(std::vector<double>& x, const Model& model) {
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        if (model.var(j).kind == VarKind::Binary) x[j] = std::round(x[j]);
    }
}

}  // namespace

Solution solve_milp(const Model& model, const SolveLimits& limits) {
    model.validate();

    // SOS1 groups over binaries reduce to a sum row.
    const Model* work_model = &model;
    Model augmented;
    if (!model.sos1_groups().empty()) {
        augmented = model;
        int g = 0;
        for (const auto& group : model.sos1_groups()) {
            std::vector<std::pair<int, double>> coeffs;
            coeffs.reserve(group.size());
            for (int col : group) coeffs.emplace_back(col, 1.0);
            augmented.add_row("sos1_" + std::to_string(g++), std::move(coeffs), RowSense::LE, 1.0);
        }
        work_model = &augmented;
    }

    auto sf = detail::build_standard_form(*work_model);
    const auto deadline = detail::deadline_from(limits.time_limit);

    std::vector<int> binaries;
    for (std::size_t j = 0; j < work_model->num_vars(); ++j) {
        if (work_model->var(j).kind == VarKind::Binary) binaries.push_back(static_cast<int>(j));
    }

    Solution out;
    out.best_bound = -kInf;

    const auto apply = [&](const std::vector<BoundChange>& changes) {
        for (const auto& c : changes) {
            sf.lb[static_cast<std::size_t>(c.col)] = c.lb;
            sf.ub[static_cast<std::size_t>(c.col)] = c.ub;
        }
    };
    const auto restore = [&](const std::vector<BoundChange>& changes) {
        for (const auto& c : changes) {
            const auto& v = work_model->var(static_cast<std::size_t>(c.col));
            sf.lb[static_cast<std::size_t>(c.col)] = v.lb;
            sf.ub[static_cast<std::size_t>(c.col)] = v.ub;
        }
    };

    long iterations_left = limits.iteration_limit;
    const auto solve_node = [&](const std::vector<BoundChange>& changes) {
        apply(changes);
        auto lr = detail::solve_standard(sf, deadline, iterations_left);
        restore(changes);
        out.iterations += lr.iterations;
        iterations_left = std::max<long>(0, limits.iteration_limit - out.iterations);
        return lr;
    };

    // Most fractional binary, ties to the lowest column; -1 when integral.
    const auto fractional_col = [&](const std::vector<double>& x) {
        int best = -1;
        double best_frac = kIntTol;
        for (int col : binaries) {
            const double v = x[static_cast<std::size_t>(col)];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac > best_frac + 1e-12) {
                best_frac = frac;
                best = col;
            }
        }
        return best;
    };

    double incumbent = kInf;
    std::vector<double> incumbent_x;
    const auto accept_incumbent = [&](double obj, const std::vector<double>& x) {
        if (obj < incumbent - 1e-12) {
            incumbent = obj;
            incumbent_x.assign(x.begin(), x.begin() + work_model->num_vars());
            out.incumbent_history.push_back(obj);
        }
    };

    bool hit_limit = false;
    long node_id = 0;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;

    {
        auto lr = solve_node({});
        ++node_id;
        if (lr.outcome == detail::LpOutcome::Infeasible) {
            out.status = Status::Infeasible;
            out.nodes = node_id;
            return out;
        }
        if (lr.outcome == detail::LpOutcome::Unbounded) {
            out.status = Status::Unbounded;
            out.nodes = node_id;
            return out;
        }
        if (lr.outcome != detail::LpOutcome::Optimal) {
            out.status = Status::TimeLimit;
            out.nodes = node_id;
            return out;
        }
        out.best_bound = lr.objective;
        if (fractional_col(lr.x) < 0)
            accept_incumbent(lr.objective, lr.x);
        else
            open.push(Node{lr.objective, 0, 0, {}});
    }

    const double gap_limit_frac = limits.gap_limit / 100.0;
    bool proved_optimal = open.empty();
    bool stopped_on_gap = false;

    while (!open.empty()) {
        if (std::chrono::steady_clock::now() > deadline || out.iterations >= limits.iteration_limit ||
            node_id >= limits.node_limit) {
            hit_limit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        out.best_bound = std::max(out.best_bound, node.bound);
        out.bound_history.push_back(out.best_bound);

        const double prune_tol = 1e-9 * std::max(1.0, std::fabs(incumbent));
        if (node.bound >= incumbent - prune_tol) {
            out.best_bound = incumbent;
            proved_optimal = true;
            break;
        }
        if (std::isfinite(incumbent) && gap_limit_frac > 0.0) {
            const double gap = (incumbent - node.bound) / std::max(1e-12, std::fabs(incumbent));
            if (gap <= gap_limit_frac) {
                stopped_on_gap = true;
                break;
            }
        }

        // Re-solve this node's LP to recover the fractional point.
        auto lr = solve_node(node.changes);
        if (lr.outcome == detail::LpOutcome::IterationLimit || lr.outcome == detail::LpOutcome::TimeLimit) {
            hit_limit = true;
            break;
        }
        if (lr.outcome != detail::LpOutcome::Optimal) continue;
        const int frac = fractional_col(lr.x);
        if (frac < 0) {
            accept_incumbent(lr.objective, lr.x);
            continue;
        }

        for (int side = 0; side < 2 && !hit_limit; ++side) {
            auto changes = node.changes;
            changes.push_back(side == 0 ? BoundChange{frac, 0.0, 0.0} : BoundChange{frac, 1.0, 1.0});
            auto child = solve_node(changes);
            const long id = ++node_id;
            if (child.outcome == detail::LpOutcome::IterationLimit || child.outcome == detail::LpOutcome::TimeLimit) {
                hit_limit = true;
                break;
            }
            if (child.outcome != detail::LpOutcome::Optimal) continue;
            const double child_bound = std::max(child.objective, node.bound);
            if (child_bound >= incumbent - prune_tol) continue;
            const int child_frac = fractional_col(child.x);
            if (child_frac < 0) {
                accept_incumbent(child.objective, child.x);
                continue;
            }
            open.push(Node{child_bound, node.depth + 1, id, std::move(changes)});
        }
        if (hit_limit) break;
        if (open.empty()) proved_optimal = true;
    }
    if (open.empty() && !hit_limit) proved_optimal = true;

    out.nodes = node_id;
    if (std::isfinite(incumbent)) {
        out.objective = incumbent;
        out.values = incumbent_x;
        snap_binaries(out.values, *work_model);
        if (proved_optimal) {
            out.status = Status::Optimal;
            out.best_bound = incumbent;
            out.gap = 0.0;
        } else {
            out.status = stopped_on_gap ? Status::GapLimit : Status::TimeLimit;
            out.gap = 100.0 * (incumbent - out.best_bound) / std::max(1e-12, std::fabs(incumbent));
        }
        std::string violation;
        out.feasibility_audit_ok = check_point(*work_model, out.values, 10 * kFeasTol, &violation);
    } else {
        out.status = hit_limit ? Status::TimeLimit : Status::Infeasible;
    }
    return out;
}

}  // namespace cddp::milp
