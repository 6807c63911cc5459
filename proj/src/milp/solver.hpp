#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "milp/model.hpp"

namespace cddp::milp {

enum class Status { Optimal, Infeasible, Unbounded, GapLimit, TimeLimit };

std::string status_name(Status s);

struct SolveLimits {
    double time_limit = 300.0;      // seconds per solve
    double gap_limit = 0.0;         // percent, 100*(zbar - zlow)/zbar
    long node_limit = 1'000'000;    // hitting it reports status=time_limit
    long iteration_limit = 50'000'000;
};

struct Solution {
    Status status = Status::Infeasible;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double best_bound = -std::numeric_limits<double>::infinity();
    double gap = 0.0;  // percent
    std::vector<double> values;  // structural variables, empty unless a point exists
    std::vector<double> duals;   // row multipliers of the final LP basis (LP solves)
    long nodes = 0;
    long iterations = 0;
    bool duality_audit_ok = true;      // weak-duality recheck on the final LP basis
    bool feasibility_audit_ok = true;  // independent row-by-row recheck
    std::vector<double> incumbent_history;  // successive incumbents (MILP)
    std::vector<double> bound_history;      // best bound at each processed node

    double value(const Model& model, const std::string& name) const {
        return values[static_cast<std::size_t>(model.column_checked(name))];
    }
};

// Continuous relaxation of the model (binaries relaxed to their bounds).
Solution solve_lp(const Model& model, const SolveLimits& limits = SolveLimits{});

// Best-first branch-and-bound on the binary variables. Deterministic:
// node selection by (bound, deeper first, lower node id), branching on the
// most fractional binary (ties by lowest column index).
Solution solve_milp(const Model& model, const SolveLimits& limits = SolveLimits{});

// Independent feasibility recheck used by the audits and solution import.
// Returns true when all rows, bounds and integrality hold within tol;
// otherwise fills `violation` with the offending row/column name.
bool check_point(const Model& model, const std::vector<double>& x, double tol, std::string* violation);

// Row-only variant (no bound/integrality checks), used for LP audits.
bool check_point_relaxed(const Model& model, const std::vector<double>& x, double tol, std::string* violation);

constexpr double kFeasTol = 1e-7;
constexpr double kIntTol = 1e-6;

}  // namespace cddp::milp
