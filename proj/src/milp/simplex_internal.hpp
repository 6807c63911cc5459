#pragma once

// Internals shared between the LP path and branch-and-bound: computational
// form (structurals + slacks + artificials), sparse LU basis with product-form
// updates, and the bounded-variable primal simplex.

#include <chrono>
#include <cstdint>
#include <vector>

#include "milp/model.hpp"
#include "milp/solver.hpp"

namespace cddp::milp::detail {

struct ColMatrix {
    int m = 0;
    int n = 0;
    std::vector<int> start;  // n+1
    std::vector<int> row;
    std::vector<double> val;
};

// min c'x  s.t.  A x = b,  lb <= x <= ub.
// Columns: [0,n) structural, [n, n+m) slacks, [n+m, n+2m) artificials.
struct StandardForm {
    ColMatrix a;
    std::vector<double> cost;
    std::vector<double> lb, ub;
    std::vector<double> rhs;
    int n_structural = 0;
    int n_rows = 0;
};

StandardForm build_standard_form(const Model& model);

// Sparse LU of the basis (Gilbert-Peierls, partial pivoting) plus PFI etas.
class BasisFactor {
public:
    void factor(const ColMatrix& a, const std::vector<int>& basic);
    // x := B^{-1} rhs, rhs indexed by row, x indexed by basic slot.
    void ftran(std::vector<double>& x) const;
    // y := B^{-T} c, c indexed by basic slot, y indexed by row.
    void btran(std::vector<double>& y) const;
    // Product-form update: basis slot `slot` is replaced by a column whose
    // ftran image is `w` (dense by slot). Returns false when the pivot is too
    // small and the caller should refactor instead.
    bool update(int slot, const std::vector<double>& w);
    int eta_count() const { return static_cast<int>(etas_.size()); }

private:
    struct Entry {
        int idx;
        double val;
    };
    struct Eta {
        int slot;
        double pivot;
        std::vector<Entry> col;  // entries by slot, pivot slot excluded
    };

    int m_ = 0;
    std::vector<int> prow_;                    // position -> pivot row
    std::vector<int> pinv_;                    // row -> position
    std::vector<int> pos_to_slot_;             // position -> basis slot
    std::vector<int> slot_to_pos_;             // basis slot -> position
    std::vector<std::vector<Entry>> lcol_;     // L by position, entries by row
    std::vector<std::vector<Entry>> ucol_;     // U by position, entries by position
    std::vector<double> udiag_;
    std::vector<Eta> etas_;
    mutable std::vector<double> work_;
    mutable std::vector<double> work2_;
};

enum class LpOutcome { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit };

struct LpResult {
    LpOutcome outcome = LpOutcome::Infeasible;
    double objective = 0.0;
    std::vector<double> x;      // full standard-form vector
    std::vector<double> duals;  // y by row (final basis)
    long iterations = 0;
    bool duality_ok = true;
};

class SimplexSolver {
public:
    explicit SimplexSolver(const StandardForm& sf) : sf_(sf) {}

    // Two-phase bounded-variable primal simplex. `deadline` uses the steady
    // clock; pass time_point::max() for no limit.
    LpResult solve(std::chrono::steady_clock::time_point deadline, long iteration_limit);

private:
    // One phase of the primal simplex over the given costs. Returns outcome
    // for that phase (Optimal = priced out).
    LpOutcome iterate(const std::vector<double>& cost, std::chrono::steady_clock::time_point deadline,
                      long iteration_limit);
    void compute_basic_values();
    double reduced_cost_threshold() const { return 1e-9; }

    const StandardForm& sf_;
    std::vector<int> basic_;         // slot -> column
    std::vector<int> where_;         // column -> basic slot, or -1/-2 (at lb/ub), -3 free at 0
    std::vector<double> xval_;       // value of every column
    std::vector<double> lb_, ub_;    // working bounds (artificial boxes are per solve)
    BasisFactor factor_;
    long total_iterations_ = 0;
    friend LpResult solve_standard(const StandardForm&, std::chrono::steady_clock::time_point, long);
};

LpResult solve_standard(const StandardForm& sf, std::chrono::steady_clock::time_point deadline,
                        long iteration_limit);

// seconds < 0 means no limit; 0 expires immediately.
std::chrono::steady_clock::time_point deadline_from(double seconds);

}  // namespace cddp::milp::detail
