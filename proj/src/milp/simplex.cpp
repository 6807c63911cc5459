#include "milp/simplex_internal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "common/errors.hpp"

namespace cddp::milp {

std::string status_name(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::GapLimit: return "gap_limit";
        case Status::TimeLimit: return "time_limit";
    }
    return "unknown";
}

namespace detail {

StandardForm build_standard_form(const Model& model) {
    StandardForm sf;
    const int n = static_cast<int>(model.num_vars());
    const int m = static_cast<int>(model.num_rows());
    sf.n_structural = n;
    sf.n_rows = m;
    const int total = n + 2 * m;

    // Column-wise A: structural columns gathered from the rows, then one
    // slack and one artificial unit column per row.
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < m; ++i) {
        for (const auto& [col, val] : model.row(static_cast<std::size_t>(i)).coeffs) {
            if (val != 0.0) ++counts[static_cast<std::size_t>(col)];
        }
    }
    sf.a.m = m;
    sf.a.n = total;
    sf.a.start.assign(static_cast<std::size_t>(total) + 1, 0);
    for (int j = 0; j < n; ++j) sf.a.start[j + 1] = sf.a.start[j] + counts[static_cast<std::size_t>(j)];
    for (int j = n; j < total; ++j) sf.a.start[j + 1] = sf.a.start[j] + 1;
    sf.a.row.assign(static_cast<std::size_t>(sf.a.start[total]), 0);
    sf.a.val.assign(static_cast<std::size_t>(sf.a.start[total]), 0.0);
    std::vector<int> fill(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < m; ++i) {
        for (const auto& [col, val] : model.row(static_cast<std::size_t>(i)).coeffs) {
            if (val == 0.0) continue;
            const int pos = sf.a.start[col] + fill[static_cast<std::size_t>(col)]++;
            sf.a.row[static_cast<std::size_t>(pos)] = i;
            sf.a.val[static_cast<std::size_t>(pos)] = val;
        }
    }
    for (int i = 0; i < m; ++i) {
        sf.a.row[static_cast<std::size_t>(sf.a.start[n + i])] = i;
        sf.a.val[static_cast<std::size_t>(sf.a.start[n + i])] = 1.0;
        sf.a.row[static_cast<std::size_t>(sf.a.start[n + m + i])] = i;
        sf.a.val[static_cast<std::size_t>(sf.a.start[n + m + i])] = 1.0;
    }

    sf.cost.assign(static_cast<std::size_t>(total), 0.0);
    sf.lb.assign(static_cast<std::size_t>(total), 0.0);
    sf.ub.assign(static_cast<std::size_t>(total), 0.0);
    for (int j = 0; j < n; ++j) {
        const auto& v = model.var(static_cast<std::size_t>(j));
        sf.cost[static_cast<std::size_t>(j)] = v.obj;
        sf.lb[static_cast<std::size_t>(j)] = v.lb;
        sf.ub[static_cast<std::size_t>(j)] = v.ub;
    }
    sf.rhs.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        const auto& r = model.row(static_cast<std::size_t>(i));
        sf.rhs[static_cast<std::size_t>(i)] = r.rhs;
        const int js = n + i;
        switch (r.sense) {
            case RowSense::LE:
                sf.lb[static_cast<std::size_t>(js)] = 0.0;
                sf.ub[static_cast<std::size_t>(js)] = kInf;
                break;
            case RowSense::GE:
                sf.lb[static_cast<std::size_t>(js)] = -kInf;
                sf.ub[static_cast<std::size_t>(js)] = 0.0;
                break;
            case RowSense::EQ:
                sf.lb[static_cast<std::size_t>(js)] = 0.0;
                sf.ub[static_cast<std::size_t>(js)] = 0.0;
                break;
        }
        // Artificial boxes are widened per solve from the initial residuals.
        sf.lb[static_cast<std::size_t>(n + m + i)] = 0.0;
        sf.ub[static_cast<std::size_t>(n + m + i)] = 0.0;
    }
    return sf;
}

// ---------------------------------------------------------------------------
// BasisFactor: Gilbert-Peierls LU with partial pivoting, plus PFI etas.

void BasisFactor::factor(const ColMatrix& a, const std::vector<int>& basic) {
    m_ = a.m;
    const int m = m_;
    prow_.assign(static_cast<std::size_t>(m), -1);
    pinv_.assign(static_cast<std::size_t>(m), -1);
    lcol_.assign(static_cast<std::size_t>(m), {});
    ucol_.assign(static_cast<std::size_t>(m), {});
    udiag_.assign(static_cast<std::size_t>(m), 0.0);
    etas_.clear();
    work_.assign(static_cast<std::size_t>(m), 0.0);
    work2_.assign(static_cast<std::size_t>(m), 0.0);

    // Factor sparser columns first; keeps fill-in low on block models.
    pos_to_slot_.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) pos_to_slot_[static_cast<std::size_t>(i)] = i;
    std::sort(pos_to_slot_.begin(), pos_to_slot_.end(), [&](int s1, int s2) {
        const int c1 = basic[static_cast<std::size_t>(s1)];
        const int c2 = basic[static_cast<std::size_t>(s2)];
        const int n1 = a.start[c1 + 1] - a.start[c1];
        const int n2 = a.start[c2 + 1] - a.start[c2];
        if (n1 != n2) return n1 < n2;
        return s1 < s2;
    });
    slot_to_pos_.assign(static_cast<std::size_t>(m), -1);
    for (int p = 0; p < m; ++p) slot_to_pos_[static_cast<std::size_t>(pos_to_slot_[static_cast<std::size_t>(p)])] = p;

    std::vector<double>& x = work_;
    std::vector<int> touched;
    std::vector<int> stack, stack_entry, topo;
    std::vector<char> mark(static_cast<std::size_t>(m), 0);
    touched.reserve(64);

    for (int p = 0; p < m; ++p) {
        const int col = basic[static_cast<std::size_t>(pos_to_slot_[static_cast<std::size_t>(p)])];
        touched.clear();
        topo.clear();

        // Symbolic step: depth-first reach over already-pivoted positions;
        // reverse postorder gives the substitution order.
        for (int t = a.start[col]; t < a.start[col + 1]; ++t) {
            const int q0 = pinv_[static_cast<std::size_t>(a.row[static_cast<std::size_t>(t)])];
            if (q0 < 0 || mark[static_cast<std::size_t>(q0)]) continue;
            mark[static_cast<std::size_t>(q0)] = 1;
            stack.assign(1, q0);
            stack_entry.assign(1, 0);
            while (!stack.empty()) {
                const int q = stack.back();
                int& e = stack_entry.back();
                const auto& lc = lcol_[static_cast<std::size_t>(q)];
                bool descended = false;
                while (e < static_cast<int>(lc.size())) {
                    const int qq = pinv_[static_cast<std::size_t>(lc[static_cast<std::size_t>(e)].idx)];
                    ++e;
                    if (qq >= 0 && !mark[static_cast<std::size_t>(qq)]) {
                        mark[static_cast<std::size_t>(qq)] = 1;
                        stack.push_back(qq);
                        stack_entry.push_back(0);
                        descended = true;
                        break;
                    }
                }
                if (!descended) {
                    topo.push_back(q);
                    stack.pop_back();
                    stack_entry.pop_back();
                }
            }
        }
        std::reverse(topo.begin(), topo.end());

        // Numeric step: scatter the column, apply reachable L columns.
        for (int t = a.start[col]; t < a.start[col + 1]; ++t) {
            const int r = a.row[static_cast<std::size_t>(t)];
            if (x[static_cast<std::size_t>(r)] == 0.0) touched.push_back(r);
            x[static_cast<std::size_t>(r)] += a.val[static_cast<std::size_t>(t)];
        }
        for (int q : topo) {
            mark[static_cast<std::size_t>(q)] = 0;
            const double piv = x[static_cast<std::size_t>(prow_[static_cast<std::size_t>(q)])];
            if (piv == 0.0) continue;
            for (const auto& en : lcol_[static_cast<std::size_t>(q)]) {
                if (x[static_cast<std::size_t>(en.idx)] == 0.0) touched.push_back(en.idx);
                x[static_cast<std::size_t>(en.idx)] -= en.val * piv;
            }
        }

        // Pivot: largest magnitude among unpivoted rows, ties to lowest row.
        int prow = -1;
        double pmax = -1.0;
        for (int r : touched) {
            if (pinv_[static_cast<std::size_t>(r)] >= 0) continue;
            const double av = std::fabs(x[static_cast<std::size_t>(r)]);
            if (av > pmax || (av == pmax && r < prow)) {
                pmax = av;
                prow = r;
            }
        }
        if (prow < 0 || pmax < 1e-11) throw std::runtime_error("basis factorization: singular basis");

        const double pivot = x[static_cast<std::size_t>(prow)];
        auto& uc = ucol_[static_cast<std::size_t>(p)];
        auto& lc = lcol_[static_cast<std::size_t>(p)];
        for (int r : touched) {
            const double v = x[static_cast<std::size_t>(r)];
            x[static_cast<std::size_t>(r)] = 0.0;
            if (v == 0.0 || r == prow) continue;
            const int q = pinv_[static_cast<std::size_t>(r)];
            if (q >= 0)
                uc.push_back(Entry{q, v});
            else
                lc.push_back(Entry{r, v / pivot});
        }
        udiag_[static_cast<std::size_t>(p)] = pivot;
        prow_[static_cast<std::size_t>(p)] = prow;
        pinv_[static_cast<std::size_t>(prow)] = p;
    }
}

void BasisFactor::ftran(std::vector<double>& x) const {
    const int m = m_;
    if (m == 0) return;
    std::vector<double>& z = work2_;
    std::vector<double>& buf = work_;
    for (int r = 0; r < m; ++r) buf[static_cast<std::size_t>(r)] = x[static_cast<std::size_t>(r)];
    // L z = P x
    for (int p = 0; p < m; ++p) {
        const double piv = buf[static_cast<std::size_t>(prow_[static_cast<std::size_t>(p)])];
        z[static_cast<std::size_t>(p)] = piv;
        if (piv == 0.0) continue;
        for (const auto& en : lcol_[static_cast<std::size_t>(p)]) buf[static_cast<std::size_t>(en.idx)] -= en.val * piv;
    }
    // U xsol = z (column-oriented backward substitution)
    for (int p = m - 1; p >= 0; --p) {
        const double v = z[static_cast<std::size_t>(p)] / udiag_[static_cast<std::size_t>(p)];
        z[static_cast<std::size_t>(p)] = v;
        if (v == 0.0) continue;
        for (const auto& en : ucol_[static_cast<std::size_t>(p)]) z[static_cast<std::size_t>(en.idx)] -= en.val * v;
    }
    for (int p = 0; p < m; ++p) x[static_cast<std::size_t>(pos_to_slot_[static_cast<std::size_t>(p)])] = z[static_cast<std::size_t>(p)];
    // Product-form etas, oldest first.
    for (const auto& eta : etas_) {
        const double xr = x[static_cast<std::size_t>(eta.slot)] / eta.pivot;
        if (xr != 0.0) {
            for (const auto& en : eta.col) x[static_cast<std::size_t>(en.idx)] -= en.val * xr;
        }
        x[static_cast<std::size_t>(eta.slot)] = xr;
    }
}

void BasisFactor::btran(std::vector<double>& y) const {
    const int m = m_;
    if (m == 0) return;
    // Etas in reverse order (y arrives indexed by slot).
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double acc = y[static_cast<std::size_t>(it->slot)];
        for (const auto& en : it->col) acc -= en.val * y[static_cast<std::size_t>(en.idx)];
        y[static_cast<std::size_t>(it->slot)] = acc / it->pivot;
    }
    std::vector<double>& c = work2_;
    for (int p = 0; p < m; ++p) c[static_cast<std::size_t>(p)] = y[static_cast<std::size_t>(pos_to_slot_[static_cast<std::size_t>(p)])];
    // U^T w = c (forward)
    for (int p = 0; p < m; ++p) {
        double sum = c[static_cast<std::size_t>(p)];
        for (const auto& en : ucol_[static_cast<std::size_t>(p)]) sum -= en.val * c[static_cast<std::size_t>(en.idx)];
        c[static_cast<std::size_t>(p)] = sum / udiag_[static_cast<std::size_t>(p)];
    }
    // L^T v = w (backward)
    for (int p = m - 1; p >= 0; --p) {
        double sum = c[static_cast<std::size_t>(p)];
        for (const auto& en : lcol_[static_cast<std::size_t>(p)])
            sum -= en.val * c[static_cast<std::size_t>(pinv_[static_cast<std::size_t>(en.idx)])];
        c[static_cast<std::size_t>(p)] = sum;
    }
    std::vector<double>& buf = work_;
    for (int p = 0; p < m; ++p) buf[static_cast<std::size_t>(prow_[static_cast<std::size_t>(p)])] = c[static_cast<std::size_t>(p)];
    for (int r = 0; r < m; ++r) y[static_cast<std::size_t>(r)] = buf[static_cast<std::size_t>(r)];
}

bool BasisFactor::update(int slot, const std::vector<double>& w) {
    const double pivot = w[static_cast<std::size_t>(slot)];
    if (std::fabs(pivot) < 1e-9) return false;
    Eta eta;
    eta.slot = slot;
    eta.pivot = pivot;
    for (int i = 0; i < m_; ++i) {
        if (i == slot) continue;
        const double v = w[static_cast<std::size_t>(i)];
        if (v != 0.0) eta.col.push_back(Entry{i, v});
    }
    etas_.push_back(std::move(eta));
    return true;
}

// ---------------------------------------------------------------------------
// SimplexSolver

namespace {
constexpr double kPivTol = 1e-9;
constexpr double kRatioTieTol = 1e-9;
constexpr double kDegenStep = 1e-10;
constexpr int kRefactorInterval = 100;  // pivots between refactorizations
constexpr int kDegenTrip = 1000;        // degenerate steps before Bland kicks in
}  // namespace

void SimplexSolver::compute_basic_values() {
    const int m = sf_.n_rows;
    std::vector<double> rhs(sf_.rhs);
    const int total = sf_.a.n;
    for (int j = 0; j < total; ++j) {
        if (where_[static_cast<std::size_t>(j)] >= 0) continue;
        const double xj = xval_[static_cast<std::size_t>(j)];
        if (xj == 0.0) continue;
        for (int t = sf_.a.start[j]; t < sf_.a.start[j + 1]; ++t)
            rhs[static_cast<std::size_t>(sf_.a.row[static_cast<std::size_t>(t)])] -= sf_.a.val[static_cast<std::size_t>(t)] * xj;
    }
    factor_.ftran(rhs);
    for (int i = 0; i < m; ++i) xval_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])] = rhs[static_cast<std::size_t>(i)];
}

LpOutcome SimplexSolver::iterate(const std::vector<double>& cost, std::chrono::steady_clock::time_point deadline,
                                 long iteration_limit) {
    const int m = sf_.n_rows;
    const int total = sf_.a.n;
    std::vector<double> y(static_cast<std::size_t>(m));
    std::vector<double> w(static_cast<std::size_t>(m));
    int pivots_since_factor = 0;
    int degen_count = 0;
    bool bland = false;
    const double dual_tol = reduced_cost_threshold();

    for (;;) {
        if (total_iterations_ >= iteration_limit) return LpOutcome::IterationLimit;
        if ((total_iterations_ & 63) == 0 && std::chrono::steady_clock::now() > deadline) return LpOutcome::TimeLimit;
        ++total_iterations_;

        if (pivots_since_factor >= kRefactorInterval) {
            factor_.factor(sf_.a, basic_);
            compute_basic_values();
            pivots_since_factor = 0;
        }

        for (int i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = cost[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])];
        factor_.btran(y);

        // Pricing: Dantzig by default, Bland when the degeneracy counter trips.
        int enter = -1;
        int direction = 0;
        double best = dual_tol;
        for (int j = 0; j < total; ++j) {
            const int wj = where_[static_cast<std::size_t>(j)];
            if (wj >= 0) continue;
            if (lb_[static_cast<std::size_t>(j)] == ub_[static_cast<std::size_t>(j)]) continue;
            double d = cost[static_cast<std::size_t>(j)];
            for (int t = sf_.a.start[j]; t < sf_.a.start[j + 1]; ++t)
                d -= y[static_cast<std::size_t>(sf_.a.row[static_cast<std::size_t>(t)])] * sf_.a.val[static_cast<std::size_t>(t)];
            int dir = 0;
            if ((wj == -1 || wj == -3) && d < -dual_tol)
                dir = 1;
            else if ((wj == -2 || wj == -3) && d > dual_tol)
                dir = -1;
            if (dir == 0) continue;
            if (bland) {
                enter = j;
                direction = dir;
                break;
            }
            if (std::fabs(d) > best) {
                best = std::fabs(d);
                enter = j;
                direction = dir;
            }
        }
        if (enter < 0) return LpOutcome::Optimal;

        std::fill(w.begin(), w.end(), 0.0);
        for (int t = sf_.a.start[enter]; t < sf_.a.start[enter + 1]; ++t)
            w[static_cast<std::size_t>(sf_.a.row[static_cast<std::size_t>(t)])] = sf_.a.val[static_cast<std::size_t>(t)];
        factor_.ftran(w);

        // Ratio test, two passes: exact minimum ratio first, then the
        // stability/determinism pick among near-ties.
        const double s = static_cast<double>(direction);
        double t_min = kInf;
        for (int i = 0; i < m; ++i) {
            const double wi = w[static_cast<std::size_t>(i)];
            if (std::fabs(wi) <= kPivTol) continue;
            const int bcol = basic_[static_cast<std::size_t>(i)];
            const double xb = xval_[static_cast<std::size_t>(bcol)];
            const double delta = -s * wi;
            double t = kInf;
            if (delta > 0.0) {
                if (std::isfinite(ub_[static_cast<std::size_t>(bcol)])) t = (ub_[static_cast<std::size_t>(bcol)] - xb) / delta;
            } else {
                if (std::isfinite(lb_[static_cast<std::size_t>(bcol)])) t = (lb_[static_cast<std::size_t>(bcol)] - xb) / delta;
            }
            if (t < 0.0) t = 0.0;
            if (t < t_min) t_min = t;
        }
        const double range = ub_[static_cast<std::size_t>(enter)] - lb_[static_cast<std::size_t>(enter)];
        if (!std::isfinite(t_min) && !std::isfinite(range)) return LpOutcome::Unbounded;

        int leave = -1;  // slot, -1 = bound flip on the entering column
        int leave_to_upper = 0;
        double t_step = range;
        if (std::isfinite(t_min) && t_min <= range) {
            double best_w = 0.0;
            for (int i = 0; i < m; ++i) {
                const double wi = w[static_cast<std::size_t>(i)];
                if (std::fabs(wi) <= kPivTol) continue;
                const int bcol = basic_[static_cast<std::size_t>(i)];
                const double xb = xval_[static_cast<std::size_t>(bcol)];
                const double delta = -s * wi;
                double t = kInf;
                int to_upper = 0;
                if (delta > 0.0) {
                    if (std::isfinite(ub_[static_cast<std::size_t>(bcol)])) {
                        t = (ub_[static_cast<std::size_t>(bcol)] - xb) / delta;
                        to_upper = 1;
                    }
                } else {
                    if (std::isfinite(lb_[static_cast<std::size_t>(bcol)])) t = (lb_[static_cast<std::size_t>(bcol)] - xb) / delta;
                }
                if (!std::isfinite(t)) continue;
                if (t < 0.0) t = 0.0;
                if (t <= t_min + kRatioTieTol && std::fabs(wi) > best_w) {
                    best_w = std::fabs(wi);
                    leave = i;
                    leave_to_upper = to_upper;
                    t_step = t;
                }
            }
        }

        if (t_step <= kDegenStep) {
            if (++degen_count >= kDegenTrip) bland = true;
        } else {
            degen_count = 0;
            bland = false;
        }

        if (t_step > 0.0) {
            for (int i = 0; i < m; ++i) {
                const double wi = w[static_cast<std::size_t>(i)];
                if (wi == 0.0) continue;
                xval_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])] -= s * t_step * wi;
            }
        }
        if (leave < 0) {
            xval_[static_cast<std::size_t>(enter)] =
                direction > 0 ? ub_[static_cast<std::size_t>(enter)] : lb_[static_cast<std::size_t>(enter)];
            where_[static_cast<std::size_t>(enter)] = direction > 0 ? -2 : -1;
            continue;
        }
        const int out_col = basic_[static_cast<std::size_t>(leave)];
        xval_[static_cast<std::size_t>(out_col)] =
            leave_to_upper ? ub_[static_cast<std::size_t>(out_col)] : lb_[static_cast<std::size_t>(out_col)];
        where_[static_cast<std::size_t>(out_col)] = leave_to_upper ? -2 : -1;
        xval_[static_cast<std::size_t>(enter)] += s * t_step;
        basic_[static_cast<std::size_t>(leave)] = enter;
        where_[static_cast<std::size_t>(enter)] = leave;
        ++pivots_since_factor;
        if (!factor_.update(leave, w)) {
            factor_.factor(sf_.a, basic_);
            compute_basic_values();
            pivots_since_factor = 0;
        }
    }
}

LpResult SimplexSolver::solve(std::chrono::steady_clock::time_point deadline, long iteration_limit) {
    const int n = sf_.n_structural;
    const int m = sf_.n_rows;
    const int total = sf_.a.n;
    lb_ = sf_.lb;
    ub_ = sf_.ub;
    xval_.assign(static_cast<std::size_t>(total), 0.0);
    where_.assign(static_cast<std::size_t>(total), -1);
    basic_.assign(static_cast<std::size_t>(m), 0);

    // Structurals and slacks start nonbasic at their nearest finite bound.
    for (int j = 0; j < n + m; ++j) {
        if (std::isfinite(lb_[static_cast<std::size_t>(j)])) {
            where_[static_cast<std::size_t>(j)] = -1;
            xval_[static_cast<std::size_t>(j)] = lb_[static_cast<std::size_t>(j)];
        } else if (std::isfinite(ub_[static_cast<std::size_t>(j)])) {
            where_[static_cast<std::size_t>(j)] = -2;
            xval_[static_cast<std::size_t>(j)] = ub_[static_cast<std::size_t>(j)];
        } else {
            where_[static_cast<std::size_t>(j)] = -3;
            xval_[static_cast<std::size_t>(j)] = 0.0;
        }
    }

    // Initial residuals decide which rows can start on their slack and which
    // need an artificial carrying the infeasibility.
    std::vector<double> resid(sf_.rhs);
    for (int j = 0; j < n; ++j) {
        const double xj = xval_[static_cast<std::size_t>(j)];
        if (xj == 0.0) continue;
        for (int t = sf_.a.start[j]; t < sf_.a.start[j + 1]; ++t)
            resid[static_cast<std::size_t>(sf_.a.row[static_cast<std::size_t>(t)])] -= sf_.a.val[static_cast<std::size_t>(t)] * xj;
    }
    std::vector<double> phase1(static_cast<std::size_t>(total), 0.0);
    bool any_artificial = false;
    for (int i = 0; i < m; ++i) {
        const int js = n + i;
        const int ja = n + m + i;
        const double r = resid[static_cast<std::size_t>(i)];
        where_[static_cast<std::size_t>(ja)] = -1;
        xval_[static_cast<std::size_t>(ja)] = 0.0;
        if (r >= lb_[static_cast<std::size_t>(js)] && r <= ub_[static_cast<std::size_t>(js)]) {
            basic_[static_cast<std::size_t>(i)] = js;
            where_[static_cast<std::size_t>(js)] = i;
            xval_[static_cast<std::size_t>(js)] = r;
        } else {
            // Slack pinned at its nearest bound; the artificial takes the rest.
            const double sv = r < lb_[static_cast<std::size_t>(js)] ? lb_[static_cast<std::size_t>(js)] : ub_[static_cast<std::size_t>(js)];
            xval_[static_cast<std::size_t>(js)] = sv;
            where_[static_cast<std::size_t>(js)] = sv == lb_[static_cast<std::size_t>(js)] ? -1 : -2;
            const double av = r - sv;
            basic_[static_cast<std::size_t>(i)] = ja;
            where_[static_cast<std::size_t>(ja)] = i;
            xval_[static_cast<std::size_t>(ja)] = av;
            lb_[static_cast<std::size_t>(ja)] = std::min(0.0, av);
            ub_[static_cast<std::size_t>(ja)] = std::max(0.0, av);
            phase1[static_cast<std::size_t>(ja)] = av > 0.0 ? 1.0 : -1.0;
            any_artificial = true;
        }
    }

    factor_.factor(sf_.a, basic_);

    LpResult res;
    if (any_artificial) {
        const LpOutcome o1 = iterate(phase1, deadline, iteration_limit);
        if (o1 == LpOutcome::IterationLimit || o1 == LpOutcome::TimeLimit) {
            res.outcome = o1;
            res.iterations = total_iterations_;
            return res;
        }
        double infeas = 0.0;
        double scale = 1.0;
        for (int i = 0; i < m; ++i) {
            infeas += std::fabs(xval_[static_cast<std::size_t>(n + m + i)]);
            scale = std::max(scale, std::fabs(sf_.rhs[static_cast<std::size_t>(i)]));
        }
        if (infeas > kFeasTol * scale) {
            res.outcome = LpOutcome::Infeasible;
            res.iterations = total_iterations_;
            return res;
        }
        for (int i = 0; i < m; ++i) {
            const int ja = n + m + i;
            lb_[static_cast<std::size_t>(ja)] = 0.0;
            ub_[static_cast<std::size_t>(ja)] = 0.0;
            if (where_[static_cast<std::size_t>(ja)] < 0) {
                where_[static_cast<std::size_t>(ja)] = -1;
                xval_[static_cast<std::size_t>(ja)] = 0.0;
            }
        }
        compute_basic_values();
    }

    const LpOutcome o2 = iterate(sf_.cost, deadline, iteration_limit);
    res.iterations = total_iterations_;
    if (o2 != LpOutcome::Optimal) {
        res.outcome = o2;
        return res;
    }

    res.outcome = LpOutcome::Optimal;
    res.x.assign(xval_.begin(), xval_.begin() + total);
    double obj = 0.0;
    for (int j = 0; j < total; ++j) obj += sf_.cost[static_cast<std::size_t>(j)] * xval_[static_cast<std::size_t>(j)];
    res.objective = obj;

    // Weak-duality audit on the final basis: y'b plus the reduced-cost value
    // of every nonbasic bound must reproduce the primal objective.
    std::vector<double> y(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = sf_.cost[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])];
    factor_.btran(y);
    res.duals = y;
    double dual_obj = 0.0;
    for (int i = 0; i < m; ++i) dual_obj += y[static_cast<std::size_t>(i)] * sf_.rhs[static_cast<std::size_t>(i)];
    for (int j = 0; j < total; ++j) {
        if (where_[static_cast<std::size_t>(j)] >= 0) continue;
        const double xj = xval_[static_cast<std::size_t>(j)];
        if (xj == 0.0) continue;
        double d = sf_.cost[static_cast<std::size_t>(j)];
        for (int t = sf_.a.start[j]; t < sf_.a.start[j + 1]; ++t)
            d -= y[static_cast<std::size_t>(sf_.a.row[static_cast<std::size_t>(t)])] * sf_.a.val[static_cast<std::size_t>(t)];
        dual_obj += d * xj;
    }
    res.duality_ok = std::fabs(dual_obj - obj) <= 1e-6 * std::max(1.0, std::fabs(obj));
    return res;
}

LpResult solve_standard(const StandardForm& sf, std::chrono::steady_clock::time_point deadline, long iteration_limit) {
    SimplexSolver solver(sf);
    return solver.solve(deadline, iteration_limit);
}

std::chrono::steady_clock::time_point deadline_from(double seconds) {
    if (seconds < 0) return std::chrono::steady_clock::time_point::max();
    return std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
}

}  // namespace detail

Solution solve_lp(const Model& model, const SolveLimits& limits) {
    model.validate();
    auto sf = detail::build_standard_form(model);
    auto lr = detail::solve_standard(sf, detail::deadline_from(limits.time_limit), limits.iteration_limit);
    Solution sol;
    sol.iterations = lr.iterations;
    switch (lr.outcome) {
        case detail::LpOutcome::Optimal: sol.status = Status::Optimal; break;
        case detail::LpOutcome::Infeasible: sol.status = Status::Infeasible; break;
        case detail::LpOutcome::Unbounded: sol.status = Status::Unbounded; break;
        case detail::LpOutcome::IterationLimit:
        case detail::LpOutcome::TimeLimit: sol.status = Status::TimeLimit; break;
    }
    if (sol.status != Status::Optimal) return sol;
    sol.objective = lr.objective;
    sol.best_bound = lr.objective;
    sol.values.assign(lr.x.begin(), lr.x.begin() + model.num_vars());
    sol.duals = lr.duals;
    sol.duality_audit_ok = lr.duality_ok;
    std::string violation;
    sol.feasibility_audit_ok = check_point_relaxed(model, sol.values, 10 * kFeasTol, &violation);
    return sol;
}

bool check_point_relaxed(const Model& model, const std::vector<double>& x, double tol, std::string* violation) {
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        const auto& r = model.row(i);
        double lhs = 0.0;
        double scale = std::fabs(r.rhs);
        for (const auto& [col, val] : r.coeffs) {
            lhs += val * x[static_cast<std::size_t>(col)];
            scale = std::max(scale, std::fabs(val * x[static_cast<std::size_t>(col)]));
        }
        const double slack_tol = tol * std::max(1.0, scale);
        bool ok = true;
        switch (r.sense) {
            case RowSense::LE: ok = lhs <= r.rhs + slack_tol; break;
            case RowSense::GE: ok = lhs >= r.rhs - slack_tol; break;
            case RowSense::EQ: ok = std::fabs(lhs - r.rhs) <= slack_tol; break;
        }
        if (!ok) {
            if (violation) *violation = "row " + r.name;
            return false;
        }
    }
    return true;
}

bool check_point(const Model& model, const std::vector<double>& x, double tol, std::string* violation) {
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        const auto& v = model.var(j);
        if (x[j] < v.lb - tol || x[j] > v.ub + tol) {
            if (violation) *violation = "bound " + v.name;
            return false;
        }
        if (v.kind == VarKind::Binary && std::fabs(x[j] - std::round(x[j])) > kIntTol) {
            if (violation) *violation = "integrality " + v.name;
            return false;
        }
    }
    return check_point_relaxed(model, x, tol, violation);
}

}  // namespace cddp::milp
