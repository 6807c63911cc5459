#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "common/errors.hpp"
#include "milp/lp_format.hpp"
#include "milp/model.hpp"
#include "milp/solver.hpp"

using namespace cddp::milp;

namespace {

// Brute-force LP oracle: enumerates all choices of n active constraints
// (rows at equality or bounds), solves the 3x3 (or smaller) system and keeps
// the best feasible point. Only for tiny dense test problems.
struct TinyLp {
    int n = 0;
    std::vector<std::vector<double>> a;  // rows
    std::vector<double> b;
    std::vector<RowSense> sense;
    std::vector<double> lb, ub, c;
};

bool solve_linear(std::vector<std::vector<double>> m, std::vector<double>& rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        double best = 1e-10;
        for (int i = k; i < n; ++i) {
            if (std::fabs(m[i][k]) > best) {
                best = std::fabs(m[i][k]);
                piv = i;
            }
        }
        if (piv < 0) return false;
        std::swap(m[piv], m[k]);
        std::swap(rhs[piv], rhs[k]);
        for (int i = k + 1; i < n; ++i) {
            const double f = m[i][k] / m[k][k];
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) m[i][j] -= f * m[k][j];
            rhs[i] -= f * rhs[k];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        double acc = rhs[k];
        for (int j = k + 1; j < n; ++j) acc -= m[k][j] * rhs[j];
        rhs[k] = acc / m[k][k];
    }
    return true;
}

double vertex_enumeration_optimum(const TinyLp& lp) {
    // Active-set candidates: each row as equality, each bound.
    struct Cand {
        std::vector<double> row;
        double rhs;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < lp.a.size(); ++i) cands.push_back({lp.a[i], lp.b[i]});
    for (int j = 0; j < lp.n; ++j) {
        std::vector<double> e(lp.n, 0.0);
        e[j] = 1.0;
        if (std::isfinite(lp.lb[j])) cands.push_back({e, lp.lb[j]});
        if (std::isfinite(lp.ub[j])) cands.push_back({e, lp.ub[j]});
    }
    const int nc = static_cast<int>(cands.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(lp.n);
    const auto feasible = [&](const std::vector<double>& x) {
        for (int j = 0; j < lp.n; ++j) {
            if (x[j] < lp.lb[j] - 1e-7 || x[j] > lp.ub[j] + 1e-7) return false;
        }
        for (std::size_t i = 0; i < lp.a.size(); ++i) {
            double lhs = 0;
            for (int j = 0; j < lp.n; ++j) lhs += lp.a[i][j] * x[j];
            if (lp.sense[i] == RowSense::LE && lhs > lp.b[i] + 1e-7) return false;
            if (lp.sense[i] == RowSense::GE && lhs < lp.b[i] - 1e-7) return false;
            if (lp.sense[i] == RowSense::EQ && std::fabs(lhs - lp.b[i]) > 1e-7) return false;
        }
        return true;
    };
    // All combinations of n candidates.
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == lp.n) {
            std::vector<std::vector<double>> m(lp.n);
            std::vector<double> rhs(lp.n);
            for (int k = 0; k < lp.n; ++k) {
                m[k] = cands[pick[k]].row;
                rhs[k] = cands[pick[k]].rhs;
            }
            if (!solve_linear(std::move(m), rhs)) return;
            if (!feasible(rhs)) return;
            double obj = 0;
            for (int j = 0; j < lp.n; ++j) obj += lp.c[j] * rhs[j];
            best = std::min(best, obj);
            return;
        }
        for (int i = start; i < nc; ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

Model model_from(const TinyLp& lp) {
    Model m;
    for (int j = 0; j < lp.n; ++j) m.add_continuous("x" + std::to_string(j), lp.lb[j], lp.ub[j], lp.c[j]);
    for (std::size_t i = 0; i < lp.a.size(); ++i) {
        std::vector<std::pair<int, double>> coeffs;
        for (int j = 0; j < lp.n; ++j) {
            if (lp.a[i][j] != 0.0) coeffs.emplace_back(j, lp.a[i][j]);
        }
        m.add_row("r" + std::to_string(i), coeffs, lp.sense[i], lp.b[i]);
    }
    return m;
}

}  // namespace

TEST_CASE("lp: single variable with ge row") {
    Model m;
    m.add_continuous("x", 0.0, 10.0, 1.0);
    m.add_row("c", {{0, 1.0}}, RowSense::GE, 1.0);
    auto s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.duality_audit_ok);
    CHECK(s.feasibility_audit_ok);
}

TEST_CASE("lp: simple vertex optimum") {
    Model m;
    m.add_continuous("x", 0.0, kInf, -1.0);
    m.add_continuous("y", 0.0, kInf, -1.0);
    m.add_row("c", {{0, 1.0}, {1, 1.0}}, RowSense::LE, 1.0);
    auto s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("lp: unbounded and infeasible detected") {
    Model u;
    u.add_continuous("x", 0.0, kInf, -1.0);
    u.add_row("c", {{0, 1.0}}, RowSense::GE, 0.0);
    CHECK(solve_lp(u).status == Status::Unbounded);

    Model f;
    f.add_continuous("x", 0.0, 1.0, 1.0);
    f.add_row("c", {{0, 1.0}}, RowSense::GE, 2.0);
    CHECK(solve_lp(f).status == Status::Infeasible);
}

TEST_CASE("lp: equality rows and free variables") {
    Model m;
    m.add_continuous("x", -kInf, kInf, 1.0);
    m.add_continuous("y", 0.0, 5.0, 2.0);
    m.add_row("c1", {{0, 1.0}, {1, 1.0}}, RowSense::EQ, 3.0);
    m.add_row("c2", {{1, 1.0}}, RowSense::GE, 1.0);
    auto s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    // x = 3 - y, obj = 3 - y + 2y = 3 + y, min at y = 1 -> 4.
    CHECK(s.objective == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(s.value(m, "y") == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("lp: random dense 3-var problems match vertex enumeration") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> coef(-4.0, 4.0);
    std::uniform_real_distribution<double> pos(0.5, 4.0);
    for (int trial = 0; trial < 60; ++trial) {
        TinyLp lp;
        lp.n = 3;
        lp.lb.assign(3, 0.0);
        lp.ub = {pos(gen) + 2, pos(gen) + 2, pos(gen) + 2};
        lp.c = {coef(gen), coef(gen), coef(gen)};
        const int rows = 2 + static_cast<int>(gen() % 3);
        for (int i = 0; i < rows; ++i) {
            std::vector<double> row = {coef(gen), coef(gen), coef(gen)};
            lp.a.push_back(row);
            lp.sense.push_back(RowSense::LE);
            lp.b.push_back(pos(gen));  // keeps x = 0 feasible
        }
        Model m = model_from(lp);
        auto s = solve_lp(m);
        REQUIRE(s.status == Status::Optimal);
        const double oracle = vertex_enumeration_optimum(lp);
        CHECK(s.objective == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(s.duality_audit_ok);
    }
}

TEST_CASE("milp: single feasible all-binary point") {
    Model m;
    m.add_binary("a", 5.0);
    m.add_binary("b", 1.0);
    m.add_row("pick_a", {{0, 1.0}}, RowSense::EQ, 1.0);
    m.add_row("drop_b", {{1, 1.0}}, RowSense::EQ, 0.0);
    auto s = solve_milp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(5.0));
    CHECK(s.value(m, "a") == 1.0);
    CHECK(s.value(m, "b") == 0.0);
}

TEST_CASE("milp: knapsack matches exhaustive enumeration") {
    const std::array<double, 6> value = {9, 11, 13, 10, 8, 14};
    const std::array<double, 6> weight = {3, 4, 5, 4, 2, 6};
    const double cap = 11;

    double best = 0;
    for (int mask = 0; mask < 64; ++mask) {
        double w = 0, v = 0;
        for (int j = 0; j < 6; ++j) {
            if (mask & (1 << j)) {
                w += weight[static_cast<std::size_t>(j)];
                v += value[static_cast<std::size_t>(j)];
            }
        }
        if (w <= cap) best = std::max(best, v);
    }

    Model m;
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 6; ++j) {
        m.add_binary("item" + std::to_string(j), -value[static_cast<std::size_t>(j)]);
        row.emplace_back(j, weight[static_cast<std::size_t>(j)]);
    }
    m.add_row("cap", row, RowSense::LE, cap);
    auto s = solve_milp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(-s.objective == doctest::Approx(best));

    // Determinism: identical model, identical result and node count.
    auto s2 = solve_milp(m);
    CHECK(s2.objective == s.objective);
    CHECK(s2.nodes == s.nodes);
    CHECK(s2.values == s.values);

    // Incumbent non-increasing, best bound non-decreasing.
    for (std::size_t i = 1; i < s.incumbent_history.size(); ++i)
        CHECK(s.incumbent_history[i] < s.incumbent_history[i - 1]);
    for (std::size_t i = 1; i < s.bound_history.size(); ++i) CHECK(s.bound_history[i] >= s.bound_history[i - 1]);
}

TEST_CASE("milp: time limit zero reports time_limit") {
    Model m;
    m.add_binary("a", -1.0);
    m.add_row("c", {{0, 1.0}}, RowSense::LE, 1.0);
    SolveLimits lim;
    lim.time_limit = 0.0;
    auto s = solve_milp(m, lim);
    CHECK(s.status == Status::TimeLimit);
}

TEST_CASE("milp: sos1 group reformulation") {
    Model m;
    m.add_binary("a", -3.0);
    m.add_binary("b", -2.0);
    m.add_binary("c", -1.0);
    m.add_sos1({0, 1, 2});
    auto s = solve_milp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(-3.0));
    CHECK(s.value(m, "a") == 1.0);
    CHECK(s.value(m, "b") + s.value(m, "c") == 0.0);
}

TEST_CASE("lp file: export round trips names bijectively") {
    Model m;
    m.add_continuous("u", 0.0, kInf, 1.0);
    m.add_binary("alpha[0,1]");
    m.add_binary("alpha[0_1]");  // sanitized collision on purpose
    m.add_row("link", {{0, 1.0}, {1, 2.0}, {2, 3.0}}, RowSense::GE, 1.0);
    const auto names = lp_export_names(m);
    CHECK(names.size() == 3);
    CHECK(names[1] != names[2]);
    const std::string text = export_lp_text(m);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find(names[1]) != std::string::npos);

    // Import by sanitized names.
    auto sol = import_solution_text(m, names[0] + " 1.0\n" + names[1] + " 1\n" + names[2] + " 0\n");
    CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("lp file: violated import rejected, unknown names listed") {
    Model m;
    m.add_continuous("x", 0.0, 10.0, 1.0);
    m.add_row("need", {{0, 1.0}}, RowSense::GE, 5.0);
    CHECK_THROWS_WITH_AS(import_solution_text(m, "x 1.0\n"), doctest::Contains("need"), cddp::ValidationError);
    CHECK_THROWS_AS(import_solution_text(m, "x 6.0\nbogus 1.0\n"), cddp::ParseError);
}

TEST_CASE("milp: lp relaxation bound consistent with milp optimum") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> coef(0.5, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        Model m;
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < 5; ++j) {
            m.add_binary("b" + std::to_string(j), -coef(gen));
            row.emplace_back(j, coef(gen));
        }
        m.add_row("cap", row, RowSense::LE, 6.0);
        auto relax = solve_lp(m);
        auto exact = solve_milp(m);
        REQUIRE(relax.status == Status::Optimal);
        REQUIRE(exact.status == Status::Optimal);
        CHECK(relax.objective <= exact.objective + 1e-9);
        CHECK(exact.best_bound == doctest::Approx(exact.objective));
    }
}
