#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cddp::milp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };

enum class RowSense { LE, EQ, GE };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0;
    double ub = kInf;
    double obj = 0.0;
};

struct Row {
    std::string name;
    std::vector<std::pair<int, double>> coeffs;  // (column, value), columns unique
    RowSense sense = RowSense::LE;
    double rhs = 0.0;
};

struct ModelStats {
    std::size_t rows = 0;      // m
    std::size_t binaries = 0;  // n01
    std::size_t continuous = 0;  // nc
    std::size_t nonzeros = 0;  // nz
};

// Sparse mixed-binary model, minimization. Variable names are unique and act
// as the registry for structured identities like alpha[k,i] or v[m,i,n,j].
class Model {
public:
    int add_var(std::string name, VarKind kind, double lb, double ub, double obj = 0.0);
    int add_continuous(std::string name, double lb, double ub, double obj = 0.0) {
        return add_var(std::move(name), VarKind::Continuous, lb, ub, obj);
    }
    int add_binary(std::string name, double obj = 0.0) {
        return add_var(std::move(name), VarKind::Binary, 0.0, 1.0, obj);
    }

    void add_row(std::string name, std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs);
    void add_sos1(std::vector<int> columns);

    void set_objective(int col, double coeff) { vars_[static_cast<std::size_t>(col)].obj = coeff; }
    void set_bounds(int col, double lb, double ub);

    int column(const std::string& name) const;       // -1 when absent
    int column_checked(const std::string& name) const;  // throws when absent

    std::size_t num_vars() const { return vars_.size(); }
    std::size_t num_rows() const { return rows_.size(); }
    const Variable& var(std::size_t j) const { return vars_[j]; }
    const Row& row(std::size_t i) const { return rows_[i]; }
    const std::vector<Variable>& vars() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<std::vector<int>>& sos1_groups() const { return sos1_; }

    ModelStats stats() const;

    // Structural consistency: unique in-bounds columns per row, binary bounds
    // inside [0,1]. Throws ValidationError on violation.
    void validate() const;

private:
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    std::vector<std::vector<int>> sos1_;
    std::unordered_map<std::string, int> name_to_col_;
};

}  // namespace cddp::milp
