#include "milp/model.hpp"

#include <unordered_set>

#include "common/errors.hpp"

namespace cddp::milp {

int Model::add_var(std::string name, VarKind kind, double lb, double ub, double obj) {
    if (name_to_col_.count(name)) throw ValidationError("duplicate variable name: " + name);
    if (kind == VarKind::Binary) {
        if (lb < 0.0 || ub > 1.0) throw ValidationError("binary bounds outside [0,1]: " + name);
    }
    if (lb > ub) throw ValidationError("lb > ub for variable: " + name);
    const int col = static_cast<int>(vars_.size());
    name_to_col_.emplace(name, col);
    vars_.push_back(Variable{std::move(name), kind, lb, ub, obj});
    return col;
}

void Model::add_row(std::string name, std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs) {
    rows_.push_back(Row{std::move(name), std::move(coeffs), sense, rhs});
}

void Model::add_sos1(std::vector<int> columns) { sos1_.push_back(std::move(columns)); }

void Model::set_bounds(int col, double lb, double ub) {
    auto& v = vars_[static_cast<std::size_t>(col)];
    if (lb > ub) throw ValidationError("lb > ub for variable: " + v.name);
    v.lb = lb;
    v.ub = ub;
}

int Model::column(const std::string& name) const {
    auto it = name_to_col_.find(name);
    return it == name_to_col_.end() ? -1 : it->second;
}

int Model::column_checked(const std::string& name) const {
    const int col = column(name);
    if (col < 0) throw ValidationError("unknown variable name: " + name);
    return col;
}

ModelStats Model::stats() const {
    ModelStats s;
    s.rows = rows_.size();
    for (const auto& v : vars_) {
        if (v.kind == VarKind::Binary)
            ++s.binaries;
        else
            ++s.continuous;
    }
    for (const auto& r : rows_) s.nonzeros += r.coeffs.size();
    return s;
}

void Model::validate() const {
    const int n = static_cast<int>(vars_.size());
    std::unordered_set<int> seen;
    for (const auto& r : rows_) {
        seen.clear();
        for (const auto& [col, val] : r.coeffs) {
            (void)val;
            if (col < 0 || col >= n) throw ValidationError("row " + r.name + " references missing column");
            if (!seen.insert(col).second) throw ValidationError("row " + r.name + " has duplicate column");
        }
    }
    for (const auto& g : sos1_) {
        for (int col : g) {
            if (col < 0 || col >= n) throw ValidationError("sos1 group references missing column");
        }
    }
}

}  // namespace cddp::milp
