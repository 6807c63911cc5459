#include "milp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "common/errors.hpp"

namespace cddp::milp {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sanitize_one(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
            out.push_back(c);
        } else {
            out.push_back('_');
        }
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') out.insert(out.begin(), 'v');
    return out;
}

void write_expr(std::ostream& os, const Model& model, const std::vector<std::pair<int, double>>& coeffs,
                const std::vector<std::string>& names) {
    bool first = true;
    int per_line = 0;
    for (const auto& [col, val] : coeffs) {
        (void)model;
        if (val == 0.0) continue;
        if (first) {
            if (val < 0) os << "- ";
            first = false;
        } else {
            os << (val < 0 ? " - " : " + ");
        }
        const double av = std::fabs(val);
        if (av != 1.0) os << fmt(av) << ' ';
        os << names[static_cast<std::size_t>(col)];
        if (++per_line == 8) {
            os << "\n   ";
            per_line = 0;
        }
    }
    if (first) os << "0 " << (names.empty() ? "x" : names[0]);
}

}  // namespace

std::vector<std::string> lp_export_names(const Model& model) {
    std::vector<std::string> names;
    names.reserve(model.num_vars());
    std::unordered_set<std::string> used;
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        std::string s = sanitize_one(model.var(j).name);
        if (!used.insert(s).second) {
            int k = 2;
            std::string cand;
            do {
                cand = s + "__" + std::to_string(k++);
            } while (!used.insert(cand).second);
            s = cand;
        }
        names.push_back(std::move(s));
    }
    return names;
}

std::string export_lp_text(const Model& model) {
    const auto names = lp_export_names(model);
    std::ostringstream os;
    os << "\\ generated by cddp\n";
    os << "Minimize\n obj: ";
    std::vector<std::pair<int, double>> obj;
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        if (model.var(j).obj != 0.0) obj.emplace_back(static_cast<int>(j), model.var(j).obj);
    }
    write_expr(os, model, obj, names);
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < model.num_rows(); ++i) {
        const auto& r = model.row(i);
        os << ' ' << sanitize_one(r.name.empty() ? "c" + std::to_string(i) : r.name) << '_' << i << ": ";
        write_expr(os, model, r.coeffs, names);
        switch (r.sense) {
            case RowSense::LE: os << " <= "; break;
            case RowSense::GE: os << " >= "; break;
            case RowSense::EQ: os << " = "; break;
        }
        os << fmt(r.rhs) << '\n';
    }
    os << "Bounds\n";
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        const auto& v = model.var(j);
        if (v.kind == VarKind::Binary && v.lb == 0.0 && v.ub == 1.0) continue;
        const bool lb_inf = !std::isfinite(v.lb);
        const bool ub_inf = !std::isfinite(v.ub);
        if (lb_inf && ub_inf) {
            os << ' ' << names[j] << " free\n";
        } else if (v.lb == v.ub) {
            os << ' ' << names[j] << " = " << fmt(v.lb) << '\n';
        } else {
            os << ' ' << (lb_inf ? std::string("-inf") : fmt(v.lb)) << " <= " << names[j] << " <= "
               << (ub_inf ? std::string("+inf") : fmt(v.ub)) << '\n';
        }
    }
    bool any_bin = false;
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        if (model.var(j).kind == VarKind::Binary) {
            any_bin = true;
            break;
        }
    }
    if (any_bin) {
        os << "Binaries\n";
        int per_line = 0;
        for (std::size_t j = 0; j < model.num_vars(); ++j) {
            if (model.var(j).kind != VarKind::Binary) continue;
            os << ' ' << names[j];
            if (++per_line == 10) {
                os << '\n';
                per_line = 0;
            }
        }
        if (per_line) os << '\n';
    }
    if (!model.sos1_groups().empty()) {
        os << "SOS\n";
        int g = 0;
        for (const auto& group : model.sos1_groups()) {
            os << " s" << g++ << ": S1::";
            int w = 1;
            for (int col : group) os << ' ' << names[static_cast<std::size_t>(col)] << ':' << w++;
            os << '\n';
        }
    }
    os << "End\n";
    return os.str();
}

void export_lp_file(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << export_lp_text(model);
}

Solution import_solution_text(const Model& model, const std::string& text) {
    const auto names = lp_export_names(model);
    std::unordered_map<std::string, int> lookup;
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        lookup[model.var(j).name] = static_cast<int>(j);
        lookup[names[j]] = static_cast<int>(j);
    }

    std::vector<double> x(model.num_vars());
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        const auto& v = model.var(j);
        x[j] = std::isfinite(v.lb) ? v.lb : (std::isfinite(v.ub) ? v.ub : 0.0);
    }

    std::vector<std::string> unknown;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) continue;
        if (name[0] == '#' || name[0] == '\\') continue;
        double value;
        if (!(ls >> value)) throw ParseError("solution line " + std::to_string(lineno) + ": missing value for " + name);
        auto it = lookup.find(name);
        if (it == lookup.end()) {
            if (unknown.size() < 10) unknown.push_back(name);
            continue;
        }
        x[static_cast<std::size_t>(it->second)] = value;
    }
    if (!unknown.empty()) {
        std::string msg = "unknown variable names in solution:";
        for (const auto& u : unknown) msg += ' ' + u;
        throw ParseError(msg);
    }

    std::string violation;
    if (!check_point(model, x, 1e-6, &violation)) {
        throw ValidationError("imported solution violates " + violation);
    }
    Solution sol;
    sol.status = Status::Optimal;
    double obj = 0.0;
    for (std::size_t j = 0; j < model.num_vars(); ++j) obj += model.var(j).obj * x[j];
    sol.objective = obj;
    sol.best_bound = obj;
    sol.values = std::move(x);
    return sol;
}

Solution import_solution_file(const Model& model, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open solution file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return import_solution_text(model, buf.str());
}

}  // namespace cddp::milp
