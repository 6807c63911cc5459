#pragma once

#include <string>
#include <vector>

#include "milp/model.hpp"
#include "milp/solver.hpp"

namespace cddp::milp {

// CPLEX-style LP text. Structured names like alpha[0,1] are sanitized to
// LP-legal identifiers; the mapping is deterministic, so a model rebuilt from
// the same inputs reverses it bijectively (see lp_export_names).
std::string export_lp_text(const Model& model);
void export_lp_file(const Model& model, const std::string& path);

// Column order vector of sanitized names used by the LP export.
std::vector<std::string> lp_export_names(const Model& model);

// Parses a `name value` listing (external solver output), accepting either
// original or sanitized names. Missing variables default to their lower
// bound. The point is validated against the model at 1e-6; a violated row is
// reported in the thrown error.
Solution import_solution_text(const Model& model, const std::string& text);
Solution import_solution_file(const Model& model, const std::string& path);

}  // namespace cddp::milp
