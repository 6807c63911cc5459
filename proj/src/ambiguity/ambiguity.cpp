#include "ambiguity/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "common/errors.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"
#include "common/stats.hpp"
#include "milp/model.hpp"
#include "milp/solver.hpp"

namespace cddp {

using nlohmann::json;

double NominalMoments::realization(const CddpInstance& inst, int param, const Scenario& sc) {
    const auto& p = inst.params[static_cast<std::size_t>(param)];
    for (const auto& c : sc.volumes) {
        if (c.origin == p.origin && c.destination == p.destination) return c.volume;
    }
    return 0.0;
}

NominalMoments fit_moments(const CddpInstance& inst) {
    NominalMoments nm;
    const std::size_t np = inst.params.size();
    nm.mean.assign(np, 0.0);
    nm.variance.assign(np, 0.0);
    nm.degenerate.assign(np, 0);
    for (std::size_t h = 0; h < np; ++h) {
        const auto& p = inst.params[h];
        double wsum = 0.0;
        double mean = 0.0;
        std::vector<std::pair<double, double>> obs;  // (weight, value)
        for (int gid : p.groups) {
            for (int sid : inst.group_by_id(gid).scenarios) {
                const auto& sc = inst.scenario_by_id(sid);
                obs.emplace_back(sc.weight, NominalMoments::realization(inst, static_cast<int>(h), sc));
                wsum += sc.weight;
            }
        }
        if (obs.empty() || wsum <= 0.0)
            throw ValidationError("parameter " + std::to_string(h) + " has no scenario realizations");
        for (const auto& [w, v] : obs) mean += (w / wsum) * v;
        double var = 0.0;
        for (const auto& [w, v] : obs) var += (w / wsum) * (v - mean) * (v - mean);
        nm.mean[h] = mean;
        nm.variance[h] = var;
        nm.degenerate[h] = var <= 0.0 ? 1 : 0;
    }
    return nm;
}

const MemberScenario* AmbiguityMember::find_scenario(int scenario_id) const {
    for (const auto& ms : scenarios) {
        if (ms.scenario_id == scenario_id) return &ms;
    }
    return nullptr;
}

namespace {

// Parameters active in a scenario group (those whose group list contains it).
std::vector<int> group_params(const CddpInstance& inst, int gid) {
    std::vector<int> out;
    for (const auto& p : inst.params) {
        if (std::find(p.groups.begin(), p.groups.end(), gid) != p.groups.end()) out.push_back(p.id);
    }
    return out;
}

struct Draft {
    Family family = Family::Normal;
    int index = 0;
    std::vector<MemberScenario> scenarios;
    bool rejected = false;
    std::string reject_reason;
};

// One candidate: a shared per-scenario epsilon shifts every parameter's cdf
// projection; scenarios whose shifted cdf hits zero are dropped, values
// above one are clamped to 1 - cdf_cap.
Draft perturb_candidate(const CddpInstance& inst, const NominalMoments& nm,
                        const std::vector<Fitted>& fitted, Family family, int index,
                        const AmbiguityOptions& opts) {
    Draft d;
    d.family = family;
    d.index = index;
    for (const auto& sc : inst.scenarios) {
        Rng rng(opts.seed, "amb/" + family_name(family) + "/p" + std::to_string(index) + "/w" + std::to_string(sc.id));
        const double eps = rng.next_normal() * opts.sigma_eps;
        MemberScenario ms;
        ms.scenario_id = sc.id;
        bool drop = false;
        for (int h : group_params(inst, sc.group)) {
            const double xi_hat = NominalMoments::realization(inst, h, sc);
            if (nm.degenerate[static_cast<std::size_t>(h)]) {
                ms.realizations.emplace_back(h, xi_hat);  // held constant
                continue;
            }
            const auto& dist = fitted[static_cast<std::size_t>(h)];
            if (family_positive_support(family) && xi_hat <= 0.0)
                throw ValidationError("projection error: parameter " + std::to_string(h) + " scenario " +
                                      std::to_string(sc.id) + " is nonpositive under " + family_name(family));
            const double u_hat = dist.cdf(xi_hat);
            double u = u_hat + eps;
            if (u <= 0.0) {
                drop = true;
                break;
            }
            if (u >= 1.0) u = 1.0 - opts.cdf_cap;
            // Volumes cannot go negative; the Normal family's lower tail is
            // truncated at zero.
            ms.realizations.emplace_back(h, std::max(0.0, dist.quantile(u)));
        }
        if (!drop) d.scenarios.push_back(std::move(ms));
    }
    if (d.scenarios.empty()) {
        d.rejected = true;
        d.reject_reason = "all scenarios dropped";
        return d;
    }
    std::string reason;
    if (!compute_member_weights(inst, nm, family, d.scenarios, &reason)) {
        d.rejected = true;
        d.reject_reason = reason;
    }
    return d;
}

}  // namespace

bool compute_member_weights(const CddpInstance& inst, const NominalMoments& nm, Family family,
                            std::vector<MemberScenario>& scenarios, std::string* reject_reason) {
    // Per-parameter fitted densities evaluated at the member realizations.
    std::vector<Fitted> fitted;
    fitted.reserve(inst.params.size());
    for (std::size_t h = 0; h < inst.params.size(); ++h) {
        if (nm.degenerate[h]) {
            fitted.push_back(Fitted::fit(Family::Normal, 0.0, 1.0));  // unused slot
        } else {
            fitted.push_back(Fitted::fit(family, nm.mean[h], nm.variance[h]));
        }
    }
    for (const auto& g : inst.groups) {
        std::vector<MemberScenario*> in_group;
        for (auto& ms : scenarios) {
            if (inst.scenario_by_id(ms.scenario_id).group == g.id) in_group.push_back(&ms);
        }
        if (in_group.empty()) {
            if (reject_reason)
                *reject_reason = "scenario group " + std::to_string(g.id) + " lost all scenarios";
            return false;
        }
        std::vector<double> loglike(in_group.size(), 0.0);
        for (std::size_t k = 0; k < in_group.size(); ++k) {
            for (const auto& [h, xi] : in_group[k]->realizations) {
                if (nm.degenerate[static_cast<std::size_t>(h)]) continue;  // density factor 1
                loglike[k] += fitted[static_cast<std::size_t>(h)].log_pdf(xi);
            }
        }
        const double peak = *std::max_element(loglike.begin(), loglike.end());
        if (!std::isfinite(peak)) {
            if (reject_reason) *reject_reason = "likelihood underflow in scenario group " + std::to_string(g.id);
            return false;
        }
        double denom = 0.0;
        for (double ll : loglike) denom += std::exp(ll - peak);
        for (std::size_t k = 0; k < in_group.size(); ++k)
            in_group[k]->weight = g.weight * std::exp(loglike[k] - peak) / denom;
    }
    return true;
}

double wasserstein_proximity(const CddpInstance& inst, const AmbiguityMember& member, int rho) {
    const std::size_t nu = member.scenarios.size();
    const std::size_t nv = inst.scenarios.size();
    double supply = 0.0, demand = 0.0;
    for (const auto& ms : member.scenarios) supply += ms.weight;
    for (const auto& sc : inst.scenarios) demand += sc.weight;
    if (std::fabs(supply - demand) > 1e-9)
        throw ValidationError("transportation problem unbalanced by " + std::to_string(supply - demand));

    // Shared parameter sets per (member scenario group, nominal group).
    milp::Model lp;
    std::vector<std::vector<int>> lanes(nu);  // column per admissible lane
    for (std::size_t a = 0; a < nu; ++a) {
        const auto& ms = member.scenarios[a];
        const auto& sca = inst.scenario_by_id(ms.scenario_id);
        lanes[a].assign(nv, -1);
        for (std::size_t b = 0; b < nv; ++b) {
            const auto& scb = inst.scenarios[b];
            double dist = 0.0;
            bool shared = false;
            for (const auto& [h, xi] : ms.realizations) {
                const auto& groups = inst.params[static_cast<std::size_t>(h)].groups;
                if (std::find(groups.begin(), groups.end(), scb.group) == groups.end()) continue;
                shared = true;
                const double diff = std::fabs(xi - NominalMoments::realization(inst, h, scb));
                if (rho == kRhoInfinity)
                    dist = std::max(dist, diff);
                else if (rho == 1)
                    dist += diff;
                else
                    dist += diff * diff;
            }
            if (!shared) continue;  // forbidden lane
            lanes[a][b] = lp.add_continuous("eta[" + std::to_string(ms.scenario_id) + "," + std::to_string(scb.id) + "]",
                                            0.0, milp::kInf, dist);
        }
    }
    for (std::size_t a = 0; a < nu; ++a) {
        std::vector<std::pair<int, double>> row;
        for (std::size_t b = 0; b < nv; ++b) {
            if (lanes[a][b] >= 0) row.emplace_back(lanes[a][b], 1.0);
        }
        lp.add_row("supply" + std::to_string(a), std::move(row), milp::RowSense::EQ, member.scenarios[a].weight);
    }
    for (std::size_t b = 0; b < nv; ++b) {
        std::vector<std::pair<int, double>> row;
        for (std::size_t a = 0; a < nu; ++a) {
            if (lanes[a][b] >= 0) row.emplace_back(lanes[a][b], 1.0);
        }
        lp.add_row("demand" + std::to_string(b), std::move(row), milp::RowSense::EQ, inst.scenarios[b].weight);
    }
    auto sol = milp::solve_lp(lp);
    if (sol.status != milp::Status::Optimal)
        throw ValidationError("transportation problem not solvable: " + milp::status_name(sol.status));
    return sol.objective;
}

AmbiguityMember nominal_member(const CddpInstance& inst) {
    AmbiguityMember m;
    m.family = Family::Normal;
    m.candidate_index = -1;
    m.proximity = 0.0;
    for (const auto& sc : inst.scenarios) {
        MemberScenario ms;
        ms.scenario_id = sc.id;
        ms.weight = sc.weight;
        for (int h : group_params(inst, sc.group))
            ms.realizations.emplace_back(h, NominalMoments::realization(inst, h, sc));
        m.scenarios.push_back(std::move(ms));
    }
    return m;
}

ScenarioData member_scenario_data(const CddpInstance& inst, const MemberScenario& ms) {
    return derive_scenario_data(inst, inst.scenario_by_id(ms.scenario_id), ms.realizations);
}

AmbiguitySet build_ambiguity(const CddpInstance& inst, const AmbiguityOptions& opts) {
    if (opts.sigma_eps <= 0.0) throw ValidationError("sigma_eps must be positive");
    if (opts.per_family < 1) throw ValidationError("per-family candidate count must be >= 1");
    if (opts.max_members < 1) throw ValidationError("max_members must be >= 1");
    if (opts.rho != 1 && opts.rho != 2 && opts.rho != kRhoInfinity)
        throw ValidationError("rho must be 1, 2 or infinity");

    const auto nm = fit_moments(inst);

    // Per-family fitted distributions are shared across candidates.
    std::map<Family, std::vector<Fitted>> family_fits;
    for (Family f : opts.families) {
        if (family_fits.count(f)) throw ValidationError("duplicate family in options");
        std::vector<Fitted> fits;
        fits.reserve(inst.params.size());
        for (std::size_t h = 0; h < inst.params.size(); ++h) {
            fits.push_back(nm.degenerate[h] ? Fitted::fit(Family::Normal, 0.0, 1.0)
                                            : Fitted::fit(f, nm.mean[h], nm.variance[h]));
        }
        family_fits.emplace(f, std::move(fits));
    }

    struct Scored {
        Draft draft;
        double proximity = 0.0;
    };
    const std::size_t count = opts.families.size() * static_cast<std::size_t>(opts.per_family);
    std::vector<Scored> scored(count);
    parallel_for(count, opts.threads, [&](std::size_t k) {
        const Family f = opts.families[k / static_cast<std::size_t>(opts.per_family)];
        const int index = static_cast<int>(k % static_cast<std::size_t>(opts.per_family));
        Scored s;
        s.draft = perturb_candidate(inst, nm, family_fits.at(f), f, index, opts);
        if (!s.draft.rejected) {
            AmbiguityMember m;
            m.family = f;
            m.candidate_index = index;
            m.scenarios = s.draft.scenarios;
            s.proximity = wasserstein_proximity(inst, m, opts.rho);
        }
        scored[k] = std::move(s);
    });

    AmbiguitySet out;
    out.options = opts;
    std::vector<double> proximities;
    for (std::size_t k = 0; k < count; ++k) {
        CandidateInfo info;
        info.family = scored[k].draft.family;
        info.index = scored[k].draft.index;
        info.rejected = scored[k].draft.rejected;
        info.reject_reason = scored[k].draft.reject_reason;
        if (!info.rejected) {
            info.proximity = scored[k].proximity;
            proximities.push_back(info.proximity);
        }
        out.candidates.push_back(std::move(info));
    }

    double theta = opts.theta;
    if (opts.centile > 0.0) {
        const auto k = static_cast<std::size_t>(std::floor(opts.centile / 100.0 * static_cast<double>(proximities.size())));
        if (k == 0) {
            theta = -std::numeric_limits<double>::infinity();
        } else {
            std::vector<double> sorted(proximities);
            std::sort(sorted.begin(), sorted.end());
            theta = sorted[k - 1];
        }
    }
    out.theta_used = theta;

    // Fixed (proximity, family position, index) order keeps selection
    // independent of evaluation order.
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < count; ++k) {
        if (!scored[k].draft.rejected) order.push_back(k);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scored[a].proximity != scored[b].proximity) return scored[a].proximity < scored[b].proximity;
        return a < b;
    });
    for (std::size_t k : order) {
        if (scored[k].proximity > theta) break;
        if (static_cast<int>(out.members.size()) >= opts.max_members) break;
        AmbiguityMember m;
        m.id = static_cast<int>(out.members.size());
        m.family = scored[k].draft.family;
        m.candidate_index = scored[k].draft.index;
        m.proximity = scored[k].proximity;
        m.scenarios = std::move(scored[k].draft.scenarios);
        out.members.push_back(std::move(m));
    }
    return out;
}

std::string proximity_stats_csv(const AmbiguitySet& set) {
    std::ostringstream os;
    os << "Distribution,Min";
    for (double c : set.options.stat_centiles) os << ",1st " << c << "cent";
    os << ",1st Qu,Median,Mean,3rd Qu,Max\n";
    const auto emit = [&](const std::string& name, const std::vector<double>& v) {
        if (v.empty()) return;
        os << name << ',' << quantile(v, 0.0);
        for (double c : set.options.stat_centiles) os << ',' << quantile(v, c / 100.0);
        os << ',' << quantile(v, 0.25) << ',' << quantile(v, 0.5) << ',' << mean(v) << ',' << quantile(v, 0.75) << ','
           << quantile(v, 1.0) << '\n';
    };
    std::vector<double> all;
    for (Family f : set.options.families) {
        std::vector<double> fam;
        for (const auto& c : set.candidates) {
            if (c.family == f && !c.rejected) fam.push_back(c.proximity);
        }
        emit(family_name(f), fam);
        all.insert(all.end(), fam.begin(), fam.end());
    }
    emit("All", all);
    return os.str();
}

// ---------------------------------------------------------------------------
// Serialization

std::string ambiguity_to_json_text(const AmbiguitySet& set) {
    json j;
    json opts;
    json fams = json::array();
    for (Family f : set.options.families) fams.push_back(family_name(f));
    opts["families"] = std::move(fams);
    opts["per_family"] = set.options.per_family;
    opts["sigma_eps"] = set.options.sigma_eps;
    opts["rho"] = set.options.rho;
    opts["theta"] = std::isfinite(set.options.theta) ? json(set.options.theta) : json();
    opts["centile"] = set.options.centile;
    opts["max_members"] =
        set.options.max_members == std::numeric_limits<int>::max() ? json() : json(set.options.max_members);
    opts["seed"] = set.options.seed;
    opts["cdf_cap"] = set.options.cdf_cap;
    opts["stat_centiles"] = set.options.stat_centiles;
    j["options"] = std::move(opts);
    j["theta_used"] = set.theta_used;
    json members = json::array();
    for (const auto& m : set.members) {
        json scenarios = json::array();
        for (const auto& ms : m.scenarios) {
            json reals = json::array();
            for (const auto& [h, v] : ms.realizations) reals.push_back({h, v});
            scenarios.push_back(
                {{"scenario", ms.scenario_id}, {"weight", ms.weight}, {"realizations", std::move(reals)}});
        }
        members.push_back({{"id", m.id},
                           {"family", family_name(m.family)},
                           {"candidate", m.candidate_index},
                           {"proximity", m.proximity},
                           {"scenarios", std::move(scenarios)}});
    }
    j["members"] = std::move(members);
    json cands = json::array();
    for (const auto& c : set.candidates) {
        json cj = {{"family", family_name(c.family)}, {"index", c.index}, {"rejected", c.rejected}};
        if (c.rejected)
            cj["reason"] = c.reject_reason;
        else
            cj["proximity"] = c.proximity;
        cands.push_back(std::move(cj));
    }
    j["candidates"] = std::move(cands);
    return j.dump(2) + "\n";
}

AmbiguitySet ambiguity_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("ambiguity JSON: ") + e.what());
    }
    const auto need = [](const json& obj, const char* field) -> const json& {
        auto it = obj.find(field);
        if (it == obj.end()) throw ParseError(std::string("ambiguity: missing field `") + field + "`");
        return *it;
    };
    AmbiguitySet set;
    const auto& opts = need(j, "options");
    set.options.families.clear();
    for (const auto& f : need(opts, "families")) set.options.families.push_back(family_from_name(f.get<std::string>()));
    set.options.per_family = need(opts, "per_family").get<int>();
    set.options.sigma_eps = need(opts, "sigma_eps").get<double>();
    set.options.rho = need(opts, "rho").get<int>();
    set.options.theta = need(opts, "theta").is_null() ? std::numeric_limits<double>::infinity()
                                                      : need(opts, "theta").get<double>();
    set.options.centile = need(opts, "centile").get<double>();
    set.options.max_members = need(opts, "max_members").is_null() ? std::numeric_limits<int>::max()
                                                                  : need(opts, "max_members").get<int>();
    set.options.seed = need(opts, "seed").get<std::uint64_t>();
    set.options.cdf_cap = need(opts, "cdf_cap").get<double>();
    set.options.stat_centiles = need(opts, "stat_centiles").get<std::vector<double>>();
    set.theta_used = need(j, "theta_used").get<double>();
    for (const auto& mj : need(j, "members")) {
        AmbiguityMember m;
        m.id = need(mj, "id").get<int>();
        m.family = family_from_name(need(mj, "family").get<std::string>());
        m.candidate_index = need(mj, "candidate").get<int>();
        m.proximity = need(mj, "proximity").get<double>();
        for (const auto& sj : need(mj, "scenarios")) {
            MemberScenario ms;
            ms.scenario_id = need(sj, "scenario").get<int>();
            ms.weight = need(sj, "weight").get<double>();
            for (const auto& rj : need(sj, "realizations")) {
                if (!rj.is_array() || rj.size() != 2) throw ParseError("ambiguity: realization must be [param, value]");
                ms.realizations.emplace_back(rj[0].get<int>(), rj[1].get<double>());
            }
            m.scenarios.push_back(std::move(ms));
        }
        set.members.push_back(std::move(m));
    }
    for (const auto& cj : need(j, "candidates")) {
        CandidateInfo c;
        c.family = family_from_name(need(cj, "family").get<std::string>());
        c.index = need(cj, "index").get<int>();
        c.rejected = need(cj, "rejected").get<bool>();
        if (c.rejected)
            c.reject_reason = need(cj, "reason").get<std::string>();
        else
            c.proximity = need(cj, "proximity").get<double>();
        set.candidates.push_back(std::move(c));
    }
    return set;
}

void write_ambiguity(const AmbiguitySet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << ambiguity_to_json_text(set);
}

AmbiguitySet read_ambiguity(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open ambiguity file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return ambiguity_from_json_text(buf.str());
}

}  // namespace cddp
