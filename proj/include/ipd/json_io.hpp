#ifndef IPD_JSON_IO_HPP
#define IPD_JSON_IO_HPP

// JSON export/import helpers. Requires nlohmann_json; the rest of the library does not.

#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "ipd/dbscan.hpp"
#include "ipd/driver.hpp"
#include "ipd/params.hpp"
#include "ipd/prototype.hpp"
#include "ipd/representatives.hpp"
#include "ipd/stability.hpp"

namespace ipd {

using json = nlohmann::json;

/// One JSON object per line: {"cluster", "coords", "rho", "id"}.
inline void write_representatives(std::ostream& out, const RepresentativeSet& reps) {
    for (const auto& r : reps.entries) {
        out << json{{"cluster", r.label}, {"coords", r.coords}, {"rho", r.rho}, {"id", r.id}}.dump() << '\n';
    }
}

inline RepresentativeSet read_representatives(std::istream& in) {
    RepresentativeSet reps;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
            Representative r;
            r.label = j.at("cluster").get<Label>();
            r.coords = j.at("coords").get<std::vector<double>>();
            r.rho = j.value("rho", std::size_t{0});
            r.id = j.value("id", PointId{0});
            if (reps.dim == 0) {
                reps.dim = r.coords.size();
            } else if (reps.dim != r.coords.size()) {
                throw ParseError(line_no, "representative dimensionality changes");
            }
            reps.entries.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return reps;
}

inline json to_json(const StabilityReport& r) {
    json j{{"iteration", r.iteration},   {"delta", r.delta},         {"eta", r.eta},
           {"clusters", r.clusters},     {"noise", r.noise},         {"processed", r.processed},
           {"test_size", r.test_size},   {"representatives", r.representatives},
           {"queries", r.queries},       {"forced_eta", r.forced_eta}};
    j["silhouette"] = r.silhouette_valid ? json(r.silhouette) : json(nullptr);
    return j;
}

inline void write_trace(std::ostream& out, const std::vector<StabilityReport>& trace) {
    for (const auto& r : trace) {
        out << to_json(r).dump() << '\n';
    }
}

inline json to_json(const ParamGrid& g) {
    json j{{"mu_eps", g.mu_eps}, {"sigma_eps", g.sigma_eps}, {"pooled_distances", g.pooled_distances}};
    j["eps_stats"] = json::array();
    for (const auto& s : g.eps_stats) {
        j["eps_stats"].push_back({{"c_eps", s.c_eps}, {"eps", s.eps}, {"mu_m", s.mu_m}, {"sigma_m", s.sigma_m}});
    }
    j["candidates"] = json::array();
    for (const auto& c : g.candidates) {
        j["candidates"].push_back({{"c_eps", c.c_eps}, {"c_m", c.c_m}, {"eps", c.eps}, {"min_pts", c.min_pts}});
    }
    return j;
}

/// Snapshot of the prototype graph: eta, cluster roots and per-member state.
inline json to_json(const PrototypeGraph& g) {
    json members = json::array();
    for (PointId id : g.members()) {
        const PointState s = g.state(id);
        members.push_back({{"id", id}, {"status", std::string(to_string(s.status))}, {"label", s.label},
                           {"neighbors", g.neighbor_count(id)}});
    }
    std::vector<Label> roots;
    for (PointId id : g.members()) {
        const Label l = g.state(id).label;
        if (l >= 0) {
            roots.push_back(l);
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return {{"eta", g.eta()}, {"eps", g.eps()}, {"min_pts", g.min_pts()}, {"roots", roots}, {"members", members}};
}

inline json to_json(const Summary& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

inline json to_json(const MethodStats& m) {
    return {{"nmi", to_json(m.nmi)},         {"noise", to_json(m.noise)},     {"clusters", to_json(m.clusters)},
            {"omega", to_json(m.omega)},     {"seconds", to_json(m.seconds)}, {"queries", to_json(m.queries)}};
}

inline json to_json(const BenchReport& b) {
    json runs = json::array();
    for (const auto& r : b.per_run) {
        runs.push_back({{"seed", r.seed},
                        {"clusters", r.clusters},
                        {"noise", r.noise},
                        {"noise_before_refinement", r.noise_before_refinement},
                        {"nmi", r.nmi},
                        {"omega", r.omega},
                        {"seconds", r.seconds},
                        {"queries", r.queries},
                        {"processed", r.processed},
                        {"iterations", r.iterations},
                        {"converged", r.converged}});
    }
    return {{"runs", b.runs}, {"has_truth", b.has_truth}, {"ipd", to_json(b.ipd)}, {"dbscan", to_json(b.dbscan)},
            {"per_run", runs}};
}

inline json to_json(const EvalResult& e) {
    return {{"nmi", e.nmi}, {"noise", e.noise}, {"nu", e.nu}, {"omega", e.omega}, {"clusters", e.clusters}};
}

}  // namespace ipd

#endif  // IPD_JSON_IO_HPP
