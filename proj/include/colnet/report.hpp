#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "colnet/scenario.hpp"
#include "colnet/version.hpp"

namespace colnet {

/// 17-significant-digit decimal form; round-trips doubles and keeps report
/// files byte-stable across runs.
inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

/// Common provenance block embedded in every report.
inline nlohmann::json report_header(const std::string& scenario_hash, PayoffPath path) {
    return {{"tool", kToolName},
            {"tool_version", kVersion},
            {"scenario_hash", scenario_hash},
            {"solver_path", to_string(path)}};
}

inline nlohmann::json graph_json(const Graph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [i, j] : g.edges()) edges.push_back({i, j});
    return {{"n", g.size()}, {"edges", edges}, {"degrees", g.degrees()}};
}

// --- equilibrium outcome exports ---

inline std::string outcome_csv(const Outcome& o, const Graph& g) {
    std::ostringstream os;
    os << "firm,degree,q,c,Y\n";
    const std::vector<int> eta = g.degrees();
    for (std::size_t i = 0; i < o.quantity.size(); ++i)
        os << i << "," << eta[i] << "," << format_double(o.quantity[i]) << ","
           << format_double(o.marginal_cost[i]) << "," << format_double(o.profit[i]) << "\n";
    return os.str();
}

inline nlohmann::json outcome_json(const Outcome& o, const Graph& g) {
    return {{"quantity", o.quantity},
            {"marginal_cost", o.marginal_cost},
            {"profit", o.profit},
            {"total_quantity", o.total},
            {"price", o.price},
            {"interior", o.interior},
            {"warnings", o.warnings},
            {"graph", graph_json(g)}};
}

inline std::string spatial_csv(const SpatialOutcome& o) {
    std::ostringstream os;
    os << "node,firm,d,P_l,y\n";
    for (std::size_t l = 0; l < o.demand.size(); ++l)
        for (std::size_t i = 0; i < o.demand[l].size(); ++i)
            os << l << "," << i << "," << format_double(o.demand[l][i]) << ","
               << format_double(o.node_price[l]) << "," << format_double(o.node_profit[l][i])
               << "\n";
    return os.str();
}

inline nlohmann::json spatial_json(const SpatialOutcome& o, const Graph& g) {
    return {{"demand", o.demand},
            {"node_total", o.node_total},
            {"node_price", o.node_price},
            {"node_profit", o.node_profit},
            {"quantity", o.quantity},
            {"marginal_cost", o.marginal_cost},
            {"profit", o.profit},
            {"interior", o.interior},
            {"warnings", o.warnings},
            {"graph", graph_json(g)}};
}

// --- stability & theorem reports ---

inline nlohmann::json violation_json(const Violation& v) {
    return {{"edge", {v.i, v.j}},
            {"type", v.kind == Violation::Kind::DropProfitable ? "drop-profitable"
                                                               : "add-mutually-beneficial"},
            {"delta_i", v.delta_i},
            {"delta_j", v.delta_j}};
}

inline nlohmann::json stability_json(const StabilityReport& r, const Graph& g,
                                     const std::vector<DeltaAudit>& audit = {}) {
    nlohmann::json violations = nlohmann::json::array();
    for (const Violation& v : r.violations) violations.push_back(violation_json(v));
    nlohmann::json audit_rows = nlohmann::json::array();
    for (const DeltaAudit& a : audit)
        audit_rows.push_back({{"firm", a.firm},
                              {"edge", {a.i, a.j}},
                              {"direction", a.add ? "add" : "drop"},
                              {"analytic", a.analytic},
                              {"direct", a.direct},
                              {"rel_error", a.rel_error}});
    return {{"verdict", r.stable ? "stable" : "unstable"},
            {"violations", violations},
            {"deviations_checked", r.deviations_checked},
            {"delta_audit", audit_rows},
            {"graph", graph_json(g)}};
}

inline nlohmann::json theorem_json(const TheoremReport& r, const std::vector<int>& k) {
    nlohmann::json unstable = nlohmann::json::array();
    for (const Graph& g : r.unstable) unstable.push_back(graph_json(g));
    nlohmann::json audits = nlohmann::json::array();
    for (const DeltaAudit& a : r.worst_audits)
        audits.push_back({{"firm", a.firm},
                          {"edge", {a.i, a.j}},
                          {"direction", a.add ? "add" : "drop"},
                          {"analytic", a.analytic},
                          {"direct", a.direct},
                          {"rel_error", a.rel_error}});
    return {{"k", k},
            {"hypothesis_met", r.hypothesis_met},
            {"condition_lhs", r.condition_lhs},
            {"notes", r.notes},
            {"realizations_checked", r.realizations_checked},
            {"all_stable", r.all_stable},
            {"unstable", unstable},
            {"max_delta_rel_error", r.max_delta_error},
            {"deltas_match", r.deltas_match},
            {"worst_audits", audits},
            {"verdict", r.ok() ? "pass" : "fail"}};
}

inline nlohmann::json condition_json(const ConditionResult& c) {
    return {{"lhs", c.lhs}, {"holds", c.holds}, {"notes", c.notes}};
}

}  // namespace colnet
