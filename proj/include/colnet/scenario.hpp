#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "colnet/stability.hpp"

namespace colnet {

/// FNV-1a 64-bit hash; scenario hashes use it over the canonical JSON dump.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[i] = digits[v & 0xf];
    return out;
}

struct GraphSpec {
    enum class Kind { Complete, Empty, Edges, Degrees };
    Kind kind = Kind::Empty;
    std::vector<Edge> edges;
    std::vector<int> degrees;
};

struct Scenario {
    int firms = 0;
    MarketSpec market;
    CostModel cost;
    GraphSpec graph;
    SolverConfig solver;
    std::optional<std::uint64_t> seed;
    int cap = kDefaultEnumerationCap;
    std::string out_dir;  // optional; the CLI flag wins when both are given
    std::string hash;     // fnv1a64 of the canonical document, hex

    bool spatial() const { return std::holds_alternative<SpatialMarket>(market); }
};

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& doc, const char* key,
                                  const char* where) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw ScenarioError(std::string(where) + " is missing required key \"" + key + "\"");
    return *it;
}

inline double need_number(const nlohmann::json& doc, const char* key, const char* where) {
    const auto& v = need(doc, key, where);
    if (!v.is_number()) throw ScenarioError(std::string(where) + "." + key + " must be a number");
    return v.get<double>();
}

inline MarketSpec parse_market(const nlohmann::json& m, int firms) {
    if (!m.is_object()) throw ScenarioError("market must be an object");
    const auto& alpha = need(m, "alpha", "market");
    const bool has_ship = m.contains("shipping");
    const bool has_nodes = m.contains("nodes");
    const bool spatial = alpha.is_array() || has_ship || has_nodes;

    if (!spatial) {
        if (!alpha.is_number()) throw ScenarioError("market.alpha must be a number or array");
        try {
            return AspatialMarket(alpha.get<double>(), firms);
        } catch (const DomainError& e) {
            throw ScenarioError(std::string("market: ") + e.what());
        }
    }

    int nodes = -1;
    if (has_nodes) {
        if (!m["nodes"].is_number_integer() || m["nodes"].get<int>() < 1)
            throw ScenarioError("market.nodes must be a positive integer");
        nodes = m["nodes"].get<int>();
    }
    if (alpha.is_array()) {
        const int v = static_cast<int>(alpha.size());
        if (nodes >= 0 && nodes != v)
            throw ScenarioError("market.nodes disagrees with the length of market.alpha");
        nodes = v;
    }
    std::vector<std::vector<double>> ship;
    if (has_ship && m["shipping"].is_array()) {
        const auto& rows = m["shipping"];
        const int v = static_cast<int>(rows.size());
        if (nodes >= 0 && nodes != v)
            throw ScenarioError("market.shipping must have one row per node");
        nodes = v;
        for (const auto& row : rows) {
            if (!row.is_array() || static_cast<int>(row.size()) != firms)
                throw ScenarioError("market.shipping rows must have one entry per firm");
            ship.push_back(row.get<std::vector<double>>());
        }
    }
    if (nodes < 0) nodes = 1;
    std::vector<double> alphas;
    if (alpha.is_array())
        alphas = alpha.get<std::vector<double>>();
    else
        alphas.assign(nodes, alpha.get<double>());
    if (ship.empty()) {
        double s = 0.0;
        if (has_ship) {
            if (!m["shipping"].is_number())
                throw ScenarioError("market.shipping must be a number or matrix");
            s = m["shipping"].get<double>();
        }
        ship.assign(nodes, std::vector<double>(firms, s));
    }
    try {
        return SpatialMarket(std::move(alphas), std::move(ship));
    } catch (const DomainError& e) {
        throw ScenarioError(std::string("market: ") + e.what());
    }
}

inline CostModel parse_cost(const nlohmann::json& c, int firms) {
    if (!c.is_object()) throw ScenarioError("cost must be an object");
    const auto& type = need(c, "type", "cost");
    if (type == "linear") {
        LinearCost m;
        m.gamma0 = need_number(c, "gamma0", "cost");
        m.gamma = need_number(c, "gamma", "cost");
        if (m.gamma < 0.0) throw ScenarioError("cost.gamma must be nonnegative");
        return m;
    }
    if (type == "shifted_convex") {
        ShiftedConvexCost m;
        m.gamma0 = need_number(c, "gamma0", "cost");
        const auto& base = need(c, "base", "cost");
        if (base == "quadratic_psi")
            m.base = BaseFunction::quadratic(need_number(c, "psi", "cost"));
        else if (base == "abs")
            m.base = BaseFunction::absolute();
        else if (base == "zero")
            m.base = BaseFunction::zero();
        else if (base == "table") {
            const auto& values = need(c, "values", "cost");
            if (!values.is_array() || values.empty() || values.size() % 2 == 0)
                throw ScenarioError("cost.values must be an odd-length array centered at 0");
            m.base = BaseFunction::table(values.get<std::vector<double>>());
        } else
            throw ScenarioError("cost.base must be quadratic_psi, abs, zero, or table");
        const auto& k = need(c, "k", "cost");
        if (!k.is_array() || static_cast<int>(k.size()) != firms)
            throw ScenarioError("cost.k must list one target degree per firm");
        m.shifts = k.get<std::vector<int>>();
        for (int ki : m.shifts)
            if (ki < 0 || ki > firms - 1)
                throw ScenarioError("cost.k entries must lie in {0..n-1}");
        return m;
    }
    if (type == "general")
        throw ScenarioError("general cost models are supplied programmatically only");
    throw ScenarioError("cost.type must be linear, shifted_convex, or general");
}

inline GraphSpec parse_graph(const nlohmann::json& g, int firms) {
    GraphSpec spec;
    if (g.is_string()) {
        const std::string s = g.get<std::string>();
        if (s == "complete")
            spec.kind = GraphSpec::Kind::Complete;
        else if (s == "empty")
            spec.kind = GraphSpec::Kind::Empty;
        else
            throw ScenarioError("graph string must be \"complete\" or \"empty\"");
        return spec;
    }
    if (!g.is_object()) throw ScenarioError("graph must be a string or object");
    if (g.contains("edges")) {
        spec.kind = GraphSpec::Kind::Edges;
        for (const auto& e : g["edges"]) {
            if (!e.is_array() || e.size() != 2)
                throw ScenarioError("graph.edges entries must be [i, j] pairs");
            spec.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        try {
            Graph::from_edges(firms, spec.edges);
        } catch (const DomainError& e) {
            throw ScenarioError(std::string("graph.edges: ") + e.what());
        }
        return spec;
    }
    if (g.contains("k")) {
        spec.kind = GraphSpec::Kind::Degrees;
        if (!g["k"].is_array() || static_cast<int>(g["k"].size()) != firms)
            throw ScenarioError("graph.k must list one degree per firm");
        spec.degrees = g["k"].get<std::vector<int>>();
        if (!is_graphical(spec.degrees))
            throw ScenarioError("graph.k is not a graphical degree sequence");
        return spec;
    }
    throw ScenarioError("graph object needs either \"edges\" or \"k\"");
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
    Scenario s;
    const auto& firms = detail::need(doc, "firms", "scenario");
    if (!firms.is_number_integer() || firms.get<int>() < 2)
        throw ScenarioError("scenario.firms must be an integer >= 2");
    s.firms = firms.get<int>();
    s.market = detail::parse_market(detail::need(doc, "market", "scenario"), s.firms);
    s.cost = detail::parse_cost(detail::need(doc, "cost", "scenario"), s.firms);
    if (doc.contains("graph")) s.graph = detail::parse_graph(doc["graph"], s.firms);
    if (doc.contains("solver")) {
        const auto& sv = doc["solver"];
        if (!sv.is_object()) throw ScenarioError("solver must be an object");
        if (sv.contains("damping")) s.solver.damping = sv["damping"].get<double>();
        if (sv.contains("max_iterations")) s.solver.max_iterations = sv["max_iterations"].get<int>();
        if (sv.contains("tolerance")) s.solver.tolerance = sv["tolerance"].get<double>();
        if (sv.contains("step")) s.solver.step = sv["step"].get<double>();
        if (!(s.solver.damping > 0.0 && s.solver.damping <= 1.0))
            throw ScenarioError("solver.damping must lie in (0, 1]");
        if (s.solver.max_iterations < 1)
            throw ScenarioError("solver.max_iterations must be positive");
        if (!(s.solver.tolerance > 0.0)) throw ScenarioError("solver.tolerance must be positive");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            throw ScenarioError("seed must be an unsigned integer");
        s.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("cap")) {
        if (!doc["cap"].is_number_integer() || doc["cap"].get<int>() < 1)
            throw ScenarioError("cap must be a positive integer");
        s.cap = doc["cap"].get<int>();
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string()) throw ScenarioError("out must be a directory path");
        s.out_dir = doc["out"].get<std::string>();
    }
    s.hash = hex64(fnv1a64(doc.dump()));
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError("scenario is not valid JSON: " + std::string(e.what()));
    }
    return parse_scenario(doc);
}

/// Concrete graph for a scenario. Degree-sequence specs realize via edge-swap
/// randomization when a seed is present and Havel-Hakimi otherwise, so runs
/// are reproducible either way.
inline Graph resolve_graph(const Scenario& s) {
    switch (s.graph.kind) {
        case GraphSpec::Kind::Complete: return Graph::complete(s.firms);
        case GraphSpec::Kind::Empty: return Graph::empty(s.firms);
        case GraphSpec::Kind::Edges: return Graph::from_edges(s.firms, s.graph.edges);
        case GraphSpec::Kind::Degrees:
            return s.seed ? random_realization(s.graph.degrees, *s.seed)
                          : realize_degree_sequence(s.graph.degrees);
    }
    throw ScenarioError("unresolved graph spec");
}

}  // namespace colnet
