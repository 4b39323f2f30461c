#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "colnet/errors.hpp"

namespace colnet {

using Edge = std::pair<int, int>;

inline Edge canonical_edge(int i, int j) {
    if (i == j) throw DomainError("self-loops are not allowed");
    if (i < 0 || j < 0) throw DomainError("negative node index");
    return i < j ? Edge{i, j} : Edge{j, i};
}

/// Simple undirected labeled graph over firms 0..n-1. Edges are kept as a
/// sorted vector of canonical (i < j) pairs; every operation is pure and
/// returns a new value.
class Graph {
public:
    Graph() = default;

    explicit Graph(int n) : n_(n) {
        if (n < 1) throw DomainError("graph needs at least one node");
    }

    static Graph empty(int n) { return Graph(n); }

    static Graph complete(int n) {
        Graph g(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) g.edges_.emplace_back(i, j);
        return g;
    }

    static Graph from_edges(int n, const std::vector<Edge>& edges) {
        Graph g(n);
        g.edges_.reserve(edges.size());
        for (auto [i, j] : edges) {
            Edge e = canonical_edge(i, j);
            if (e.second >= n) throw DomainError("edge endpoint out of range");
            g.edges_.push_back(e);
        }
        std::sort(g.edges_.begin(), g.edges_.end());
        if (std::adjacent_find(g.edges_.begin(), g.edges_.end()) != g.edges_.end())
            throw DomainError("duplicate edge");
        return g;
    }

    int size() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_edge(int i, int j) const {
        Edge e = canonical_edge(i, j);
        if (e.second >= n_) throw DomainError("edge endpoint out of range");
        return std::binary_search(edges_.begin(), edges_.end(), e);
    }

    /// g + ij. Rejects edges already present.
    Graph with_edge(int i, int j) const {
        Edge e = canonical_edge(i, j);
        if (e.second >= n_) throw DomainError("edge endpoint out of range");
        auto pos = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (pos != edges_.end() && *pos == e) throw DomainError("edge already present");
        Graph g = *this;
        g.edges_.insert(g.edges_.begin() + (pos - edges_.begin()), e);
        return g;
    }

    /// g - ij. Rejects edges that are absent.
    Graph without_edge(int i, int j) const {
        Edge e = canonical_edge(i, j);
        if (e.second >= n_) throw DomainError("edge endpoint out of range");
        auto pos = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (pos == edges_.end() || *pos != e) throw DomainError("edge not present");
        Graph g = *this;
        g.edges_.erase(g.edges_.begin() + (pos - edges_.begin()));
        return g;
    }

    int degree(int i) const {
        if (i < 0 || i >= n_) throw DomainError("node index out of range");
        int d = 0;
        for (auto [a, b] : edges_) d += (a == i) + (b == i);
        return d;
    }

    std::vector<int> degrees() const {
        std::vector<int> d(n_, 0);
        for (auto [a, b] : edges_) {
            ++d[a];
            ++d[b];
        }
        return d;
    }

    bool operator==(const Graph&) const = default;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

/// eta_i(g) for all firms; sums to twice the edge count.
inline std::vector<int> degree_sequence(const Graph& g) { return g.degrees(); }

/// Erdos-Gallai test: true iff some simple graph on k.size() nodes realizes k.
inline bool is_graphical(std::vector<int> k) {
    const int n = static_cast<int>(k.size());
    long long sum = 0;
    for (int v : k) {
        if (v < 0 || v > n - 1) return false;
        sum += v;
    }
    if (sum % 2 != 0) return false;
    std::sort(k.begin(), k.end(), std::greater<int>());
    std::vector<long long> prefix(n + 1, 0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + k[i];
    for (int r = 1; r <= n; ++r) {
        long long rhs = static_cast<long long>(r) * (r - 1);
        for (int i = r; i < n; ++i) rhs += std::min(k[i], r);
        if (prefix[r] > rhs) return false;
    }
    return true;
}

/// Havel-Hakimi construction; the returned graph realizes k exactly.
/// Deterministic: ties broken by node id.
inline Graph realize_degree_sequence(const std::vector<int>& k) {
    if (!is_graphical(k))
        throw NotGraphicalError("degree sequence is not graphical");
    const int n = static_cast<int>(k.size());
    std::vector<std::pair<int, int>> rem;  // (remaining degree, node)
    rem.reserve(n);
    for (int i = 0; i < n; ++i) rem.emplace_back(k[i], i);
    std::vector<Edge> edges;
    for (;;) {
        std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        const auto [d, v] = rem.front();
        if (d == 0) break;
        rem.front().first = 0;
        for (int t = 1; t <= d; ++t) {
            --rem[t].first;
            edges.push_back(canonical_edge(v, rem[t].second));
        }
    }
    return Graph::from_edges(n, edges);
}

inline constexpr int kDefaultEnumerationCap = 7;

/// Number of labeled graphs on n nodes: 2^C(n,2).
inline std::uint64_t labeled_graph_count(int n) {
    return std::uint64_t{1} << (n * (n - 1) / 2);
}

/// Graph whose edge set is the given bitmask over canonical pairs in
/// lexicographic order ((0,1),(0,2),...,(n-2,n-1)).
inline Graph graph_from_index(int n, std::uint64_t bits) {
    std::vector<Edge> edges;
    int b = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++b)
            if (bits >> b & 1) edges.emplace_back(i, j);
    return Graph::from_edges(n, edges);
}

/// Streams all 2^C(n,2) labeled graphs on n nodes exactly once.
class GraphEnumerator {
public:
    explicit GraphEnumerator(int n, int cap = kDefaultEnumerationCap) : n_(n) {
        if (n < 1) throw DomainError("graph needs at least one node");
        if (n > cap)
            throw CapExceededError("enumeration over " + std::to_string(n) +
                                   " nodes exceeds cap " + std::to_string(cap));
        total_ = labeled_graph_count(n);
    }

    std::uint64_t total() const { return total_; }

    std::optional<Graph> next() {
        if (next_ == total_) return std::nullopt;
        return graph_from_index(n_, next_++);
    }

private:
    int n_;
    std::uint64_t total_ = 0;
    std::uint64_t next_ = 0;
};

/// Streams every labeled graph whose degree sequence equals k, by filtering
/// the full enumeration.
class RealizationEnumerator {
public:
    explicit RealizationEnumerator(std::vector<int> k, int cap = kDefaultEnumerationCap)
        : k_(std::move(k)) {
        if (!is_graphical(k_))
            throw NotGraphicalError("degree sequence is not graphical");
        inner_.emplace(static_cast<int>(k_.size()), cap);
    }

    std::optional<Graph> next() {
        while (auto g = inner_->next())
            if (g->degrees() == k_) return g;
        return std::nullopt;
    }

private:
    std::vector<int> k_;
    std::optional<GraphEnumerator> inner_;
};

/// One random member of the equivalence class of k: Havel-Hakimi seed graph
/// followed by degree-preserving double edge swaps. Deterministic per seed.
/// swap_attempts < 0 selects the default of 10 * |edges|.
inline Graph random_realization(const std::vector<int>& k, std::uint64_t seed,
                                int swap_attempts = -1) {
    Graph g = realize_degree_sequence(k);
    std::vector<Edge> edges = g.edges();
    if (edges.size() < 2) return g;
    if (swap_attempts < 0) swap_attempts = 10 * static_cast<int>(edges.size());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
    for (int t = 0; t < swap_attempts; ++t) {
        const std::size_t a = pick(rng), b = pick(rng);
        if (a == b) continue;
        auto [p, q] = edges[a];
        auto [r, s] = edges[b];
        if (rng() & 1) std::swap(r, s);
        // rewire {p,q},{r,s} -> {p,r},{q,s}; all four endpoints must differ
        if (p == r || p == s || q == r || q == s) continue;
        const Edge e1 = canonical_edge(p, r), e2 = canonical_edge(q, s);
        if (g.has_edge(e1.first, e1.second) || g.has_edge(e2.first, e2.second)) continue;
        g = g.without_edge(p, q).without_edge(r, s)
             .with_edge(e1.first, e1.second).with_edge(e2.first, e2.second);
        edges[a] = e1;
        edges[b] = e2;
    }
    return g;
}

// --- text format: header "n=<count>", one edge "i j" per line ---

inline std::string to_text(const Graph& g) {
    std::ostringstream os;
    os << "n=" << g.size() << "\n";
    for (auto [i, j] : g.edges()) os << i << " " << j << "\n";
    return os.str();
}

inline Graph graph_from_text(std::istream& in) {
    std::string line;
    int n = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (n < 0) {
            if (line.rfind("n=", 0) != 0)
                throw DomainError("graph text must start with an n=<count> header");
            try {
                n = std::stoi(line.substr(2));
            } catch (const std::exception&) {
                throw DomainError("bad node count in graph header: " + line);
            }
            continue;
        }
        std::istringstream ls(line);
        int i, j;
        if (!(ls >> i >> j)) throw DomainError("bad edge line: " + line);
        edges.emplace_back(i, j);
    }
    if (n < 0) throw DomainError("graph text missing n=<count> header");
    return Graph::from_edges(n, edges);
}

inline Graph graph_from_text(const std::string& text) {
    std::istringstream in(text);
    return graph_from_text(in);
}

inline std::string to_dot(const Graph& g, const std::string& name = "collaboration") {
    std::ostringstream os;
    os << "graph " << name << " {\n";
    for (int i = 0; i < g.size(); ++i) os << "  " << i << ";\n";
    for (auto [i, j] : g.edges()) os << "  " << i << " -- " << j << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace colnet
