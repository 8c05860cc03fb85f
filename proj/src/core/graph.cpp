#include "graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "errors.hpp"

namespace strataflow {

namespace {

// Minimal union-find; used for connectivity validation and the
// origin-destination decomposition.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]]; // path halving
            x = parent_[x];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<int> parent_;
};

} // namespace

Topology Topology::build(int node_count, const std::vector<std::pair<int, int>>& edges) {
    if (node_count < 2) {
        throw ConfigError("graph: node count must be at least 2, got " +
                          std::to_string(node_count));
    }

    std::set<std::pair<int, int>> seen;
    UnionFind uf(node_count);

    for (const auto& [a, b] : edges) {
        if (a < 0 || a >= node_count || b < 0 || b >= node_count) {
            throw ConfigError("graph: edge {" + std::to_string(a + 1) + "," +
                              std::to_string(b + 1) + "} references a node outside 1.." +
                              std::to_string(node_count));
        }
        if (a == b) {
            throw ConfigError("graph: self loop at node " + std::to_string(a + 1));
        }
        auto key = std::minmax(a, b);
        if (!seen.insert(key).second) {
            throw ConfigError("graph: duplicate edge {" + std::to_string(key.first + 1) + "," +
                              std::to_string(key.second + 1) + "}");
        }
        uf.unite(a, b);
    }

    for (int i = 1; i < node_count; ++i) {
        if (uf.find(i) != uf.find(0)) {
            throw ConfigError("graph: not connected (node " + std::to_string(i + 1) +
                              " unreachable from node 1)");
        }
    }

    Topology t;
    t.node_count_ = node_count;
    t.neighbors_.resize(node_count);
    for (const auto& [a, b] : seen) {
        t.arcs_.push_back({a, b});
        t.arcs_.push_back({b, a});
        t.neighbors_[a].push_back(b);
        t.neighbors_[b].push_back(a);
    }
    std::sort(t.arcs_.begin(), t.arcs_.end(), [](const Arc& x, const Arc& y) {
        return x.from != y.from ? x.from < y.from : x.to < y.to;
    });
    for (auto& nbrs : t.neighbors_) std::sort(nbrs.begin(), nbrs.end());

    t.arc_lookup_.resize(node_count);
    for (int i = 0; i < node_count; ++i) {
        t.arc_lookup_[i].resize(t.neighbors_[i].size());
    }
    for (int m = 0; m < static_cast<int>(t.arcs_.size()); ++m) {
        const Arc& arc = t.arcs_[m];
        const auto& nbrs = t.neighbors_[arc.from];
        auto it = std::lower_bound(nbrs.begin(), nbrs.end(), arc.to);
        t.arc_lookup_[arc.from][it - nbrs.begin()] = m;
    }
    return t;
}

int Topology::arc_index(int from, int to) const {
    if (from < 0 || from >= node_count_ || to < 0 || to >= node_count_) return -1;
    const auto& nbrs = neighbors_[from];
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), to);
    if (it == nbrs.end() || *it != to) return -1;
    return arc_lookup_[from][it - nbrs.begin()];
}

int Topology::max_degree() const {
    int d = 0;
    for (const auto& nbrs : neighbors_) d = std::max(d, static_cast<int>(nbrs.size()));
    return d;
}

std::vector<double> apply_incidence(const Topology& topo, const FlowVector& delta) {
    if (static_cast<int>(delta.size()) != topo.arc_count()) {
        throw ConfigError("apply_incidence: flow vector has " + std::to_string(delta.size()) +
                          " entries, expected " + std::to_string(topo.arc_count()));
    }
    std::vector<double> out(topo.node_count(), 0.0);
    const auto& arcs = topo.arcs();
    for (int m = 0; m < static_cast<int>(arcs.size()); ++m) {
        out[arcs[m].from] -= delta[m];
        out[arcs[m].to] += delta[m];
    }
    return out;
}

SupportFlowGraph support_flow_graph(const Topology& topo, const FlowVector& delta, double tol) {
    if (static_cast<int>(delta.size()) != topo.arc_count()) {
        throw ConfigError("support_flow_graph: flow vector length mismatch");
    }

    SupportFlowGraph g;
    const int n = topo.node_count();
    std::vector<std::vector<int>> out(n);
    std::vector<int> indegree(n, 0);

    const auto& arcs = topo.arcs();
    for (int m = 0; m < static_cast<int>(arcs.size()); ++m) {
        if (delta[m] > tol) {
            g.arcs.push_back(arcs[m]);
            out[arcs[m].from].push_back(arcs[m].to);
            ++indegree[arcs[m].to];
        }
    }

    // Kahn's algorithm; a leftover node means a directed cycle.
    std::vector<int> queue;
    for (int i = 0; i < n; ++i) {
        if (indegree[i] == 0) queue.push_back(i);
    }
    for (size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        g.topo_order.push_back(v);
        for (int w : out[v]) {
            if (--indegree[w] == 0) queue.push_back(w);
        }
    }
    g.acyclic = static_cast<int>(g.topo_order.size()) == n;
    if (!g.acyclic) g.topo_order.clear();
    return g;
}

OdDecomposition od_decompose(const Topology& topo, const std::vector<Arc>& pattern) {
    const int n = topo.node_count();
    for (const Arc& arc : pattern) {
        const bool self = arc.from == arc.to && arc.from >= 0 && arc.from < n;
        if (!self && topo.arc_index(arc.from, arc.to) < 0) {
            throw ConfigError("od_decompose: pattern pair (" + std::to_string(arc.from + 1) +
                              "," + std::to_string(arc.to + 1) +
                              ") is neither a graph arc nor a self pair");
        }
    }

    // Doubled node set: 0..n-1 are origin copies, n..2n-1 destination copies.
    UnionFind uf(2 * n);
    std::vector<bool> is_origin(n, false), is_destination(n, false);
    for (const Arc& arc : pattern) {
        is_origin[arc.from] = true;
        is_destination[arc.to] = true;
        uf.unite(arc.from, n + arc.to);
    }

    OdDecomposition od;
    std::vector<int> comp_of_root(2 * n, -1);
    for (int i = 0; i < n; ++i) {
        if (!is_origin[i]) continue;
        int root = uf.find(i);
        if (comp_of_root[root] < 0) {
            comp_of_root[root] = static_cast<int>(od.components.size());
            od.components.push_back({});
        }
        od.components[comp_of_root[root]].origins.push_back(i);
    }
    for (int i = 0; i < n; ++i) {
        if (is_destination[i]) {
            // Every destination shares its component with at least one
            // origin (the source of the covering arc), so the slot exists.
            od.components[comp_of_root[uf.find(n + i)]].destinations.push_back(i);
        } else {
            od.uncovered_destinations.push_back(i);
        }
    }
    return od;
}

} // namespace strataflow
