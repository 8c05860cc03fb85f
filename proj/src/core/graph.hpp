#pragma once

#include <utility>
#include <vector>

namespace strataflow {

/// Ordered node pair (from, to); nodes are 0-based internally.
struct Arc {
    int from = 0;
    int to = 0;

    friend bool operator==(const Arc& a, const Arc& b) {
        return a.from == b.from && a.to == b.to;
    }
};

/// Undirected connected graph with its derived arc set.
///
/// Every undirected edge {i,j} contributes the two arcs (i,j) and (j,i);
/// arcs are kept sorted lexicographically by (from, to), and every
/// arc-indexed vector in the library binds to that order.
class Topology {
public:
    /// Validates and builds; edges are unordered 0-based pairs.
    /// Throws ConfigError on self loops, duplicate edges, out-of-range
    /// labels, or a disconnected graph.
    static Topology build(int node_count, const std::vector<std::pair<int, int>>& edges);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(arcs_.size()) / 2; }
    int arc_count() const { return static_cast<int>(arcs_.size()); }

    const std::vector<Arc>& arcs() const { return arcs_; }

    /// Position of arc (from, to) in arcs(), or -1 if absent.
    int arc_index(int from, int to) const;

    /// Sorted neighbor list of node i.
    const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }

    bool adjacent(int i, int j) const { return arc_index(i, j) >= 0; }

    int max_degree() const;

private:
    Topology() = default;

    int node_count_ = 0;
    std::vector<Arc> arcs_;                    // lexicographic by (from, to)
    std::vector<std::vector<int>> neighbors_;  // per node, sorted
    std::vector<std::vector<int>> arc_lookup_; // arc_lookup_[i][k] = index of (i, neighbors_[i][k])
};

/// Arc-indexed nonnegative outflows, aligned with Topology::arcs().
using FlowVector = std::vector<double>;

/// Net inflow per node: component i is sum over neighbors j of
/// (delta_ji - delta_ij). Components sum to zero up to rounding.
std::vector<double> apply_incidence(const Topology& topo, const FlowVector& delta);

/// Directed graph of arcs carrying flow above `tol`, with an acyclicity
/// verdict from a topological sort.
struct SupportFlowGraph {
    std::vector<Arc> arcs;
    bool acyclic = true;
    std::vector<int> topo_order; // valid only when acyclic
};

SupportFlowGraph support_flow_graph(const Topology& topo, const FlowVector& delta,
                                    double tol = 1e-9);

/// One weakly connected block of a reallocation pattern: mass from the
/// origin nodes is spread over the destination nodes.
struct OdComponent {
    std::vector<int> origins;      // sorted
    std::vector<int> destinations; // sorted
};

struct OdDecomposition {
    std::vector<OdComponent> components;        // ordered by smallest origin
    std::vector<int> uncovered_destinations;    // nodes no pattern arc points at
};

/// Splits a reallocation pattern (arcs of the graph plus self pairs (i,i))
/// into origin/destination blocks. Each node is doubled into an origin
/// copy and a destination copy; pattern arcs connect origin copies to
/// destination copies, and weakly connected components are read off with
/// union-find. Throws ConfigError when the pattern contains a pair that is
/// neither a graph arc nor a self pair.
OdDecomposition od_decompose(const Topology& topo, const std::vector<Arc>& pattern);

} // namespace strataflow
