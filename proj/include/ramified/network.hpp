#pragma once

#include <optional>
#include <vector>

#include "ramified/common.hpp"

namespace ramified {

/// Oriented segment between two vertex ids.
struct Edge {
    int tail = -1;
    int head = -1;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Shared geometric substrate for flows and plans: vertex coordinates plus
/// oriented edges. No self-loops, no zero-length edges, no duplicate
/// (tail, head) pair; the reversed pair may coexist. Immutable.
class EmbeddedNetwork {
public:
    EmbeddedNetwork() = default;

    static EmbeddedNetwork make(int dim, std::vector<Point> vertices, std::vector<Edge> edges);

    int dim() const noexcept { return dim_; }
    int vertex_count() const noexcept { return static_cast<int>(vertices_.size()); }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Point& vertex(int id) const { return vertices_[static_cast<std::size_t>(id)]; }
    const Edge& edge(int id) const { return edges_[static_cast<std::size_t>(id)]; }
    double edge_length(int id) const { return lengths_[static_cast<std::size_t>(id)]; }

    /// First vertex id with exactly these coordinates, if any.
    std::optional<int> vertex_at(const Point& p) const;

    /// Edge id for the directed pair (tail, head), if present.
    std::optional<int> find_edge(int tail, int head) const;

    /// True when {a, b} is an edge in either orientation.
    bool has_undirected_edge(int a, int b) const;

    friend bool operator==(const EmbeddedNetwork& a, const EmbeddedNetwork& b) {
        return a.dim_ == b.dim_ && a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
    }

private:
    int dim_ = 0;
    std::vector<Point> vertices_;
    std::vector<Edge> edges_;
    std::vector<double> lengths_;
};

}  // namespace ramified
