#include "ramified/network.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace ramified {

EmbeddedNetwork EmbeddedNetwork::make(int dim, std::vector<Point> vertices,
                                      std::vector<Edge> edges) {
    if (dim < 1) fail(Errc::DimensionMismatch, "dimension must be >= 1");
    for (const Point& p : vertices) {
        if (static_cast<int>(p.size()) != dim)
            fail(Errc::DimensionMismatch, "vertex has " + std::to_string(p.size()) +
                                              " coordinates, expected " + std::to_string(dim));
        if (!finite_point(p)) fail(Errc::InvalidNetwork, "vertex coordinates must be finite");
    }
    const int n = static_cast<int>(vertices.size());
    std::set<std::pair<int, int>> seen;
    std::vector<double> lengths;
    lengths.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n)
            fail(Errc::InvalidNetwork, "edge endpoint out of range");
        if (e.tail == e.head) fail(Errc::InvalidNetwork, "zero-length oriented segments forbidden");
        if (!seen.insert({e.tail, e.head}).second)
            fail(Errc::InvalidNetwork, "duplicate edge (" + std::to_string(e.tail) + "," +
                                           std::to_string(e.head) + ")");
        const double len = distance(vertices[static_cast<std::size_t>(e.tail)],
                                    vertices[static_cast<std::size_t>(e.head)]);
        if (!(len > 0.0))
            fail(Errc::InvalidNetwork, "edge between coincident vertices has zero length");
        lengths.push_back(len);
    }
    EmbeddedNetwork net;
    net.dim_ = dim;
    net.vertices_ = std::move(vertices);
    net.edges_ = std::move(edges);
    net.lengths_ = std::move(lengths);
    return net;
}

std::optional<int> EmbeddedNetwork::vertex_at(const Point& p) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i] == p) return static_cast<int>(i);
    return std::nullopt;
}

std::optional<int> EmbeddedNetwork::find_edge(int tail, int head) const {
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (edges_[i].tail == tail && edges_[i].head == head) return static_cast<int>(i);
    return std::nullopt;
}

bool EmbeddedNetwork::has_undirected_edge(int a, int b) const {
    return find_edge(a, b).has_value() || find_edge(b, a).has_value();
}

}  // namespace ramified
