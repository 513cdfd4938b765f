#include "ramified/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace ramified {

SignedAtomic SignedAtomic::make(const AtomicMeasure& positive, const AtomicMeasure& negative,
                                double tol) {
    if (positive.dim() != negative.dim() && !positive.empty() && !negative.empty())
        fail(Errc::DimensionMismatch, "signed measure parts differ in dimension");
    const int dim = positive.empty() ? (negative.empty() ? 1 : negative.dim()) : positive.dim();

    std::map<Point, double> net;
    for (const Atom& a : positive.atoms()) net[a.p] += a.mass;
    for (const Atom& a : negative.atoms()) net[a.p] -= a.mass;

    std::vector<Atom> pos, neg;
    for (const auto& [p, v] : net) {
        if (v > tol)
            pos.push_back({p, v});
        else if (v < -tol)
            neg.push_back({p, -v});
    }
    SignedAtomic s;
    s.positive_ = AtomicMeasure::make(dim, std::move(pos));
    s.negative_ = AtomicMeasure::make(dim, std::move(neg));
    return s;
}

FlowField FlowField::make(EmbeddedNetwork network, std::vector<double> signed_weights) {
    if (signed_weights.size() != static_cast<std::size_t>(network.edge_count()))
        fail(Errc::InvalidFlow, "weight array length must equal edge count");
    for (double w : signed_weights)
        if (!std::isfinite(w)) fail(Errc::InvalidFlow, "edge weights must be finite");

    std::vector<Edge> edges;
    std::vector<double> weights;
    std::map<std::pair<int, int>, std::size_t> index;
    for (int id = 0; id < network.edge_count(); ++id) {
        Edge e = network.edge(id);
        double w = signed_weights[static_cast<std::size_t>(id)];
        if (w < 0.0) {
            std::swap(e.tail, e.head);
            w = -w;
        }
        auto [it, inserted] = index.insert({{e.tail, e.head}, edges.size()});
        if (inserted) {
            edges.push_back(e);
            weights.push_back(w);
        } else {
            weights[it->second] += w;
        }
    }
    FlowField f;
    f.network_ = EmbeddedNetwork::make(network.dim(), network.vertices(), std::move(edges));
    f.weights_ = std::move(weights);
    return f;
}

FlowField FlowField::canonicalize(double tol) const {
    std::vector<Edge> edges;
    std::vector<double> weights;
    for (int id = 0; id < network_.edge_count(); ++id) {
        if (weights_[static_cast<std::size_t>(id)] > tol) {
            edges.push_back(network_.edge(id));
            weights.push_back(weights_[static_cast<std::size_t>(id)]);
        }
    }
    FlowField f;
    f.network_ = EmbeddedNetwork::make(network_.dim(), network_.vertices(), std::move(edges));
    f.weights_ = std::move(weights);
    return f;
}

double gilbert_energy(const FlowField& v, double alpha) {
    require_alpha(alpha);
    double total = 0.0;
    for (int id = 0; id < v.network().edge_count(); ++id)
        total += alpha_pow(v.weight(id), alpha) * v.network().edge_length(id);
    return total;
}

namespace {

std::map<Point, double> net_divergence_by_point(const FlowField& v) {
    const EmbeddedNetwork& net = v.network();
    std::vector<double> by_vertex(static_cast<std::size_t>(net.vertex_count()), 0.0);
    for (int id = 0; id < net.edge_count(); ++id) {
        const Edge& e = net.edge(id);
        by_vertex[static_cast<std::size_t>(e.tail)] += v.weight(id);
        by_vertex[static_cast<std::size_t>(e.head)] -= v.weight(id);
    }
    std::map<Point, double> by_point;
    for (int i = 0; i < net.vertex_count(); ++i) {
        const double w = by_vertex[static_cast<std::size_t>(i)];
        if (w != 0.0) by_point[net.vertex(i)] += w;
    }
    return by_point;
}

}  // namespace

SignedAtomic divergence(const FlowField& v) {
    std::vector<Atom> pos, neg;
    for (const auto& [p, w] : net_divergence_by_point(v)) {
        if (w > kDivergenceTol)
            pos.push_back({p, w});
        else if (w < -kDivergenceTol)
            neg.push_back({p, -w});
    }
    const int dim = v.network().dim() > 0 ? v.network().dim() : 1;
    SignedAtomic s = SignedAtomic::make(AtomicMeasure::make(dim, std::move(pos)),
                                        AtomicMeasure::make(dim, std::move(neg)));
    return s;
}

KirchhoffReport check_kirchhoff(const FlowField& v, const AtomicMeasure& mu,
                                const AtomicMeasure& nu, double tol) {
    const EmbeddedNetwork& net = v.network();
    for (const Atom& a : mu.atoms())
        if (!net.vertex_at(a.p))
            fail(Errc::UnmatchedAtom, "mu atom located at no network vertex");
    for (const Atom& a : nu.atoms())
        if (!net.vertex_at(a.p))
            fail(Errc::UnmatchedAtom, "nu atom located at no network vertex");

    std::map<Point, double> residual = net_divergence_by_point(v);
    for (const Atom& a : mu.atoms()) residual[a.p] -= a.mass;
    for (const Atom& a : nu.atoms()) residual[a.p] += a.mass;

    KirchhoffReport report;
    report.ok = true;
    for (const auto& [p, r] : residual) {
        report.max_residual = std::max(report.max_residual, std::abs(r));
        if (std::abs(r) > tol) {
            report.ok = false;
            report.residuals.push_back({p, r});
        }
    }
    return report;
}

namespace {

struct CycleSearch {
    const FlowField& v;
    std::vector<std::vector<int>> out;  // out-edge ids per vertex, ascending
    std::vector<int> state;             // 0 = unseen, 1 = on stack, 2 = done

    explicit CycleSearch(const FlowField& flow) : v(flow) {
        const EmbeddedNetwork& net = v.network();
        out.resize(static_cast<std::size_t>(net.vertex_count()));
        for (int id = 0; id < net.edge_count(); ++id)
            if (v.weight(id) > 0.0) out[static_cast<std::size_t>(net.edge(id).tail)].push_back(id);
        state.assign(static_cast<std::size_t>(net.vertex_count()), 0);
    }

    std::optional<std::vector<int>> run() {
        for (int s = 0; s < v.network().vertex_count(); ++s) {
            if (state[static_cast<std::size_t>(s)] != 0) continue;
            if (auto cycle = dfs(s)) return cycle;
        }
        return std::nullopt;
    }

    std::optional<std::vector<int>> dfs(int start) {
        // Iterative DFS; frames hold (vertex, next out index, incoming edge).
        struct Frame {
            int vertex;
            std::size_t next = 0;
            int in_edge = -1;
        };
        std::vector<Frame> stack{{start}};
        state[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& adj = out[static_cast<std::size_t>(f.vertex)];
            if (f.next == adj.size()) {
                state[static_cast<std::size_t>(f.vertex)] = 2;
                stack.pop_back();
                continue;
            }
            const int edge_id = adj[f.next++];
            const int to = v.network().edge(edge_id).head;
            if (state[static_cast<std::size_t>(to)] == 0) {
                state[static_cast<std::size_t>(to)] = 1;
                stack.push_back({to, 0, edge_id});
            } else if (state[static_cast<std::size_t>(to)] == 1) {
                // Cycle: edges entered after `to`'s frame, closed by edge_id.
                std::size_t i = stack.size();
                while (i > 0 && stack[i - 1].vertex != to) --i;
                std::vector<int> cycle;
                for (std::size_t j = i; j < stack.size(); ++j) cycle.push_back(stack[j].in_edge);
                cycle.push_back(edge_id);
                return cycle;
            }
        }
        return std::nullopt;
    }
};

}  // namespace

std::optional<std::vector<int>> find_cycle(const FlowField& v) {
    CycleSearch search(v);
    return search.run();
}

CancelResult cancel_cycles(const FlowField& v) {
    std::vector<double> weights = v.weights();
    FlowField current = v;
    int removed = 0;
    while (auto cycle = find_cycle(current)) {
        double c = std::numeric_limits<double>::infinity();
        for (int id : *cycle) c = std::min(c, weights[static_cast<std::size_t>(id)]);
        for (int id : *cycle) {
            double& w = weights[static_cast<std::size_t>(id)];
            w -= c;
            if (w < 0.0) w = 0.0;
        }
        ++removed;
        current = FlowField::make(v.network(), weights);
        weights = current.weights();
    }
    return {current, removed};
}

}  // namespace ramified
