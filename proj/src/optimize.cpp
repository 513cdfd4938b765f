#include "ramified/optimize.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace ramified {

namespace {

constexpr double kDegenerateWeight = 1e-12;
constexpr double kCoincidenceTol = 1e-12;

std::pair<int, int> undirected(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::uint64_t rng_below(std::mt19937_64& g, std::uint64_t n) { return n ? g() % n : 0; }

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& g) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[static_cast<std::size_t>(rng_below(g, i))]);
}

}  // namespace

Topology Topology::make(std::vector<Terminal> terminals, int steiner_count,
                        std::vector<std::pair<int, int>> tree_edges) {
    if (steiner_count < 0) fail(Errc::NotATree, "steiner count must be >= 0");
    const int n = static_cast<int>(terminals.size()) + steiner_count;
    if (!terminals.empty()) {
        const std::size_t dim = terminals[0].p.size();
        for (const Terminal& t : terminals) {
            if (t.p.size() != dim) fail(Errc::DimensionMismatch, "terminal dimension mismatch");
            if (!finite_point(t.p)) fail(Errc::NotATree, "terminal coordinates must be finite");
        }
    }
    for (auto& [a, b] : tree_edges) {
        if (a < 0 || a >= n || b < 0 || b >= n || a == b)
            fail(Errc::NotATree, "tree edge endpoint out of range");
        if (a > b) std::swap(a, b);
    }
    Topology t;
    t.terminals_ = std::move(terminals);
    t.steiner_count_ = steiner_count;
    t.edges_ = std::move(tree_edges);
    return t;
}

std::vector<std::pair<int, int>> Topology::canonical_key() const {
    const int T = terminal_count();
    std::vector<int> perm(static_cast<std::size_t>(steiner_count_));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<int, int>> best;
    do {
        std::vector<std::pair<int, int>> mapped;
        mapped.reserve(edges_.size());
        auto relabel = [&](int v) { return v < T ? v : T + perm[static_cast<std::size_t>(v - T)]; };
        for (const auto& [a, b] : edges_) mapped.push_back(undirected(relabel(a), relabel(b)));
        std::sort(mapped.begin(), mapped.end());
        if (best.empty() || mapped < best) best = std::move(mapped);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best.empty() && !edges_.empty()) {
        best = edges_;
        std::sort(best.begin(), best.end());
    }
    return best;
}

TreeWeights tree_weights(const Topology& t) {
    const int n = t.vertex_count();
    const auto& edges = t.edges();
    if (static_cast<int>(edges.size()) != std::max(0, n - 1))
        fail(Errc::NotATree, "a tree on " + std::to_string(n) + " vertices needs " +
                                 std::to_string(std::max(0, n - 1)) + " edges");

    double total = 0.0;
    for (const Terminal& term : t.terminals()) total += term.mass;
    if (std::abs(total) > 1e-9)
        fail(Errc::UnbalancedMass, "terminal masses sum to " + std::to_string(total));

    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));  // (neighbor, edge id)
    for (std::size_t i = 0; i < edges.size(); ++i) {
        adj[static_cast<std::size_t>(edges[i].first)].push_back({edges[i].second, static_cast<int>(i)});
        adj[static_cast<std::size_t>(edges[i].second)].push_back({edges[i].first, static_cast<int>(i)});
    }

    std::vector<int> order, parent_edge(static_cast<std::size_t>(n), -1),
        parent(static_cast<std::size_t>(n), -1);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    if (n > 0) {
        order.push_back(0);
        seen[0] = true;
        for (std::size_t q = 0; q < order.size(); ++q) {
            const int v = order[q];
            for (const auto& [w, eid] : adj[static_cast<std::size_t>(v)]) {
                if (seen[static_cast<std::size_t>(w)]) continue;
                seen[static_cast<std::size_t>(w)] = true;
                parent[static_cast<std::size_t>(w)] = v;
                parent_edge[static_cast<std::size_t>(w)] = eid;
                order.push_back(w);
            }
        }
        if (static_cast<int>(order.size()) != n) fail(Errc::NotATree, "tree edges are disconnected");
    }

    std::vector<double> subtree(static_cast<std::size_t>(n), 0.0);
    for (int v = 0; v < n; ++v)
        subtree[static_cast<std::size_t>(v)] =
            v < t.terminal_count() ? t.terminals()[static_cast<std::size_t>(v)].mass : 0.0;
    for (std::size_t q = order.size(); q-- > 1;) {
        const int v = order[q];
        subtree[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])] +=
            subtree[static_cast<std::size_t>(v)];
    }

    TreeWeights tw;
    tw.weight.resize(edges.size());
    tw.oriented.resize(edges.size());
    tw.degenerate.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        // The endpoint whose parent link is this edge spans the child side.
        const int child = (parent_edge[static_cast<std::size_t>(edges[i].second)] == static_cast<int>(i))
                              ? edges[i].second
                              : edges[i].first;
        const int other = child == edges[i].first ? edges[i].second : edges[i].first;
        const double s = subtree[static_cast<std::size_t>(child)];
        tw.weight[i] = std::abs(s);
        tw.oriented[i] = s >= 0.0 ? std::pair{child, other} : std::pair{other, child};
        tw.degenerate[i] = tw.weight[i] <= kDegenerateWeight;
    }
    return tw;
}

namespace {

struct StarNeighbor {
    int vertex;
    double coeff;
};

double star_cost(const Point& x, const std::vector<StarNeighbor>& nbrs,
                 const std::vector<Point>& positions) {
    double c = 0.0;
    for (const auto& nb : nbrs)
        c += nb.coeff * distance(x, positions[static_cast<std::size_t>(nb.vertex)]);
    return c;
}

}  // namespace

RelaxResult relax_geometry(const Topology& t, double alpha, const RelaxOptions& opts) {
    require_alpha(alpha);
    const TreeWeights tw = tree_weights(t);
    const int n = t.vertex_count();
    const int T = t.terminal_count();
    const int dim = t.dim();

    std::vector<Point> pos(static_cast<std::size_t>(n), Point(static_cast<std::size_t>(dim), 0.0));
    for (int v = 0; v < T; ++v) pos[static_cast<std::size_t>(v)] = t.terminals()[static_cast<std::size_t>(v)].p;

    std::vector<std::vector<StarNeighbor>> adj(static_cast<std::size_t>(n));
    const auto& edges = t.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (tw.degenerate[i]) continue;  // zero-weight edges carry no pull
        const double c = alpha_pow(tw.weight[i], alpha);
        adj[static_cast<std::size_t>(edges[i].first)].push_back({edges[i].second, c});
        adj[static_cast<std::size_t>(edges[i].second)].push_back({edges[i].first, c});
    }

    auto total_cost = [&]() {
        double c = 0.0;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (tw.degenerate[i]) continue;
            c += alpha_pow(tw.weight[i], alpha) *
                 distance(pos[static_cast<std::size_t>(edges[i].first)],
                          pos[static_cast<std::size_t>(edges[i].second)]);
        }
        return c;
    };

    RelaxResult result;
    if (t.steiner_count() == 0 || n == 0) {
        result.cost = total_cost();
        result.positions = std::move(pos);
        return result;
    }

    // Rubber-band initialization: steiner points at the terminal centroid,
    // then Gauss-Seidel averaging along the tree.
    Point centroid(static_cast<std::size_t>(dim), 0.0);
    for (int v = 0; v < T; ++v)
        for (int j = 0; j < dim; ++j)
            centroid[static_cast<std::size_t>(j)] += pos[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)] / T;
    for (int v = T; v < n; ++v) pos[static_cast<std::size_t>(v)] = centroid;
    for (int round = 0; round < 50; ++round) {
        for (int v = T; v < n; ++v) {
            const auto& nbrs = adj[static_cast<std::size_t>(v)];
            if (nbrs.empty()) continue;
            Point avg(static_cast<std::size_t>(dim), 0.0);
            for (const auto& nb : nbrs)
                for (int j = 0; j < dim; ++j)
                    avg[static_cast<std::size_t>(j)] +=
                        pos[static_cast<std::size_t>(nb.vertex)][static_cast<std::size_t>(j)] / static_cast<double>(nbrs.size());
            pos[static_cast<std::size_t>(v)] = avg;
        }
    }

    int sweep = 0;
    bool converged = false;
    for (; sweep < opts.max_iters && !converged; ) {
        ++sweep;
        double max_disp = 0.0;
        for (int v = T; v < n; ++v) {
            const auto& nbrs = adj[static_cast<std::size_t>(v)];
            if (nbrs.empty()) continue;
            Point& p = pos[static_cast<std::size_t>(v)];

            double near_coeff = 0.0;
            Point pull(static_cast<std::size_t>(dim), 0.0);
            double weight_sum = 0.0;
            Point weighted(static_cast<std::size_t>(dim), 0.0);
            for (const auto& nb : nbrs) {
                const Point& q = pos[static_cast<std::size_t>(nb.vertex)];
                const double d = distance(p, q);
                if (d < kCoincidenceTol) {
                    near_coeff += nb.coeff;
                    continue;
                }
                const double inv = nb.coeff / d;
                weight_sum += inv;
                for (int j = 0; j < dim; ++j) {
                    weighted[static_cast<std::size_t>(j)] += inv * q[static_cast<std::size_t>(j)];
                    pull[static_cast<std::size_t>(j)] += inv * (q[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(j)]);
                }
            }

            Point candidate = p;
            if (near_coeff > 0.0) {
                // Sitting on a neighbor: move only if the other pulls beat the
                // coincident coefficient (subgradient test), along the pull.
                double g = 0.0;
                for (int j = 0; j < dim; ++j) g += pull[static_cast<std::size_t>(j)] * pull[static_cast<std::size_t>(j)];
                g = std::sqrt(g);
                if (g <= near_coeff + kCoincidenceTol || weight_sum <= 0.0) continue;
                const double step = (g - near_coeff) / (g * weight_sum);
                for (int j = 0; j < dim; ++j)
                    candidate[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(j)] + step * pull[static_cast<std::size_t>(j)];
            } else if (weight_sum > 0.0) {
                for (int j = 0; j < dim; ++j)
                    candidate[static_cast<std::size_t>(j)] = weighted[static_cast<std::size_t>(j)] / weight_sum;
            } else {
                continue;
            }

            // Step safeguard: halve toward the current point until the local
            // star cost does not increase.
            const double before = star_cost(p, nbrs, pos);
            bool ok = false;
            for (int halving = 0; halving < 40; ++halving) {
                if (star_cost(candidate, nbrs, pos) <= before) {
                    ok = true;
                    break;
                }
                for (int j = 0; j < dim; ++j)
                    candidate[static_cast<std::size_t>(j)] =
                        0.5 * (candidate[static_cast<std::size_t>(j)] + p[static_cast<std::size_t>(j)]);
            }
            if (!ok) continue;
            max_disp = std::max(max_disp, distance(candidate, p));
            p = candidate;
        }
        result.cost_history.push_back(total_cost());
        if (max_disp < opts.tol) converged = true;
    }
    result.sweeps = sweep;
    result.iteration_limit = !converged;

    // Collapse probe: snapping a steiner point onto a neighbor is accepted
    // whenever it does not increase the cost (degenerate-branch handling).
    bool changed = true;
    int rounds = 0;
    while (changed && rounds++ < 4 * (n - T + 1)) {
        changed = false;
        for (int v = T; v < n; ++v) {
            const auto& nbrs = adj[static_cast<std::size_t>(v)];
            for (const auto& nb : nbrs) {
                const Point& q = pos[static_cast<std::size_t>(nb.vertex)];
                if (pos[static_cast<std::size_t>(v)] == q) continue;
                const double before = star_cost(pos[static_cast<std::size_t>(v)], nbrs, pos);
                const double after = star_cost(q, nbrs, pos);
                if (after <= before + 1e-12 * std::max(1.0, before)) {
                    pos[static_cast<std::size_t>(v)] = q;
                    changed = true;
                }
            }
        }
    }

    result.cost = total_cost();
    result.positions = std::move(pos);
    if (!result.cost_history.empty() && result.cost < result.cost_history.back())
        result.cost_history.push_back(result.cost);
    return result;
}

double steiner_stationarity(const Topology& t, const TreeWeights& tw, double alpha,
                            const std::vector<Point>& positions) {
    const int n = t.vertex_count();
    const int T = t.terminal_count();
    const int dim = t.dim();
    const auto& edges = t.edges();
    double worst = 0.0;
    for (int v = T; v < n; ++v) {
        Point pull(static_cast<std::size_t>(dim), 0.0);
        bool coincident = false;
        bool any = false;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (tw.degenerate[i]) continue;
            int other = -1;
            if (edges[i].first == v)
                other = edges[i].second;
            else if (edges[i].second == v)
                other = edges[i].first;
            else
                continue;
            any = true;
            const Point& p = positions[static_cast<std::size_t>(v)];
            const Point& q = positions[static_cast<std::size_t>(other)];
            const double d = distance(p, q);
            if (d < 1e-9) {
                coincident = true;
                break;
            }
            const double c = alpha_pow(tw.weight[i], alpha);
            for (int j = 0; j < dim; ++j)
                pull[static_cast<std::size_t>(j)] +=
                    c * (q[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(j)]) / d;
        }
        if (!any || coincident) continue;
        double norm = 0.0;
        for (int j = 0; j < dim; ++j)
            norm += pull[static_cast<std::size_t>(j)] * pull[static_cast<std::size_t>(j)];
        worst = std::max(worst, std::sqrt(norm));
    }
    return worst;
}

std::vector<Terminal> net_terminals(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    if (!mu.empty() && !nu.empty() && mu.dim() != nu.dim())
        fail(Errc::DimensionMismatch, "marginals differ in dimension");
    std::map<Point, double> net;
    for (const Atom& a : mu.atoms()) net[a.p] += a.mass;
    for (const Atom& a : nu.atoms()) net[a.p] -= a.mass;
    std::vector<Terminal> terminals;
    for (const auto& [p, m] : net)
        if (std::abs(m) > kDegenerateWeight) terminals.push_back({p, m});
    return terminals;
}

namespace {

std::vector<std::pair<int, int>> prufer_decode(const std::vector<int>& seq, int n) {
    std::vector<int> deg(static_cast<std::size_t>(n), 1);
    for (int a : seq) deg[static_cast<std::size_t>(a)]++;
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n) - 1);
    for (int a : seq) {
        int leaf = -1;
        for (int v = 0; v < n; ++v)
            if (!done[static_cast<std::size_t>(v)] && deg[static_cast<std::size_t>(v)] == 1) {
                leaf = v;
                break;
            }
        edges.push_back(undirected(leaf, a));
        done[static_cast<std::size_t>(leaf)] = true;
        deg[static_cast<std::size_t>(a)]--;
    }
    int u = -1, w = -1;
    for (int v = 0; v < n; ++v) {
        if (done[static_cast<std::size_t>(v)]) continue;
        if (u < 0)
            u = v;
        else
            w = v;
    }
    edges.push_back(undirected(u, w));
    return edges;
}

void generate_prufer(int n, int T, int steiner, const std::function<void(const std::vector<int>&)>& emit) {
    const int len = n - 2;
    std::vector<int> seq(static_cast<std::size_t>(len), 0);
    std::vector<int> count(static_cast<std::size_t>(steiner), 0);
    auto needed = [&]() {
        int need = 0;
        for (int c : count) need += std::max(0, 2 - c);
        return need;
    };
    std::function<void(int)> rec = [&](int posn) {
        if (needed() > len - posn) return;
        if (posn == len) {
            emit(seq);
            return;
        }
        for (int v = 0; v < n; ++v) {
            seq[static_cast<std::size_t>(posn)] = v;
            if (v >= T) count[static_cast<std::size_t>(v - T)]++;
            rec(posn + 1);
            if (v >= T) count[static_cast<std::size_t>(v - T)]--;
        }
    };
    rec(0);
}

}  // namespace

void enumerate_topologies(const std::vector<Terminal>& terminals, int max_steiner,
                          const std::function<void(const Topology&)>& yield,
                          const EnumerationCaps& caps) {
    const int T = static_cast<int>(terminals.size());
    if (T > caps.max_terminals)
        fail(Errc::ResourceLimit, "instance has " + std::to_string(T) + " terminals, cap " +
                                      std::to_string(caps.max_terminals));
    if (max_steiner > caps.max_steiner)
        fail(Errc::ResourceLimit, "steiner budget exceeds the cap of " +
                                      std::to_string(caps.max_steiner));
    if (max_steiner < 0) max_steiner = 0;
    if (T == 0) return;
    if (T == 1) {
        yield(Topology::make(terminals, 0, {}));
        return;
    }

    std::set<std::vector<std::pair<int, int>>> seen;
    for (int s = 0; s <= max_steiner; ++s) {
        const int n = T + s;
        generate_prufer(n, T, s, [&](const std::vector<int>& seq) {
            Topology topo = Topology::make(terminals, s, prufer_decode(seq, n));
            auto key = topo.canonical_key();
            if (seen.insert(key).second) yield(Topology::make(terminals, s, std::move(key)));
        });
    }
}

std::vector<Topology> enumerate_topologies(const AtomicMeasure& mu, const AtomicMeasure& nu,
                                           int max_steiner, const EnumerationCaps& caps) {
    std::vector<Topology> out;
    enumerate_topologies(net_terminals(mu, nu), max_steiner,
                         [&](const Topology& t) { out.push_back(t); }, caps);
    return out;
}

FlowField topology_flow(const Topology& t, const TreeWeights& tw,
                        const std::vector<Point>& positions,
                        const std::vector<Point>& extra_vertices, double merge_tol) {
    const int T = t.terminal_count();
    const int n = t.vertex_count();
    const int dim = t.dim() > 0 ? t.dim() : (extra_vertices.empty() ? 1 : static_cast<int>(extra_vertices[0].size()));

    // Terminals keep their own (exact) representatives; steiner vertices merge
    // into whatever representative they landed on.
    std::vector<Point> reps;
    std::vector<int> rep_of(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < T; ++v) {
        rep_of[static_cast<std::size_t>(v)] = static_cast<int>(reps.size());
        reps.push_back(positions[static_cast<std::size_t>(v)]);
    }
    for (int v = T; v < n; ++v) {
        int found = -1;
        for (std::size_t r = 0; r < reps.size(); ++r)
            if (distance(reps[r], positions[static_cast<std::size_t>(v)]) <= merge_tol) {
                found = static_cast<int>(r);
                break;
            }
        if (found < 0) {
            found = static_cast<int>(reps.size());
            reps.push_back(positions[static_cast<std::size_t>(v)]);
        }
        rep_of[static_cast<std::size_t>(v)] = found;
    }

    std::map<std::pair<int, int>, double> net;
    for (std::size_t i = 0; i < t.edges().size(); ++i) {
        if (tw.degenerate[i]) continue;
        const auto [from, to] = tw.oriented[i];
        const int a = rep_of[static_cast<std::size_t>(from)];
        const int b = rep_of[static_cast<std::size_t>(to)];
        if (a == b) continue;
        net[undirected(a, b)] += (a < b) ? tw.weight[i] : -tw.weight[i];
    }

    // Keep terminal representatives and anything carrying an edge; collapsed
    // steiner leftovers vanish.
    std::vector<bool> keep(reps.size(), false);
    for (int v = 0; v < T; ++v) keep[static_cast<std::size_t>(rep_of[static_cast<std::size_t>(v)])] = true;
    for (const auto& [key, w] : net)
        if (std::abs(w) > kDegenerateWeight) {
            keep[static_cast<std::size_t>(key.first)] = true;
            keep[static_cast<std::size_t>(key.second)] = true;
        }

    std::vector<int> compact(reps.size(), -1);
    std::vector<Point> vertices;
    for (std::size_t r = 0; r < reps.size(); ++r)
        if (keep[r]) {
            compact[r] = static_cast<int>(vertices.size());
            vertices.push_back(reps[r]);
        }
    for (const Point& p : extra_vertices) {
        bool exists = false;
        for (const Point& q : vertices)
            if (q == p) {
                exists = true;
                break;
            }
        if (!exists) vertices.push_back(p);
    }

    std::vector<Edge> edges;
    std::vector<double> weights;
    for (const auto& [key, w] : net) {
        if (std::abs(w) <= kDegenerateWeight) continue;
        const int a = compact[static_cast<std::size_t>(key.first)];
        const int b = compact[static_cast<std::size_t>(key.second)];
        edges.push_back(w > 0.0 ? Edge{a, b} : Edge{b, a});
        weights.push_back(std::abs(w));
    }
    return FlowField::make(EmbeddedNetwork::make(dim, std::move(vertices), std::move(edges)),
                           std::move(weights));
}

namespace {

struct TreeState {
    int steiner = 0;
    std::vector<std::pair<int, int>> edges;
};

/// Drops degree-0/1 steiner vertices and contracts degree-2 ones, then
/// renumbers steiner ids compactly.
TreeState canonicalize_tree(int T, TreeState st) {
    bool changed = true;
    while (changed) {
        changed = false;
        const int n = T + st.steiner;
        std::vector<int> deg(static_cast<std::size_t>(n), 0);
        for (const auto& [a, b] : st.edges) {
            deg[static_cast<std::size_t>(a)]++;
            deg[static_cast<std::size_t>(b)]++;
        }
        for (int s = T; s < n && !changed; ++s) {
            if (deg[static_cast<std::size_t>(s)] >= 3) continue;
            changed = true;
            std::vector<int> nbrs;
            std::vector<std::pair<int, int>> rest;
            for (const auto& e : st.edges) {
                if (e.first == s)
                    nbrs.push_back(e.second);
                else if (e.second == s)
                    nbrs.push_back(e.first);
                else
                    rest.push_back(e);
            }
            if (nbrs.size() == 2) rest.push_back(undirected(nbrs[0], nbrs[1]));
            // Remove vertex s: shift ids above it down by one.
            for (auto& [a, b] : rest) {
                if (a > s) --a;
                if (b > s) --b;
                if (a > b) std::swap(a, b);
            }
            st.edges = std::move(rest);
            st.steiner -= 1;
        }
    }
    return st;
}

struct Proposal {
    std::string label;
    TreeState state;
};

std::vector<Proposal> build_proposals(int T, const TreeState& st, int max_steiner) {
    const int n = T + st.steiner;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& [a, b] : st.edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());

    std::vector<Proposal> proposals;

    // Split a vertex: route two of its branches through a fresh steiner point.
    if (st.steiner < max_steiner) {
        for (int v = 0; v < n; ++v) {
            const auto& nb = adj[static_cast<std::size_t>(v)];
            for (std::size_t i = 0; i < nb.size(); ++i) {
                for (std::size_t j = i + 1; j < nb.size(); ++j) {
                    TreeState cand = st;
                    const int s = n;
                    std::erase(cand.edges, undirected(v, nb[i]));
                    std::erase(cand.edges, undirected(v, nb[j]));
                    cand.edges.push_back(undirected(v, s));
                    cand.edges.push_back(undirected(s, nb[i]));
                    cand.edges.push_back(undirected(s, nb[j]));
                    cand.steiner += 1;
                    proposals.push_back({"split " + std::to_string(v), std::move(cand)});
                }
            }
        }
    }

    // Contract a steiner vertex into one of its neighbors.
    for (int s = T; s < n; ++s) {
        for (int u : adj[static_cast<std::size_t>(s)]) {
            TreeState cand;
            cand.steiner = st.steiner;
            for (auto e : st.edges) {
                if (e.first == s) e.first = u;
                if (e.second == s) e.second = u;
                if (e.first == e.second) continue;
                cand.edges.push_back(undirected(e.first, e.second));
            }
            std::sort(cand.edges.begin(), cand.edges.end());
            cand.edges.erase(std::unique(cand.edges.begin(), cand.edges.end()), cand.edges.end());
            // Remove vertex s from the id space.
            for (auto& [a, b] : cand.edges) {
                if (a > s) --a;
                if (b > s) --b;
                if (a > b) std::swap(a, b);
            }
            cand.steiner -= 1;
            proposals.push_back({"contract " + std::to_string(s), std::move(cand)});
        }
    }

    // Reconnect: detach one side of an edge and reattach it elsewhere.
    for (std::size_t ei = 0; ei < st.edges.size(); ++ei) {
        const auto [a, b] = st.edges[ei];
        // Component of b with the edge removed.
        std::vector<bool> in_b(static_cast<std::size_t>(n), false);
        std::vector<int> stack{b};
        in_b[static_cast<std::size_t>(b)] = true;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if ((v == a && w == b) || (v == b && w == a)) continue;
                if (!in_b[static_cast<std::size_t>(w)]) {
                    in_b[static_cast<std::size_t>(w)] = true;
                    stack.push_back(w);
                }
            }
        }
        for (int w = 0; w < n; ++w) {
            if (!in_b[static_cast<std::size_t>(w)] && w != a) {
                TreeState cand = st;
                cand.edges[ei] = undirected(w, b);
                proposals.push_back({"reconnect", std::move(cand)});
            }
            if (in_b[static_cast<std::size_t>(w)] && w != b) {
                TreeState cand = st;
                cand.edges[ei] = undirected(w, a);
                proposals.push_back({"reconnect", std::move(cand)});
            }
        }
    }

    return proposals;
}

TreeState mst_tree(const std::vector<Terminal>& terminals) {
    const int T = static_cast<int>(terminals.size());
    struct Cand {
        double d;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < T; ++i)
        for (int j = i + 1; j < T; ++j)
            cands.push_back({distance(terminals[static_cast<std::size_t>(i)].p,
                                      terminals[static_cast<std::size_t>(j)].p),
                             i, j});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return std::tie(a.d, a.i, a.j) < std::tie(b.d, b.i, b.j);
    });
    std::vector<int> root(static_cast<std::size_t>(T));
    std::iota(root.begin(), root.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (root[static_cast<std::size_t>(v)] != v) {
            root[static_cast<std::size_t>(v)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(v)])];
            v = root[static_cast<std::size_t>(v)];
        }
        return v;
    };
    TreeState st;
    for (const Cand& c : cands) {
        const int ri = find(c.i), rj = find(c.j);
        if (ri == rj) continue;
        root[static_cast<std::size_t>(ri)] = rj;
        st.edges.push_back(undirected(c.i, c.j));
    }
    return st;
}

}  // namespace

SolveResult solve_discrete(const AtomicMeasure& mu, const AtomicMeasure& nu,
                           const SolveConfig& cfg) {
    require_alpha(cfg.alpha);
    if (cfg.moves_budget <= 0 || cfg.relax_max_iters <= 0)
        fail(Errc::ResourceLimit, "budgets must be positive");
    if (mu.dim() != nu.dim()) fail(Errc::DimensionMismatch, "marginals differ in dimension");
    if (std::abs(mu.total_mass() - 1.0) > 1e-9 || std::abs(nu.total_mass() - 1.0) > 1e-9)
        fail(Errc::TotalMassNotOne, "marginals must be probability measures");
    if (std::abs(mu.total_mass() - nu.total_mass()) > 1e-9)
        fail(Errc::Infeasible, "marginals carry different total mass");

    const std::vector<Terminal> terminals = net_terminals(mu, nu);

    // Atoms shared by mu and nu net to zero; they still need network vertices.
    std::vector<Point> shared_points;
    for (const Atom& a : mu.atoms()) {
        bool netted = true;
        for (const Terminal& t : terminals)
            if (t.p == a.p) {
                netted = false;
                break;
            }
        if (netted) shared_points.push_back(a.p);
    }

    const RelaxOptions relax_opts{cfg.relax_tol, cfg.relax_max_iters};
    SolveResult result;

    if (terminals.empty()) {
        result.flow = FlowField::make(EmbeddedNetwork::make(mu.dim(), shared_points, {}), {});
        result.cost = 0.0;
        result.trace.push_back({"identical marginals, empty flow", 0.0});
        return result;
    }

    if (cfg.mode == SolveMode::Exhaustive) {
        bool have_best = false;
        double best_cost = std::numeric_limits<double>::infinity();
        std::vector<std::pair<int, int>> best_key;
        Topology best_topo;
        TreeWeights best_tw;
        RelaxResult best_relax;
        int candidates = 0;
        enumerate_topologies(terminals, cfg.max_steiner, [&](const Topology& topo) {
            ++candidates;
            const RelaxResult rr = relax_geometry(topo, cfg.alpha, relax_opts);
            auto key = topo.canonical_key();
            if (!have_best || rr.cost < best_cost ||
                (rr.cost == best_cost && key < best_key)) {
                have_best = true;
                best_cost = rr.cost;
                best_key = std::move(key);
                best_topo = topo;
                best_tw = tree_weights(topo);
                best_relax = rr;
                result.trace.push_back({"topology " + std::to_string(candidates - 1), rr.cost});
            }
        }, cfg.caps);
        if (!have_best) fail(Errc::Infeasible, "no feasible topology found");
        result.flow = topology_flow(best_topo, best_tw, best_relax.positions, shared_points);
        result.cost = gilbert_energy(result.flow, cfg.alpha);
        result.trace.push_back({"exhaustive over " + std::to_string(candidates) + " topologies",
                                result.cost});
        return result;
    }

    // Local search from a greedy spanning tree.
    const int T = static_cast<int>(terminals.size());
    TreeState current = mst_tree(terminals);
    auto evaluate = [&](const TreeState& st)
        -> std::pair<double, RelaxResult> {
        Topology topo = Topology::make(terminals, st.steiner, st.edges);
        RelaxResult rr = relax_geometry(topo, cfg.alpha, relax_opts);
        return {rr.cost, std::move(rr)};
    };

    auto [best_cost, best_relax] = evaluate(current);
    result.trace.push_back({"greedy tree", best_cost});

    std::mt19937_64 rng(cfg.rng_seed);
    int budget = cfg.moves_budget;
    while (budget > 0) {
        std::vector<Proposal> proposals = build_proposals(T, current, cfg.max_steiner);
        shuffle_vec(proposals, rng);
        bool improved = false;
        for (Proposal& prop : proposals) {
            if (budget <= 0) break;
            --budget;
            TreeState cand = canonicalize_tree(T, std::move(prop.state));
            if (cand.steiner > cfg.max_steiner) continue;
            if (static_cast<int>(cand.edges.size()) != T + cand.steiner - 1) continue;
            double cand_cost;
            RelaxResult cand_relax;
            try {
                std::tie(cand_cost, cand_relax) = evaluate(cand);
            } catch (const Error&) {
                continue;
            }
            if (cand_cost < best_cost - 1e-10) {
                current = std::move(cand);
                best_cost = cand_cost;
                best_relax = std::move(cand_relax);
                result.trace.push_back({prop.label, best_cost});
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }

    Topology final_topo = Topology::make(terminals, current.steiner, current.edges);
    result.flow = topology_flow(final_topo, tree_weights(final_topo), best_relax.positions,
                                shared_points);
    result.cost = gilbert_energy(result.flow, cfg.alpha);
    result.trace.push_back({"local search done", result.cost});
    return result;
}

DyadicReport dyadic_tree_cost(int dim, double alpha, int levels, std::size_t atom_cap) {
    require_alpha(alpha);
    if (dim < 1) fail(Errc::DimensionMismatch, "dimension must be >= 1");
    if (levels < 0) fail(Errc::ResourceLimit, "levels must be >= 0");
    const long long bits = static_cast<long long>(dim) * levels;
    if (bits >= 62 || (std::size_t{1} << bits) > atom_cap)
        fail(Errc::ResourceLimit, "2^(d*k) leaves exceed the configured cap");

    DyadicReport report;
    for (int level = 1; level <= levels; ++level) {
        const std::size_t cells_per_axis = std::size_t{1} << level;
        const std::size_t count = std::size_t{1} << (static_cast<long long>(dim) * level);
        const double weight = std::ldexp(1.0, -dim * level);
        const double child_scale = std::ldexp(1.0, -level);
        const double parent_scale = std::ldexp(1.0, -(level - 1));

        std::vector<double> edge_costs;
        edge_costs.reserve(count);
        std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
        Point child(static_cast<std::size_t>(dim)), parent(static_cast<std::size_t>(dim));
        for (std::size_t cell = 0; cell < count; ++cell) {
            for (int j = 0; j < dim; ++j) {
                const std::size_t cj = idx[static_cast<std::size_t>(j)];
                child[static_cast<std::size_t>(j)] = (static_cast<double>(cj) + 0.5) * child_scale;
                parent[static_cast<std::size_t>(j)] = (static_cast<double>(cj / 2) + 0.5) * parent_scale;
            }
            edge_costs.push_back(alpha_pow(weight, alpha) * distance(child, parent));
            for (int j = dim - 1; j >= 0; --j) {
                if (++idx[static_cast<std::size_t>(j)] < cells_per_axis) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
        }
        report.level_costs.push_back(pairwise_sum(edge_costs));
    }
    report.total = pairwise_sum(report.level_costs);
    for (std::size_t l = 0; l + 1 < report.level_costs.size(); ++l)
        report.ratios.push_back(report.level_costs[l + 1] / report.level_costs[l]);
    return report;
}

}  // namespace ramified
