#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace ramified::testgen {

EmbeddedNetwork random_network(Rng& rng, int vertex_count, int extra_edges) {
    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>(vertex_count));
    std::set<std::pair<int, int>> used;
    for (int i = 0; i < vertex_count; ++i)
        vertices.push_back({rng.range(0.0, 1.0), rng.range(0.0, 1.0)});

    std::vector<Edge> edges;
    for (int v = 1; v < vertex_count; ++v) {
        const int u = static_cast<int>(rng.below(static_cast<std::size_t>(v)));
        if (rng.unit() < 0.5) {
            edges.push_back({u, v});
            used.insert({u, v});
        } else {
            edges.push_back({v, u});
            used.insert({v, u});
        }
    }
    for (int attempt = 0; attempt < 20 * std::max(1, extra_edges) && extra_edges > 0; ++attempt) {
        const int a = static_cast<int>(rng.below(static_cast<std::size_t>(vertex_count)));
        const int b = static_cast<int>(rng.below(static_cast<std::size_t>(vertex_count)));
        if (a == b || used.count({a, b})) continue;
        edges.push_back({a, b});
        used.insert({a, b});
        --extra_edges;
    }
    return EmbeddedNetwork::make(2, std::move(vertices), std::move(edges));
}

namespace {

std::vector<std::vector<int>> undirected_adjacency(const EmbeddedNetwork& net) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(net.vertex_count()));
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : net.edges()) {
        const auto key = std::minmax(e.tail, e.head);
        if (!seen.insert({key.first, key.second}).second) continue;
        adj[static_cast<std::size_t>(e.tail)].push_back(e.head);
        adj[static_cast<std::size_t>(e.head)].push_back(e.tail);
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());
    return adj;
}

std::vector<int> random_walk(Rng& rng, const std::vector<std::vector<int>>& adj, int start,
                             int steps, bool allow_revisit) {
    std::vector<int> path{start};
    std::set<std::pair<int, int>> walked;
    int at = start;
    for (int s = 0; s < steps; ++s) {
        std::vector<int> options;
        for (int next : adj[static_cast<std::size_t>(at)]) {
            const auto key = std::minmax(at, next);
            if (!allow_revisit && walked.count({key.first, key.second})) continue;
            options.push_back(next);
        }
        if (options.empty()) break;
        const int next = options[rng.below(options.size())];
        walked.insert({std::min(at, next), std::max(at, next)});
        path.push_back(next);
        at = next;
    }
    return path;
}

std::vector<IrrigationPlan::WeightedCurve> weighted(Rng& rng, std::vector<std::vector<int>> paths) {
    std::vector<double> w(paths.size());
    double total = 0.0;
    for (double& x : w) {
        x = rng.range(0.2, 1.0);
        total += x;
    }
    std::vector<IrrigationPlan::WeightedCurve> curves;
    curves.reserve(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
        curves.push_back({w[i] / total, Curve::make(std::move(paths[i]))});
    return curves;
}

}  // namespace

IrrigationPlan random_plan(Rng& rng, const EmbeddedNetwork& net, int curve_count, int max_steps,
                           bool allow_revisit) {
    const auto adj = undirected_adjacency(net);
    std::vector<std::vector<int>> paths;
    for (int c = 0; c < curve_count; ++c) {
        const int start = static_cast<int>(rng.below(static_cast<std::size_t>(net.vertex_count())));
        paths.push_back(random_walk(rng, adj, start, rng.int_range(0, max_steps), allow_revisit));
    }
    return IrrigationPlan::make(net, weighted(rng, std::move(paths)));
}

IrrigationPlan random_looping_plan(Rng& rng, const EmbeddedNetwork& net, int curve_count,
                                   int max_steps) {
    const auto adj = undirected_adjacency(net);
    std::vector<std::vector<int>> paths;
    for (int c = 0; c < curve_count; ++c) {
        const int start = static_cast<int>(rng.below(static_cast<std::size_t>(net.vertex_count())));
        std::vector<int> path = random_walk(rng, adj, start, rng.int_range(1, max_steps), true);
        if (c == 0) {
            // Force an out-and-back so some undirected edge repeats.
            if (path.size() >= 2) {
                const int last = path.back();
                const int prev = path[path.size() - 2];
                path.push_back(prev);
                path.push_back(last);
            } else {
                const int nb = adj[static_cast<std::size_t>(path[0])].front();
                path.push_back(nb);
                path.push_back(path[0]);
                path.push_back(nb);
            }
        }
        paths.push_back(std::move(path));
    }
    return IrrigationPlan::make(net, weighted(rng, std::move(paths)));
}

RandomFlow random_kirchhoff_flow(Rng& rng, int vertex_count, int extra_edges, int path_count,
                                 int cycle_count) {
    const EmbeddedNetwork net = random_network(rng, vertex_count, extra_edges);
    const auto adj = undirected_adjacency(net);

    std::vector<double> signed_weights(static_cast<std::size_t>(net.edge_count()), 0.0);
    auto add_step = [&](int a, int b, double w) {
        if (auto id = net.find_edge(a, b))
            signed_weights[static_cast<std::size_t>(*id)] += w;
        else
            signed_weights[static_cast<std::size_t>(*net.find_edge(b, a))] -= w;
    };

    std::vector<std::vector<int>> paths;
    std::vector<double> weights(static_cast<std::size_t>(path_count));
    double total = 0.0;
    for (int p = 0; p < path_count; ++p) {
        const int start = static_cast<int>(rng.below(static_cast<std::size_t>(vertex_count)));
        std::vector<int> walk = random_walk(rng, adj, start, rng.int_range(0, 6), true);
        std::vector<int> simple;  // vertex loop erasure keeps the path simple
        for (int v : walk) {
            auto it = std::find(simple.begin(), simple.end(), v);
            if (it != simple.end())
                simple.erase(it + 1, simple.end());
            else
                simple.push_back(v);
        }
        paths.push_back(std::move(simple));
        weights[static_cast<std::size_t>(p)] = rng.range(0.2, 1.0);
        total += weights[static_cast<std::size_t>(p)];
    }
    std::vector<Atom> mu_atoms, nu_atoms;
    for (int p = 0; p < path_count; ++p) {
        const double w = weights[static_cast<std::size_t>(p)] / total;
        const auto& path = paths[static_cast<std::size_t>(p)];
        for (std::size_t i = 0; i + 1 < path.size(); ++i) add_step(path[i], path[i + 1], w);
        mu_atoms.push_back({net.vertex(path.front()), w});
        nu_atoms.push_back({net.vertex(path.back()), w});
    }

    int injected = 0;
    for (int c = 0; c < cycle_count; ++c) {
        const int start = static_cast<int>(rng.below(static_cast<std::size_t>(vertex_count)));
        std::vector<int> walk = random_walk(rng, adj, start, 12, true);
        std::vector<int> seenpos(static_cast<std::size_t>(vertex_count), -1);
        int loop_from = -1, loop_at = -1;
        for (std::size_t i = 0; i < walk.size(); ++i) {
            if (seenpos[static_cast<std::size_t>(walk[i])] >= 0) {
                loop_from = seenpos[static_cast<std::size_t>(walk[i])];
                loop_at = static_cast<int>(i);
                break;
            }
            seenpos[static_cast<std::size_t>(walk[i])] = static_cast<int>(i);
        }
        if (loop_from < 0) continue;
        const double w = rng.range(0.05, 0.3);
        for (int i = loop_from; i < loop_at; ++i)
            add_step(walk[static_cast<std::size_t>(i)], walk[static_cast<std::size_t>(i) + 1], w);
        ++injected;
    }

    RandomFlow rf;
    rf.flow = FlowField::make(net, std::move(signed_weights));
    rf.mu = AtomicMeasure::make(2, std::move(mu_atoms));
    rf.nu = AtomicMeasure::make(2, std::move(nu_atoms));
    rf.cycles_injected = injected;
    return rf;
}

double y_branch_cost(double x, double alpha) {
    const Point b{x, 0.0};
    const Point source{0.0, 0.0};
    const Point y1{1.0, 1.0};
    const Point y2{1.0, -1.0};
    return std::pow(1.0, alpha) * distance(source, b) +
           std::pow(0.5, alpha) * (distance(b, y1) + distance(b, y2));
}

GridSearchResult y_branch_grid_search(double alpha) {
    double lo = 0.0, hi = 1.0;
    double best_x = 0.0;
    double best_cost = y_branch_cost(0.0, alpha);
    double step = 1e-2;
    while (step >= 0.5e-6) {
        for (double x = lo; x <= hi + step / 2; x += step) {
            const double c = y_branch_cost(x, alpha);
            if (c < best_cost) {
                best_cost = c;
                best_x = x;
            }
        }
        lo = std::max(0.0, best_x - 2 * step);
        hi = std::min(1.0, best_x + 2 * step);
        step /= 10.0;
    }
    return {best_x, best_cost};
}

double assignment_cost(const std::vector<Point>& sources, const std::vector<Point>& sinks) {
    const std::size_t n = sources.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            c += distance(sources[i], sinks[perm[i]]) / static_cast<double>(n);
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

long brute_force_topology_count(int terminal_count, int max_steiner) {
    long count = 0;
    for (int s = 0; s <= max_steiner; ++s) {
        const int n = terminal_count + s;
        if (n < 2) continue;
        std::vector<std::pair<int, int>> all;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) all.push_back({a, b});
        const int m = static_cast<int>(all.size());
        const int need = n - 1;
        std::vector<int> pick(static_cast<std::size_t>(need));
        std::set<std::vector<std::pair<int, int>>> classes;

        std::function<void(int, int)> rec = [&](int from, int chosen) {
            if (chosen == need) {
                std::vector<int> root(static_cast<std::size_t>(n));
                std::iota(root.begin(), root.end(), 0);
                std::function<int(int)> find = [&](int v) {
                    while (root[static_cast<std::size_t>(v)] != v)
                        v = root[static_cast<std::size_t>(v)] =
                            root[static_cast<std::size_t>(root[static_cast<std::size_t>(v)])];
                    return v;
                };
                std::vector<int> deg(static_cast<std::size_t>(n), 0);
                int merges = 0;
                for (int idx : pick) {
                    const auto& [a, b] = all[static_cast<std::size_t>(idx)];
                    deg[static_cast<std::size_t>(a)]++;
                    deg[static_cast<std::size_t>(b)]++;
                    const int ra = find(a), rb = find(b);
                    if (ra != rb) {
                        root[static_cast<std::size_t>(ra)] = rb;
                        ++merges;
                    }
                }
                if (merges != n - 1) return;
                for (int v = terminal_count; v < n; ++v)
                    if (deg[static_cast<std::size_t>(v)] < 3) return;
                std::vector<int> perm(static_cast<std::size_t>(s));
                std::iota(perm.begin(), perm.end(), 0);
                std::vector<std::pair<int, int>> best;
                do {
                    std::vector<std::pair<int, int>> mapped;
                    for (int idx : pick) {
                        auto [a, b] = all[static_cast<std::size_t>(idx)];
                        if (a >= terminal_count)
                            a = terminal_count + perm[static_cast<std::size_t>(a - terminal_count)];
                        if (b >= terminal_count)
                            b = terminal_count + perm[static_cast<std::size_t>(b - terminal_count)];
                        mapped.push_back(std::minmax(a, b));
                    }
                    std::sort(mapped.begin(), mapped.end());
                    if (best.empty() || mapped < best) best = std::move(mapped);
                } while (std::next_permutation(perm.begin(), perm.end()));
                classes.insert(best);
                return;
            }
            for (int i = from; i < m; ++i) {
                pick[static_cast<std::size_t>(chosen)] = i;
                rec(i + 1, chosen + 1);
            }
        };
        rec(0, 0);
        count += static_cast<long>(classes.size());
    }
    return count;
}

double reconstruction_error(const FlowField& input, const IrrigationPlan& plan,
                            const FlowField& residual) {
    const PlanFlow pf = plan_to_flow(plan);
    double worst = 0.0;
    for (int e = 0; e < input.network().edge_count(); ++e) {
        const Edge& edge = input.network().edge(e);
        double recon = residual.weight(e);
        for (int f = 0; f < pf.flow.network().edge_count(); ++f) {
            const Edge& pe = pf.flow.network().edge(f);
            if (pe.tail == edge.tail && pe.head == edge.head) recon += pf.flow.weight(f);
        }
        worst = std::max(worst, std::abs(recon - input.weight(e)));
    }
    return worst;
}

}  // namespace ramified::testgen
