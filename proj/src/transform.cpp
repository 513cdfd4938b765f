#include "ramified/transform.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace ramified {

namespace {

std::pair<int, int> undirected(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

struct PairAggregate {
    double net = 0.0;  // signed along min(u,v) -> max(u,v)
    double m = 0.0;
};

std::map<std::pair<int, int>, PairAggregate> aggregate_traversals(const IrrigationPlan& p) {
    std::map<std::pair<int, int>, PairAggregate> agg;
    for (const auto& wc : p.curves()) {
        const auto& path = wc.curve.path();
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto key = undirected(path[i], path[i + 1]);
            PairAggregate& a = agg[key];
            a.net += (path[i] < path[i + 1]) ? wc.weight : -wc.weight;
            a.m += wc.weight;
        }
    }
    return agg;
}

}  // namespace

PlanFlow plan_to_flow(const IrrigationPlan& p) {
    const auto agg = aggregate_traversals(p);
    std::vector<Edge> edges;
    std::vector<double> weights;
    std::vector<double> intensity;
    for (const auto& [key, a] : agg) {
        if (a.net >= 0.0)
            edges.push_back({key.first, key.second});
        else
            edges.push_back({key.second, key.first});
        weights.push_back(std::abs(a.net));
        intensity.push_back(a.m);
    }
    PlanFlow pf;
    pf.flow = FlowField::make(
        EmbeddedNetwork::make(p.network().dim(), p.network().vertices(), std::move(edges)),
        std::move(weights));
    pf.intensity = std::move(intensity);
    return pf;
}

namespace {

constexpr double kResidueEps = 1e-13;

/// Undirected working capacity after netting anti-parallel edges: the walkable
/// direction is the dominant one; the cancelled symmetric mass belongs to the
/// cycle residual from the start.
struct PairState {
    int tail = -1;          // dominant direction tail -> head
    int head = -1;
    int dominant_edge = -1; // original edge id giving the orientation and order
    double avail = 0.0;     // remaining extractable capacity
    double extracted = 0.0;
};

}  // namespace

Decomposition flow_to_plan(const FlowField& v, const AtomicMeasure& mu, const AtomicMeasure& nu) {
    const EmbeddedNetwork& net = v.network();
    if (std::abs(mu.total_mass() - 1.0) > 1e-9 || std::abs(nu.total_mass() - 1.0) > 1e-9)
        fail(Errc::TotalMassNotOne, "flow_to_plan expects probability marginals");
    const KirchhoffReport kirchhoff = check_kirchhoff(v, mu, nu, 1e-9);
    if (!kirchhoff.ok)
        fail(Errc::KirchhoffViolation,
             "divergence does not match mu - nu (max residual " +
                 std::to_string(kirchhoff.max_residual) + ")");

    const std::size_t n = static_cast<std::size_t>(net.vertex_count());
    std::vector<double> sup(n, 0.0), dem(n, 0.0);
    for (const Atom& a : mu.atoms()) sup[static_cast<std::size_t>(*net.vertex_at(a.p))] += a.mass;
    for (const Atom& a : nu.atoms()) dem[static_cast<std::size_t>(*net.vertex_at(a.p))] += a.mass;

    // Net anti-parallel edges into single walkable pairs.
    std::map<std::pair<int, int>, std::size_t> pair_index;
    std::vector<PairState> pairs;
    for (int id = 0; id < net.edge_count(); ++id) {
        const Edge& e = net.edge(id);
        const double w = v.weight(id);
        const auto key = undirected(e.tail, e.head);
        auto [it, inserted] = pair_index.insert({key, pairs.size()});
        if (inserted) {
            pairs.push_back({e.tail, e.head, id, w, 0.0});
        } else {
            PairState& ps = pairs[it->second];
            if (w > ps.avail) {
                ps.avail = w - ps.avail;
                ps.tail = e.tail;
                ps.head = e.head;
                ps.dominant_edge = id;
            } else {
                ps.avail -= w;
            }
        }
    }
    std::vector<double> initial_capacity(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) initial_capacity[i] = pairs[i].avail;

    // Out-adjacency over walkable pairs, ordered by original edge id.
    std::vector<std::vector<std::size_t>> out(n);
    {
        std::vector<std::size_t> order(pairs.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return pairs[a].dominant_edge < pairs[b].dominant_edge;
        });
        for (std::size_t i : order) out[static_cast<std::size_t>(pairs[i].tail)].push_back(i);
    }

    std::vector<std::pair<std::vector<int>, double>> extracted_curves;

    // Mass shared by mu and nu at a vertex travels as a constant curve.
    for (std::size_t vid = 0; vid < n; ++vid) {
        const double c = std::min(sup[vid], dem[vid]);
        if (c > kResidueEps) {
            extracted_curves.push_back({{static_cast<int>(vid)}, c});
            sup[vid] -= c;
            dem[vid] -= c;
        }
    }

    std::vector<int> position(n, -1);  // vertex -> index in the current walk
    for (std::size_t start = 0; start < n; ++start) {
        while (sup[start] > kResidueEps) {
            std::vector<int> path{static_cast<int>(start)};
            std::vector<std::size_t> path_pairs;
            position[start] = 0;
            int u = static_cast<int>(start);
            bool stuck = false;
            while (true) {
                if (u != static_cast<int>(start) && dem[static_cast<std::size_t>(u)] > kResidueEps)
                    break;  // reached residual demand
                std::size_t chosen = pairs.size();
                for (std::size_t pi : out[static_cast<std::size_t>(u)]) {
                    if (pairs[pi].avail > kResidueEps) {
                        chosen = pi;
                        break;
                    }
                }
                if (chosen == pairs.size()) {
                    stuck = true;  // numeric dust only; conservation forbids this otherwise
                    break;
                }
                const int to = pairs[chosen].head;
                if (position[static_cast<std::size_t>(to)] >= 0) {
                    // Loop erasure: the loop is a directed cycle of the
                    // residual support; cancel its bottleneck in place.
                    const std::size_t at = static_cast<std::size_t>(position[static_cast<std::size_t>(to)]);
                    double c = pairs[chosen].avail;
                    for (std::size_t j = at; j < path_pairs.size(); ++j)
                        c = std::min(c, pairs[path_pairs[j]].avail);
                    pairs[chosen].avail -= c;
                    for (std::size_t j = at; j < path_pairs.size(); ++j)
                        pairs[path_pairs[j]].avail -= c;
                    for (std::size_t j = at + 1; j < path.size(); ++j)
                        position[static_cast<std::size_t>(path[j])] = -1;
                    path.resize(at + 1);
                    path_pairs.resize(at);
                    u = to;
                } else {
                    path.push_back(to);
                    position[static_cast<std::size_t>(to)] = static_cast<int>(path.size()) - 1;
                    path_pairs.push_back(chosen);
                    u = to;
                }
            }
            for (int vid : path) position[static_cast<std::size_t>(vid)] = -1;
            if (stuck) {
                assert(sup[start] <= 1e-9 && "walk stuck with real residual supply");
                sup[start] = 0.0;
                break;
            }
            double c = std::min(sup[start], dem[static_cast<std::size_t>(u)]);
            for (std::size_t pi : path_pairs) c = std::min(c, pairs[pi].avail);
            for (std::size_t pi : path_pairs) {
                pairs[pi].avail -= c;
                pairs[pi].extracted += c;
            }
            sup[start] -= c;
            dem[static_cast<std::size_t>(u)] -= c;
            extracted_curves.push_back({std::move(path), c});
        }
    }

    // Plan network: one edge per netted pair with positive capacity.
    std::vector<Edge> plan_edges;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (initial_capacity[i] > 0.0) plan_edges.push_back({pairs[i].tail, pairs[i].head});
    EmbeddedNetwork plan_net = EmbeddedNetwork::make(net.dim(), net.vertices(), std::move(plan_edges));

    std::vector<IrrigationPlan::WeightedCurve> curves;
    curves.reserve(extracted_curves.size());
    for (auto& [path, w] : extracted_curves)
        curves.push_back({w, Curve::make(std::move(path))});

    // Residual per original edge: the dominant edge keeps what extraction left
    // behind, the anti-parallel edge keeps its full (cancelled) weight.
    std::vector<double> residual(static_cast<std::size_t>(net.edge_count()));
    for (int id = 0; id < net.edge_count(); ++id) residual[static_cast<std::size_t>(id)] = v.weight(id);
    for (const PairState& ps : pairs) {
        double& r = residual[static_cast<std::size_t>(ps.dominant_edge)];
        r -= ps.extracted;
        if (r < 0.0) r = 0.0;
    }

    Decomposition d;
    d.plan = IrrigationPlan::make(std::move(plan_net), std::move(curves));
    d.cycle_residual = FlowField::make(net, std::move(residual));
    return d;
}

EquivalenceReport verify_equivalence(const IrrigationPlan& p, const FlowField& v, double alpha) {
    require_alpha(alpha);
    EquivalenceReport r;
    r.irrigation_cost = irrigation_cost(p, alpha);
    r.gilbert_energy_plan = gilbert_energy_plan(p, alpha);
    r.full_energy = full_energy(p, alpha);
    r.alpha_mass = gilbert_energy(v, alpha);

    const PlanFlow pf = plan_to_flow(p);
    for (std::size_t i = 0; i < pf.intensity.size(); ++i)
        r.max_intensity_flow_gap =
            std::max(r.max_intensity_flow_gap, pf.intensity[i] - pf.flow.weight(static_cast<int>(i)));

    const double scale = std::max({1.0, std::abs(r.irrigation_cost), std::abs(r.alpha_mass)});
    r.costs_equal = std::abs(r.irrigation_cost - r.alpha_mass) <= 1e-9 * scale;
    r.intensity_equals_flow = r.max_intensity_flow_gap <= 1e-9;
    return r;
}

CostReport evaluate_plan(const IrrigationPlan& p, double alpha) {
    require_alpha(alpha);
    CostReport report;
    report.alpha = alpha;
    report.irrigation_cost = irrigation_cost(p, alpha);
    report.gilbert_energy = gilbert_energy_plan(p, alpha);
    report.full_energy = full_energy(p, alpha);

    const PlanFlow pf = plan_to_flow(p);
    report.alpha_mass = gilbert_energy(pf.flow, alpha);

    double len = 0.0;
    for (const auto& wc : p.curves()) len += wc.weight * curve_length(wc.curve, p.network());
    report.total_length = len;
    report.stopping_time = len;

    const MultiplicityField field = multiplicities(p);
    // Both are keyed by the sorted undirected pair set of the same plan.
    assert(field.entries.size() == pf.intensity.size());
    for (std::size_t i = 0; i < field.entries.size(); ++i) {
        const auto& e = field.entries[i];
        const Edge& fe = pf.flow.network().edge(static_cast<int>(i));
        const double w = pf.flow.weight(static_cast<int>(i));
        CostReport::EdgeRow row;
        row.u = e.u;
        row.v = e.v;
        row.length = e.length;
        row.theta = e.theta;
        row.m = e.m;
        row.flow = (fe.tail == e.u) ? w : -w;
        row.intensity = pf.intensity[i];
        report.edges.push_back(row);
    }
    return report;
}

}  // namespace ramified
