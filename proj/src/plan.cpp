#include "ramified/plan.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

namespace ramified {

namespace {

std::pair<int, int> undirected(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

Curve Curve::make(std::vector<int> path) {
    if (path.empty()) fail(Errc::InvalidPlan, "a curve needs at least one vertex");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (path[i] == path[i + 1])
            fail(Errc::InvalidPlan, "consecutive duplicate vertices in a curve path");
    Curve c;
    c.path_ = std::move(path);
    return c;
}

IrrigationPlan IrrigationPlan::make(EmbeddedNetwork network, std::vector<WeightedCurve> curves) {
    std::vector<double> weights;
    weights.reserve(curves.size());
    for (const WeightedCurve& wc : curves) {
        if (!(wc.weight > 0.0)) fail(Errc::InvalidPlan, "curve weights must be positive");
        weights.push_back(wc.weight);
        const auto& path = wc.curve.path();
        if (path.empty()) fail(Errc::InvalidPlan, "empty curve path");
        for (int vid : path)
            if (vid < 0 || vid >= network.vertex_count())
                fail(Errc::InvalidPlan, "curve path vertex id out of range");
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            if (!network.has_undirected_edge(path[i], path[i + 1]))
                fail(Errc::InvalidPlan, "curve step (" + std::to_string(path[i]) + "," +
                                            std::to_string(path[i + 1]) +
                                            ") is not a network edge");
    }
    const double total = pairwise_sum(weights);
    if (std::abs(total - 1.0) > kMassTol)
        fail(Errc::InvalidPlan, "curve weights sum to " + std::to_string(total) + ", expected 1");

    IrrigationPlan p;
    p.network_ = std::move(network);
    p.curves_ = std::move(curves);
    return p;
}

const MultiplicityField::Entry* MultiplicityField::find(int a, int b) const {
    const auto key = undirected(a, b);
    auto it = std::lower_bound(entries.begin(), entries.end(), key,
                               [](const Entry& e, const std::pair<int, int>& k) {
                                   return std::pair{e.u, e.v} < k;
                               });
    if (it != entries.end() && it->u == key.first && it->v == key.second) return &*it;
    return nullptr;
}

double curve_length(const Curve& c, const EmbeddedNetwork& net) {
    double len = 0.0;
    const auto& path = c.path();
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        len += distance(net.vertex(path[i]), net.vertex(path[i + 1]));
    return len;
}

MultiplicityField multiplicities(const IrrigationPlan& p) {
    struct Acc {
        double theta = 0.0;
        double m = 0.0;
    };
    std::map<std::pair<int, int>, Acc> acc;
    std::map<std::pair<int, int>, int> per_curve;
    for (const auto& wc : p.curves()) {
        per_curve.clear();
        const auto& path = wc.curve.path();
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            per_curve[undirected(path[i], path[i + 1])] += 1;
        for (const auto& [key, count] : per_curve) {
            Acc& a = acc[key];
            a.theta += wc.weight;
            a.m += wc.weight * count;
        }
    }
    MultiplicityField field;
    field.entries.reserve(acc.size());
    for (const auto& [key, a] : acc)
        field.entries.push_back({key.first, key.second, a.theta, a.m,
                                 distance(p.network().vertex(key.first),
                                          p.network().vertex(key.second))});
    return field;
}

double irrigation_cost(const IrrigationPlan& p, double alpha) {
    require_alpha(alpha);
    const MultiplicityField field = multiplicities(p);
    double total = 0.0;
    for (const auto& wc : p.curves()) {
        const auto& path = wc.curve.path();
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto* e = field.find(path[i], path[i + 1]);
            assert(e && e->theta > 0.0);
            if (!e || !(e->theta > 0.0)) return std::numeric_limits<double>::infinity();
            total += wc.weight * std::pow(e->theta, alpha - 1.0) * e->length;
        }
    }
    return total;
}

double gilbert_energy_plan(const IrrigationPlan& p, double alpha) {
    require_alpha(alpha);
    double total = 0.0;
    for (const auto& e : multiplicities(p).entries) total += alpha_pow(e.theta, alpha) * e.length;
    return total;
}

double full_energy(const IrrigationPlan& p, double alpha) {
    require_alpha(alpha);
    double total = 0.0;
    for (const auto& e : multiplicities(p).entries) {
        assert(e.theta > 0.0);
        total += std::pow(e.theta, alpha - 1.0) * e.m * e.length;
    }
    return total;
}

SimplicityReport is_simple(const IrrigationPlan& p) {
    SimplicityReport report;
    report.curves.reserve(p.size());
    for (const auto& wc : p.curves()) {
        const auto& path = wc.curve.path();
        std::set<int> vertices;
        std::set<std::pair<int, int>> edges;
        bool vertex_repeat = false, edge_repeat = false;
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (!vertices.insert(path[i]).second) vertex_repeat = true;
            if (i + 1 < path.size() && !edges.insert(undirected(path[i], path[i + 1])).second)
                edge_repeat = true;
        }
        report.curves.push_back({!vertex_repeat, !edge_repeat});
        report.all_simple = report.all_simple && !vertex_repeat;
        report.all_essentially_simple = report.all_essentially_simple && !edge_repeat;
    }
    return report;
}

std::pair<AtomicMeasure, AtomicMeasure> marginals(const IrrigationPlan& p) {
    std::vector<Atom> mu, nu;
    mu.reserve(p.size());
    nu.reserve(p.size());
    for (const auto& wc : p.curves()) {
        mu.push_back({p.network().vertex(wc.curve.path().front()), wc.weight});
        nu.push_back({p.network().vertex(wc.curve.path().back()), wc.weight});
    }
    const int dim = p.network().dim() > 0 ? p.network().dim() : 1;
    return {AtomicMeasure::make(dim, std::move(mu)), AtomicMeasure::make(dim, std::move(nu))};
}

namespace {

/// Deletes the geometrically longest loop path[i..j] (path[i] == path[j]);
/// earliest start, then earliest end, on exact ties.
bool erase_longest_loop(std::vector<int>& path, const EmbeddedNetwork& net) {
    std::size_t best_i = 0, best_j = 0;
    double best_len = -1.0;
    std::vector<double> prefix(path.size(), 0.0);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        prefix[i + 1] = prefix[i] + distance(net.vertex(path[i]), net.vertex(path[i + 1]));
    for (std::size_t i = 0; i < path.size(); ++i) {
        for (std::size_t j = i + 1; j < path.size(); ++j) {
            if (path[i] != path[j]) continue;
            const double len = prefix[j] - prefix[i];
            if (len > best_len) {
                best_len = len;
                best_i = i;
                best_j = j;
            }
        }
    }
    if (best_len < 0.0) return false;
    path.erase(path.begin() + static_cast<std::ptrdiff_t>(best_i) + 1,
               path.begin() + static_cast<std::ptrdiff_t>(best_j) + 1);
    return true;
}

}  // namespace

IrrigationPlan simple_replacement(const IrrigationPlan& p) {
    std::vector<IrrigationPlan::WeightedCurve> curves;
    curves.reserve(p.size());
    for (const auto& wc : p.curves()) {
        std::vector<int> path = wc.curve.path();
        while (erase_longest_loop(path, p.network())) {
        }
        curves.push_back({wc.weight, Curve::make(std::move(path))});
    }
    return IrrigationPlan::make(p.network(), std::move(curves));
}

}  // namespace ramified
