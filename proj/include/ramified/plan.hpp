#pragma once

#include <utility>
#include <vector>

#include "ramified/flow.hpp"
#include "ramified/measures.hpp"
#include "ramified/network.hpp"

namespace ramified {

/// Vertex path on an embedded network, traversed at unit speed; consecutive
/// vertices are joined by straight segments and must be distinct. A
/// single-vertex path is the constant curve (L = T = 0).
class Curve {
public:
    Curve() = default;

    static Curve make(std::vector<int> path);

    const std::vector<int>& path() const noexcept { return path_; }
    std::size_t step_count() const noexcept { return path_.empty() ? 0 : path_.size() - 1; }
    bool constant() const noexcept { return path_.size() == 1; }

    friend bool operator==(const Curve&, const Curve&) = default;

private:
    std::vector<int> path_;
};

/// Finitely supported probability measure on curves over a shared network:
/// eta = sum of w_i * delta_{gamma_i}. Weights are positive and sum to 1
/// within 1e-12; every step of every curve must be a network edge (in either
/// orientation), which is what makes multiplicities exact. Immutable.
class IrrigationPlan {
public:
    struct WeightedCurve {
        double weight = 0.0;
        Curve curve;
        friend bool operator==(const WeightedCurve&, const WeightedCurve&) = default;
    };

    IrrigationPlan() = default;

    static IrrigationPlan make(EmbeddedNetwork network, std::vector<WeightedCurve> curves);

    const EmbeddedNetwork& network() const noexcept { return network_; }
    const std::vector<WeightedCurve>& curves() const noexcept { return curves_; }
    std::size_t size() const noexcept { return curves_.size(); }

    friend bool operator==(const IrrigationPlan&, const IrrigationPlan&) = default;

private:
    EmbeddedNetwork network_;
    std::vector<WeightedCurve> curves_;
};

/// Edgewise multiplicities of a plan on undirected network edges {u, v}:
/// theta counts each traversing curve once, m counts every traversal
/// (direction-blind). Only traversed edges are listed.
struct MultiplicityField {
    struct Entry {
        int u = -1;  // u < v
        int v = -1;
        double theta = 0.0;
        double m = 0.0;
        double length = 0.0;
    };
    std::vector<Entry> entries;  // sorted by (u, v)

    const Entry* find(int a, int b) const;
};

/// Sum of segment lengths; equals the stopping time T under arc-length
/// parameterization.
double curve_length(const Curve& c, const EmbeddedNetwork& net);

MultiplicityField multiplicities(const IrrigationPlan& p);

/// I_alpha: each curve is charged theta^(alpha-1) per unit length, counted
/// per traversal. Finite for every valid plan (a traversed edge always has
/// theta >= the traversing curve's weight > 0).
double irrigation_cost(const IrrigationPlan& p, double alpha);

/// E_alpha: sum of theta^alpha * |e| over traversed edges.
double gilbert_energy_plan(const IrrigationPlan& p, double alpha);

/// "Full" energy: sum of theta^(alpha-1) * m * |e|; equals I_alpha for every
/// plan, and E_alpha exactly when the plan is essentially simple.
double full_energy(const IrrigationPlan& p, double alpha);

struct SimplicityReport {
    struct PerCurve {
        bool simple = false;             // no vertex repeated
        bool essentially_simple = false; // no undirected edge repeated
    };
    std::vector<PerCurve> curves;
    bool all_simple = true;
    bool all_essentially_simple = true;
};

SimplicityReport is_simple(const IrrigationPlan& p);

/// (mu, nu): curve weights collected at first and last path vertices.
std::pair<AtomicMeasure, AtomicMeasure> marginals(const IrrigationPlan& p);

/// Loop erasure: repeatedly deletes the longest vertex-loop of each curve
/// (the earliest one on ties) until every curve is simple. Marginals are
/// preserved exactly; theta never increases on any edge.
IrrigationPlan simple_replacement(const IrrigationPlan& p);

}  // namespace ramified
