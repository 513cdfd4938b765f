#pragma once

#include <vector>

#include "ramified/flow.hpp"
#include "ramified/plan.hpp"

namespace ramified {

/// Projection of a plan onto the network: per undirected edge, flow is the
/// signed sum of traversals (forward minus backward) and intensity is the
/// full multiplicity m. The flow's network keeps the plan's vertex ids and
/// lists one edge per traversed pair, oriented along the net direction;
/// intensity[i] belongs to flow edge i.
struct PlanFlow {
    FlowField flow;
    std::vector<double> intensity;
};

PlanFlow plan_to_flow(const IrrigationPlan& p);

/// Result of the discrete Smirnov decomposition v = v_plan + cycle_residual.
struct Decomposition {
    IrrigationPlan plan;
    FlowField cycle_residual;  // on the input network; divergence-free
};

/// Greedy loop-erased path extraction from supply to demand. Every extracted
/// curve is simple; per edge, plan intensity never exceeds |v|; the leftover
/// circulation (including cancelled anti-parallel mass and erased loops) is
/// the cycle residual. Deterministic: vertices and edges in index order,
/// lowest-edge-id walks, bottleneck subtraction.
Decomposition flow_to_plan(const FlowField& v, const AtomicMeasure& mu, const AtomicMeasure& nu);

struct EquivalenceReport {
    double irrigation_cost = 0.0;      // I_alpha(p)
    double gilbert_energy_plan = 0.0;  // E_alpha(p)
    double full_energy = 0.0;          // Ebar_alpha(p)
    double alpha_mass = 0.0;           // M_alpha(v)
    double max_intensity_flow_gap = 0.0;
    bool costs_equal = false;
    bool intensity_equals_flow = false;
};

/// Compares the Lagrangian cost of p against the alpha-mass of v (on flow
/// fields M_alpha coincides with the Gilbert energy) and reports where
/// opposite traversals open a gap between intensity and |flow|.
EquivalenceReport verify_equivalence(const IrrigationPlan& p, const FlowField& v, double alpha);

/// Evaluated cost functionals of a plan with a per-edge breakdown.
struct CostReport {
    double alpha = 0.0;
    double irrigation_cost = 0.0;
    double gilbert_energy = 0.0;
    double full_energy = 0.0;
    double alpha_mass = 0.0;
    double total_length = 0.0;    // L(eta) = sum w_i L(gamma_i)
    double stopping_time = 0.0;   // T(eta); equals L under arc-length parameterization
    struct EdgeRow {
        int u = -1;
        int v = -1;
        double length = 0.0;
        double theta = 0.0;
        double m = 0.0;
        double flow = 0.0;       // signed along u -> v
        double intensity = 0.0;
    };
    std::vector<EdgeRow> edges;
};

CostReport evaluate_plan(const IrrigationPlan& p, double alpha);

}  // namespace ramified
