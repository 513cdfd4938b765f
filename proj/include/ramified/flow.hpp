#pragma once

#include <optional>
#include <vector>

#include "ramified/measures.hpp"
#include "ramified/network.hpp"

namespace ramified {

/// Signed atomic measure split into positive and negative parts with disjoint
/// support; houses a divergence mu - nu.
class SignedAtomic {
public:
    SignedAtomic() = default;

    /// Reduces overlapping atoms (common mass cancels); parts with residual
    /// magnitude <= tol are dropped.
    static SignedAtomic make(const AtomicMeasure& positive, const AtomicMeasure& negative,
                             double tol = kDivergenceTol);

    const AtomicMeasure& positive() const noexcept { return positive_; }
    const AtomicMeasure& negative() const noexcept { return negative_; }
    bool empty() const noexcept { return positive_.empty() && negative_.empty(); }

    friend bool operator==(const SignedAtomic&, const SignedAtomic&) = default;

private:
    AtomicMeasure positive_;
    AtomicMeasure negative_;
};

/// Per-edge nonnegative weight on an embedded network (canonical form: a
/// negative input weight flips the edge orientation at construction, so every
/// stored weight reads w(e) >= 0). Zero-weight edges are permitted and can be
/// pruned with canonicalize(). Immutable.
class FlowField {
public:
    FlowField() = default;

    /// Accepts signed weights; flips edges carrying negative weight. If a flip
    /// lands on an already-present directed pair the weights add (identical
    /// oriented segments carry one summed density).
    static FlowField make(EmbeddedNetwork network, std::vector<double> signed_weights);

    const EmbeddedNetwork& network() const noexcept { return network_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double weight(int edge_id) const { return weights_[static_cast<std::size_t>(edge_id)]; }
    bool empty() const noexcept { return weights_.empty(); }

    /// Drops edges with weight <= tol.
    FlowField canonicalize(double tol = 0.0) const;

private:
    EmbeddedNetwork network_;
    std::vector<double> weights_;
};

/// E_alpha(G) = sum over edges of w(e)^alpha * |e|, with 0^alpha = 0.
double gilbert_energy(const FlowField& v, double alpha);

/// Net outflow per vertex as a signed measure: sum of w(e) (delta_tail -
/// delta_head). Coincident vertex coordinates are aggregated; points with
/// |net| <= 1e-12 are omitted.
SignedAtomic divergence(const FlowField& v);

struct KirchhoffReport {
    bool ok = false;
    double max_residual = 0.0;
    /// Points where |divergence - (mu - nu)| exceeds the tolerance.
    std::vector<std::pair<Point, double>> residuals;
};

/// True iff divergence(v) == mu - nu pointwise within tol. Every mu/nu atom
/// must sit exactly on a network vertex, else UnmatchedAtom.
KirchhoffReport check_kirchhoff(const FlowField& v, const AtomicMeasure& mu,
                                const AtomicMeasure& nu, double tol = kDivergenceTol);

/// Deterministic lowest-edge-id DFS over the positive-weight support; returns
/// the edge ids of a directed cycle, or nullopt when the support is acyclic.
std::optional<std::vector<int>> find_cycle(const FlowField& v);

struct CancelResult {
    FlowField flow;
    int cycles_removed = 0;
};

/// Repeatedly subtracts the minimum weight around each directed cycle until
/// the support is acyclic. Divergence is unchanged and no weight increases.
CancelResult cancel_cycles(const FlowField& v);

}  // namespace ramified
