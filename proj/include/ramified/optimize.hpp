#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ramified/flow.hpp"
#include "ramified/measures.hpp"

namespace ramified {

/// Terminal with signed mass: positive for mu atoms, negative for nu atoms.
struct Terminal {
    Point p;
    double mass = 0.0;
};

/// Candidate tree spanning the terminals plus optional steiner vertices.
/// Vertex ids: terminals are 0..T-1, steiner vertices T..T+S-1. On a tree
/// with fixed terminal masses the edge weights are determined by Kirchhoff,
/// so a topology is pure combinatorics plus steiner geometry.
class Topology {
public:
    Topology() = default;

    static Topology make(std::vector<Terminal> terminals, int steiner_count,
                         std::vector<std::pair<int, int>> tree_edges);

    const std::vector<Terminal>& terminals() const noexcept { return terminals_; }
    int terminal_count() const noexcept { return static_cast<int>(terminals_.size()); }
    int steiner_count() const noexcept { return steiner_count_; }
    int vertex_count() const noexcept { return terminal_count() + steiner_count_; }
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    int dim() const noexcept { return terminals_.empty() ? 0 : static_cast<int>(terminals_[0].p.size()); }

    /// Lexicographically minimal sorted edge list over permutations of the
    /// (unlabeled) steiner ids; identifies isomorphic topologies.
    std::vector<std::pair<int, int>> canonical_key() const;

private:
    std::vector<Terminal> terminals_;
    int steiner_count_ = 0;
    std::vector<std::pair<int, int>> edges_;
};

/// Kirchhoff-determined edge data on a tree topology. weight[i] >= 0 belongs
/// to Topology::edges()[i]; oriented[i] points toward the nu-heavy side.
struct TreeWeights {
    std::vector<double> weight;
    std::vector<std::pair<int, int>> oriented;
    std::vector<bool> degenerate;  // weight below 1e-12
};

TreeWeights tree_weights(const Topology& t);

struct RelaxOptions {
    double tol = 1e-10;
    int max_iters = 10000;
};

struct RelaxResult {
    std::vector<Point> positions;  // all vertices; terminals unchanged
    double cost = 0.0;
    int sweeps = 0;
    bool iteration_limit = false;
    std::vector<double> cost_history;  // one entry per sweep, non-increasing
};

/// Minimizes E_alpha over steiner positions at fixed topology by reweighted
/// averaging (Weiszfeld) with a step safeguard and coincidence handling;
/// finishes with a collapse probe that snaps a steiner onto a neighbor when
/// that does not increase the cost.
RelaxResult relax_geometry(const Topology& t, double alpha, const RelaxOptions& opts = {});

/// Max subgradient norm of the relax objective over steiner vertices not
/// coincident with any neighbor; 0 when all steiner points sit on neighbors.
double steiner_stationarity(const Topology& t, const TreeWeights& tw, double alpha,
                            const std::vector<Point>& positions);

struct EnumerationCaps {
    int max_terminals = 8;
    int max_steiner = 3;
};

/// Signed net terminals from a pair of measures; atoms shared by mu and nu
/// cancel and points with |net| <= 1e-12 are dropped.
std::vector<Terminal> net_terminals(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// Streams every non-isomorphic tree spanning the terminals with at most
/// max_steiner extra vertices (each of degree >= 3), one topology per
/// isomorphism class, in deterministic order.
void enumerate_topologies(const std::vector<Terminal>& terminals, int max_steiner,
                          const std::function<void(const Topology&)>& yield,
                          const EnumerationCaps& caps = {});

std::vector<Topology> enumerate_topologies(const AtomicMeasure& mu, const AtomicMeasure& nu,
                                           int max_steiner, const EnumerationCaps& caps = {});

/// Embeds a weighted tree as a flow field: coincident vertices (within
/// merge_tol) are merged, zero-weight edges dropped, parallel contributions
/// net out. Extra points become isolated vertices so that marginal atoms
/// always sit on the network.
FlowField topology_flow(const Topology& t, const TreeWeights& tw,
                        const std::vector<Point>& positions,
                        const std::vector<Point>& extra_vertices = {}, double merge_tol = 1e-9);

enum class SolveMode { Exhaustive, LocalSearch };

struct SolveConfig {
    double alpha = 0.5;
    SolveMode mode = SolveMode::Exhaustive;
    int max_steiner = 1;
    double relax_tol = 1e-10;
    int relax_max_iters = 10000;
    int moves_budget = 1000;
    std::uint64_t rng_seed = 0;
    EnumerationCaps caps{};
};

struct TraceEntry {
    std::string event;
    double cost = 0.0;
};

struct SolveResult {
    FlowField flow;
    double cost = 0.0;
    std::vector<TraceEntry> trace;
};

/// Discrete irrigation problem: minimal Gilbert energy over Kirchhoff-feasible
/// graphs. Exhaustive mode certifies the optimum within the steiner cap;
/// local-search mode starts from a greedy spanning tree and applies
/// split/contract/reconnect moves, accepting strict improvements, seeded and
/// deterministic. The output is cycle-free and Kirchhoff-feasible.
SolveResult solve_discrete(const AtomicMeasure& mu, const AtomicMeasure& nu,
                           const SolveConfig& cfg);

struct DyadicReport {
    double total = 0.0;
    std::vector<double> level_costs;  // level 1..k
    std::vector<double> ratios;       // level_costs[l+1] / level_costs[l]
};

/// Cost of the canonical recursive tree irrigating the level-k dyadic
/// discretization of [0,1]^d from a Dirac at the center.
DyadicReport dyadic_tree_cost(int dim, double alpha, int levels,
                              std::size_t atom_cap = kDefaultAtomCap);

}  // namespace ramified
