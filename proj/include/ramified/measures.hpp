#pragma once

#include <cstddef>
#include <vector>

#include "ramified/common.hpp"

namespace ramified {

struct Atom {
    Point p;
    double mass = 0.0;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite weighted point set in R^d. Atoms are stored sorted lexicographically
/// by coordinates with duplicate points merged, so any permutation of the
/// input yields the identical measure. Immutable after construction.
class AtomicMeasure {
public:
    AtomicMeasure() = default;

    /// Merges duplicate points (exact coordinate equality, no epsilon-snapping),
    /// drops zero-mass atoms. With `require_probability`, the total mass must
    /// equal 1 within 1e-12.
    static AtomicMeasure make(int dim, std::vector<Atom> atoms, bool require_probability = false);

    int dim() const noexcept { return dim_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }

    /// Pairwise-summed total mass.
    double total_mass() const;

    /// Mass at an exact coordinate match; 0 if absent.
    double mass_at(const Point& p) const;

    friend bool operator==(const AtomicMeasure& a, const AtomicMeasure& b) = default;

private:
    int dim_ = 0;
    std::vector<Atom> atoms_;
};

inline constexpr std::size_t kDefaultAtomCap = std::size_t{1} << 20;

/// 2^(d*k) atoms at the centers of the level-k dyadic subcubes of [0,1]^d,
/// each carrying mass 2^(-d*k).
AtomicMeasure dyadic_cube_measure(int dim, int level, std::size_t atom_cap = kDefaultAtomCap);

}  // namespace ramified
