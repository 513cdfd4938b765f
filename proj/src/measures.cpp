#include "ramified/measures.hpp"

#include <algorithm>
#include <cmath>

namespace ramified {

AtomicMeasure AtomicMeasure::make(int dim, std::vector<Atom> atoms, bool require_probability) {
    if (dim < 1) fail(Errc::DimensionMismatch, "dimension must be >= 1");
    for (const Atom& a : atoms) {
        if (static_cast<int>(a.p.size()) != dim)
            fail(Errc::DimensionMismatch, "atom has " + std::to_string(a.p.size()) +
                                              " coordinates, expected " + std::to_string(dim));
        if (!finite_point(a.p)) fail(Errc::DimensionMismatch, "atom coordinates must be finite");
        if (!(a.mass >= 0.0)) fail(Errc::NegativeMass, "atom mass must be >= 0");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.p < b.p; });
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (Atom& a : atoms) {
        if (!merged.empty() && merged.back().p == a.p)
            merged.back().mass += a.mass;
        else
            merged.push_back(std::move(a));
    }
    std::erase_if(merged, [](const Atom& a) { return a.mass == 0.0; });

    AtomicMeasure m;
    m.dim_ = dim;
    m.atoms_ = std::move(merged);
    if (require_probability) {
        const double total = m.total_mass();
        if (std::abs(total - 1.0) > kMassTol)
            fail(Errc::TotalMassNotOne, "total mass " + std::to_string(total) + " != 1");
    }
    return m;
}

double AtomicMeasure::total_mass() const {
    std::vector<double> masses;
    masses.reserve(atoms_.size());
    for (const Atom& a : atoms_) masses.push_back(a.mass);
    return pairwise_sum(masses);
}

double AtomicMeasure::mass_at(const Point& p) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), p,
                               [](const Atom& a, const Point& q) { return a.p < q; });
    if (it != atoms_.end() && it->p == p) return it->mass;
    return 0.0;
}

AtomicMeasure dyadic_cube_measure(int dim, int level, std::size_t atom_cap) {
    if (dim < 1) fail(Errc::DimensionMismatch, "dimension must be >= 1");
    if (level < 0) fail(Errc::ResourceLimit, "level must be >= 0");
    const long long bits = static_cast<long long>(dim) * level;
    if (bits >= 62 || (std::size_t{1} << bits) > atom_cap)
        fail(Errc::ResourceLimit, "2^(d*k) atoms exceed the configured cap");

    const std::size_t cells_per_axis = std::size_t{1} << level;
    const std::size_t count = std::size_t{1} << bits;
    const double mass = std::ldexp(1.0, -static_cast<int>(bits));
    const double scale = std::ldexp(1.0, -level);

    std::vector<Atom> atoms;
    atoms.reserve(count);
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    for (std::size_t n = 0; n < count; ++n) {
        Point p(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) p[static_cast<std::size_t>(j)] = (static_cast<double>(idx[static_cast<std::size_t>(j)]) + 0.5) * scale;
        atoms.push_back({std::move(p), mass});
        for (int j = dim - 1; j >= 0; --j) {
            if (++idx[static_cast<std::size_t>(j)] < cells_per_axis) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
    }
    return AtomicMeasure::make(dim, std::move(atoms));
}

}  // namespace ramified
