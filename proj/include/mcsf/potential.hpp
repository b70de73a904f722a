#ifndef MCSF_POTENTIAL_HPP
#define MCSF_POTENTIAL_HPP

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "mcsf/geom.hpp"

namespace mcsf {

// Harmonic potential phi(x) = mass + sum_i 1/(2|x - p_i|) restricted to the
// working plane. mass = 0 is the ALE regime, mass > 0 the ALF regime. All
// singular points are required to lie in the plane; out-of-plane centers are
// not supported.
class PotentialField {
public:
    PotentialField(double mass, std::vector<Vec2> singularities);

    double mass() const { return mass_; }
    std::span<const Vec2> singularities() const { return sing_; }
    size_t size() const { return sing_.size(); }
    Vec2 singularity(size_t i) const { return sing_[i]; }

    // Minimum pairwise distance; 1.0 for a single-center field.
    double min_separation() const { return min_sep_; }

    // Scale-free tolerance for "at a singularity / on a boundary" tests.
    double guard_band() const { return 1e-9 * min_sep_; }

    double eval(Vec2 x) const;
    Vec2 grad(Vec2 x) const;

    // Blow-up monitor phi^{-1/2} |<grad phi / phi, n>| for a unit normal n.
    double normal_log_phi(Vec2 x, Vec2 unit_normal) const;

    // Distance from x to the nearest singularity (no exclusions).
    double nearest_distance(Vec2 x) const;

    struct Nearest {
        size_t index;
        double distance;
    };
    // Closest non-excluded singularity; ties break to the lowest index.
    Nearest nearest_singularity(Vec2 x, const std::set<size_t>& exclude = {}) const;

    // Integral of phi over a simple closed polygon, computed as
    // m * Area + sum_i (1/2) * contour integral of <(x-p_i)/|x-p_i|, nu> ds
    // via the planar identity div((x-p)/|x-p|) = 1/|x-p|. Finite for
    // singularities inside the region and for singularities that coincide
    // with polygon vertices; rejects singularities in the interior of an
    // edge (SingularityOnBoundary).
    double weighted_area(std::span<const Vec2> polygon) const;

private:
    double edge_flux_term(Vec2 a, Vec2 b, Vec2 p, int depth) const;

    double mass_;
    std::vector<Vec2> sing_;
    double min_sep_;
};

} // namespace mcsf

#endif
