#ifndef MCSF_PACMAN_HPP
#define MCSF_PACMAN_HPP

#include <span>
#include <vector>

#include "mcsf/flow.hpp"

namespace mcsf {

// Barrier configuration: two chains of straight segments through
// singularities joining p_minus -> p and p -> p_plus, sitting inside the
// region swept by the evolving curve.
struct Triad {
    size_t p_minus = 0;
    size_t p_plus = 0;
    size_t p = 0;
    std::vector<size_t> gamma_minus; // singularity indices, p_minus ... p
    std::vector<size_t> gamma_plus;  // singularity indices, p ... p_plus
};

// Direct two-segment triad (gamma_minus = [p_minus, p], gamma_plus = [p, p_plus]).
Triad make_triad(size_t p_minus, size_t p_plus, size_t p);

// Signed angles of the straight lines p_minus->p and p->p_plus against the
// oriented chord p_minus->p_plus.
double triad_theta_minus(const PotentialField& field, const Triad& triad);
double triad_theta_plus(const PotentialField& field, const Triad& triad);

void validate_triad(const PotentialField& field, const Triad& triad, const PlanarCurve& curve);

// Closed polygon bounded by the curve and the reversed barrier chains.
std::vector<Vec2> pacman_polygon(const PotentialField& field, const Triad& triad,
                                 const PlanarCurve& curve);

// phi-weighted area of the pacman region.
double pacman_area(const PotentialField& field, const Triad& triad, const PlanarCurve& curve);

struct AreaDerivativeStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    size_t samples = 0;
};

// Compares the measured dA/dt against the difference of the curve's lift at
// its two endpoint-adjacent edges, pairwise over consecutive snapshots.
AreaDerivativeStats area_derivative_check(const PotentialField& field, const Triad& triad,
                                          std::span<const FlowSnapshot> snapshots);

// A(0) / (theta_minus - theta_plus); requires theta_plus < theta_minus.
double singular_time_bound(const PotentialField& field, const Triad& triad,
                           const PlanarCurve& curve);

// Finite-time bound for a ray-asymptotic curve around singularity p: the
// weighted area of the region between the curve (truncated at the given
// radius) and its rays, divided by the angle drop theta_minus - theta_plus.
struct NoncompactBound {
    double area_truncated = 0.0;
    double tail_estimate = 0.0;
    double theta_minus = 0.0;
    double theta_plus = 0.0;
    double bound = 0.0;
};

NoncompactBound noncompact_time_bound(const PotentialField& field, const PlanarCurve& curve,
                                      size_t p_sing, double radius);

} // namespace mcsf

#endif
