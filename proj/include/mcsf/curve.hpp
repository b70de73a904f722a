#ifndef MCSF_CURVE_HPP
#define MCSF_CURVE_HPP

#include <complex>
#include <utility>
#include <vector>

#include "mcsf/geom.hpp"
#include "mcsf/potential.hpp"

namespace mcsf {

// Default witness for the strict inequality in the almost calibrated
// condition: range(theta) <= pi - delta.
inline constexpr double kDefaultDelta = 0.05;

enum class EndKind { Pinned, Ray };

struct CurveEnd {
    EndKind kind = EndKind::Pinned;
    int singularity = -1; // Pinned: index into the field
    Vec2 ray_base{};      // Ray: base point of the asymptotic ray
    Vec2 ray_dir{};       // Ray: unit direction pointing away to infinity

    static CurveEnd pinned(int index) { return {EndKind::Pinned, index, {}, {}}; }
    static CurveEnd ray(Vec2 base, Vec2 dir) {
        return {EndKind::Ray, -1, base, normalized(dir)};
    }
};

// Oriented open polyline. Orientation is the node order; the leftward
// normal is the tangent rotated by +90 degrees, and signed curvature is
// taken against it (a counterclockwise circle of radius R has kappa +1/R).
struct PlanarCurve {
    std::vector<Vec2> nodes;
    CurveEnd start;
    CurveEnd end;
    double target_spacing = 0.0;

    bool compact() const {
        return start.kind == EndKind::Pinned && end.kind == EndKind::Pinned;
    }
    double length() const { return polyline_length(nodes); }
};

// Continuous lift of the edge-direction angles. One entry per edge; the
// first edge's representative lies in (-pi, pi].
struct AngleProfile {
    std::vector<double> theta;

    double inf() const;
    double sup() const;
    double range() const { return sup() - inf(); }
};

void validate(const PotentialField& field, const PlanarCurve& curve);

AngleProfile angle_lift(const PlanarCurve& curve);

// Signed curvature at each interior node, kappa_i = 2 * dtheta_i / (|e_{i-1}| + |e_i|).
// With this stencil, sum kappa_i * ds_i telescopes exactly to the lift
// difference between the last and first edge.
std::vector<double> curvature(const PlanarCurve& curve);

std::pair<double, double> angle_range(const PlanarCurve& curve);

bool is_almost_calibrated(const PlanarCurve& curve, double delta = kDefaultDelta);

bool is_convex(const PlanarCurve& curve);
bool is_strictly_convex(const PlanarCurve& curve);

// Redistribute nodes to near-uniform arclength spacing (approximately
// target_spacing); endpoints are preserved exactly.
PlanarCurve resample(const PlanarCurve& curve);
PlanarCurve resample(const PlanarCurve& curve, double spacing);

struct Chord {
    Vec2 a;
    Vec2 b;
    double length() const { return dist(a, b); }
    Vec2 dir() const { return normalized(b - a); }
};

// Straight segment between the endpoints (compact curves only).
Chord chord(const PlanarCurve& curve);

// 2*pi*(dx + i*dy) over the endpoint displacement.
std::complex<double> central_charge(const PlanarCurve& curve);

// arg of the central charge, in (-pi, pi].
double phase(const PlanarCurve& curve);

} // namespace mcsf

#endif
