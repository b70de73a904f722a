#ifndef MCSF_GEOM_HPP
#define MCSF_GEOM_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace mcsf {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Rotation by +90 degrees (counterclockwise).
inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 normalized(Vec2 v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

// Angle of a nonzero vector against the +x axis, in (-pi, pi].
inline double angle_of(Vec2 v) {
    double a = std::atan2(v.y, v.x);
    if (a <= -kPi) a = kPi;
    return a;
}

// Wrap an angle difference into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a = kPi;
    return a;
}

inline Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + (b - a) * t; }

// ---- segments ----------------------------------------------------------

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b);

// True when segments [a,b] and [c,d] share at least one point.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// ---- polylines ---------------------------------------------------------

double polyline_length(std::span<const Vec2> pts);

double point_polyline_dist(Vec2 p, std::span<const Vec2> pts);

// No two non-adjacent segments touch; adjacent segments share only their
// common node. Uses a uniform-grid broad phase. With allow_vertex_touch,
// non-adjacent segments may meet at exactly coincident endpoints (pinched
// contours), but never cross properly or overlap.
bool polyline_is_simple(std::span<const Vec2> pts, bool closed,
                        bool allow_vertex_touch = false);

// Any contact between the two polylines, optionally ignoring contacts
// within `endpoint_slack` of shared endpoints.
bool polylines_intersect(std::span<const Vec2> a, std::span<const Vec2> b,
                         double endpoint_slack = 0.0);

// Symmetric node-based Hausdorff distance (each node against the other
// polyline's segments).
double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);

// ---- polygons ----------------------------------------------------------

double polygon_signed_area(std::span<const Vec2> poly);

// Even-odd rule; points on the boundary give an arbitrary side.
bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);

double point_polygon_boundary_dist(Vec2 p, std::span<const Vec2> poly);

// Andrew monotone chain, counterclockwise, collinear points dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

// ---- quadrature --------------------------------------------------------

// 16-point Gauss-Legendre nodes/weights on [0,1].
std::span<const double> gauss16_nodes();
std::span<const double> gauss16_weights();

} // namespace mcsf

#endif
