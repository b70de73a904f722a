#include "mcsf/potential.hpp"

#include <algorithm>
#include <cmath>

#include "mcsf/errors.hpp"

namespace mcsf {

PotentialField::PotentialField(double mass, std::vector<Vec2> singularities)
    : mass_(mass), sing_(std::move(singularities)) {
    if (mass_ < 0.0) fail(Errc::ValidationError, "mass must be non-negative");
    if (sing_.empty()) fail(Errc::ValidationError, "at least one singularity required");
    min_sep_ = 1.0;
    if (sing_.size() > 1) {
        min_sep_ = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < sing_.size(); ++i)
            for (size_t j = i + 1; j < sing_.size(); ++j)
                min_sep_ = std::min(min_sep_, dist(sing_[i], sing_[j]));
        if (min_sep_ <= 0.0)
            fail(Errc::ValidationError, "singularity points must be pairwise distinct");
    }
}

double PotentialField::eval(Vec2 x) const {
    double phi = mass_;
    double guard = guard_band();
    for (Vec2 p : sing_) {
        double r = dist(x, p);
        if (r <= guard) fail(Errc::EvalAtSingularity, "phi evaluated at a singular point");
        phi += 0.5 / r;
    }
    return phi;
}

Vec2 PotentialField::grad(Vec2 x) const {
    Vec2 g{0.0, 0.0};
    double guard = guard_band();
    for (Vec2 p : sing_) {
        Vec2 d = x - p;
        double r = norm(d);
        if (r <= guard) fail(Errc::EvalAtSingularity, "grad phi evaluated at a singular point");
        g -= d * (0.5 / (r * r * r));
    }
    return g;
}

double PotentialField::normal_log_phi(Vec2 x, Vec2 unit_normal) const {
    if (std::abs(norm(unit_normal) - 1.0) > 1e-12)
        fail(Errc::ValidationError, "normal_log_phi requires a unit normal");
    double phi = eval(x);
    Vec2 g = grad(x);
    return std::abs(dot(g, unit_normal) / phi) / std::sqrt(phi);
}

double PotentialField::nearest_distance(Vec2 x) const {
    double d = std::numeric_limits<double>::infinity();
    for (Vec2 p : sing_) d = std::min(d, dist(x, p));
    return d;
}

PotentialField::Nearest PotentialField::nearest_singularity(
    Vec2 x, const std::set<size_t>& exclude) const {
    std::optional<Nearest> best;
    for (size_t i = 0; i < sing_.size(); ++i) {
        if (exclude.count(i)) continue;
        double d = dist(x, sing_[i]);
        if (!best || d < best->distance) best = Nearest{i, d};
    }
    if (!best) fail(Errc::EmptyCandidateSet, "all singularities excluded");
    return *best;
}

// Flux of the unit radial field from p across the oriented edge a->b,
// with recursive bisection while the edge is long relative to its distance
// from p. The integrand is bounded by 1, so the depth cap only limits work
// for edges that end exactly at p (where the integrand vanishes anyway for
// the collinear part).
double PotentialField::edge_flux_term(Vec2 a, Vec2 b, Vec2 p, int depth) const {
    Vec2 e = b - a;
    double len = norm(e);
    if (len == 0.0) return 0.0;
    double d = point_segment_dist(p, a, b);
    if (depth < 30 && d < 2.0 * len) {
        Vec2 m = lerp(a, b, 0.5);
        return edge_flux_term(a, m, p, depth + 1) + edge_flux_term(m, b, p, depth + 1);
    }
    // Outward normal for a counterclockwise polygon is the tangent rotated
    // by -90 degrees.
    Vec2 nu = Vec2{e.y, -e.x} / len;
    auto xs = gauss16_nodes();
    auto ws = gauss16_weights();
    double acc = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) {
        Vec2 x = lerp(a, b, xs[k]);
        Vec2 r = x - p;
        double rn = norm(r);
        if (rn == 0.0) continue;
        acc += ws[k] * dot(r / rn, nu);
    }
    return acc * len;
}

double PotentialField::weighted_area(std::span<const Vec2> polygon) const {
    if (polygon.size() < 3) fail(Errc::NonSimplePolygon, "polygon needs at least 3 vertices");

    double signed_area = polygon_signed_area(polygon);
    double perim = polyline_length(polygon) + dist(polygon.back(), polygon.front());

    // A retraced (zero-area) contour encloses nothing.
    if (std::abs(signed_area) <= 1e-14 * perim * perim) return 0.0;

    std::vector<Vec2> poly(polygon.begin(), polygon.end());
    if (signed_area < 0.0) std::reverse(poly.begin(), poly.end());

    // Pinched contours (lobes kissing at a vertex, as after a surgery) are
    // fine for the boundary integral; proper crossings are not.
    if (!polyline_is_simple(poly, /*closed=*/true, /*allow_vertex_touch=*/true))
        fail(Errc::NonSimplePolygon, "weighted_area requires a non-self-crossing polygon");

    // Singularities may sit exactly on polygon vertices (the flux integrand
    // vanishes along the two adjacent edges), but not inside an edge.
    double guard = guard_band();
    for (Vec2 p : sing_) {
        for (size_t i = 0; i < poly.size(); ++i) {
            Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
            if (dist(p, a) <= guard || dist(p, b) <= guard) continue;
            if (point_segment_dist(p, a, b) <= guard)
                fail(Errc::SingularityOnBoundary, "singularity in the interior of a polygon edge");
        }
    }

    double total = mass_ * std::abs(signed_area);
    for (Vec2 p : sing_) {
        double flux = 0.0;
        for (size_t i = 0; i < poly.size(); ++i) {
            Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
            // The radial field from p is tangent to an edge that starts or
            // ends at p, so that edge's flux vanishes exactly.
            if (dist(p, a) <= guard || dist(p, b) <= guard) continue;
            flux += edge_flux_term(a, b, p, 0);
        }
        total += 0.5 * flux;
    }
    return std::max(total, 0.0);
}

} // namespace mcsf
