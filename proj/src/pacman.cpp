#include "mcsf/pacman.hpp"

#include <algorithm>
#include <cmath>

#include "mcsf/curve.hpp"
#include "mcsf/errors.hpp"

namespace mcsf {

Triad make_triad(size_t p_minus, size_t p_plus, size_t p) {
    return Triad{p_minus, p_plus, p, {p_minus, p}, {p, p_plus}};
}

double triad_theta_minus(const PotentialField& field, const Triad& triad) {
    Vec2 pm = field.singularity(triad.p_minus);
    Vec2 pp = field.singularity(triad.p_plus);
    Vec2 p = field.singularity(triad.p);
    return wrap_angle(angle_of(p - pm) - angle_of(pp - pm));
}

double triad_theta_plus(const PotentialField& field, const Triad& triad) {
    Vec2 pm = field.singularity(triad.p_minus);
    Vec2 pp = field.singularity(triad.p_plus);
    Vec2 p = field.singularity(triad.p);
    return wrap_angle(angle_of(pp - p) - angle_of(pp - pm));
}

namespace {

std::vector<Vec2> chain_points(const PotentialField& field, const std::vector<size_t>& idx) {
    std::vector<Vec2> pts;
    pts.reserve(idx.size());
    for (size_t s : idx) pts.push_back(field.singularity(s));
    return pts;
}

} // namespace

std::vector<Vec2> pacman_polygon(const PotentialField& field, const Triad& triad,
                                 const PlanarCurve& curve) {
    std::vector<Vec2> poly = curve.nodes; // p_minus ... p_plus
    auto gp = chain_points(field, triad.gamma_plus);   // p ... p_plus
    auto gm = chain_points(field, triad.gamma_minus);  // p_minus ... p
    for (size_t i = gp.size() - 1; i-- > 0;) poly.push_back(gp[i]); // back to p
    for (size_t i = gm.size() - 1; i-- > 0;) poly.push_back(gm[i]); // back towards p_minus
    poly.pop_back(); // the curve's first node already closes at p_minus
    return poly;
}

void validate_triad(const PotentialField& field, const Triad& triad, const PlanarCurve& curve) {
    if (triad.gamma_minus.size() < 2 || triad.gamma_minus.front() != triad.p_minus ||
        triad.gamma_minus.back() != triad.p)
        fail(Errc::ValidationError, "gamma_minus must run from p_minus to p");
    if (triad.gamma_plus.size() < 2 || triad.gamma_plus.front() != triad.p ||
        triad.gamma_plus.back() != triad.p_plus)
        fail(Errc::ValidationError, "gamma_plus must run from p to p_plus");

    Vec2 pm = field.singularity(triad.p_minus);
    Vec2 pp = field.singularity(triad.p_plus);
    Vec2 p = field.singularity(triad.p);
    double guard = field.guard_band();

    if (std::abs(cross(pp - pm, p - pm)) <= guard * dist(pp, pm))
        fail(Errc::DegenerateCollinear, "triad vertex p lies on the chord line");

    // p strictly inside the region bounded by the curve and its chord.
    if (point_polyline_dist(p, curve.nodes) <= guard ||
        point_segment_dist(p, curve.nodes.front(), curve.nodes.back()) <= guard ||
        !point_in_polygon(p, curve.nodes))
        fail(Errc::VertexNotEnclosed, "triad vertex p is not enclosed by the curve");

    if (!polyline_is_simple(pacman_polygon(field, triad, curve), /*closed=*/true))
        fail(Errc::DisconnectedInterior, "pacman region boundary is self-intersecting");
}

double pacman_area(const PotentialField& field, const Triad& triad, const PlanarCurve& curve) {
    return field.weighted_area(pacman_polygon(field, triad, curve));
}

namespace {

double endpoint_angle_drop(const PlanarCurve& curve) {
    AngleProfile prof = angle_lift(curve);
    return prof.theta.back() - prof.theta.front();
}

} // namespace

AreaDerivativeStats area_derivative_check(const PotentialField& field, const Triad& triad,
                                          std::span<const FlowSnapshot> snapshots) {
    if (snapshots.size() < 2)
        fail(Errc::WindowTooShort, "area derivative check needs >= 2 snapshots");

    auto gm = chain_points(field, triad.gamma_minus);
    auto gp = chain_points(field, triad.gamma_plus);
    std::vector<Vec2> barrier = gm;
    barrier.insert(barrier.end(), gp.begin() + 1, gp.end());

    AreaDerivativeStats stats;
    double sum = 0.0;
    double slack = 2.0 * snapshots.front().curve.target_spacing;

    double prev_area = pacman_area(field, triad, snapshots.front().curve);
    double prev_drop = endpoint_angle_drop(snapshots.front().curve);
    for (size_t i = 1; i < snapshots.size(); ++i) {
        const auto& cur = snapshots[i];
        if (polylines_intersect(cur.curve.nodes, barrier, slack))
            fail(Errc::TriadBrokenDuringWindow, "curve crossed the barrier chains");
        double area = pacman_area(field, triad, cur.curve);
        double drop = endpoint_angle_drop(cur.curve);
        double dt = cur.time - snapshots[i - 1].time;
        if (dt <= 0.0) fail(Errc::WindowTooShort, "snapshot times not increasing");
        double measured = (area - prev_area) / dt;
        double predicted = 0.5 * (drop + prev_drop);
        double r = std::abs(measured - predicted);
        stats.max_abs = std::max(stats.max_abs, r);
        sum += r;
        ++stats.samples;
        prev_area = area;
        prev_drop = drop;
    }
    stats.mean_abs = sum / static_cast<double>(stats.samples);
    return stats;
}

double singular_time_bound(const PotentialField& field, const Triad& triad,
                           const PlanarCurve& curve) {
    double tm = triad_theta_minus(field, triad);
    double tp = triad_theta_plus(field, triad);
    if (!(tp < tm))
        fail(Errc::NotStrictlyDecreasing, "singular time bound requires theta_plus < theta_minus");
    return pacman_area(field, triad, curve) / (tm - tp);
}

NoncompactBound noncompact_time_bound(const PotentialField& field, const PlanarCurve& curve,
                                      size_t p_sing, double radius) {
    if (curve.start.kind != EndKind::Ray || curve.end.kind != EndKind::Ray)
        fail(Errc::ValidationError, "noncompact bound requires ray-asymptotic ends");
    Vec2 p = field.singularity(p_sing);

    NoncompactBound out;
    out.theta_minus = angle_of(-curve.start.ray_dir);
    out.theta_plus = angle_of(curve.end.ray_dir);
    double drop = wrap_angle(out.theta_minus - out.theta_plus);
    if (!(drop > 0.0))
        fail(Errc::NotStrictlyDecreasing, "ray angles do not strictly decrease");

    auto ray_dev = [&](Vec2 v, const CurveEnd& e) {
        Vec2 rel = v - e.ray_base;
        double along = dot(rel, e.ray_dir);
        return along >= 0.0 ? std::abs(cross(e.ray_dir, rel)) : norm(rel);
    };
    double guard = field.guard_band();

    std::vector<Vec2> poly;
    for (Vec2 v : curve.nodes)
        if (dist(v, p) <= radius) poly.push_back(v);
    // Tails that have merged onto the rays retrace the closing edges exactly;
    // drop them so the contour through p stays simple. They enclose nothing.
    size_t lo = 0, hi = poly.size();
    while (lo < hi && ray_dev(poly[lo], curve.start) <= guard) ++lo;
    while (hi > lo && ray_dev(poly[hi - 1], curve.end) <= guard) --hi;
    poly.assign(poly.begin() + static_cast<long>(lo), poly.begin() + static_cast<long>(hi));
    if (poly.size() < 2) fail(Errc::ValidationError, "truncation radius leaves no curve");
    poly.push_back(p); // close along the rays through the vertex at p
    out.area_truncated = field.weighted_area(poly);

    // Thin-strip estimate of what the truncation leaves out: deviation from
    // the rays times the local phi, integrated along the tails.
    auto ray_line_dist = [&](Vec2 v, const CurveEnd& e) {
        return std::abs(cross(e.ray_dir, v - e.ray_base));
    };
    double tail = 0.0;
    for (size_t i = 0; i + 1 < curve.nodes.size(); ++i) {
        Vec2 a = curve.nodes[i], b = curve.nodes[i + 1];
        if (dist(a, p) <= radius && dist(b, p) <= radius) continue;
        Vec2 mid = lerp(a, b, 0.5);
        const CurveEnd& e =
            dist(mid, curve.nodes.front()) < dist(mid, curve.nodes.back()) ? curve.start
                                                                           : curve.end;
        double dev = ray_line_dist(mid, e);
        if (dev <= 0.0) continue;
        tail += dev * field.eval(mid) * dist(a, b);
    }
    out.tail_estimate = tail;
    out.bound = (out.area_truncated + out.tail_estimate) / drop;
    return out;
}

} // namespace mcsf
