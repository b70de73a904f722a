#include "mcsf/curve.hpp"

#include <algorithm>
#include <cmath>

#include "mcsf/errors.hpp"

namespace mcsf {

double AngleProfile::inf() const { return *std::min_element(theta.begin(), theta.end()); }
double AngleProfile::sup() const { return *std::max_element(theta.begin(), theta.end()); }

void validate(const PotentialField& field, const PlanarCurve& curve) {
    const auto& nodes = curve.nodes;
    if (nodes.size() < 3) fail(Errc::TooFewNodes, "curve needs at least 3 nodes");

    for (size_t i = 0; i + 1 < nodes.size(); ++i)
        if (nodes[i] == nodes[i + 1]) fail(Errc::DuplicateNode, "consecutive nodes coincide");

    double guard = field.guard_band();
    auto check_end = [&](const CurveEnd& e, Vec2 node, const char* which) {
        if (e.kind == EndKind::Pinned) {
            if (e.singularity < 0 || static_cast<size_t>(e.singularity) >= field.size())
                fail(Errc::ValidationError, "pinned endpoint index out of range");
            if (dist(node, field.singularity(static_cast<size_t>(e.singularity))) > guard)
                fail(Errc::EndpointMismatch,
                     std::string(which) + " node does not coincide with its singularity");
        }
    };
    check_end(curve.start, nodes.front(), "start");
    check_end(curve.end, nodes.back(), "end");

    size_t lo = curve.start.kind == EndKind::Pinned ? 1 : 0;
    size_t hi = curve.end.kind == EndKind::Pinned ? nodes.size() - 1 : nodes.size();
    for (size_t i = lo; i < hi; ++i)
        if (field.nearest_distance(nodes[i]) <= guard)
            fail(Errc::NodeTooCloseToSingularity, "interior node inside the singularity guard band");

    angle_lift(curve); // throws LiftJump on a kink too sharp for the discretization

    if (!polyline_is_simple(nodes, /*closed=*/false))
        fail(Errc::SelfIntersection, "curve is not a simple polyline");
}

AngleProfile angle_lift(const PlanarCurve& curve) {
    const auto& nodes = curve.nodes;
    if (nodes.size() < 2) fail(Errc::TooFewNodes, "lift needs at least one edge");
    AngleProfile prof;
    prof.theta.resize(nodes.size() - 1);
    double prev_raw = angle_of(nodes[1] - nodes[0]);
    prof.theta[0] = prev_raw;
    for (size_t j = 1; j + 1 < nodes.size(); ++j) {
        double raw = angle_of(nodes[j + 1] - nodes[j]);
        double d = wrap_angle(raw - prev_raw);
        if (std::abs(d) >= kPi - 1e-9)
            fail(Errc::LiftJump, "consecutive edge directions differ by >= pi");
        prof.theta[j] = prof.theta[j - 1] + d;
        prev_raw = raw;
    }
    return prof;
}

std::vector<double> curvature(const PlanarCurve& curve) {
    const auto& nodes = curve.nodes;
    if (nodes.size() < 3) fail(Errc::TooFewNodes, "curvature needs at least 3 nodes");
    std::vector<double> kappa(nodes.size() - 2);
    Vec2 e_prev = nodes[1] - nodes[0];
    double l_prev = norm(e_prev);
    for (size_t i = 1; i + 1 < nodes.size(); ++i) {
        Vec2 e = nodes[i + 1] - nodes[i];
        double l = norm(e);
        double dtheta = std::atan2(cross(e_prev, e), dot(e_prev, e));
        kappa[i - 1] = 2.0 * dtheta / (l_prev + l);
        e_prev = e;
        l_prev = l;
    }
    return kappa;
}

std::pair<double, double> angle_range(const PlanarCurve& curve) {
    AngleProfile prof = angle_lift(curve);
    double lo = prof.inf(), hi = prof.sup();
    // Edge angles sample the tangent at edge midpoints; recover the endpoint
    // tangents by extrapolating with the adjacent curvature stencil (exact
    // for uniformly sampled circular arcs).
    if (curve.nodes.size() >= 3) {
        auto kappa = curvature(curve);
        double start = prof.theta.front() -
                       0.5 * kappa.front() * dist(curve.nodes[0], curve.nodes[1]);
        double end = prof.theta.back() +
                     0.5 * kappa.back() *
                         dist(curve.nodes[curve.nodes.size() - 2], curve.nodes.back());
        lo = std::min(lo, std::min(start, end));
        hi = std::max(hi, std::max(start, end));
    }
    return {lo, hi};
}

bool is_almost_calibrated(const PlanarCurve& curve, double delta) {
    auto [lo, hi] = angle_range(curve);
    return hi - lo <= kPi - delta;
}

namespace {

double convexity_tol(const PlanarCurve& curve) {
    double h = curve.target_spacing > 0.0 ? curve.target_spacing : 1.0;
    return 1e-9 / h;
}

} // namespace

bool is_convex(const PlanarCurve& curve) {
    auto kappa = curvature(curve);
    double tol = convexity_tol(curve);
    bool all_nonneg = std::all_of(kappa.begin(), kappa.end(), [&](double k) { return k >= -tol; });
    bool all_nonpos = std::all_of(kappa.begin(), kappa.end(), [&](double k) { return k <= tol; });
    return all_nonneg || all_nonpos;
}

bool is_strictly_convex(const PlanarCurve& curve) {
    if (!is_convex(curve)) return false;
    auto kappa = curvature(curve);
    double tol = convexity_tol(curve);
    return std::all_of(kappa.begin(), kappa.end(), [&](double k) { return std::abs(k) > tol; });
}

PlanarCurve resample(const PlanarCurve& curve) { return resample(curve, curve.target_spacing); }

PlanarCurve resample(const PlanarCurve& curve, double spacing) {
    const auto& nodes = curve.nodes;
    if (nodes.size() < 2 || spacing <= 0.0) return curve;

    std::vector<double> s(nodes.size(), 0.0);
    for (size_t i = 1; i < nodes.size(); ++i) s[i] = s[i - 1] + dist(nodes[i - 1], nodes[i]);
    double L = s.back();
    if (L == 0.0) return curve;

    size_t count = std::max<size_t>(3, static_cast<size_t>(std::llround(L / spacing)) + 1);

    PlanarCurve out = curve;
    out.nodes.assign(count, Vec2{});
    out.nodes.front() = nodes.front();
    out.nodes.back() = nodes.back();
    size_t seg = 0;
    for (size_t i = 1; i + 1 < count; ++i) {
        double target = L * static_cast<double>(i) / static_cast<double>(count - 1);
        while (seg + 2 < s.size() && s[seg + 1] < target) ++seg;
        double span = s[seg + 1] - s[seg];
        double t = span > 0.0 ? (target - s[seg]) / span : 0.0;
        out.nodes[i] = lerp(nodes[seg], nodes[seg + 1], t);
    }
    return out;
}

Chord chord(const PlanarCurve& curve) {
    if (!curve.compact()) fail(Errc::NonCompactCurve, "chord requires pinned endpoints");
    return {curve.nodes.front(), curve.nodes.back()};
}

std::complex<double> central_charge(const PlanarCurve& curve) {
    Chord c = chord(curve);
    Vec2 d = c.b - c.a;
    return {2.0 * kPi * d.x, 2.0 * kPi * d.y};
}

double phase(const PlanarCurve& curve) {
    Chord c = chord(curve);
    return angle_of(c.b - c.a);
}

} // namespace mcsf
