#include "mcsf/neckpinch.hpp"

#include <algorithm>
#include <cmath>

#include "mcsf/errors.hpp"

namespace mcsf {

double default_window_radius(const PotentialField& field, size_t singularity,
                             const PlanarCurve& curve) {
    double c = std::numeric_limits<double>::infinity();
    Vec2 p = field.singularity(singularity);
    for (size_t s = 0; s < field.size(); ++s) {
        if (s == singularity) continue;
        c = std::min(c, 0.4 * dist(p, field.singularity(s)));
    }
    Vec2 lo = curve.nodes.front(), hi = curve.nodes.front();
    for (Vec2 v : curve.nodes) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    c = std::min(c, 0.2 * dist(lo, hi));
    if (field.mass() > 0.0) c = std::min(c, 0.25 / field.mass());
    return c;
}

namespace {

// Sub-polyline of `nodes` inside the ball B_c(p) containing node index
// `anchor`, with the two boundary edges clipped to the circle.
std::vector<Vec2> clip_window(const std::vector<Vec2>& nodes, Vec2 p, double c, size_t anchor) {
    auto inside = [&](Vec2 v) { return dist(v, p) <= c; };
    if (!inside(nodes[anchor])) return {};

    auto clip = [&](Vec2 in, Vec2 out) {
        // Point on segment [in, out] at distance c from p (in is inside).
        Vec2 d = out - in;
        double A = norm2(d);
        double B = 2.0 * dot(in - p, d);
        double C = norm2(in - p) - c * c;
        double disc = B * B - 4.0 * A * C;
        if (disc < 0.0 || A == 0.0) return out;
        double t = (-B + std::sqrt(disc)) / (2.0 * A);
        return in + d * std::clamp(t, 0.0, 1.0);
    };

    size_t lo = anchor;
    while (lo > 0 && inside(nodes[lo - 1])) --lo;
    size_t hi = anchor;
    while (hi + 1 < nodes.size() && inside(nodes[hi + 1])) ++hi;

    std::vector<Vec2> win;
    if (lo > 0) win.push_back(clip(nodes[lo], nodes[lo - 1]));
    for (size_t i = lo; i <= hi; ++i) win.push_back(nodes[i]);
    if (hi + 1 < nodes.size()) win.push_back(clip(nodes[hi], nodes[hi + 1]));
    return win;
}

} // namespace

RescalingTrack track(const PotentialField& field, std::span<const FlowSnapshot> snapshots,
                     size_t singularity, double window_radius) {
    RescalingTrack tr;
    tr.singularity = singularity;
    tr.p = field.singularity(singularity);
    tr.window_radius = window_radius;

    double lambda = 0.0;
    for (const auto& snap : snapshots) {
        const auto& nodes = snap.curve.nodes;
        double d = point_polyline_dist(tr.p, nodes);
        if (d > 0.0) lambda = std::max(lambda, 1.0 / d);

        size_t closest = 1;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 1; i + 1 < nodes.size(); ++i) {
            double di = dist(nodes[i], tr.p);
            if (di < best) {
                best = di;
                closest = i;
            }
        }

        if (best > window_radius || lambda == 0.0) continue;

        TrackEntry e;
        e.time = snap.time;
        e.lambda = lambda;
        e.dist = d;
        e.closest_node = closest;
        e.window = clip_window(nodes, tr.p, window_radius, closest);
        e.rescaled.reserve(e.window.size());
        for (Vec2 v : e.window) e.rescaled.push_back((v - tr.p) * lambda);
        e.rescaled_origin_dist = lambda * d;

        auto kappa = curvature(snap.curve);
        double sup_k = 0.0;
        for (size_t i = 1; i + 1 < nodes.size(); ++i)
            if (dist(nodes[i], tr.p) <= window_radius)
                sup_k = std::max(sup_k, std::abs(kappa[i - 1]));
        e.sup_rescaled_kappa = sup_k / lambda;

        double phi = field.eval(nodes[closest]);
        e.phi_inv_kappa_at_closest = std::abs(kappa[closest - 1]) / phi;
        Vec2 t0 = normalized(nodes[closest] - nodes[closest - 1]);
        Vec2 t1 = normalized(nodes[closest + 1] - nodes[closest]);
        Vec2 n = rot90(normalized(t0 + t1));
        e.normal_log_phi_at_closest = field.normal_log_phi(nodes[closest], n);

        tr.entries.push_back(std::move(e));
    }

    if (tr.entries.empty())
        fail(Errc::WindowEmpty, "no snapshot curve meets the tracking ball");
    return tr;
}

LineFit line_fit(const RescalingTrack& track, size_t entry_index, double core_radius) {
    const TrackEntry& e = track.entries.at(entry_index);
    std::vector<Vec2> pts;
    for (Vec2 v : e.rescaled)
        if (norm(v) <= core_radius) pts.push_back(v);
    if (pts.size() < 2) fail(Errc::DegenerateWindow, "fewer than 2 points in the fit core");

    Vec2 c{0.0, 0.0};
    for (Vec2 v : pts) c += v;
    c = c / static_cast<double>(pts.size());

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (Vec2 v : pts) {
        Vec2 d = v - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    // Principal eigenvector of the 2x2 covariance.
    double tr_half = 0.5 * (sxx + syy);
    double det = sxx * syy - sxy * sxy;
    double l1 = tr_half + std::sqrt(std::max(tr_half * tr_half - det, 0.0));
    Vec2 dir = std::abs(sxy) > 1e-300 ? normalized(Vec2{l1 - syy, sxy})
                                      : (sxx >= syy ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0});

    LineFit fit;
    fit.dir = dir;
    fit.offset = std::abs(cross(dir, c));
    fit.points = pts.size();
    for (Vec2 v : pts) fit.max_deviation = std::max(fit.max_deviation, std::abs(cross(dir, v - c)));
    return fit;
}

MonitorSeries blowup_monitors(const RescalingTrack& track) {
    MonitorSeries m;
    for (const auto& e : track.entries) {
        m.time.push_back(e.time);
        m.phi_inv_kappa.push_back(e.phi_inv_kappa_at_closest);
        m.normal_log_phi.push_back(e.normal_log_phi_at_closest);
    }
    return m;
}

} // namespace mcsf
