#include "mcsf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcsf/errors.hpp"

namespace mcsf {

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::Stable: return "Stable";
        case Classification::SemiStable: return "SemiStable";
        case Classification::StrictlyUnstable: return "StrictlyUnstable";
    }
    return "?";
}

const char* flow_classification_name(FlowClassification c) {
    switch (c) {
        case FlowClassification::FlowStable: return "FlowStable";
        case FlowClassification::FlowSemiStable: return "FlowSemiStable";
        case FlowClassification::StrictlyFlowUnstable: return "StrictlyFlowUnstable";
    }
    return "?";
}

Enclosure enclosed_singularities(const PotentialField& field, const PlanarCurve& curve) {
    if (!curve.compact()) fail(Errc::NonCompactCurve, "enclosure requires pinned endpoints");
    Vec2 p1 = curve.nodes.front(), p2 = curve.nodes.back();
    double guard = field.guard_band();

    Enclosure enc;
    for (size_t s = 0; s < field.size(); ++s) {
        if (static_cast<int>(s) == curve.start.singularity ||
            static_cast<int>(s) == curve.end.singularity)
            continue;
        Vec2 q = field.singularity(s);
        if (point_polyline_dist(q, curve.nodes) <= guard)
            fail(Errc::SingularityOnCurve, "singularity lies on the curve");
        if (point_segment_dist(q, p1, p2) <= guard) {
            enc.on_chord.push_back(s);
            continue;
        }
        // The curve's nodes, implicitly closed by the reversed chord, bound
        // the region; even-odd handles curves crossing the chord.
        if (point_in_polygon(q, curve.nodes)) enc.interior.push_back(s);
    }
    return enc;
}

namespace {

struct RelativeRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Angle range of the curve measured against the chord direction, branch-safe.
RelativeRange chord_relative_range(const PlanarCurve& curve) {
    AngleProfile prof = angle_lift(curve);
    auto [lo, hi] = angle_range(curve);
    double base = prof.theta.front();
    double alpha = angle_of(curve.nodes.back() - curve.nodes.front());
    double shift = wrap_angle(base - alpha);
    return {lo - base + shift, hi - base + shift};
}

} // namespace

StabilityVerdict classify(const PotentialField& field, const PlanarCurve& curve) {
    validate(field, curve);
    if (!curve.compact()) fail(Errc::NonCompactCurve, "classification requires a compact curve");
    if (!is_almost_calibrated(curve))
        fail(Errc::NotAlmostCalibrated, "classification requires an almost calibrated curve");

    Enclosure enc = enclosed_singularities(field, curve);
    Vec2 p1 = curve.nodes.front(), p2 = curve.nodes.back();
    Vec2 u = normalized(p2 - p1);
    double alpha = angle_of(p2 - p1);
    RelativeRange range = chord_relative_range(curve);
    double curve_len = curve.length();

    StabilityVerdict verdict;
    bool any_strict = false, any_equal = false;
    bool any_flow_violation = false, any_flow_strict = false;

    auto add = [&](size_t s, bool on_chord) {
        Vec2 q = field.singularity(s);
        Decomposition d;
        d.singularity = s;
        d.on_chord = on_chord;
        d.len_1 = dist(q, p1);
        d.len_2 = dist(p2, q);
        d.theta_bar_1 = wrap_angle(angle_of(q - p1) - alpha);
        d.theta_bar_2 = wrap_angle(angle_of(p2 - q) - alpha);

        double range_lo = range.lo, range_hi = range.hi;
        if (!on_chord && cross(u, q - p1) < 0.0) {
            // Reflect lobes below the chord into the canonical upper frame.
            d.theta_bar_1 = -d.theta_bar_1;
            d.theta_bar_2 = -d.theta_bar_2;
            range_lo = -range.hi;
            range_hi = -range.lo;
        }
        if (on_chord) {
            d.theta_bar_1 = 0.0;
            d.theta_bar_2 = 0.0;
            any_equal = true;
        } else {
            any_strict = true;
        }

        // Flow stability needs (a) the phase interval to escape the open
        // angle range, or (b) the curve shorter than the two chords combined.
        double tmin = std::min(d.theta_bar_1, d.theta_bar_2);
        double tmax = std::max(d.theta_bar_1, d.theta_bar_2);
        bool a_holds = !(tmin > range_lo && tmax < range_hi);
        bool b_holds = curve_len < d.len_1 + d.len_2;
        if (!a_holds && !b_holds) {
            any_flow_violation = true;
            if (d.theta_bar_1 > d.theta_bar_2) any_flow_strict = true;
        }
        verdict.witnesses.push_back(d);
    };

    for (size_t s : enc.interior) add(s, false);
    for (size_t s : enc.on_chord) add(s, true);

    verdict.classification = any_strict ? Classification::StrictlyUnstable
                             : any_equal ? Classification::SemiStable
                                         : Classification::Stable;
    verdict.flow_classification = !any_flow_violation ? FlowClassification::FlowStable
                                  : any_flow_strict   ? FlowClassification::StrictlyFlowUnstable
                                                      : FlowClassification::FlowSemiStable;
    return verdict;
}

std::vector<double> ChainReport::phases() const {
    std::vector<double> out;
    out.reserve(segments.size());
    for (const auto& s : segments) out.push_back(s.phase);
    return out;
}

namespace {

bool segments_share_one_point(const ChainSegment& s, const ChainSegment& t) {
    // Consecutive chain segments: t starts where s ends; they must not fold
    // back over each other (collinear continuation is fine).
    if (dist(s.b, t.a) > 0.0) return false;
    if (cross(s.b - s.a, t.b - t.a) != 0.0) return true;
    return dot(t.b - t.a, s.a - s.b) <= 0.0;
}

bool check_a_k(const std::vector<ChainSegment>& segs) {
    for (size_t i = 0; i < segs.size(); ++i) {
        for (size_t j = i + 1; j < segs.size(); ++j) {
            if (j == i + 1) {
                if (!segments_share_one_point(segs[i], segs[j])) return false;
            } else {
                if (segments_intersect(segs[i].a, segs[i].b, segs[j].a, segs[j].b)) return false;
            }
        }
    }
    return true;
}

bool check_monotone(const std::vector<ChainSegment>& segs) {
    for (size_t i = 1; i < segs.size(); ++i)
        if (segs[i].phase > segs[i - 1].phase + 1e-12) return false;
    return true;
}

} // namespace

ChainReport chain_from_segments(std::vector<ChainSegment> segments) {
    ChainReport rep;
    rep.segments = std::move(segments);
    rep.a_k_valid = check_a_k(rep.segments);
    rep.phase_monotone = check_monotone(rep.segments);
    return rep;
}

ChainReport limit_oracle(const PotentialField& field, const PlanarCurve& curve) {
    validate(field, curve);
    if (!curve.compact()) fail(Errc::NonCompactCurve, "limit_oracle requires a compact curve");
    if (!is_strictly_convex(curve))
        fail(Errc::NotStrictlyConvex, "limit_oracle requires a strictly convex curve");
    if (!is_almost_calibrated(curve))
        fail(Errc::NotAlmostCalibrated, "limit_oracle requires an almost calibrated curve");

    Enclosure enc = enclosed_singularities(field, curve);
    double guard = field.guard_band();

    struct Cand {
        Vec2 pos;
        int sing;
    };
    std::vector<Cand> cands;
    cands.push_back({curve.nodes.front(), curve.start.singularity});
    cands.push_back({curve.nodes.back(), curve.end.singularity});
    for (size_t s : enc.interior) cands.push_back({field.singularity(s), static_cast<int>(s)});
    for (size_t s : enc.on_chord) cands.push_back({field.singularity(s), static_cast<int>(s)});

    auto sing_at = [&](Vec2 v) -> int {
        for (const auto& c : cands)
            if (dist(c.pos, v) <= guard) return c.sing;
        return -1;
    };

    Vec2 p1 = curve.nodes.front(), p2 = curve.nodes.back();
    Vec2 u = normalized(p2 - p1);

    // The side of the chord the curve lives on (strictly convex arcs are
    // one-sided); probed at the node farthest from the chord line.
    double side = 0.0, best = -1.0;
    for (Vec2 v : curve.nodes) {
        double c = cross(u, v - p1);
        if (std::abs(c) > best) {
            best = std::abs(c);
            side = c >= 0.0 ? 1.0 : -1.0;
        }
    }

    std::vector<Vec2> pts;
    for (const auto& c : cands) pts.push_back(c.pos);
    std::vector<Vec2> hull = convex_hull(pts);

    std::vector<Vec2> path; // hull vertices from p1 to p2 on the curve side
    if (hull.size() < 3) {
        path = {p1, p2}; // collinear configuration: chain is the chord itself
    } else {
        size_t i1 = hull.size(), i2 = hull.size();
        for (size_t i = 0; i < hull.size(); ++i) {
            if (dist(hull[i], p1) <= guard) i1 = i;
            if (dist(hull[i], p2) <= guard) i2 = i;
        }
        if (i1 == hull.size() || i2 == hull.size())
            fail(Errc::ValidationError, "curve endpoints are not hull vertices");

        auto walk = [&](bool forward) {
            std::vector<Vec2> out{hull[i1]};
            size_t i = i1;
            while (i != i2) {
                i = forward ? (i + 1) % hull.size() : (i + hull.size() - 1) % hull.size();
                out.push_back(hull[i]);
            }
            return out;
        };
        auto on_curve_side = [&](const std::vector<Vec2>& p) {
            for (size_t i = 1; i + 1 < p.size(); ++i)
                if (side * cross(u, p[i] - p1) < -guard) return false;
            return true;
        };
        std::vector<Vec2> fwd = walk(true), bwd = walk(false);
        bool fwd_has = fwd.size() > 2, bwd_has = bwd.size() > 2;
        if (fwd_has && on_curve_side(fwd) && (!bwd_has || !on_curve_side(bwd)))
            path = fwd;
        else if (bwd_has && on_curve_side(bwd))
            path = bwd;
        else
            path = fwd_has ? fwd : bwd;
    }

    // Subdivide hull edges at singularities sitting on them, so no chain
    // segment contains a singularity in its interior.
    std::vector<ChainSegment> segs;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        Vec2 a = path[i], b = path[i + 1];
        std::vector<Cand> on_edge;
        for (const auto& c : cands) {
            if (dist(c.pos, a) <= guard || dist(c.pos, b) <= guard) continue;
            if (point_segment_dist(c.pos, a, b) <= guard) on_edge.push_back(c);
        }
        std::sort(on_edge.begin(), on_edge.end(), [&](const Cand& x, const Cand& y) {
            return dot(x.pos - a, b - a) < dot(y.pos - a, b - a);
        });
        Vec2 prev = a;
        int prev_sing = sing_at(a);
        for (const auto& c : on_edge) {
            segs.push_back({prev, c.pos, prev_sing, c.sing, angle_of(c.pos - prev)});
            prev = c.pos;
            prev_sing = c.sing;
        }
        segs.push_back({prev, b, prev_sing, sing_at(b), angle_of(b - prev)});
    }
    return chain_from_segments(std::move(segs));
}

ChainReport chain_report(const PotentialField& field, const ThroughResult& result,
                         double chord_tol) {
    std::vector<ChainSegment> segs;
    for (const auto& comp : result.final_components) {
        Vec2 a = comp.nodes.front(), b = comp.nodes.back();
        std::vector<Vec2> straight{a, b};
        double dev = 0.0;
        for (Vec2 v : comp.nodes) dev = std::max(dev, point_polyline_dist(v, straight));
        if (dev > chord_tol)
            fail(Errc::ComponentNotStationary,
                 "final component is not straight to within the chord tolerance");
        ChainSegment s;
        s.a = a;
        s.b = b;
        s.sing_a = comp.start.kind == EndKind::Pinned ? comp.start.singularity : -1;
        s.sing_b = comp.end.kind == EndKind::Pinned ? comp.end.singularity : -1;
        s.phase = angle_of(b - a);
        if (s.sing_a >= 0) s.a = field.singularity(static_cast<size_t>(s.sing_a));
        if (s.sing_b >= 0) s.b = field.singularity(static_cast<size_t>(s.sing_b));
        segs.push_back(s);
    }
    return chain_from_segments(std::move(segs));
}

DestabilizationOrder destabilization_order(const ChainReport& chain) {
    DestabilizationOrder out;
    std::vector<size_t> idx(chain.segments.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return chain.segments[a].phase > chain.segments[b].phase;
    });
    for (size_t i : idx) out.order.push_back(static_cast<int>(i) + 1);

    // Nested right-associated connect sum: L_a # (L_b # (L_c # ...)).
    if (!out.order.empty()) {
        std::string s = "L" + std::to_string(out.order.back());
        for (size_t i = out.order.size() - 1; i-- > 0;) {
            bool compound = i + 2 < out.order.size();
            s = "L" + std::to_string(out.order[i]) + " # " + (compound ? "(" + s + ")" : s);
        }
        out.bracketing = std::move(s);
    }
    return out;
}

} // namespace mcsf
