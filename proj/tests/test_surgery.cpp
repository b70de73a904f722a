#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mcsf/errors.hpp"
#include "mcsf/surgery.hpp"
#include "test_helpers.hpp"

using namespace mcsf;

namespace {

FlowParams params_for(const PlanarCurve& c, double max_time = 30.0) {
    FlowParams p;
    p.cfl = 0.45;
    p.target_spacing = c.target_spacing;
    p.surgery_radius = 3.0 * c.target_spacing;
    p.max_time = max_time;
    p.stationary_tol = 1e-4;
    return p;
}

} // namespace

TEST_CASE("detect_pinch reports simultaneous hits in index order") {
    PotentialField f(0.0, {{0, 0}, {3, 0}, {1.0, 0.2}, {2.0, 0.2}});
    PlanarCurve low = testing::analytic_arch(f, 0, 1, 0.35, 200);
    FlowParams p = params_for(low);
    p.surgery_radius = 0.25; // wide enough to see both interior centers
    FlowSnapshot snap = make_snapshot(f, low, 0.0);
    auto hits = detect_pinch(f, snap, p);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].first == 2);
    CHECK(hits[1].first == 3);
    CHECK(dist(low.nodes[hits[0].second], f.singularity(2)) < p.surgery_radius);
}

TEST_CASE("detect_pinch ignores far curves and the curve's own endpoints") {
    PotentialField f(0.0, {{0, 0}, {2, 0}, {1.0, 0.5}});
    PlanarCurve c = testing::analytic_arch(f, 0, 1, 1.2, 150);
    FlowParams p = params_for(c);
    FlowSnapshot snap = make_snapshot(f, c, 0.0);
    CHECK(detect_pinch(f, snap, p).empty()); // apex far above the interior center

    // a curve hugging its own endpoint singularity fires nothing
    PotentialField f2(0.0, {{0, 0}, {2, 0}});
    PlanarCurve c2 = testing::analytic_arch(f2, 0, 1, 0.3, 200);
    FlowParams p2 = params_for(c2);
    FlowSnapshot snap2 = make_snapshot(f2, c2, 0.0);
    CHECK(detect_pinch(f2, snap2, p2).empty());
}

TEST_CASE("split_at_singularity snaps the cut node and grades both pieces") {
    PotentialField f(0.0, {{0, 0}, {2, 0}, {1.0, 0.5}});
    // arc passing close above the interior singularity
    PlanarCurve c = testing::analytic_arch(f, 0, 1, 0.52, 220);
    FlowParams p = params_for(c);
    SplitOutcome out = split_at_singularity(f, c, 2, p);
    CHECK(out.left.nodes.back() == f.singularity(2));
    CHECK(out.right.nodes.front() == f.singularity(2));
    CHECK(out.left.end.singularity == 2);
    CHECK(out.right.start.singularity == 2);
    CHECK(out.left.nodes.size() >= 3);
    CHECK(out.right.nodes.size() >= 3);
    CHECK(is_almost_calibrated(out.left));
    CHECK(is_almost_calibrated(out.right));
    CHECK(out.junction_angle_gap >= 0.0);

    // split too close to an end is rejected
    PlanarCurve tiny;
    tiny.nodes = {{0, 0}, {0.95, 0.45}, {1.5, 0.3}, {2, 0}};
    tiny.start = CurveEnd::pinned(0);
    tiny.end = CurveEnd::pinned(1);
    tiny.target_spacing = 0.5;
    CHECK_THROWS_AS(split_at_singularity(f, tiny, 2, p), Error);
}

TEST_CASE("three-point run produces one surgery at the enclosed singularity") {
    PotentialField f(0.0, {{0, 0}, {2, 0}, {1.0, 0.5}});
    PlanarCurve c = testing::analytic_arch(f, 0, 1, 1.2, 200);
    FlowParams p = params_for(c);
    ThroughResult res = run_through_singularities(f, c, p);

    REQUIRE(res.events.size() == 1);
    CHECK(res.events[0].singularity == 2);
    CHECK(res.events[0].half_width > 0.0);
    CHECK_FALSE(res.max_time_exceeded);
    REQUIRE(res.final_components.size() == 2);
    CHECK(res.final_components[0].start.singularity == 0);
    CHECK(res.final_components[0].end.singularity == 2);
    CHECK(res.final_components[1].start.singularity == 2);
    CHECK(res.final_components[1].end.singularity == 1);
    for (const auto& comp : res.final_components) CHECK(is_almost_calibrated(comp));

    // every component snapshot keeps the almost calibrated bound (with slack)
    auto [lo0, hi0] = angle_range(c);
    double allowed = (hi0 - lo0) + 0.01;
    for (const auto& trace : res.traces)
        for (const auto& snap : trace.snapshots)
            CHECK(snap.diag.angle_sup - snap.diag.angle_inf <= allowed);

    FlowState st = final_state(f, res);
    CHECK_NOTHROW(validate_state(st));
}

TEST_CASE("junction angle gap shrinks with the trigger radius") {
    PotentialField f(0.0, {{0, 0}, {2, 0}, {1.0, 0.5}});
    PlanarCurve c = testing::analytic_arch(f, 0, 1, 1.2, 320);
    FlowParams coarse = params_for(c);
    coarse.surgery_radius = 8.0 * c.target_spacing;
    FlowParams fine = params_for(c);
    fine.surgery_radius = 4.0 * c.target_spacing;

    ThroughResult rc = run_through_singularities(f, c, coarse);
    ThroughResult rf = run_through_singularities(f, c, fine);
    REQUIRE(rc.events.size() == 1);
    REQUIRE(rf.events.size() == 1);
    CHECK(rf.events[0].junction_angle_gap < rc.events[0].junction_angle_gap);
    // the later trigger also pins the singular time more tightly
    CHECK(rf.events[0].half_width < rc.events[0].half_width);
    CHECK(rf.events[0].time >= rc.events[0].time);
}

TEST_CASE("a repeated junction singularity is rejected outright") {
    PotentialField f(0.0, {{0, 0}, {2, 0}, {1.0, 0.5}});
    PlanarCurve left = testing::analytic_arch(f, 0, 2, 0.2, 40);
    PlanarCurve right = testing::analytic_arch(f, 2, 1, 0.2, 40);
    PlanarCurve again = testing::analytic_arch(f, 2, 0, 0.2, 40);
    FlowState bad{0.0, {left, right, again}, {}, f};
    CHECK_THROWS_AS(validate_state(bad), Error);
}

TEST_CASE("event count respects |S| - 2 and junctions stay distinct") {
    PotentialField f(0.0, {{0, 0}, {2, 0}, {0.8, 0.35}, {1.3, 0.3}});
    PlanarCurve c = testing::analytic_arch(f, 0, 1, 1.0, 240);
    FlowParams p = params_for(c, 60.0);
    ThroughResult res = run_through_singularities(f, c, p);
    CHECK(res.events.size() <= f.size() - 2);
    CHECK(res.final_components.size() <= f.size() - 1);
    std::set<int> junctions;
    for (const auto& ev : res.events) CHECK(junctions.insert(ev.singularity).second);
    for (size_t e = 1; e < res.events.size(); ++e)
        CHECK(res.events[e].time >= res.events[e - 1].time);
}

TEST_CASE("continuity of the weighted test integral across a surgery") {
    PotentialField f(0.0, {{0, 0}, {2, 0}, {1.0, 0.5}});
    PlanarCurve c = testing::analytic_arch(f, 0, 1, 1.2, 200);
    FlowParams p = params_for(c);
    RunOptions opts;
    opts.snapshot_dt = 0.01;
    ThroughResult res = run_through_singularities(f, c, p, opts);
    REQUIRE(res.events.size() == 1);
    double T = res.events[0].time;

    // smooth bump on the flank of the last pre-pinch curve
    const ComponentTrace& trace = res.traces[0];
    const auto& late = trace.snapshots.back().curve.nodes;
    double L = polyline_length(late);
    double target = 0.25 * L, acc = 0.0;
    Vec2 center = late.front();
    for (size_t i = 0; i + 1 < late.size(); ++i) {
        acc += dist(late[i], late[i + 1]);
        if (acc >= target) {
            center = late[i + 1];
            break;
        }
    }
    double w = 0.6 * f.nearest_distance(center);
    auto bump = [&](Vec2 x) {
        double u = dist(x, center) / w;
        return u >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - u * u));
    };
    auto integral = [&](const std::vector<Vec2>& nodes) {
        double acc = 0.0;
        for (size_t i = 0; i + 1 < nodes.size(); ++i) {
            Vec2 m = lerp(nodes[i], nodes[i + 1], 0.5);
            double fv = bump(m);
            if (fv > 0.0) acc += fv * f.eval(m) * dist(nodes[i], nodes[i + 1]);
        }
        return acc;
    };

    double i_post = 0.0;
    for (const auto& tr : res.traces)
        if (tr.parent == 0 && tr.born == T)
            i_post += integral(tr.snapshots.front().curve.nodes);

    // look-back window: the event's own uncertainty scale
    double window = res.events[0].half_width;
    REQUIRE(window > 0.0);
    auto at = [&](double frac) {
        const FlowSnapshot* bestsnap = nullptr;
        double tstar = T - frac * window;
        for (const auto& s : trace.snapshots)
            if (!bestsnap || std::abs(s.time - tstar) < std::abs(bestsnap->time - tstar))
                bestsnap = &s;
        return std::pair<double, double>(integral(bestsnap->curve.nodes), T - bestsnap->time);
    };
    auto [i1, e1] = at(0.1);
    auto [i2, e2] = at(0.05);
    auto [i3, e3] = at(0.025);
    REQUIRE(e1 > e2);
    REQUIRE(e2 > e3);
    REQUIRE(e3 > 0.0);
    // linear scaling in the look-back: halving eps halves the difference
    double r1 = 2.0 * (std::abs(i1 - i_post) / std::abs(i2 - i_post)) * (e2 / e1);
    double r2 = 2.0 * (std::abs(i2 - i_post) / std::abs(i3 - i_post)) * (e3 / e2);
    CHECK(r1 > 1.7);
    CHECK(r1 < 2.3);
    CHECK(r2 > 1.7);
    CHECK(r2 < 2.3);
}
