#include "mcsf/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mcsf/errors.hpp"

namespace mcsf {

void validate_state(const FlowState& state) {
    const auto& comps = state.components;
    if (comps.empty()) fail(Errc::ValidationError, "flow state has no components");
    std::set<int> junctions;
    for (size_t i = 0; i < comps.size(); ++i) {
        validate(state.field, comps[i]);
        if (i + 1 < comps.size()) {
            if (comps[i].end.kind != EndKind::Pinned ||
                comps[i + 1].start.kind != EndKind::Pinned ||
                comps[i].end.singularity != comps[i + 1].start.singularity)
                fail(Errc::ValidationError, "components do not have consecutive endpoints");
            if (!junctions.insert(comps[i].end.singularity).second)
                fail(Errc::ValidationError, "singularity used as a junction more than once");
        }
    }
    for (size_t e = 1; e < state.events.size(); ++e)
        if (state.events[e].time < state.events[e - 1].time)
            fail(Errc::ValidationError, "surgery events out of time order");
    if (state.field.size() >= 2 && state.events.size() > state.field.size() - 2)
        fail(Errc::ValidationError, "more surgeries than |S| - 2");
}

std::vector<std::pair<size_t, size_t>> detect_pinch(const PotentialField& field,
                                                    const FlowSnapshot& snapshot,
                                                    const FlowParams& params) {
    std::vector<std::pair<size_t, size_t>> hits;
    if (params.surgery_radius <= 0.0) return hits;
    const auto& c = snapshot.curve;
    int end_sing[2] = {c.start.kind == EndKind::Pinned ? c.start.singularity : -1,
                       c.end.kind == EndKind::Pinned ? c.end.singularity : -1};
    for (size_t s = 0; s < field.size(); ++s) {
        if (static_cast<int>(s) == end_sing[0] || static_cast<int>(s) == end_sing[1]) continue;
        double best = std::numeric_limits<double>::infinity();
        size_t best_node = 0;
        for (size_t i = 1; i + 1 < c.nodes.size(); ++i) {
            double d = dist(c.nodes[i], field.singularity(s));
            if (d < best) {
                best = d;
                best_node = i;
            }
        }
        if (best < params.surgery_radius) hits.emplace_back(s, best_node);
    }
    return hits;
}

SplitOutcome split_at_singularity(const PotentialField& field, const PlanarCurve& curve,
                                  size_t singularity, const FlowParams& params) {
    const auto& nodes = curve.nodes;
    Vec2 p = field.singularity(singularity);

    size_t cut = 1;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i + 1 < nodes.size(); ++i) {
        double d = dist(nodes[i], p);
        if (d < best - 1e-12) { // ties keep the lower index
            best = d;
            cut = i;
        }
    }

    // Nodes inside the trigger ball carry the surgery's O(radius) position
    // uncertainty; drop them so the snapped junction joins the strands
    // without a spurious kink.
    double trim = std::max(params.surgery_radius, 2.0 * curve.target_spacing);
    size_t lo = cut, hi = cut;
    while (lo > 1 && dist(nodes[lo - 1], p) < trim) --lo;
    while (hi + 2 < nodes.size() && dist(nodes[hi + 1], p) < trim) ++hi;
    if (lo < 2 || hi + 2 >= nodes.size())
        fail(Errc::SplitTooCoarse, "a split piece would have fewer than 3 nodes");

    SplitOutcome out;
    out.left.nodes.assign(nodes.begin(), nodes.begin() + static_cast<long>(lo));
    out.left.nodes.push_back(p);
    out.left.start = curve.start;
    out.left.end = CurveEnd::pinned(static_cast<int>(singularity));
    out.left.target_spacing = curve.target_spacing;

    out.right.nodes.assign(nodes.begin() + static_cast<long>(hi) + 1, nodes.end());
    out.right.nodes.insert(out.right.nodes.begin(), p);
    out.right.start = CurveEnd::pinned(static_cast<int>(singularity));
    out.right.end = curve.end;
    out.right.target_spacing = curve.target_spacing;

    // C^1 mismatch: tangent directions sampled a couple of trigger radii away
    // from the junction, outside the zone distorted by the node snap.
    double offset = 2.0 * std::max(params.surgery_radius, 2.0 * curve.target_spacing);
    auto tangent_at = [&](const std::vector<Vec2>& pts, bool from_back) {
        double acc = 0.0;
        if (from_back) {
            for (size_t i = pts.size() - 1; i > 0; --i) {
                acc += dist(pts[i], pts[i - 1]);
                if (acc >= offset || i == 1) return angle_of(pts[i] - pts[i - 1]);
            }
        } else {
            for (size_t i = 1; i < pts.size(); ++i) {
                acc += dist(pts[i - 1], pts[i]);
                if (acc >= offset || i + 1 == pts.size()) return angle_of(pts[i] - pts[i - 1]);
            }
        }
        return 0.0;
    };
    double in_angle = tangent_at(out.left.nodes, true);
    double out_angle = tangent_at(out.right.nodes, false);
    out.junction_angle_gap = std::abs(wrap_angle(out_angle - in_angle));

    out.left = resample(out.left);
    out.right = resample(out.right);
    validate(field, out.left);
    validate(field, out.right);
    return out;
}

namespace {

struct QueueEntry {
    PlanarCurve curve;
    double born = 0.0;
    int trace_id = 0;
    bool done = false;
};

} // namespace

ThroughResult run_through_singularities(const PotentialField& field, const PlanarCurve& curve,
                                        const FlowParams& params, const RunOptions& opts) {
    params.validate_fields();
    if (params.surgery_radius <= 0.0)
        fail(Errc::ValidationError, "run_through_singularities requires surgery_radius > 0");
    validate(field, curve);
    if (!is_almost_calibrated(curve))
        fail(Errc::NotAlmostCalibrated, "initial curve is not almost calibrated");

    ThroughResult res;
    std::vector<QueueEntry> slots;
    slots.push_back({curve, 0.0, 0, false});
    res.traces.push_back(ComponentTrace{0, -1, 0.0, {}, StopReason::MaxTime, {}, {}, {}});
    int next_id = 1;
    std::set<int> used_junctions;

    // Compact arcs occupy two endpoint singularities; ray curves none.
    size_t max_events = curve.compact() ? (field.size() >= 2 ? field.size() - 2 : 0)
                                        : field.size();

    while (true) {
        auto it = std::find_if(slots.begin(), slots.end(),
                               [](const QueueEntry& e) { return !e.done; });
        if (it == slots.end()) break;
        QueueEntry& entry = *it;

        RunResult rr = run(field, entry.curve, params, opts, entry.born);

        ComponentTrace& trace = res.traces[static_cast<size_t>(entry.trace_id)];
        trace.snapshots = std::move(rr.snapshots);
        trace.windows = std::move(rr.windows);
        trace.last_reason = rr.reason;
        trace.pinch = rr.pinch;

        res.invariants.steps_checked += rr.invariants.steps_checked;
        res.invariants.range_violations += rr.invariants.range_violations;
        res.invariants.max_range_excess =
            std::max(res.invariants.max_range_excess, rr.invariants.max_range_excess);
        res.invariants.sign_flips += rr.invariants.sign_flips;
        res.invariants.length_violations += rr.invariants.length_violations;
        res.invariants.max_length_excess =
            std::max(res.invariants.max_length_excess, rr.invariants.max_length_excess);

        res.final_time = std::max(res.final_time, rr.final_time);

        if (rr.reason == StopReason::PinchDetected) {
            const PinchInfo& pinch = *rr.pinch;
            int sing = static_cast<int>(pinch.singularity);
            if (!used_junctions.insert(sing).second)
                fail(Errc::ValidationError,
                     "pinch at a singularity already used as a junction");
            if (res.events.size() + 1 > max_events)
                fail(Errc::ValidationError, "more surgeries than |S| - 2");

            SplitOutcome split = split_at_singularity(field, rr.final_curve,
                                                      pinch.singularity, params);

            trace.died = rr.final_time;

            SurgeryEvent ev;
            ev.time = rr.final_time;
            ev.half_width = rr.final_time - pinch.time_enter;
            ev.singularity = sing;
            ev.old_component = entry.trace_id;
            ev.new_components = {next_id, next_id + 1};
            res.events.push_back(ev);

            QueueEntry left{std::move(split.left), rr.final_time, next_id, false};
            QueueEntry right{std::move(split.right), rr.final_time, next_id + 1, false};
            res.traces.push_back(
                ComponentTrace{next_id, entry.trace_id, rr.final_time, {}, StopReason::MaxTime,
                               {}, {}, {}});
            res.traces.push_back(
                ComponentTrace{next_id + 1, entry.trace_id, rr.final_time, {}, StopReason::MaxTime,
                               {}, {}, {}});
            res.traces[static_cast<size_t>(res.traces.size() - 2)].snapshots.push_back(
                make_snapshot(field, left.curve, rr.final_time));
            res.traces.back().snapshots.push_back(
                make_snapshot(field, right.curve, rr.final_time));
            // Record the measured mismatch on the event.
            res.events.back().junction_angle_gap = split.junction_angle_gap;
            next_id += 2;

            size_t pos = static_cast<size_t>(it - slots.begin());
            slots[pos] = std::move(left);
            slots.insert(slots.begin() + static_cast<long>(pos) + 1, std::move(right));
        } else {
            entry.curve = rr.final_curve;
            entry.done = true;
            if (rr.reason == StopReason::MaxTime &&
                compute_diagnostics(field, rr.final_curve).max_phi_inv_kappa >=
                    params.stationary_tol)
                res.max_time_exceeded = true;
        }
    }

    std::stable_sort(res.events.begin(), res.events.end(),
                     [](const SurgeryEvent& a, const SurgeryEvent& b) {
                         if (a.time != b.time) return a.time < b.time;
                         return a.singularity < b.singularity;
                     });

    for (auto& slot : slots) {
        res.final_components.push_back(std::move(slot.curve));
        res.final_trace_ids.push_back(slot.trace_id);
    }
    if (curve.compact() && field.size() >= 2 &&
        res.final_components.size() > field.size() - 1)
        fail(Errc::ValidationError, "more final components than |S| - 1");
    return res;
}

FlowState final_state(const PotentialField& field, const ThroughResult& result) {
    FlowState st{result.final_time, result.final_components, result.events, field};
    return st;
}

} // namespace mcsf
