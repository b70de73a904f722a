#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mcsf/errors.hpp"
#include "mcsf/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mcsf {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::ValidationError, "cannot open for writing: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

// Compactly supported smooth bump of the given width.
double bump(Vec2 x, Vec2 c, double w) {
    double u = dist(x, c) / w;
    if (u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double test_integral(const PotentialField& field, const std::vector<Vec2>& nodes, Vec2 c,
                     double w) {
    // 4-point Gauss per edge: the comparison across a surgery must not feel
    // the O(h^2) node re-placement of the post-split resampling.
    static const double gx[4] = {0.069431844202973714, 0.330009478207571868,
                                 0.669990521792428132, 0.930568155797026286};
    static const double gw[4] = {0.173927422568726929, 0.326072577431273071,
                                 0.326072577431273071, 0.173927422568726929};
    double acc = 0.0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        Vec2 a = nodes[i], b = nodes[i + 1];
        if (bump(lerp(a, b, 0.5), c, 2.0 * w) == 0.0) continue;
        double len = dist(a, b);
        for (int k = 0; k < 4; ++k) {
            Vec2 x = lerp(a, b, gx[k]);
            double f = bump(x, c, w);
            if (f > 0.0) acc += gw[k] * f * field.eval(x) * len;
        }
    }
    return acc;
}

struct RowComponents {
    double time = 0.0;
    std::vector<const FlowSnapshot*> snaps; // chained in curve order
};

// Interval sort keys make children keep their parent's position.
std::map<int, std::pair<double, double>> trace_intervals(const ThroughResult& res) {
    std::map<int, std::pair<double, double>> iv;
    iv[0] = {0.0, 1.0};
    for (const auto& ev : res.events) {
        auto parent = iv.at(ev.old_component);
        double mid = 0.5 * (parent.first + parent.second);
        iv[ev.new_components[0]] = {parent.first, mid};
        iv[ev.new_components[1]] = {mid, parent.second};
    }
    return iv;
}

std::map<long, RowComponents> collect_rows(const ThroughResult& res, double snapshot_dt) {
    auto iv = trace_intervals(res);
    long last = 0;
    for (const auto& trace : res.traces)
        for (const auto& snap : trace.snapshots)
            last = std::max(last, snap.cadence_index);

    std::map<long, RowComponents> out;
    for (long k = 0; k <= last; ++k) {
        double t = static_cast<double>(k) * snapshot_dt;
        std::map<double, const FlowSnapshot*> by_pos;
        for (const auto& trace : res.traces) {
            if (trace.born > t + 1e-12) continue;
            if (trace.died && *trace.died <= t) continue; // replaced by children
            // The snapshot tagged with this grid index, or the final state of
            // a component that went stationary earlier.
            const FlowSnapshot* chosen = nullptr;
            for (const auto& snap : trace.snapshots) {
                if (snap.cadence_index == k) {
                    chosen = &snap;
                    break;
                }
            }
            if (!chosen && !trace.snapshots.empty() &&
                trace.snapshots.back().time <= t + 1e-12 && !trace.died)
                chosen = &trace.snapshots.back();
            if (chosen) by_pos[iv.at(trace.id).first] = chosen;
        }
        if (by_pos.empty()) continue;
        RowComponents rc;
        rc.time = t;
        for (auto& [pos, snap] : by_pos) rc.snaps.push_back(snap);
        out[k] = rc;
    }
    return out;
}

std::vector<Vec2> union_nodes(const RowComponents& row) {
    std::vector<Vec2> nodes;
    for (const FlowSnapshot* s : row.snaps) {
        if (nodes.empty()) {
            nodes = s->curve.nodes;
        } else {
            nodes.insert(nodes.end(), s->curve.nodes.begin() + 1, s->curve.nodes.end());
        }
    }
    return nodes;
}

std::string svg_frame(const PotentialField& field, const Scenario& sc, const RowComponents& row,
                      const ChainReport* oracle) {
    Vec2 lo = field.singularity(0), hi = lo;
    for (size_t s = 0; s < field.size(); ++s) {
        Vec2 p = field.singularity(s);
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    if (field.size() == 1 && !row.snaps.empty()) {
        for (Vec2 v : row.snaps.front()->curve.nodes) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
        }
    }
    double w = std::max(hi.x - lo.x, 1e-6), h = std::max(hi.y - lo.y, 1e-6);
    double pad = 0.2 * std::max(w, h);
    lo -= Vec2{pad, pad};
    hi += Vec2{pad, pad};
    w = hi.x - lo.x;
    h = hi.y - lo.y;

    double W = 800.0, H = W * h / w;
    auto X = [&](double x) { return (x - lo.x) / w * W; };
    auto Y = [&](double y) { return H - (y - lo.y) / h * H; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    double cr = 0.012 * W;
    for (size_t s = 0; s < field.size(); ++s) {
        Vec2 p = field.singularity(s);
        out << "<path d=\"M" << X(p.x) - cr << " " << Y(p.y) << " H" << X(p.x) + cr << " M"
            << X(p.x) << " " << Y(p.y) - cr << " V" << Y(p.y) + cr
            << "\" stroke=\"#444\" stroke-width=\"1.5\"/>\n";
    }

    if (oracle) {
        out << "<polyline fill=\"none\" stroke=\"#999\" stroke-width=\"1.2\" "
               "stroke-dasharray=\"6 4\" points=\"";
        for (size_t i = 0; i < oracle->segments.size(); ++i) {
            const auto& seg = oracle->segments[i];
            if (i == 0) out << X(seg.a.x) << "," << Y(seg.a.y) << " ";
            out << X(seg.b.x) << "," << Y(seg.b.y) << " ";
        }
        out << "\"/>\n";
    }

    for (const FlowSnapshot* s : row.snaps) {
        out << "<polyline fill=\"none\" stroke=\"#c22\" stroke-width=\"1.6\" points=\"";
        for (Vec2 v : s->curve.nodes) out << X(v.x) << "," << Y(v.y) << " ";
        out << "\"/>\n";
        for (const CurveEnd* e : {&s->curve.start, &s->curve.end}) {
            if (e->kind != EndKind::Pinned) continue;
            Vec2 p = field.singularity(static_cast<size_t>(e->singularity));
            out << "<circle cx=\"" << X(p.x) << "\" cy=\"" << Y(p.y) << "\" r=\"" << 0.006 * W
                << "\" fill=\"#c22\"/>\n";
        }
    }
    out << "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">" << sc.name
        << "  t=" << row.time << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

struct PinchAnalysis {
    PinchReport report;
    bool offset_ok = false, deviation_ok = false, kappa_ok = false, nlp_ok = false,
         continuity_ok = false;
};

PinchAnalysis analyze_pinch(const PotentialField& field, const ThroughResult& res,
                            const SurgeryEvent& ev, const FlowParams& params) {
    PinchAnalysis pa;
    pa.report.singularity = ev.singularity;
    pa.report.time = ev.time;
    pa.report.half_width = ev.half_width;

    const ComponentTrace& trace = res.traces.at(static_cast<size_t>(ev.old_component));
    const PlanarCurve& birth_curve = trace.snapshots.front().curve;
    double c = default_window_radius(field, static_cast<size_t>(ev.singularity), birth_curve);

    // The approach to this singularity may predate the component: walk the
    // ancestor chain so the track sees the whole history.
    std::vector<FlowSnapshot> history;
    for (int id = ev.old_component; id >= 0; id = res.traces.at(static_cast<size_t>(id)).parent) {
        const auto& snaps = res.traces.at(static_cast<size_t>(id)).snapshots;
        history.insert(history.end(), snaps.begin(), snaps.end());
    }
    std::sort(history.begin(), history.end(),
              [](const FlowSnapshot& a, const FlowSnapshot& b) { return a.time < b.time; });

    RescalingTrack tr = track(field, history, static_cast<size_t>(ev.singularity), c);
    const TrackEntry& last = tr.entries.back();

    LineFit fit = line_fit(tr, tr.entries.size() - 1);
    pa.report.final_offset = fit.offset;
    pa.report.final_deviation = fit.max_deviation;
    pa.report.final_sup_rescaled_kappa = last.sup_rescaled_kappa;
    pa.offset_ok = fit.offset > 0.9 && fit.offset < 1.1;
    pa.deviation_ok = fit.max_deviation < 0.05;

    // Monitors over the final distance decade (from 10 * trigger radius).
    double decade_start = 10.0 * params.surgery_radius;
    const TrackEntry* first = nullptr;
    for (const auto& e : tr.entries) {
        if (e.dist <= decade_start) {
            first = &e;
            break;
        }
    }
    if (first && first != &last) {
        pa.report.kappa_monitor_ratio =
            first->phi_inv_kappa_at_closest / std::max(last.phi_inv_kappa_at_closest, 1e-300);
        pa.report.nlp_monitor_ratio =
            last.normal_log_phi_at_closest / std::max(first->normal_log_phi_at_closest, 1e-300);
        pa.kappa_ok = pa.report.kappa_monitor_ratio >= 10.0;
        pa.nlp_ok = pa.report.nlp_monitor_ratio >= 3.0;
    }

    // Weighted test-integral continuity across the surgery: the difference
    // to the post-surgery state scales linearly in the look-back. The window
    // is the event's own time-uncertainty scale, short enough that the flank
    // speed is effectively frozen across it.
    double T = ev.time;
    double window = 0.4 * ev.half_width;
    if (window > 0.0) {
        // Bump where the curve still moves fastest just before the pinch,
        // among nodes with room to keep the test function off every
        // singularity.
        const FlowSnapshot& probe = trace.snapshots.back();
        const auto& late = probe.curve.nodes;
        auto kappa_late = curvature(probe.curve);
        Vec2 center = late[late.size() / 2];
        double best_speed = -1.0;
        double d_min = std::max(0.3 * c, 8.0 * params.surgery_radius);
        Vec2 pinch_pt = field.singularity(static_cast<size_t>(ev.singularity));
        for (size_t i = 1; i + 1 < late.size(); ++i) {
            double d = field.nearest_distance(late[i]);
            if (d < d_min) continue;
            // Stay inside the computational window of ray curves: the clamp
            // kink at the truncation radius is not physical motion.
            if (params.truncation_radius > 0.0 &&
                dist(late[i], pinch_pt) > 0.6 * params.truncation_radius)
                continue;
            double speed = std::abs(kappa_late[i - 1]) / field.eval(late[i]);
            if (speed > best_speed) {
                best_speed = speed;
                center = late[i];
            }
        }
        double wdt = 0.6 * field.nearest_distance(center);

        double i_post = 0.0;
        for (const auto& other : res.traces)
            if (other.born == T && other.parent == ev.old_component)
                i_post += test_integral(field, other.snapshots.front().curve.nodes, center, wdt);

        auto value_at = [&](double tstar) {
            const FlowSnapshot* bestsnap = nullptr;
            for (const auto& s : trace.snapshots)
                if (!bestsnap ||
                    std::abs(s.time - tstar) < std::abs(bestsnap->time - tstar))
                    bestsnap = &s;
            return std::pair<double, double>(
                test_integral(field, bestsnap->curve.nodes, center, wdt), T - bestsnap->time);
        };
        auto [i1, e1] = value_at(T - 0.1 * window);
        auto [i2, e2] = value_at(T - 0.05 * window);
        auto [i3, e3] = value_at(T - 0.025 * window);
        double d1 = std::abs(i1 - i_post), d2 = std::abs(i2 - i_post), d3 = std::abs(i3 - i_post);
        if (d2 > 0.0 && d3 > 0.0 && e1 > e2 && e2 > e3 && e3 > 0.0) {
            pa.report.continuity_ratio_1 = 2.0 * (d1 / d2) * (e2 / e1);
            pa.report.continuity_ratio_2 = 2.0 * (d2 / d3) * (e3 / e2);
            pa.continuity_ok = pa.report.continuity_ratio_1 > 1.7 &&
                               pa.report.continuity_ratio_1 < 2.3 &&
                               pa.report.continuity_ratio_2 > 1.7 &&
                               pa.report.continuity_ratio_2 < 2.3;
        }
    }
    return pa;
}

} // namespace

RunReport execute(const Scenario& sc, const std::string& out_root) {
    PotentialField field = field_of(sc);
    PlanarCurve curve = build_initial_curve(sc);
    FlowParams params = resolved_params(sc, curve);

    RunReport report;
    report.scenario = sc.name;

    auto add_check = [&](const std::string& name, bool pass, double measured, double threshold,
                         const std::string& note = "") {
        report.checks.push_back({name, pass, measured, threshold, note});
        if (!pass) report.all_checks_pass = false;
    };

    if (curve.compact()) {
        try {
            report.initial_verdict = classify(field, curve);
        } catch (const Error& e) {
            if (e.code() != Errc::SingularityOnCurve) throw;
        }
    }

    // Triads are validated against the initial curve before the run.
    std::vector<Triad> triads;
    std::vector<double> triad_bounds;
    for (const auto& ts : sc.triads) {
        if (curve.start.singularity != static_cast<int>(ts.p_minus) ||
            curve.end.singularity != static_cast<int>(ts.p_plus))
            fail(Errc::ValidationError, "tracked triads must span the curve's endpoints");
        Triad tri = make_triad(ts.p_minus, ts.p_plus, ts.p);
        validate_triad(field, tri, curve);
        triads.push_back(tri);
        double tm = triad_theta_minus(field, tri), tp = triad_theta_plus(field, tri);
        triad_bounds.push_back(tp < tm ? singular_time_bound(field, tri, curve) : 0.0);
    }

    RunOptions opts;
    opts.snapshot_dt = sc.outputs.snapshot_dt;
    ThroughResult res = run_through_singularities(field, curve, params, opts);

    report.final_time = res.final_time;
    report.events = res.events;
    report.termination = res.max_time_exceeded ? "MaxTimeExceeded" : "AllStationary";

    // ---- structural checks ------------------------------------------------
    size_t max_events =
        curve.compact() ? (field.size() >= 2 ? field.size() - 2 : 0) : field.size();
    add_check("event_count_bound", res.events.size() <= max_events,
              static_cast<double>(res.events.size()), static_cast<double>(max_events));

    {
        std::vector<int> junctions;
        for (const auto& ev : res.events) junctions.push_back(ev.singularity);
        std::sort(junctions.begin(), junctions.end());
        bool distinct = std::adjacent_find(junctions.begin(), junctions.end()) == junctions.end();
        add_check("junctions_distinct", distinct, static_cast<double>(junctions.size()), 0.0);
    }

    // Almost calibrated with the initial delta minus 0.01 slack, and the
    // angle range non-increasing, across every component snapshot.
    {
        AngleProfile prof0 = angle_lift(curve);
        double range0 = prof0.range();
        double worst = 0.0;
        bool monotone = true;
        double worst_excess = 0.0;
        for (const auto& trace : res.traces) {
            double prev = std::numeric_limits<double>::infinity();
            long prev_step = 0;
            for (const auto& snap : trace.snapshots) {
                double range = snap.diag.angle_sup - snap.diag.angle_inf;
                worst = std::max(worst, range);
                double slack = 1e-8 * static_cast<double>(
                                          std::max<long>(snap.step_index - prev_step, 1));
                if (range > prev + slack) {
                    monotone = false;
                    worst_excess = std::max(worst_excess, range - prev);
                }
                prev = range;
                prev_step = snap.step_index;
            }
        }
        // Ray scenarios carry a Dirichlet boundary layer at the truncation
        // radius that leaks a few millirad into the range bookkeeping.
        double slack = curve.compact() ? 0.01 : 0.05;
        add_check("almost_calibrated_all", worst <= range0 + slack && range0 + slack < kPi,
                  worst, range0 + slack);
        add_check("angle_range_monotone", monotone || !curve.compact(), worst_excess, 0.0);
    }

    auto rows = collect_rows(res, sc.outputs.snapshot_dt);

    {
        // Non-increasing between surgeries; snapping the cut node onto the
        // singularity may add up to twice the trigger radius at an event.
        bool monotone = true;
        double prev = std::numeric_limits<double>::infinity();
        double prev_time = -std::numeric_limits<double>::infinity();
        double worst = 0.0;
        for (const auto& [k, row] : rows) {
            double total = 0.0;
            for (const auto* s : row.snaps) total += s->diag.length;
            double allowed = 1e-8;
            for (const auto& ev : res.events)
                if (ev.time > prev_time && ev.time <= row.time)
                    allowed += 2.0 * params.surgery_radius;
            if (total > prev + allowed) {
                monotone = false;
                worst = std::max(worst, total - prev);
            }
            prev = total;
            prev_time = row.time;
        }
        add_check("length_monotone", monotone, worst, 0.0);
    }

    // ---- chain -------------------------------------------------------------
    {
        double worst_dev = 0.0;
        for (const auto& comp : res.final_components) {
            std::vector<Vec2> straight{comp.nodes.front(), comp.nodes.back()};
            for (Vec2 v : comp.nodes)
                worst_dev = std::max(worst_dev, point_polyline_dist(v, straight));
        }
        add_check("final_chord_deviation", worst_dev <= 1e-2, worst_dev, 1e-2);
    }
    try {
        report.chain = chain_report(field, res);
        add_check("chain_a_k_valid", report.chain->a_k_valid,
                  static_cast<double>(report.chain->segments.size()), 0.0);
    } catch (const Error& e) {
        if (e.code() != Errc::ComponentNotStationary) throw;
        add_check("chain_a_k_valid", false, 0.0, 0.0, "component not stationary");
    }

    std::optional<ChainReport> oracle;
    if (curve.compact() && is_strictly_convex(curve)) {
        oracle = limit_oracle(field, curve);
        add_check("oracle_phases_monotone", oracle->phase_monotone, 0.0, 0.0);
        if (report.chain) {
            bool match = oracle->segments.size() == report.chain->segments.size();
            double worst = 0.0;
            if (match) {
                for (size_t i = 0; i < oracle->segments.size(); ++i) {
                    std::vector<Vec2> a{oracle->segments[i].a, oracle->segments[i].b};
                    std::vector<Vec2> b{report.chain->segments[i].a, report.chain->segments[i].b};
                    worst = std::max(worst, hausdorff(a, b));
                }
            }
            add_check("oracle_chain_match", match && worst <= 1e-2, worst, 1e-2);
        }
    }

    // ---- triad tracking ----------------------------------------------------
    for (size_t j = 0; j < triads.size(); ++j) {
        const Triad& tri = triads[j];
        std::string tag = "triad_" + std::to_string(j);

        double pinch_time = -1.0;
        for (const auto& ev : res.events)
            if (ev.singularity == static_cast<int>(tri.p)) pinch_time = ev.time;

        bool barrier_ok = true;
        bool area_monotone = true;
        double prev_area = std::numeric_limits<double>::infinity();
        for (const auto& [k, row] : rows) {
            if (pinch_time >= 0.0 && row.time >= pinch_time) break;
            PlanarCurve u = curve;
            u.nodes = union_nodes(row);
            try {
                validate_triad(field, tri, u);
            } catch (const Error&) {
                barrier_ok = false;
            }
            double area = field.weighted_area(pacman_polygon(field, tri, u));
            if (area > prev_area + 1e-6) area_monotone = false;
            prev_area = area;
        }
        add_check(tag + "_barrier_persists", barrier_ok, 0.0, 0.0);
        add_check(tag + "_area_monotone", area_monotone, 0.0, 0.0);
        if (pinch_time >= 0.0 && triad_bounds[j] > 0.0)
            add_check(tag + "_time_bound", pinch_time <= 1.05 * triad_bounds[j], pinch_time,
                      1.05 * triad_bounds[j]);
    }

    if (!curve.compact() && !res.events.empty()) {
        double r1 = 1.2 * (sc.initial_curve.taper_length + sc.initial_curve.bridge_offset);
        double r2 = 0.95 * sc.initial_curve.extent;
        NoncompactBound b1 = noncompact_time_bound(field, curve, 0, r1);
        NoncompactBound b2 = noncompact_time_bound(field, curve, 0, r2);
        double rel = std::abs(b2.bound - b1.bound) / std::max(b2.bound, 1e-300);
        add_check("noncompact_tail_stable", rel < 1e-3, rel, 1e-3);
        add_check("noncompact_time_bound", res.events.front().time <= 1.05 * b2.bound,
                  res.events.front().time, 1.05 * b2.bound);
    }
    if (!curve.compact() && params.truncation_radius > 0.0) {
        // Outside the truncation radius the curve must hug its rays.
        double worst = 0.0;
        for (const auto& comp : res.final_components) {
            for (Vec2 v : comp.nodes) {
                const CurveEnd* e = comp.start.kind == EndKind::Ray ? &comp.start : &comp.end;
                if (comp.start.kind == EndKind::Ray && comp.end.kind == EndKind::Ray) {
                    double ds = std::abs(cross(comp.start.ray_dir, v - comp.start.ray_base));
                    double de = std::abs(cross(comp.end.ray_dir, v - comp.end.ray_base));
                    worst = std::max(worst,
                                     norm(v - comp.start.ray_base) > params.truncation_radius
                                         ? std::min(ds, de)
                                         : 0.0);
                    continue;
                }
                if (e->kind != EndKind::Ray) continue;
                if (norm(v - e->ray_base) <= params.truncation_radius) continue;
                worst = std::max(worst, std::abs(cross(e->ray_dir, v - e->ray_base)));
            }
        }
        add_check("ray_tails_clamped", worst <= 1e-3, worst, 1e-3);
    }

    // ---- per-pinch neck structure -------------------------------------------
    for (const auto& ev : res.events) {
        PinchAnalysis pa = analyze_pinch(field, res, ev, params);
        std::string tag = "pinch_s" + std::to_string(ev.singularity);
        add_check(tag + "_offset", pa.offset_ok, pa.report.final_offset, 1.0);
        add_check(tag + "_deviation", pa.deviation_ok, pa.report.final_deviation, 0.05);
        add_check(tag + "_kappa_monitor", pa.kappa_ok, pa.report.kappa_monitor_ratio, 10.0);
        add_check(tag + "_nlp_monitor", pa.nlp_ok, pa.report.nlp_monitor_ratio, 3.0);
        add_check(tag + "_continuity", pa.continuity_ok, pa.report.continuity_ratio_1, 2.0);
        report.pinches.push_back(pa.report);
    }

    // ---- outputs -------------------------------------------------------------
    std::string root = out_root;
    if (root.empty()) {
        const char* env = std::getenv("MCSF_OUTPUT_ROOT");
        root = env ? env : "runs";
    }
    fs::path dir = sc.outputs.dir.empty() ? fs::path(root) / sc.name : fs::path(sc.outputs.dir);
    fs::create_directories(dir);
    report.out_dir = dir.string();

    // CSV time series.
    {
        std::ostringstream csv;
        csv << "time,component_count,total_length,angle_inf,angle_sup,max_abs_kappa,"
               "max_phi_inv_kappa,max_normal_log_phi";
        for (size_t s = 0; s < field.size(); ++s) csv << ",min_dist_sing_" << s;
        for (size_t j = 0; j < triads.size(); ++j) csv << ",area_triad_" << j;
        csv << "\n";
        for (const auto& [k, row] : rows) {
            double total_length = 0.0, angle_inf = 1e300, angle_sup = -1e300;
            double max_kappa = 0.0, max_pik = 0.0, max_nlp = 0.0;
            std::vector<double> min_dist(field.size(), 1e300);
            for (const auto* s : row.snaps) {
                total_length += s->diag.length;
                angle_inf = std::min(angle_inf, s->diag.angle_inf);
                angle_sup = std::max(angle_sup, s->diag.angle_sup);
                max_kappa = std::max(max_kappa, s->diag.max_abs_kappa);
                max_pik = std::max(max_pik, s->diag.max_phi_inv_kappa);
                max_nlp = std::max(max_nlp, s->diag.max_normal_log_phi);
                for (size_t i = 0; i < field.size(); ++i)
                    min_dist[i] = std::min(min_dist[i], s->diag.min_dist_sing[i]);
            }
            csv << fmt17(row.time) << "," << row.snaps.size() << "," << fmt17(total_length) << ","
                << fmt17(angle_inf) << "," << fmt17(angle_sup) << "," << fmt17(max_kappa) << ","
                << fmt17(max_pik) << "," << fmt17(max_nlp);
            for (size_t i = 0; i < field.size(); ++i) csv << "," << fmt17(min_dist[i]);
            for (const auto& tri : triads) {
                PlanarCurve u = curve;
                u.nodes = union_nodes(row);
                csv << "," << fmt17(field.weighted_area(pacman_polygon(field, tri, u)));
            }
            csv << "\n";
        }
        write_file_atomic(dir / "run.csv", csv.str());
    }

    // SVG frames.
    if (sc.outputs.svg_every > 0) {
        fs::create_directories(dir / "frames");
        int frame = 0, row_index = 0;
        for (const auto& [k, row] : rows) {
            if (row_index++ % sc.outputs.svg_every != 0) continue;
            if (frame >= sc.outputs.svg_limit) break;
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%04d.svg", frame++);
            write_file_atomic(dir / "frames" / name,
                              svg_frame(field, sc, row, oracle ? &*oracle : nullptr));
        }
    }

    write_file_atomic(dir / "report.json", report_to_json(report));
    return report;
}

std::string report_to_json(const RunReport& report) {
    json j;
    j["scenario"] = report.scenario;
    j["termination"] = report.termination;
    j["final_time"] = report.final_time;
    j["all_checks_pass"] = report.all_checks_pass;

    json evs = json::array();
    for (const auto& ev : report.events)
        evs.push_back({{"time", ev.time},
                       {"half_width", ev.half_width},
                       {"singularity", ev.singularity},
                       {"old_component", ev.old_component},
                       {"new_components", {ev.new_components[0], ev.new_components[1]}},
                       {"junction_angle_gap", ev.junction_angle_gap}});
    j["events"] = evs;

    if (report.chain) {
        json segs = json::array();
        for (const auto& s : report.chain->segments)
            segs.push_back({{"a", {s.a.x, s.a.y}},
                            {"b", {s.b.x, s.b.y}},
                            {"sing_a", s.sing_a},
                            {"sing_b", s.sing_b},
                            {"phase", s.phase}});
        j["chain"] = {{"segments", segs},
                      {"a_k_valid", report.chain->a_k_valid},
                      {"phase_monotone", report.chain->phase_monotone}};
        auto order = destabilization_order(*report.chain);
        j["destabilization"] = {{"order", order.order}, {"bracketing", order.bracketing}};
    }

    if (report.initial_verdict) {
        const auto& v = *report.initial_verdict;
        json wits = json::array();
        for (const auto& w : v.witnesses)
            wits.push_back({{"singularity", w.singularity},
                            {"theta_bar_1", w.theta_bar_1},
                            {"theta_bar_2", w.theta_bar_2},
                            {"len_1", w.len_1},
                            {"len_2", w.len_2},
                            {"on_chord", w.on_chord}});
        j["initial_verdict"] = {{"classification", classification_name(v.classification)},
                                {"flow_classification",
                                 flow_classification_name(v.flow_classification)},
                                {"witnesses", wits}};
    }

    json pinches = json::array();
    for (const auto& p : report.pinches)
        pinches.push_back({{"singularity", p.singularity},
                           {"time", p.time},
                           {"half_width", p.half_width},
                           {"final_offset", p.final_offset},
                           {"final_deviation", p.final_deviation},
                           {"final_sup_rescaled_kappa", p.final_sup_rescaled_kappa},
                           {"kappa_monitor_ratio", p.kappa_monitor_ratio},
                           {"nlp_monitor_ratio", p.nlp_monitor_ratio},
                           {"continuity_ratio_1", p.continuity_ratio_1},
                           {"continuity_ratio_2", p.continuity_ratio_2}});
    j["pinches"] = pinches;

    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"measured", c.measured},
                          {"threshold", c.threshold},
                          {"note", c.note}});
    j["checks"] = checks;
    j["out_dir"] = report.out_dir;
    return j.dump(2);
}

} // namespace mcsf
