#include "mcsf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcsf/errors.hpp"

namespace mcsf {

using nlohmann::json;

PotentialField field_of(const Scenario& sc) { return PotentialField(sc.mass, sc.singularities); }

namespace {

Vec2 to_vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
json from_vec(Vec2 v) { return json::array({v.x, v.y}); }

// Centripetal Catmull-Rom through the control points, sampled densely.
std::vector<Vec2> catmull_rom(const std::vector<Vec2>& ctrl, int per_segment) {
    size_t m = ctrl.size();
    if (m < 2) return ctrl;
    auto at = [&](long i) -> Vec2 {
        if (i < 0) return ctrl[0] * 2.0 - ctrl[1];
        if (i >= static_cast<long>(m)) return ctrl[m - 1] * 2.0 - ctrl[m - 2];
        return ctrl[static_cast<size_t>(i)];
    };
    auto knot = [](double t, Vec2 a, Vec2 b) { return t + std::sqrt(dist(a, b)); };

    std::vector<Vec2> out;
    for (size_t i = 0; i + 1 < m; ++i) {
        Vec2 p0 = at(static_cast<long>(i) - 1), p1 = at(static_cast<long>(i));
        Vec2 p2 = at(static_cast<long>(i) + 1), p3 = at(static_cast<long>(i) + 2);
        double t0 = 0.0;
        double t1 = knot(t0, p0, p1);
        double t2 = knot(t1, p1, p2);
        double t3 = knot(t2, p2, p3);
        for (int k = 0; k < per_segment; ++k) {
            double t = t1 + (t2 - t1) * static_cast<double>(k) / per_segment;
            Vec2 a1 = p0 * ((t1 - t) / (t1 - t0)) + p1 * ((t - t0) / (t1 - t0));
            Vec2 a2 = p1 * ((t2 - t) / (t2 - t1)) + p2 * ((t - t1) / (t2 - t1));
            Vec2 a3 = p2 * ((t3 - t) / (t3 - t2)) + p3 * ((t - t2) / (t3 - t2));
            Vec2 b1 = a1 * ((t2 - t) / (t2 - t0)) + a2 * ((t - t0) / (t2 - t0));
            Vec2 b2 = a2 * ((t3 - t) / (t3 - t1)) + a3 * ((t - t1) / (t3 - t1));
            out.push_back(b1 * ((t2 - t) / (t2 - t1)) + b2 * ((t - t1) / (t2 - t1)));
        }
    }
    out.push_back(ctrl.back());
    return out;
}

// Circular arc of the given apex height over the chord between two
// singularities, sampled uniformly in angle (uniform arclength). Apex
// heights at or above half the chord sweep half a turn or more, which the
// almost calibrated validation then rejects.
std::vector<Vec2> circular_arc(Vec2 a, Vec2 b, double apex, int samples) {
    Vec2 u = normalized(b - a);
    Vec2 v = rot90(u);
    double half = 0.5 * dist(a, b);
    double radius = (half * half + apex * apex) / (2.0 * apex);
    Vec2 center = lerp(a, b, 0.5) + v * (apex - radius);
    double a0 = angle_of(a - center);
    double a1 = angle_of(b - center);
    // Sweep from a to b passing the apex side: the apex sits at angle of +v.
    double sweep = wrap_angle(a1 - a0);
    double apex_ang = angle_of(v);
    double mid = a0 + 0.5 * sweep;
    if (std::cos(mid - apex_ang) < 0.0) sweep += sweep >= 0.0 ? -2.0 * kPi : 2.0 * kPi;

    std::vector<Vec2> pts;
    pts.reserve(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        double t = a0 + sweep * static_cast<double>(i) / (samples - 1);
        pts.push_back(center + Vec2{std::cos(t), std::sin(t)} * radius);
    }
    pts.front() = a;
    pts.back() = b;
    return pts;
}

// Curve asymptotic to the rays from `base` with travel angles theta_minus
// (incoming) and theta_plus (outgoing), bridged around the reflex side by a
// circular arc of radius `offset`, tapering onto the rays over taper_length.
std::vector<Vec2> ray_bridge(Vec2 base, const CurveSpec& cs, double sample_ds) {
    Vec2 d_in{std::cos(cs.theta_minus), std::sin(cs.theta_minus)};
    Vec2 d_out{std::cos(cs.theta_plus), std::sin(cs.theta_plus)};
    double delta = cs.bridge_offset;
    double tau = cs.taper_length;

    auto weight = [&](double t) {
        if (t >= tau) return 0.0;
        return 0.5 * (1.0 + std::cos(kPi * t / tau));
    };

    std::vector<Vec2> pts;
    int n_line = std::max(8, static_cast<int>(cs.extent / sample_ds));
    for (int i = 0; i <= n_line; ++i) {
        double t = cs.extent * (1.0 - static_cast<double>(i) / n_line);
        pts.push_back(base - d_in * t + rot90(d_in) * (delta * weight(t)));
    }
    double b0 = cs.theta_minus + kPi / 2.0;
    double b1 = cs.theta_plus + kPi / 2.0;
    int n_arc = std::max(8, static_cast<int>(delta * (b0 - b1) / sample_ds));
    for (int i = 1; i <= n_arc; ++i) {
        double b = b0 + (b1 - b0) * static_cast<double>(i) / n_arc;
        pts.push_back(base + Vec2{std::cos(b), std::sin(b)} * delta);
    }
    for (int i = 1; i <= n_line; ++i) {
        double t = cs.extent * static_cast<double>(i) / n_line;
        pts.push_back(base + d_out * t + rot90(d_out) * (delta * weight(t)));
    }
    return pts;
}

} // namespace

PlanarCurve build_initial_curve(const Scenario& sc) {
    PotentialField field = field_of(sc);
    const CurveSpec& cs = sc.initial_curve;
    PlanarCurve curve;

    auto check_index = [&](int i, const char* what) {
        if (i < 0 || static_cast<size_t>(i) >= field.size())
            fail(Errc::ValidationError, std::string(what) + " singularity index out of range");
    };

    switch (cs.kind) {
        case CurveSpec::Kind::ConvexArc: {
            check_index(cs.start_sing, "start");
            check_index(cs.end_sing, "end");
            if (cs.nodes < 8) fail(Errc::ValidationError, "convex_arc needs at least 8 nodes");
            if (cs.apex_height <= 0.0)
                fail(Errc::ValidationError, "convex_arc apex_height must be positive");
            Vec2 a = field.singularity(static_cast<size_t>(cs.start_sing));
            Vec2 b = field.singularity(static_cast<size_t>(cs.end_sing));
            if (cs.apex_height >= dist(a, b))
                fail(Errc::ValidationError,
                     "NotAlmostCalibrated: apex height sweeps well past a half turn");
            curve.nodes = circular_arc(a, b, cs.apex_height, cs.nodes);
            curve.start = CurveEnd::pinned(cs.start_sing);
            curve.end = CurveEnd::pinned(cs.end_sing);
            curve.target_spacing = sc.params.target_spacing > 0.0
                                       ? sc.params.target_spacing
                                       : curve.length() / (cs.nodes - 1);
            break;
        }
        case CurveSpec::Kind::Explicit: {
            check_index(cs.start_sing, "start");
            check_index(cs.end_sing, "end");
            if (cs.points.size() < 3)
                fail(Errc::ValidationError, "explicit curve needs at least 3 points");
            curve.nodes = cs.points;
            curve.start = CurveEnd::pinned(cs.start_sing);
            curve.end = CurveEnd::pinned(cs.end_sing);
            curve.nodes.front() = field.singularity(static_cast<size_t>(cs.start_sing));
            curve.nodes.back() = field.singularity(static_cast<size_t>(cs.end_sing));
            double L = curve.length();
            curve.target_spacing = sc.params.target_spacing > 0.0
                                       ? sc.params.target_spacing
                                       : L / (static_cast<double>(cs.points.size()) - 1.0);
            curve = resample(curve);
            break;
        }
        case CurveSpec::Kind::RayBridge: {
            check_index(cs.base_sing, "base");
            if (sc.params.target_spacing <= 0.0)
                fail(Errc::ValidationError, "ray_bridge requires params.target_spacing");
            if (wrap_angle(cs.theta_minus - cs.theta_plus) <= 0.0)
                fail(Errc::ValidationError, "ray_bridge requires theta_minus > theta_plus");
            Vec2 base = field.singularity(static_cast<size_t>(cs.base_sing));
            curve.nodes = ray_bridge(base, cs, sc.params.target_spacing);
            Vec2 d_in{std::cos(cs.theta_minus), std::sin(cs.theta_minus)};
            Vec2 d_out{std::cos(cs.theta_plus), std::sin(cs.theta_plus)};
            curve.start = CurveEnd::ray(base, -d_in);
            curve.end = CurveEnd::ray(base, d_out);
            curve.target_spacing = sc.params.target_spacing;
            curve = resample(curve);
            break;
        }
    }

    validate(field, curve);
    if (!is_almost_calibrated(curve))
        fail(Errc::ValidationError, "NotAlmostCalibrated: initial curve angle range is >= pi - delta");
    return curve;
}

FlowParams resolved_params(const Scenario& sc, const PlanarCurve& curve) {
    FlowParams p = sc.params;
    if (p.target_spacing <= 0.0) p.target_spacing = curve.target_spacing;
    if (p.surgery_radius <= 0.0) p.surgery_radius = 3.0 * p.target_spacing;
    p.validate_fields();
    return p;
}

// ---- JSON ---------------------------------------------------------------

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::ParseError, e.what());
    }
    try {
        Scenario sc;
        sc.name = j.at("name").get<std::string>();
        sc.description = j.value("description", "");
        sc.mass = j.at("mass").get<double>();
        for (const auto& p : j.at("singularities")) sc.singularities.push_back(to_vec(p));

        const json& ic = j.at("initial_curve");
        std::string type = ic.at("type").get<std::string>();
        CurveSpec& cs = sc.initial_curve;
        if (type == "convex_arc") {
            cs.kind = CurveSpec::Kind::ConvexArc;
            cs.start_sing = ic.at("start").get<int>();
            cs.end_sing = ic.at("end").get<int>();
            cs.apex_height = ic.at("apex_height").get<double>();
            cs.nodes = ic.at("nodes").get<int>();
        } else if (type == "explicit") {
            cs.kind = CurveSpec::Kind::Explicit;
            cs.start_sing = ic.at("start").get<int>();
            cs.end_sing = ic.at("end").get<int>();
            for (const auto& p : ic.at("points")) cs.points.push_back(to_vec(p));
        } else if (type == "ray_bridge") {
            cs.kind = CurveSpec::Kind::RayBridge;
            cs.base_sing = ic.at("base").get<int>();
            cs.theta_minus = ic.at("theta_minus").get<double>();
            cs.theta_plus = ic.at("theta_plus").get<double>();
            cs.bridge_offset = ic.at("bridge_offset").get<double>();
            cs.taper_length = ic.at("taper_length").get<double>();
            cs.extent = ic.at("extent").get<double>();
        } else {
            fail(Errc::ParseError, "unknown initial_curve.type: " + type);
        }

        if (j.contains("params")) {
            const json& p = j.at("params");
            sc.params.cfl = p.value("cfl", sc.params.cfl);
            sc.params.target_spacing = p.value("target_spacing", sc.params.target_spacing);
            sc.params.resample_every = p.value("resample_every", sc.params.resample_every);
            sc.params.surgery_radius = p.value("surgery_radius", sc.params.surgery_radius);
            sc.params.max_time = p.value("max_time", sc.params.max_time);
            sc.params.stationary_tol = p.value("stationary_tol", sc.params.stationary_tol);
            sc.params.truncation_radius = p.value("truncation_radius", sc.params.truncation_radius);
        }
        for (const auto& t : j.value("triads", json::array()))
            sc.triads.push_back({t.at("p_minus").get<size_t>(), t.at("p_plus").get<size_t>(),
                                 t.at("p").get<size_t>()});
        if (j.contains("outputs")) {
            const json& o = j.at("outputs");
            sc.outputs.snapshot_dt = o.value("snapshot_dt", sc.outputs.snapshot_dt);
            sc.outputs.svg_every = o.value("svg_every", sc.outputs.svg_every);
            sc.outputs.svg_limit = o.value("svg_limit", sc.outputs.svg_limit);
            sc.outputs.dir = o.value("dir", sc.outputs.dir);
        }
        sc.seed = j.value("seed", uint64_t{0});

        // Full semantic validation: the field and the generated curve.
        PlanarCurve curve = build_initial_curve(sc);
        resolved_params(sc, curve);
        for (const auto& t : sc.triads) {
            if (t.p_minus >= sc.singularities.size() || t.p_plus >= sc.singularities.size() ||
                t.p >= sc.singularities.size())
                fail(Errc::ValidationError, "triad singularity index out of range");
        }
        return sc;
    } catch (const json::exception& e) {
        fail(Errc::ParseError, e.what());
    }
}

std::string emit_scenario(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["description"] = sc.description;
    j["mass"] = sc.mass;
    json sing = json::array();
    for (Vec2 p : sc.singularities) sing.push_back(from_vec(p));
    j["singularities"] = sing;

    json ic;
    const CurveSpec& cs = sc.initial_curve;
    switch (cs.kind) {
        case CurveSpec::Kind::ConvexArc:
            ic["type"] = "convex_arc";
            ic["start"] = cs.start_sing;
            ic["end"] = cs.end_sing;
            ic["apex_height"] = cs.apex_height;
            ic["nodes"] = cs.nodes;
            break;
        case CurveSpec::Kind::Explicit: {
            ic["type"] = "explicit";
            ic["start"] = cs.start_sing;
            ic["end"] = cs.end_sing;
            json pts = json::array();
            for (Vec2 p : cs.points) pts.push_back(from_vec(p));
            ic["points"] = pts;
            break;
        }
        case CurveSpec::Kind::RayBridge:
            ic["type"] = "ray_bridge";
            ic["base"] = cs.base_sing;
            ic["theta_minus"] = cs.theta_minus;
            ic["theta_plus"] = cs.theta_plus;
            ic["bridge_offset"] = cs.bridge_offset;
            ic["taper_length"] = cs.taper_length;
            ic["extent"] = cs.extent;
            break;
    }
    j["initial_curve"] = ic;

    j["params"] = {{"cfl", sc.params.cfl},
                   {"target_spacing", sc.params.target_spacing},
                   {"resample_every", sc.params.resample_every},
                   {"surgery_radius", sc.params.surgery_radius},
                   {"max_time", sc.params.max_time},
                   {"stationary_tol", sc.params.stationary_tol},
                   {"truncation_radius", sc.params.truncation_radius}};
    json triads = json::array();
    for (const auto& t : sc.triads)
        triads.push_back({{"p_minus", t.p_minus}, {"p_plus", t.p_plus}, {"p", t.p}});
    j["triads"] = triads;
    j["outputs"] = {{"snapshot_dt", sc.outputs.snapshot_dt},
                    {"svg_every", sc.outputs.svg_every},
                    {"svg_limit", sc.outputs.svg_limit},
                    {"dir", sc.outputs.dir}};
    j["seed"] = sc.seed;
    return j.dump(2);
}

// ---- bundled scenarios ---------------------------------------------------

namespace {

Scenario make_eguchi_hanson_stable() {
    Scenario sc;
    sc.name = "eguchi_hanson_stable";
    sc.description = "two-center field; stable arc relaxes to its chord with no surgery";
    sc.mass = 0.0;
    sc.singularities = {{0.0, 0.0}, {2.0, 0.0}};
    sc.initial_curve.kind = CurveSpec::Kind::ConvexArc;
    sc.initial_curve.start_sing = 0;
    sc.initial_curve.end_sing = 1;
    sc.initial_curve.apex_height = 0.5;
    sc.initial_curve.nodes = 400;
    sc.params.cfl = 0.45;
    sc.params.max_time = 20.0;
    sc.params.stationary_tol = 1e-4;
    sc.outputs.snapshot_dt = 0.05;
    return sc;
}

Scenario make_three_point_pinch() {
    Scenario sc;
    sc.name = "three_point_pinch";
    sc.description = "arc over an enclosed third center; one guaranteed neck pinch";
    sc.mass = 0.0;
    sc.singularities = {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.5}};
    sc.initial_curve.kind = CurveSpec::Kind::ConvexArc;
    sc.initial_curve.start_sing = 0;
    sc.initial_curve.end_sing = 1;
    sc.initial_curve.apex_height = 0.9;
    sc.initial_curve.nodes = 400;
    sc.params.cfl = 0.45;
    sc.params.max_time = 20.0;
    sc.params.stationary_tol = 1e-4;
    sc.triads = {{0, 1, 2}};
    sc.outputs.snapshot_dt = 0.02;
    return sc;
}

Scenario make_fig51_multipinch() {
    Scenario sc;
    sc.name = "fig51_multipinch";
    sc.description = "six centers with three collinear; chain of five segments, two equal phases";
    sc.mass = 0.0;
    sc.singularities = {{0.0, 0.0}, {6.0, 0.0}, {1.0, 1.2}, {2.0, 1.8}, {3.0, 2.4}, {4.5, 1.4}};
    sc.initial_curve.kind = CurveSpec::Kind::ConvexArc;
    sc.initial_curve.start_sing = 0;
    sc.initial_curve.end_sing = 1;
    sc.initial_curve.apex_height = 2.9;
    sc.initial_curve.nodes = 800;
    sc.params.cfl = 0.45;
    sc.params.max_time = 60.0;
    sc.params.stationary_tol = 1e-4;
    sc.triads = {{0, 1, 4}};
    sc.outputs.snapshot_dt = 0.05;
    return sc;
}

Scenario make_section6_fourpoint() {
    Scenario sc;
    sc.name = "section6_fourpoint";
    sc.description = "four centers; two pinches with phases ordered against the chain order";
    sc.mass = 0.0;
    sc.singularities = {{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}, {4.0, 2.0}};
    sc.initial_curve.kind = CurveSpec::Kind::Explicit;
    sc.initial_curve.start_sing = 0;
    sc.initial_curve.end_sing = 3;
    sc.initial_curve.points = catmull_rom(
        {{0.0, 0.0}, {0.35, 1.1}, {1.0, 2.35}, {1.5, 1.9}, {2.0, 0.65}, {2.7, 0.7},
         {3.35, 1.4}, {4.0, 2.0}},
        80);
    sc.params.cfl = 0.45;
    sc.params.target_spacing = 0.008;
    sc.params.max_time = 40.0;
    sc.params.stationary_tol = 1e-4;
    sc.outputs.snapshot_dt = 0.02;
    return sc;
}

Scenario make_noncompact_ray() {
    Scenario sc;
    sc.name = "noncompact_ray";
    sc.description = "single ALF center; ray-asymptotic curve pinches at the origin";
    sc.mass = 1.0;
    sc.singularities = {{0.0, 0.0}};
    sc.initial_curve.kind = CurveSpec::Kind::RayBridge;
    sc.initial_curve.base_sing = 0;
    sc.initial_curve.theta_minus = 0.3;
    sc.initial_curve.theta_plus = -0.3;
    sc.initial_curve.bridge_offset = 0.5;
    sc.initial_curve.taper_length = 1.4;
    sc.initial_curve.extent = 3.0;
    sc.params.cfl = 0.45;
    sc.params.target_spacing = 0.0075;
    sc.params.max_time = 30.0;
    sc.params.stationary_tol = 1e-3;
    sc.params.truncation_radius = 2.4;
    sc.outputs.snapshot_dt = 0.05;
    return sc;
}

Scenario make_semistable_collinear() {
    Scenario sc;
    sc.name = "semistable_collinear";
    sc.description = "three collinear centers; semi-stable arc splits at the middle one";
    sc.mass = 0.0;
    sc.singularities = {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}};
    sc.initial_curve.kind = CurveSpec::Kind::ConvexArc;
    sc.initial_curve.start_sing = 0;
    sc.initial_curve.end_sing = 1;
    sc.initial_curve.apex_height = 0.8;
    sc.initial_curve.nodes = 300;
    sc.params.cfl = 0.45;
    sc.params.max_time = 60.0;
    sc.params.stationary_tol = 1e-4;
    sc.outputs.snapshot_dt = 0.05;
    return sc;
}

} // namespace

std::vector<ScenarioInfo> list_scenarios() {
    std::vector<ScenarioInfo> out;
    for (const char* name :
         {"eguchi_hanson_stable", "three_point_pinch", "fig51_multipinch", "section6_fourpoint",
          "noncompact_ray", "semistable_collinear"}) {
        Scenario sc = bundled_scenario(name);
        out.push_back({sc.name, sc.description});
    }
    return out;
}

Scenario bundled_scenario(const std::string& name) {
    if (name == "eguchi_hanson_stable") return make_eguchi_hanson_stable();
    if (name == "three_point_pinch") return make_three_point_pinch();
    if (name == "fig51_multipinch") return make_fig51_multipinch();
    if (name == "section6_fourpoint") return make_section6_fourpoint();
    if (name == "noncompact_ray") return make_noncompact_ray();
    if (name == "semistable_collinear") return make_semistable_collinear();
    fail(Errc::ValidationError, "unknown bundled scenario: " + name);
}

Scenario load_scenario(const std::string& name_or_path) {
    for (const char* name :
         {"eguchi_hanson_stable", "three_point_pinch", "fig51_multipinch", "section6_fourpoint",
          "noncompact_ray", "semistable_collinear"}) {
        if (name_or_path == name) return bundled_scenario(name);
    }
    std::ifstream in(name_or_path);
    if (!in) fail(Errc::ValidationError, "no bundled scenario or readable file: " + name_or_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

} // namespace mcsf
