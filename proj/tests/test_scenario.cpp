#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcsf/errors.hpp"
#include "mcsf/scenario.hpp"

using namespace mcsf;
namespace fs = std::filesystem;

namespace {

std::string mini_scenario_json() {
    return R"({
      "name": "mini_pinch",
      "mass": 0.0,
      "singularities": [[0,0],[2,0],[1,0.5]],
      "initial_curve": {"type":"convex_arc","start":0,"end":1,"apex_height":0.9,"nodes":140},
      "params": {"cfl":0.45,"max_time":20.0,"stationary_tol":1e-4},
      "triads": [{"p_minus":0,"p_plus":1,"p":2}],
      "outputs": {"snapshot_dt":0.05,"svg_every":4,"svg_limit":8},
      "seed": 0
    })";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("bundled scenario list") {
    auto infos = list_scenarios();
    CHECK(infos.size() >= 6);
    std::vector<std::string> names;
    for (const auto& i : infos) {
        names.push_back(i.name);
        CHECK_FALSE(i.description.empty());
    }
    for (const char* expected :
         {"eguchi_hanson_stable", "three_point_pinch", "fig51_multipinch", "section6_fourpoint",
          "noncompact_ray", "semistable_collinear"})
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());

    // every bundled scenario builds a valid, almost calibrated curve
    for (const auto& i : infos) {
        Scenario sc = bundled_scenario(i.name);
        PlanarCurve curve = build_initial_curve(sc);
        CHECK(curve.nodes.size() >= 3);
        CHECK_NOTHROW(resolved_params(sc, curve));
    }
}

TEST_CASE("parse / emit round trip") {
    Scenario sc = parse_scenario(mini_scenario_json());
    CHECK(sc.name == "mini_pinch");
    CHECK(sc.singularities.size() == 3);
    CHECK(sc.triads.size() == 1);

    std::string emitted = emit_scenario(sc);
    Scenario back = parse_scenario(emitted);
    CHECK(back.name == sc.name);
    CHECK(back.mass == sc.mass);
    CHECK(back.singularities == sc.singularities);
    CHECK(back.initial_curve.apex_height == sc.initial_curve.apex_height);
    CHECK(back.initial_curve.nodes == sc.initial_curve.nodes);
    CHECK(back.params.cfl == sc.params.cfl);
    CHECK(back.params.max_time == sc.params.max_time);
    CHECK(back.triads.size() == sc.triads.size());
    CHECK(back.outputs.snapshot_dt == sc.outputs.snapshot_dt);
    CHECK(back.seed == sc.seed);

    // bundled scenarios round trip as well, including explicit node lists
    for (const auto& i : list_scenarios()) {
        Scenario orig = bundled_scenario(i.name);
        Scenario again = parse_scenario(emit_scenario(orig));
        CHECK(again.name == orig.name);
        CHECK(again.singularities == orig.singularities);
        CHECK(again.initial_curve.points == orig.initial_curve.points);
    }
}

TEST_CASE("parse rejects malformed and invalid documents") {
    CHECK_THROWS_AS(parse_scenario("{not json"), Error);

    // duplicate singularities
    std::string dup = R"({"name":"x","mass":0.0,"singularities":[[0,0],[0,0]],
      "initial_curve":{"type":"convex_arc","start":0,"end":1,"apex_height":0.4,"nodes":50}})";
    CHECK_THROWS_AS(parse_scenario(dup), Error);

    // apex so high the angle range reaches pi
    std::string tall = R"({"name":"x","mass":0.0,"singularities":[[0,0],[2,0]],
      "initial_curve":{"type":"convex_arc","start":0,"end":1,"apex_height":3.5,"nodes":50}})";
    CHECK_THROWS_AS(parse_scenario(tall), Error);

    // out-of-range pin index
    std::string idx = R"({"name":"x","mass":0.0,"singularities":[[0,0],[2,0]],
      "initial_curve":{"type":"convex_arc","start":0,"end":5,"apex_height":0.4,"nodes":50}})";
    CHECK_THROWS_AS(parse_scenario(idx), Error);
}

TEST_CASE("execute writes deterministic outputs and a coherent report") {
    Scenario sc = parse_scenario(mini_scenario_json());
    fs::path root1 = fs::temp_directory_path() / "mcsf_test_run1";
    fs::path root2 = fs::temp_directory_path() / "mcsf_test_run2";
    fs::remove_all(root1);
    fs::remove_all(root2);

    RunReport r1 = execute(sc, root1.string());
    RunReport r2 = execute(sc, root2.string());

    CHECK(r1.termination == "AllStationary");
    CHECK(r1.events.size() == 1);
    CHECK(r1.events[0].singularity == 2);
    REQUIRE(r1.chain.has_value());
    CHECK(r1.chain->segments.size() == 2);
    CHECK(r1.chain->a_k_valid);
    REQUIRE(r1.initial_verdict.has_value());
    CHECK(r1.initial_verdict->classification == Classification::StrictlyUnstable);

    fs::path csv1 = fs::path(r1.out_dir) / "run.csv";
    fs::path csv2 = fs::path(r2.out_dir) / "run.csv";
    REQUIRE(fs::exists(csv1));
    REQUIRE(fs::exists(csv2));
    CHECK(slurp(csv1) == slurp(csv2)); // bit-identical

    std::string header = slurp(csv1).substr(0, slurp(csv1).find('\n'));
    CHECK(header ==
          "time,component_count,total_length,angle_inf,angle_sup,max_abs_kappa,"
          "max_phi_inv_kappa,max_normal_log_phi,min_dist_sing_0,min_dist_sing_1,"
          "min_dist_sing_2,area_triad_0");

    CHECK(fs::exists(fs::path(r1.out_dir) / "report.json"));
    CHECK(fs::exists(fs::path(r1.out_dir) / "frames" / "frame_0000.svg"));

    // every structural check passes on this run except possibly the
    // logarithmically-decaying tip monitor
    for (const auto& c : r1.checks)
        if (c.name.find("kappa_monitor") == std::string::npos) CHECK(c.pass);

    fs::remove_all(root1);
    fs::remove_all(root2);
}
