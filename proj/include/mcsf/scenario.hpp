#ifndef MCSF_SCENARIO_HPP
#define MCSF_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcsf/neckpinch.hpp"
#include "mcsf/pacman.hpp"
#include "mcsf/stability.hpp"
#include "mcsf/surgery.hpp"

namespace mcsf {

struct TriadSpec {
    size_t p_minus = 0;
    size_t p_plus = 0;
    size_t p = 0;
};

struct OutputSpec {
    double snapshot_dt = 0.05;
    int svg_every = 5;  // emit a frame every n-th CSV row; 0 disables frames
    int svg_limit = 60;
    std::string dir;    // empty: <output root>/<scenario name>
};

struct CurveSpec {
    enum class Kind { Explicit, ConvexArc, RayBridge };
    Kind kind = Kind::ConvexArc;

    // Explicit: node list running from one pinned singularity to another.
    std::vector<Vec2> points;

    // Pinned endpoints (Explicit and ConvexArc).
    int start_sing = 0;
    int end_sing = 1;

    // ConvexArc: sine arch of the given apex height over the chord.
    double apex_height = 0.5;
    int nodes = 200;

    // RayBridge: curve asymptotic to two rays from a singularity, bridged
    // around the reflex side at the given offset.
    int base_sing = 0;
    double theta_minus = 0.3;  // incoming travel direction angle
    double theta_plus = -0.3;  // outgoing travel direction angle
    double bridge_offset = 0.6;
    double taper_length = 3.0;
    double extent = 8.0;
};

struct Scenario {
    std::string name;
    std::string description;
    double mass = 0.0;
    std::vector<Vec2> singularities;
    CurveSpec initial_curve;
    FlowParams params; // target_spacing 0 = derive; surgery_radius 0 = 3 * spacing
    std::vector<TriadSpec> triads;
    OutputSpec outputs;
    uint64_t seed = 0;
};

PotentialField field_of(const Scenario& sc);

// Build and fully validate the initial curve (including the almost
// calibrated requirement).
PlanarCurve build_initial_curve(const Scenario& sc);

// Fill in derived parameter defaults against the built curve.
FlowParams resolved_params(const Scenario& sc, const PlanarCurve& curve);

Scenario parse_scenario(const std::string& json_text);
std::string emit_scenario(const Scenario& sc);

struct ScenarioInfo {
    std::string name;
    std::string description;
};
std::vector<ScenarioInfo> list_scenarios();
Scenario bundled_scenario(const std::string& name);

// Bundled name first, then a path to a JSON document.
Scenario load_scenario(const std::string& name_or_path);

// ---- execution ----------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = true;
    double measured = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct PinchReport {
    int singularity = -1;
    double time = 0.0;
    double half_width = 0.0;
    double final_offset = 0.0;
    double final_deviation = 0.0;
    double final_sup_rescaled_kappa = 0.0;
    double kappa_monitor_ratio = 0.0; // decrease of phi^-1|kappa| over the last decade
    double nlp_monitor_ratio = 0.0;   // growth of the normal log-phi monitor
    double continuity_ratio_1 = 0.0;  // test-integral halving ratios, ideal 2.0
    double continuity_ratio_2 = 0.0;
};

struct RunReport {
    std::string scenario;
    std::string termination; // AllStationary or MaxTimeExceeded
    double final_time = 0.0;
    std::vector<SurgeryEvent> events;
    std::optional<ChainReport> chain;
    std::optional<StabilityVerdict> initial_verdict;
    std::vector<PinchReport> pinches;
    std::vector<CheckResult> checks;
    bool all_checks_pass = true;
    std::string out_dir;
};

// Runs the flow through singularities, attaches the analyses, and writes
// run.csv, frames/*.svg and report.json under the scenario's output
// directory (atomically, write-then-rename). out_root overrides the
// MCSF_OUTPUT_ROOT environment variable; the default root is ./runs.
RunReport execute(const Scenario& sc, const std::string& out_root = "");

std::string report_to_json(const RunReport& report);

} // namespace mcsf

#endif
