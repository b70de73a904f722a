#ifndef MCSF_FLOW_HPP
#define MCSF_FLOW_HPP

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "mcsf/curve.hpp"
#include "mcsf/potential.hpp"

namespace mcsf {

struct FlowParams {
    double cfl = 0.25;            // in (0, 0.5]
    double target_spacing = 0.0;
    int resample_every = 10;      // steps between arclength resamplings
    double surgery_radius = 0.0;  // pinch trigger distance; 0 disables detection
    double max_time = 1.0;
    double stationary_tol = 1e-6; // on max phi^-1 |kappa|
    double truncation_radius = 0.0; // ray-asymptotic curves only

    void validate_fields() const;
};

struct Diagnostics {
    double length = 0.0;
    double angle_inf = 0.0;
    double angle_sup = 0.0;
    double max_abs_kappa = 0.0;
    double max_phi_inv_kappa = 0.0;
    double max_normal_log_phi = 0.0;
    std::vector<double> min_dist_sing; // per singularity, over non-pinned nodes
};

struct FlowSnapshot {
    double time = 0.0;
    PlanarCurve curve;
    Diagnostics diag;
    long cadence_index = -1; // >= 0 when emitted on the absolute time grid
    long step_index = 0;     // steps taken by the producing run
};

// range_clip_radius > 0 restricts the angle-range scan to edges within that
// distance of the ray bases (the clamped Dirichlet layer outside the
// truncation radius is apparatus, not evolving curve).
Diagnostics compute_diagnostics(const PotentialField& field, const PlanarCurve& curve,
                                double range_clip_radius = 0.0);

FlowSnapshot make_snapshot(const PotentialField& field, const PlanarCurve& curve, double time,
                           double range_clip_radius = 0.0);

// cfl * min over interior nodes of phi(x_i) * ds_i^2.
double stable_dt(const PotentialField& field, const PlanarCurve& curve, const FlowParams& params);

// One explicit Euler step of dt * phi^-1 * kappa * N at every interior node.
// Pinned endpoints stay fixed; ray tails beyond truncation_radius are
// clamped back onto their rays.
FlowSnapshot step(const PotentialField& field, const FlowSnapshot& snapshot,
                  const FlowParams& params);
FlowSnapshot step(const PotentialField& field, const FlowSnapshot& snapshot,
                  const FlowParams& params, double dt);

enum class StopReason { Stationary, PinchDetected, MaxTime };

const char* stop_reason_name(StopReason r);

struct PinchInfo {
    size_t singularity = 0;
    size_t node = 0;
    double time = 0.0;
    // Time at which the min distance first dropped below 2 * surgery_radius;
    // (time - time_enter) is the reported uncertainty half-width.
    double time_enter = 0.0;
};

struct RunOptions {
    double snapshot_dt = 0.0;    // absolute-time snapshot cadence; 0 = ends only
    bool per_step_snapshots = false;
    int window_every = 0;        // emit 3-step residual windows at this step cadence
    bool monitor_invariants = false;
    double watch_radius = 0.0;   // pinch-approach snapshot trigger; 0 = auto
};

struct InvariantMonitor {
    long steps_checked = 0;
    int range_violations = 0;
    double max_range_excess = 0.0;
    int sign_flips = 0;
    int length_violations = 0;
    double max_length_excess = 0.0;
};

struct RunResult {
    std::vector<FlowSnapshot> snapshots;
    std::vector<std::array<FlowSnapshot, 3>> windows;
    StopReason reason = StopReason::MaxTime;
    double final_time = 0.0;
    PlanarCurve final_curve;
    std::optional<PinchInfo> pinch;
    InvariantMonitor invariants;
    long steps = 0;
};

RunResult run(const PotentialField& field, const PlanarCurve& curve, const FlowParams& params,
              const RunOptions& opts = {}, double start_time = 0.0);

struct ResidualStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    size_t samples = 0;
};

// Residual of d_t kappa = d_s^2(phi^-1 kappa) + phi^-1 kappa^3 over a window
// of >= 3 consecutive snapshots with matched nodes (no resampling inside).
ResidualStats curvature_pde_residual(const PotentialField& field,
                                     std::span<const FlowSnapshot> window);

} // namespace mcsf

#endif
