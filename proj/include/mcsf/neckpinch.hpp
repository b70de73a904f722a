#ifndef MCSF_NECKPINCH_HPP
#define MCSF_NECKPINCH_HPP

#include <span>
#include <vector>

#include "mcsf/flow.hpp"

namespace mcsf {

// One snapshot of the rescaled flow near a pinch point. lambda is the
// running maximum of inverse distance over all snapshots seen so far, so the
// rescaled curve touches the unit circle exactly when the maximum is attained
// at the current snapshot.
struct TrackEntry {
    double time = 0.0;
    double lambda = 0.0;
    double dist = 0.0;              // polyline distance to p
    size_t closest_node = 0;        // interior node nearest to p
    std::vector<Vec2> window;       // curve clipped to B_c(p)
    std::vector<Vec2> rescaled;     // lambda * (window - p)
    double sup_rescaled_kappa = 0.0;
    double rescaled_origin_dist = 0.0; // lambda * dist
    double phi_inv_kappa_at_closest = 0.0;
    double normal_log_phi_at_closest = 0.0;
};

struct RescalingTrack {
    size_t singularity = 0;
    Vec2 p;
    double window_radius = 0.0;
    std::vector<TrackEntry> entries;
};

// Window radius keeping the rescaling ball well inside the near-Euclidean
// regime: away from other singularities, inside the curve's scale, and below
// the ALF length scale 1/(2m).
double default_window_radius(const PotentialField& field, size_t singularity,
                             const PlanarCurve& curve);

RescalingTrack track(const PotentialField& field, std::span<const FlowSnapshot> snapshots,
                     size_t singularity, double window_radius);

struct LineFit {
    Vec2 dir;             // unit direction of the fitted line
    double offset = 0.0;  // distance of the line from the origin
    double max_deviation = 0.0;
    size_t points = 0;
};

// Total-least-squares line through the rescaled window, restricted to the
// unit-scale core |x| <= core_radius where the straight-line convergence is
// asserted.
LineFit line_fit(const RescalingTrack& track, size_t entry_index, double core_radius = 1.5);

struct MonitorSeries {
    std::vector<double> time;
    std::vector<double> phi_inv_kappa;
    std::vector<double> normal_log_phi;
};

// Time series of the two blow-up monitors at the closest-approach node.
MonitorSeries blowup_monitors(const RescalingTrack& track);

} // namespace mcsf

#endif
