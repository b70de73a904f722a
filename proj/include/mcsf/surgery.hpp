#ifndef MCSF_SURGERY_HPP
#define MCSF_SURGERY_HPP

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "mcsf/flow.hpp"

namespace mcsf {

struct SurgeryEvent {
    double time = 0.0;
    double half_width = 0.0; // time spent with min distance in [r, 2r]
    int singularity = -1;
    int old_component = -1;               // trace id
    std::array<int, 2> new_components{};  // trace ids
    double junction_angle_gap = 0.0;      // C^1 mismatch at the split, radians
};

// Union curve made of components with consecutive endpoints; every interior
// junction sits at a singularity of phi and appears at most once.
struct FlowState {
    double time = 0.0;
    std::vector<PlanarCurve> components;
    std::vector<SurgeryEvent> events;
    PotentialField field;
};

void validate_state(const FlowState& state);

// Interior nodes within surgery_radius of a non-endpoint singularity,
// one entry per singularity in increasing index order.
std::vector<std::pair<size_t, size_t>> detect_pinch(const PotentialField& field,
                                                    const FlowSnapshot& snapshot,
                                                    const FlowParams& params);

// Cut at the closest-approach node to the given singularity, snap that node
// onto it, and return the two pieces (resampled), plus the junction angle gap.
struct SplitOutcome {
    PlanarCurve left;
    PlanarCurve right;
    double junction_angle_gap = 0.0;
};
SplitOutcome split_at_singularity(const PotentialField& field, const PlanarCurve& curve,
                                  size_t singularity, const FlowParams& params);

// Full history of one smooth component between its birth and its death
// (surgery) or the end of the run.
struct ComponentTrace {
    int id = 0;
    int parent = -1;
    double born = 0.0;
    std::optional<double> died;
    StopReason last_reason = StopReason::MaxTime;
    std::optional<PinchInfo> pinch;
    std::vector<FlowSnapshot> snapshots;
    std::vector<std::array<FlowSnapshot, 3>> windows;
};

struct ThroughResult {
    std::vector<PlanarCurve> final_components; // ordered from p1 to p2
    std::vector<int> final_trace_ids;
    std::vector<SurgeryEvent> events;          // ordered by (time, singularity)
    std::vector<ComponentTrace> traces;
    bool max_time_exceeded = false;
    double final_time = 0.0;
    InvariantMonitor invariants;
};

ThroughResult run_through_singularities(const PotentialField& field, const PlanarCurve& curve,
                                        const FlowParams& params, const RunOptions& opts = {});

FlowState final_state(const PotentialField& field, const ThroughResult& result);

} // namespace mcsf

#endif
