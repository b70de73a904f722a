#ifndef MCSF_STABILITY_HPP
#define MCSF_STABILITY_HPP

#include <string>
#include <vector>

#include "mcsf/curve.hpp"
#include "mcsf/surgery.hpp"

namespace mcsf {

struct Enclosure {
    std::vector<size_t> interior; // strictly inside the region bounded by curve + chord
    std::vector<size_t> on_chord; // within guard band of the chord segment
};

// Non-endpoint singularities inside the (possibly disconnected, even-odd)
// region bounded by the curve and its chord. Throws SingularityOnCurve when
// one sits within guard band of the curve itself.
Enclosure enclosed_singularities(const PotentialField& field, const PlanarCurve& curve);

// Connect-sum decomposition at an enclosed singularity. Angles are measured
// against the oriented chord direction, normalized so the enclosing lobe lies
// in the upper half-frame (theta_bar_1 >= theta_bar_2 for every witness).
struct Decomposition {
    size_t singularity = 0;
    double theta_bar_1 = 0.0;
    double theta_bar_2 = 0.0;
    double len_1 = 0.0;
    double len_2 = 0.0;
    bool on_chord = false;
};

enum class Classification { Stable, SemiStable, StrictlyUnstable };
enum class FlowClassification { FlowStable, FlowSemiStable, StrictlyFlowUnstable };

const char* classification_name(Classification c);
const char* flow_classification_name(FlowClassification c);

struct StabilityVerdict {
    Classification classification = Classification::Stable;
    FlowClassification flow_classification = FlowClassification::FlowStable;
    std::vector<Decomposition> witnesses;
};

StabilityVerdict classify(const PotentialField& field, const PlanarCurve& curve);

struct ChainSegment {
    Vec2 a;
    Vec2 b;
    int sing_a = -1; // -1 for a ray end
    int sing_b = -1;
    double phase = 0.0; // angle of the oriented segment against the x-axis
};

struct ChainReport {
    std::vector<ChainSegment> segments;
    bool a_k_valid = false;
    bool phase_monotone = false;

    std::vector<double> phases() const;
};

// Predicted limit chain for a strictly convex almost calibrated arc: the
// boundary of the convex hull of {endpoints} + enclosed singularities, minus
// the chord, subdivided at singularities lying on hull edges.
ChainReport limit_oracle(const PotentialField& field, const PlanarCurve& curve);

// Chain assembled from the stationary components of a finished run. Each
// component must be within chord_tol of its own chord (ray components of
// their ray).
ChainReport chain_report(const PotentialField& field, const ThroughResult& result,
                         double chord_tol = 1e-2);

ChainReport chain_from_segments(std::vector<ChainSegment> segments);

struct DestabilizationOrder {
    std::vector<int> order; // 1-based chain indices, phases non-increasing
    std::string bracketing; // e.g. "L1 # (L3 # L2)"
};

// Segments sorted by phase (non-increasing, stable for ties) as the sequence
// of destabilizing connect-sum factors.
DestabilizationOrder destabilization_order(const ChainReport& chain);

} // namespace mcsf

#endif
