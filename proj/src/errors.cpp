#include "mcsf/errors.hpp"

namespace mcsf {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::EvalAtSingularity: return "EvalAtSingularity";
        case Errc::SingularityOnBoundary: return "SingularityOnBoundary";
        case Errc::NonSimplePolygon: return "NonSimplePolygon";
        case Errc::EmptyCandidateSet: return "EmptyCandidateSet";
        case Errc::SelfIntersection: return "SelfIntersection";
        case Errc::DuplicateNode: return "DuplicateNode";
        case Errc::EndpointMismatch: return "EndpointMismatch";
        case Errc::NodeTooCloseToSingularity: return "NodeTooCloseToSingularity";
        case Errc::LiftJump: return "LiftJump";
        case Errc::NonCompactCurve: return "NonCompactCurve";
        case Errc::TooFewNodes: return "TooFewNodes";
        case Errc::TimeStepUnderflow: return "TimeStepUnderflow";
        case Errc::NodeHitSingularity: return "NodeHitSingularity";
        case Errc::WindowTooShort: return "WindowTooShort";
        case Errc::SplitTooCoarse: return "SplitTooCoarse";
        case Errc::MaxTimeExceeded: return "MaxTimeExceeded";
        case Errc::WindowEmpty: return "WindowEmpty";
        case Errc::DegenerateWindow: return "DegenerateWindow";
        case Errc::SingularityOnCurve: return "SingularityOnCurve";
        case Errc::NotAlmostCalibrated: return "NotAlmostCalibrated";
        case Errc::NotStrictlyConvex: return "NotStrictlyConvex";
        case Errc::ComponentNotStationary: return "ComponentNotStationary";
        case Errc::VertexNotEnclosed: return "VertexNotEnclosed";
        case Errc::DisconnectedInterior: return "DisconnectedInterior";
        case Errc::DegenerateCollinear: return "DegenerateCollinear";
        case Errc::NotStrictlyDecreasing: return "NotStrictlyDecreasing";
        case Errc::TriadBrokenDuringWindow: return "TriadBrokenDuringWindow";
        case Errc::ParseError: return "ParseError";
        case Errc::ValidationError: return "ValidationError";
    }
    return "UnknownError";
}

} // namespace mcsf
