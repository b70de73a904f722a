#ifndef MCSF_ERRORS_HPP
#define MCSF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcsf {

enum class Errc {
    // potential
    EvalAtSingularity,
    SingularityOnBoundary,
    NonSimplePolygon,
    EmptyCandidateSet,
    // curve
    SelfIntersection,
    DuplicateNode,
    EndpointMismatch,
    NodeTooCloseToSingularity,
    LiftJump,
    NonCompactCurve,
    TooFewNodes,
    // flow
    TimeStepUnderflow,
    NodeHitSingularity,
    WindowTooShort,
    // surgery
    SplitTooCoarse,
    MaxTimeExceeded,
    // neckpinch
    WindowEmpty,
    DegenerateWindow,
    // stability
    SingularityOnCurve,
    NotAlmostCalibrated,
    NotStrictlyConvex,
    ComponentNotStationary,
    // pacman
    VertexNotEnclosed,
    DisconnectedInterior,
    DegenerateCollinear,
    NotStrictlyDecreasing,
    TriadBrokenDuringWindow,
    // cli
    ParseError,
    ValidationError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace mcsf

#endif
