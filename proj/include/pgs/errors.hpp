#pragma once

#include <stdexcept>
#include <string>

namespace pgs {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input file could not be parsed (malformed JSON, wrong field type).
/// The message carries the field path when known.
struct ParseError : Error {
    using Error::Error;
};

/// Input parsed but violates a documented invariant; the message names it.
struct ValidationError : Error {
    using Error::Error;
};

/// Lane filter invoked with an empty lane list.
struct EmptyMapError : Error {
    using Error::Error;
};

/// Target-lane labeling invoked with all slots absent.
struct NoCandidatesError : Error {
    using Error::Error;
};

/// Trajectory shorter than the requested matching window.
struct TrajectoryTooShortError : Error {
    using Error::Error;
};

/// Score position requested for a slot that was absent at labeling time.
struct LabelAbsentError : Error {
    using Error::Error;
};

/// Paired trajectories differ in length or step size.
struct LengthMismatchError : Error {
    using Error::Error;
};

/// Ego and agent trajectories do not share dt and horizon.
struct HorizonMismatchError : Error {
    using Error::Error;
};

/// Collision event with near-zero center distance; the repulsion
/// direction is undefined and the caller must perturb the input.
struct DegenerateDistanceError : Error {
    using Error::Error;
};

}  // namespace pgs
