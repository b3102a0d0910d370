#pragma once

#include <stdexcept>
#include <string>

namespace bethe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A kernel or rational-function denominator fell below the collision tolerance.
struct PoleError : Error {
    using Error::Error;
};

// multiset_match found more than one valid matching (tolerance too coarse).
struct AmbiguousMatch : Error {
    using Error::Error;
};

// A set that must satisfy the Bethe equations does not.
struct OffShellError : Error {
    using Error::Error;
};

// extract_coefficient found no expansion term matching the target set.
struct MissingTerm : Error {
    using Error::Error;
};

// The epsilon-extrapolated limit did not stabilize.
struct UnstableLimit : Error {
    using Error::Error;
};

// No Newton seed converged.
struct NoConvergence : Error {
    using Error::Error;
};

// Newton collapsed two roots within the collision tolerance.
struct DegenerateRoot : Error {
    using Error::Error;
};

struct DimensionCap : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, int line_no)
        : Error("parse error (line " + std::to_string(line_no) + "): " + msg), line(line_no) {}
    int line;
};

struct ValidationError : Error {
    using Error::Error;
};

}  // namespace bethe
