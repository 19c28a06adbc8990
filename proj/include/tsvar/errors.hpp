#pragma once

#include <stdexcept>
#include <string>

namespace tsvar {

/// Base class for all tsvar errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad grid spec, bad config file, unreadable CSV.
struct config_error : error {
    using error::error;
};

/// An argument is outside an operation's domain (off-grid point,
/// reversed integration bounds, value out of a function's domain).
struct domain_error : error {
    using error::error;
};

/// A mathematical precondition failed: p(t) <= 0 somewhere, a
/// non-regressive coefficient, an ingredient referencing a variable
/// it must not depend on.
struct validation_error : error {
    using error::error;
};

/// Expression evaluation hit a singularity (ln of a non-positive
/// value, division by zero, ...). Message names the offending node.
struct eval_error : error {
    using error::error;
};

/// Expression text could not be parsed. `offset` is the byte position
/// in the source where the problem was detected.
struct parse_error : error {
    std::size_t offset;
    parse_error(const std::string& what, std::size_t off)
        : error(what + " at offset " + std::to_string(off)), offset(off) {}
};

/// A check on user-supplied data failed (e.g. a trajectory that does
/// not meet the boundary conditions).
struct verification_error : error {
    using error::error;
};

} // namespace tsvar
