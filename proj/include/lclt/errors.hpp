#pragma once

#include <stdexcept>
#include <string>

namespace lclt {

// Exit-code mapping used by the CLI: 2 config, 3 precondition, 4 I/O.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated runtime precondition: non-PD covariance, empty P1 range,
// degenerate parameters, budget overruns.
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input exceeds a configured capacity (sieve limit, factorization cap,
// enumeration budget).
struct CapacityError : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lclt
