#pragma once

#include <stdexcept>

namespace sqlab {

// a checked identity or bound failed at run time (CLI exit code 2)
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sqlab
