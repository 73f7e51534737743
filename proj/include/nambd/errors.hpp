#pragma once

#include <stdexcept>
#include <string>

namespace nambd {

struct OrderingViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonPositiveDiffusion : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonPositiveInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonPositiveRadius : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OmegaOutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QuadratureNonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergentIntegral : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptySample : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularPotential : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hitting the step cap signals a configuration pathology, not a model outcome.
struct StepLimitExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyExperiment : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace nambd
