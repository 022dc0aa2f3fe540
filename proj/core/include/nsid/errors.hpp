#pragma once

#include <stdexcept>
#include <string>

namespace nsid {

/// Invalid configuration value or malformed config/CSV input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad argument to a library call (length mismatch, insufficient history, ...).
struct ArgumentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Excitation design cannot satisfy the requested band at the given rate.
struct DesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model structure inconsistent with the data or weights handed to it.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plant integration failure: kinematic singularity guard or NaN state.
struct SimulationFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed-loop experiment went unstable; message names the first bad sample.
struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training diverged or the damped normal equations became unsolvable.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nsid
