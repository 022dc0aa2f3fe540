#pragma once

#include <cstddef>
#include <string>

#include "nsid/plant.hpp"
#include "nsid/prbs.hpp"
#include "nsid/signal.hpp"

namespace nsid::control {

enum class Axis { Roll, Pitch, Yaw };

std::string to_string(Axis axis);
Axis axis_from_string(const std::string& name);

/// Gains of the nested loop: proportional angle controller C1 feeding a PI
/// rate controller C2. One set shared by all three axes.
struct CascadeGains {
    double kp_angle{4.0};        ///< 1/s
    double kp_rate{0.10};        ///< N m s/rad
    double ki_rate{0.05};        ///< N m/rad
    double rate_cmd_limit{4.0};  ///< rad/s
    double torque_limit{0.5};    ///< N m
    double integrator_limit{0.25}; ///< anti-windup bound on the I term, N m

    void validate() const;
};

/// PI rate-loop state, one per axis.
struct RateLoopState {
    double integrator{0.0};
};

/// PI law with conditional integration: the integrator is frozen while the
/// output saturates in the direction of the error. Output clamped to
/// torque_limit.
double rate_controller_step(RateLoopState& state, double rate_cmd, double rate_meas,
                            const CascadeGains& gains, double dt);

/// Proportional angle loop, output clamped to rate_cmd_limit.
double angle_controller_step(double angle_cmd, double angle_meas, const CascadeGains& gains);

struct ExperimentConfig {
    Axis axis{Axis::Roll};
    double duration_s{123.0};
    double dt{0.004};
    double reference_angle{0.0}; ///< zero-hold angle reference r
    signals::PrbsSpec prbs;
    CascadeGains gains;
    plant::NoiseSpec noise;
    plant::QuadrotorParams plant;
    double split_fraction{0.7};

    void validate() const;
};

/// Aligned excitation/response record for one axis. u(k) is the summed signal
/// entering the rate dynamics (C2 output + PRBS) applied over [k, k+1);
/// y(k) is the measured rate at time k, so y(k+1) responds to u(k).
struct Dataset {
    signals::Signal u;
    signals::Signal y;
    Axis axis{Axis::Roll};
    std::size_t split_index{0}; ///< first validation sample

    std::size_t size() const { return u.size(); }
    void validate() const;
};

/// Closed-loop PRBS identification run. All three axes are stabilized; the
/// PRBS is summed into the selected axis' rate loop. A noiseless dry run with
/// the same config must keep |angle| < 45 deg, otherwise ExperimentError.
/// Deterministic in config (seed included).
Dataset run_experiment(const ExperimentConfig& config);

} // namespace nsid::control
