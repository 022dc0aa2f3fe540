#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace nsid::plant {

/// Physical constants of the simulated vehicle.
struct QuadrotorParams {
    double mass{1.05};          ///< kg
    double ix{0.0095};          ///< kg m^2
    double iy{0.0095};          ///< kg m^2
    double iz{0.0186};          ///< kg m^2
    double torque_limit{0.5};   ///< per-axis |tau| bound, N m
    double thrust_limit{30.0};  ///< N
    double motor_tau_s{0.02};   ///< first-order actuator lag; 0 disables
    double g{9.81};             ///< m/s^2

    void validate() const;
};

/// Attitude + vertical state. p, q, r are body angular rates.
struct PlantState {
    double phi{0.0}, theta{0.0}, psi{0.0}; ///< Euler angles, rad
    double p{0.0}, q{0.0}, r{0.0};         ///< rad/s
    double z{0.0}, vz{0.0};                ///< m, m/s
    std::array<double, 3> tau_act{{0.0, 0.0, 0.0}}; ///< lagged actuator torques, N m
};

/// Collective thrust and body torques before saturation.
struct ControlInput {
    double u1{0.0}; ///< thrust, N
    double u2{0.0}; ///< roll torque, N m
    double u3{0.0}; ///< pitch torque, N m
    double u4{0.0}; ///< yaw torque, N m
};

struct NoiseSpec {
    double meas_std{0.0}; ///< measurement noise std per channel (rad/s for rates)
    double dist_std{0.0}; ///< torque disturbance std, N m
    std::uint64_t seed{0};

    void validate() const;
};

struct Measurement {
    double p{0.0}, q{0.0}, r{0.0}, z{0.0};
};

/// Seeded Gaussian stream for disturbance and measurement noise. Draw order
/// is fixed, so a given seed reproduces a trajectory bit for bit.
class NoiseStream {
public:
    explicit NoiseStream(const NoiseSpec& spec);

    /// Per-axis torque disturbance for one integration step.
    std::array<double, 3> disturbance();

    /// Additive measurement noise, one draw per channel.
    Measurement measurement_noise();

    const NoiseSpec& spec() const { return spec_; }

private:
    double gaussian(std::mt19937_64& gen);
    NoiseSpec spec_;
    std::mt19937_64 dist_gen_;
    std::mt19937_64 meas_gen_;
};

/// Rigid-body Euler rotational dynamics + vertical axis + actuator lag.
/// `input` must already be saturated/disturbed as desired; no clamping here.
/// Throws SimulationFault when |theta| exceeds the 80 deg kinematic guard.
PlantState derivatives(const PlantState& state, const ControlInput& input,
                       const QuadrotorParams& params);

/// One fixed-step RK4 update at period dt. Saturates the commanded input to
/// the params limits, adds one disturbance draw to the torques (held constant
/// across the sub-stages), and integrates. Throws SimulationFault on a
/// non-finite result.
PlantState step(const PlantState& state, const ControlInput& input,
                const QuadrotorParams& params, double dt, NoiseStream& noise);

/// Measured rates and altitude with additive Gaussian noise.
Measurement measure(const PlantState& state, NoiseStream& noise);

} // namespace nsid::plant
