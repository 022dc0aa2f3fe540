#include "nsid/control.hpp"

#include <algorithm>
#include <cmath>

#include "nsid/errors.hpp"

namespace nsid::control {

namespace {

constexpr double kAngleGuardRad = 45.0 * M_PI / 180.0;

struct LoopRecord {
    std::vector<double> u;
    std::vector<double> y;
    double max_angle{0.0};
};

double axis_angle(const plant::PlantState& s, Axis axis) {
    switch (axis) {
    case Axis::Roll: return s.phi;
    case Axis::Pitch: return s.theta;
    default: return s.psi;
    }
}

double axis_rate(const plant::Measurement& m, Axis axis) {
    switch (axis) {
    case Axis::Roll: return m.p;
    case Axis::Pitch: return m.q;
    default: return m.r;
    }
}

LoopRecord run_loop(const ExperimentConfig& cfg, bool with_noise) {
    plant::NoiseSpec noise = cfg.noise;
    if (!with_noise) {
        noise.meas_std = 0.0;
        noise.dist_std = 0.0;
    }
    plant::NoiseStream stream(noise);

    const auto prbs_period = signals::generate_prbs(cfg.prbs);
    const std::size_t n = static_cast<std::size_t>(std::llround(cfg.duration_s / cfg.dt));

    plant::PlantState state;
    std::array<RateLoopState, 3> rate_loops{};
    const double hover_thrust = cfg.plant.mass * cfg.plant.g;

    LoopRecord rec;
    rec.u.reserve(n);
    rec.y.reserve(n);

    for (std::size_t k = 0; k < n; ++k) {
        const plant::Measurement meas = plant::measure(state, stream);

        // Angle loops track the (zero by default) reference on all axes;
        // only the selected axis gets the reference and the PRBS.
        double torque[3];
        for (int a = 0; a < 3; ++a) {
            const Axis axis = static_cast<Axis>(a);
            const double cmd = (axis == cfg.axis) ? cfg.reference_angle : 0.0;
            const double rate_cmd = angle_controller_step(cmd, axis_angle(state, axis), cfg.gains);
            torque[a] = rate_controller_step(rate_loops[a], rate_cmd, axis_rate(meas, axis),
                                             cfg.gains, cfg.dt);
        }

        const double prbs_sample =
            prbs_period.samples[k % prbs_period.samples.size()];
        const int ai = static_cast<int>(cfg.axis);
        const double u_k = torque[ai] + prbs_sample;
        torque[ai] = u_k;

        rec.u.push_back(u_k);
        rec.y.push_back(axis_rate(meas, cfg.axis));

        plant::ControlInput input;
        input.u1 = hover_thrust;
        input.u2 = torque[0];
        input.u3 = torque[1];
        input.u4 = torque[2];
        try {
            state = plant::step(state, input, cfg.plant, cfg.dt, stream);
        } catch (const SimulationFault& e) {
            throw ExperimentError("experiment unstable at sample " + std::to_string(k) + ": " +
                                  e.what());
        }

        const double ang = std::max({std::abs(state.phi), std::abs(state.theta),
                                     std::abs(state.psi)});
        rec.max_angle = std::max(rec.max_angle, ang);
        if (ang >= kAngleGuardRad)
            throw ExperimentError("experiment unstable: |angle| reached 45 deg at sample " +
                                  std::to_string(k));
    }
    return rec;
}

} // namespace

std::string to_string(Axis axis) {
    switch (axis) {
    case Axis::Roll: return "roll";
    case Axis::Pitch: return "pitch";
    default: return "yaw";
    }
}

Axis axis_from_string(const std::string& name) {
    if (name == "roll") return Axis::Roll;
    if (name == "pitch") return Axis::Pitch;
    if (name == "yaw") return Axis::Yaw;
    throw ConfigError("unknown axis '" + name + "' (expected roll|pitch|yaw)");
}

void CascadeGains::validate() const {
    if (kp_angle < 0.0 || kp_rate < 0.0 || ki_rate < 0.0)
        throw ConfigError("CascadeGains: gains must be >= 0");
    if (!(rate_cmd_limit > 0.0) || !(torque_limit > 0.0) || !(integrator_limit > 0.0))
        throw ConfigError("CascadeGains: limits must be positive");
}

double rate_controller_step(RateLoopState& state, double rate_cmd, double rate_meas,
                            const CascadeGains& gains, double dt) {
    const double error = rate_cmd - rate_meas;
    double integ = std::clamp(state.integrator + gains.ki_rate * error * dt,
                              -gains.integrator_limit, gains.integrator_limit);
    const double raw = gains.kp_rate * error + integ;
    if (std::abs(raw) > gains.torque_limit && raw * error > 0.0)
        integ = state.integrator; // saturating further: hold the integrator
    state.integrator = integ;
    const double out = gains.kp_rate * error + state.integrator;
    return std::clamp(out, -gains.torque_limit, gains.torque_limit);
}

double angle_controller_step(double angle_cmd, double angle_meas, const CascadeGains& gains) {
    const double out = gains.kp_angle * (angle_cmd - angle_meas);
    return std::clamp(out, -gains.rate_cmd_limit, gains.rate_cmd_limit);
}

void ExperimentConfig::validate() const {
    gains.validate();
    noise.validate();
    plant.validate();
    prbs.validate();
    if (dt <= 0.0)
        throw ConfigError("ExperimentConfig: dt must be positive");
    const double period_s = prbs.period_bits() * prbs.bit_interval_s;
    if (duration_s < period_s)
        throw ConfigError("ExperimentConfig: duration must cover one full PRBS period (" +
                          std::to_string(period_s) + " s)");
    if (!(split_fraction > 0.0) || !(split_fraction < 1.0))
        throw ConfigError("ExperimentConfig: split_fraction must lie in (0, 1)");
    if (std::abs(prbs.dt - dt) > 1e-12)
        throw ConfigError("ExperimentConfig: PRBS dt must equal the loop dt");
}

void Dataset::validate() const {
    u.validate();
    y.validate();
    if (u.size() != y.size() || u.size() < 2)
        throw ConfigError("Dataset: u and y must have equal length >= 2");
    if (u.dt != y.dt)
        throw ConfigError("Dataset: u and y sample periods differ");
    if (split_index == 0 || split_index >= u.size())
        throw ConfigError("Dataset: split index must be strictly inside the record");
}

Dataset run_experiment(const ExperimentConfig& config) {
    config.validate();

    // Stability pre-check on the noiseless loop.
    const LoopRecord dry = run_loop(config, false);
    (void)dry; // run_loop already throws on a guard trip

    const LoopRecord rec = run_loop(config, true);

    Dataset ds;
    ds.axis = config.axis;
    ds.u.samples = rec.u;
    ds.u.dt = config.dt;
    ds.y.samples = rec.y;
    ds.y.dt = config.dt;
    ds.split_index = static_cast<std::size_t>(config.split_fraction * rec.u.size());
    ds.validate();
    return ds;
}

} // namespace nsid::control
