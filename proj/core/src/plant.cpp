#include "nsid/plant.hpp"

#include <algorithm>
#include <cmath>

#include "nsid/errors.hpp"

namespace nsid::plant {

namespace {

constexpr double kThetaGuardRad = 80.0 * M_PI / 180.0;

double clamp_abs(double v, double bound) {
    return std::clamp(v, -bound, bound);
}

PlantState axpy(const PlantState& x, const PlantState& d, double h) {
    PlantState r = x;
    r.phi += h * d.phi;
    r.theta += h * d.theta;
    r.psi += h * d.psi;
    r.p += h * d.p;
    r.q += h * d.q;
    r.r += h * d.r;
    r.z += h * d.z;
    r.vz += h * d.vz;
    for (int i = 0; i < 3; ++i)
        r.tau_act[i] += h * d.tau_act[i];
    return r;
}

bool finite(const PlantState& s) {
    return std::isfinite(s.phi) && std::isfinite(s.theta) && std::isfinite(s.psi) &&
           std::isfinite(s.p) && std::isfinite(s.q) && std::isfinite(s.r) &&
           std::isfinite(s.z) && std::isfinite(s.vz) && std::isfinite(s.tau_act[0]) &&
           std::isfinite(s.tau_act[1]) && std::isfinite(s.tau_act[2]);
}

} // namespace

void QuadrotorParams::validate() const {
    if (!(mass > 0.0) || !(ix > 0.0) || !(iy > 0.0) || !(iz > 0.0))
        throw ConfigError("QuadrotorParams: mass and inertias must be positive");
    if (!(torque_limit > 0.0) || !(thrust_limit > 0.0))
        throw ConfigError("QuadrotorParams: saturation limits must be positive");
    if (motor_tau_s < 0.0)
        throw ConfigError("QuadrotorParams: motor_tau_s must be >= 0");
}

void NoiseSpec::validate() const {
    if (meas_std < 0.0 || dist_std < 0.0)
        throw ConfigError("NoiseSpec: standard deviations must be >= 0");
}

NoiseStream::NoiseStream(const NoiseSpec& spec)
    : spec_(spec), dist_gen_(spec.seed ^ 0x9e3779b97f4a7c15ull), meas_gen_(spec.seed) {
    spec.validate();
}

double NoiseStream::gaussian(std::mt19937_64& gen) {
    std::normal_distribution<double> n(0.0, 1.0); // stateless use: fresh per draw
    return n(gen);
}

std::array<double, 3> NoiseStream::disturbance() {
    if (spec_.dist_std == 0.0)
        return {0.0, 0.0, 0.0};
    return {spec_.dist_std * gaussian(dist_gen_), spec_.dist_std * gaussian(dist_gen_),
            spec_.dist_std * gaussian(dist_gen_)};
}

Measurement NoiseStream::measurement_noise() {
    if (spec_.meas_std == 0.0)
        return {};
    Measurement m;
    m.p = spec_.meas_std * gaussian(meas_gen_);
    m.q = spec_.meas_std * gaussian(meas_gen_);
    m.r = spec_.meas_std * gaussian(meas_gen_);
    m.z = spec_.meas_std * gaussian(meas_gen_);
    return m;
}

PlantState derivatives(const PlantState& s, const ControlInput& in,
                       const QuadrotorParams& par) {
    if (std::abs(s.theta) >= kThetaGuardRad)
        throw SimulationFault("plant: pitch angle " + std::to_string(s.theta) +
                              " rad hit the 80 deg Euler singularity guard");

    const bool lag = par.motor_tau_s > 0.0;
    const double tau_phi = lag ? s.tau_act[0] : in.u2;
    const double tau_theta = lag ? s.tau_act[1] : in.u3;
    const double tau_psi = lag ? s.tau_act[2] : in.u4;

    PlantState d; // reused as a derivative container
    d.p = ((par.iy - par.iz) / par.ix) * s.q * s.r + tau_phi / par.ix;
    d.q = ((par.iz - par.ix) / par.iy) * s.p * s.r + tau_theta / par.iy;
    d.r = ((par.ix - par.iy) / par.iz) * s.p * s.q + tau_psi / par.iz;

    const double sphi = std::sin(s.phi), cphi = std::cos(s.phi);
    const double ttheta = std::tan(s.theta), ctheta = std::cos(s.theta);
    d.phi = s.p + sphi * ttheta * s.q + cphi * ttheta * s.r;
    d.theta = cphi * s.q - sphi * s.r;
    d.psi = (sphi * s.q + cphi * s.r) / ctheta;

    d.vz = (cphi * ctheta * in.u1) / par.mass - par.g;
    d.z = s.vz;

    if (lag) {
        d.tau_act[0] = (in.u2 - s.tau_act[0]) / par.motor_tau_s;
        d.tau_act[1] = (in.u3 - s.tau_act[1]) / par.motor_tau_s;
        d.tau_act[2] = (in.u4 - s.tau_act[2]) / par.motor_tau_s;
    }
    return d;
}

PlantState step(const PlantState& state, const ControlInput& input,
                const QuadrotorParams& par, double dt, NoiseStream& noise) {
    if (dt <= 0.0)
        throw ArgumentError("plant::step: dt must be positive");

    const auto ds = noise.disturbance();
    ControlInput u;
    u.u1 = std::clamp(input.u1, 0.0, par.thrust_limit);
    u.u2 = clamp_abs(input.u2, par.torque_limit) + ds[0];
    u.u3 = clamp_abs(input.u3, par.torque_limit) + ds[1];
    u.u4 = clamp_abs(input.u4, par.torque_limit) + ds[2];

    const PlantState k1 = derivatives(state, u, par);
    const PlantState k2 = derivatives(axpy(state, k1, dt / 2.0), u, par);
    const PlantState k3 = derivatives(axpy(state, k2, dt / 2.0), u, par);
    const PlantState k4 = derivatives(axpy(state, k3, dt), u, par);

    PlantState next = state;
    next = axpy(next, k1, dt / 6.0);
    next = axpy(next, k2, dt / 3.0);
    next = axpy(next, k3, dt / 3.0);
    next = axpy(next, k4, dt / 6.0);
    if (par.motor_tau_s == 0.0)
        next.tau_act = {u.u2, u.u3, u.u4};

    if (!finite(next))
        throw SimulationFault("plant: non-finite state after integration step");
    return next;
}

Measurement measure(const PlantState& state, NoiseStream& noise) {
    Measurement m = noise.measurement_noise();
    m.p += state.p;
    m.q += state.q;
    m.r += state.r;
    m.z += state.z;
    return m;
}

} // namespace nsid::plant
