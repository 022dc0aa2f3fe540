#include "nsid/prbs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "nsid/errors.hpp"

namespace nsid::signals {

namespace {

// sinc^2(w*Tb/2) envelope drops to half power at w = 2.78 / Tb
constexpr double kHalfPowerConstant = 2.78;

} // namespace

void BandSpec::validate() const {
    if (!(omega_min > 0.0) || !(omega_max > omega_min))
        throw ConfigError("BandSpec: require 0 < omega_min < omega_max");
}

std::vector<int> maximal_taps(int order) {
    // One canonical maximal-length polynomial per register length
    // (taps listed as exponents of x^n + ... + 1, the register length first).
    switch (order) {
    case 2:  return {2, 1};
    case 3:  return {3, 2};
    case 4:  return {4, 3};
    case 5:  return {5, 3};
    case 6:  return {6, 5};
    case 7:  return {7, 6};
    case 8:  return {8, 6, 5, 4};
    case 9:  return {9, 5};
    case 10: return {10, 7};
    case 11: return {11, 9};
    case 12: return {12, 6, 4, 1};
    case 13: return {13, 4, 3, 1};
    case 14: return {14, 5, 3, 1};
    case 15: return {15, 14};
    case 16: return {16, 15, 13, 4};
    default:
        throw ConfigError("PRBS order must be in [2, 16], got " + std::to_string(order));
    }
}

int PrbsSpec::samples_per_bit() const {
    if (dt <= 0.0 || bit_interval_s <= 0.0)
        throw ConfigError("PrbsSpec: dt and bit_interval_s must be positive");
    const double ratio = bit_interval_s / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("PrbsSpec: bit_interval_s must be a positive integer multiple of dt");
    return static_cast<int>(rounded);
}

void PrbsSpec::validate() const {
    const auto canonical = maximal_taps(order); // also range-checks order
    std::set<int> want(canonical.begin(), canonical.end());
    std::set<int> have(taps.begin(), taps.end());
    if (have != want)
        throw ConfigError("PrbsSpec: tap set is not the built-in maximal-length set for order " +
                          std::to_string(order));
    if (seed == 0)
        throw ConfigError("PrbsSpec: all-zero seed is absorbing for an LFSR");
    if (seed >= (1u << order))
        throw ConfigError("PrbsSpec: seed does not fit in " + std::to_string(order) + " bits");
    if (n_periods < 1)
        throw ConfigError("PrbsSpec: n_periods must be >= 1");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw ConfigError("PrbsSpec: amplitude must be finite and non-negative");
    (void)samples_per_bit();
}

std::vector<int> lfsr_period(const PrbsSpec& spec) {
    spec.validate();
    const int n = spec.order;
    const int n_bits = spec.period_bits();

    // Fibonacci LFSR: state bits s1..sn, feedback = XOR of tapped bits,
    // output = sn, shift toward higher indices.
    std::uint32_t state = spec.seed;
    std::vector<int> bits;
    bits.reserve(static_cast<std::size_t>(n_bits));
    for (int i = 0; i < n_bits; ++i) {
        const int out = static_cast<int>((state >> (n - 1)) & 1u);
        bits.push_back(out);
        std::uint32_t fb = 0;
        for (int tap : spec.taps)
            fb ^= (state >> (tap - 1)) & 1u;
        state = ((state << 1) | fb) & ((1u << n) - 1u);
    }
    return bits;
}

Signal generate_prbs(const PrbsSpec& spec) {
    const auto bits = lfsr_period(spec); // validates
    const int spb = spec.samples_per_bit();

    Signal out;
    out.dt = spec.dt;
    out.samples.reserve(static_cast<std::size_t>(spec.n_periods) * bits.size() * spb);
    for (int p = 0; p < spec.n_periods; ++p)
        for (int bit : bits) {
            const double level = bit ? spec.amplitude : -spec.amplitude;
            for (int s = 0; s < spb; ++s)
                out.samples.push_back(level);
        }
    return out;
}

BandSpec prbs_covered_band(double bit_interval_s, int n_bits_per_period) {
    if (bit_interval_s <= 0.0 || n_bits_per_period <= 0)
        throw ArgumentError("prbs_covered_band: inputs must be positive");
    BandSpec band;
    band.omega_min = 2.0 * std::numbers::pi / (n_bits_per_period * bit_interval_s);
    band.omega_max = kHalfPowerConstant / bit_interval_s;
    return band;
}

PrbsSpec design_prbs_for_band(const BandSpec& band, double dt, double amplitude) {
    band.validate();
    if (dt <= 0.0)
        throw ArgumentError("design_prbs_for_band: dt must be positive");

    // Largest bit period keeping the half-power point above the band top.
    const int spb = static_cast<int>(std::floor(kHalfPowerConstant / (band.omega_max * dt) + 1e-12));
    if (spb < 1)
        throw DesignError("design_prbs_for_band: band top exceeds the half-power "
                          "limit 2.78/dt for the given sample period");
    const double bit_interval = spb * dt;

    // Smallest register length whose period fundamental reaches the band bottom.
    for (int n = 2; n <= 16; ++n) {
        const int n_bits = (1 << n) - 1;
        const BandSpec covered = prbs_covered_band(bit_interval, n_bits);
        if (covered.omega_min <= band.omega_min && covered.omega_max >= band.omega_max) {
            PrbsSpec spec;
            spec.order = n;
            spec.taps = maximal_taps(n);
            spec.seed = (1u << n) - 1u; // all-ones register
            spec.bit_interval_s = bit_interval;
            spec.amplitude = amplitude;
            spec.n_periods = 1;
            spec.dt = dt;
            return spec;
        }
    }
    throw DesignError("design_prbs_for_band: no register length up to 16 reaches "
                      "the requested lower band edge");
}

} // namespace nsid::signals
