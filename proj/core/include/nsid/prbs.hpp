#pragma once

#include <cstdint>
#include <vector>

#include "nsid/signal.hpp"

namespace nsid::signals {

/// Frequency band of interest, rad/s.
struct BandSpec {
    double omega_min{0.0};
    double omega_max{0.0};

    /// Throws ConfigError unless 0 < omega_min < omega_max.
    void validate() const;
};

/// Maximal-length PRBS generator configuration (Fibonacci LFSR).
struct PrbsSpec {
    int order{0};                 ///< shift-register length n, 2..16
    std::vector<int> taps;        ///< 1-based feedback taps, must include n
    std::uint32_t seed{0};        ///< n-bit nonzero initial register
    double bit_interval_s{0.0};   ///< PRBS clock period T_b (integer multiple of dt)
    double amplitude{0.0};        ///< half peak-to-peak level a; output in {-a, +a}
    int n_periods{1};
    double dt{0.0};               ///< output sample period

    int period_bits() const { return (1 << order) - 1; }
    int samples_per_bit() const;

    /// Throws ConfigError on any invariant violation (non-maximal taps,
    /// all-zero seed, bit interval not a multiple of dt, ...).
    void validate() const;
};

/// Canonical maximal-length tap set for register length n in [2, 16].
std::vector<int> maximal_taps(int order);

/// Raw LFSR bit sequence for one period (2^n - 1 bits), before zero-order hold.
std::vector<int> lfsr_period(const PrbsSpec& spec);

/// Two-level excitation in {-a, +a}; each bit held for bit_interval_s / dt
/// samples, n_periods full LFSR periods. Deterministic in spec.
Signal generate_prbs(const PrbsSpec& spec);

/// Band covered by a PRBS with bit period T_b and N bits per period:
/// omega_min = 2*pi / (N * T_b) (period fundamental), omega_max = 2.78 / T_b
/// (half-power point of the sinc^2 spectrum envelope).
BandSpec prbs_covered_band(double bit_interval_s, int n_bits_per_period);

/// Smallest maximal-length PRBS whose covered band contains `band`:
/// T_b is the largest integer multiple of dt with 2.78 / T_b >= omega_max,
/// then the smallest n in [2, 16] with 2*pi / (N * T_b) <= omega_min.
/// Throws DesignError when the required T_b would be shorter than dt.
PrbsSpec design_prbs_for_band(const BandSpec& band, double dt, double amplitude);

} // namespace nsid::signals
