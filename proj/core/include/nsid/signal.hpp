#pragma once

#include <cstddef>
#include <vector>

namespace nsid::signals {

/// Uniformly sampled scalar time series.
struct Signal {
    std::vector<double> samples;
    double dt{0.0}; ///< sample period, seconds

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) * dt; }

    /// Throws ArgumentError if dt <= 0 or any sample is non-finite.
    void validate() const;
};

/// Circular autocorrelation over the whole record (one excitation period by
/// convention), normalized so the lag-0 value is 1. Returns lags 0..max_lag.
/// No mean removal: the two-level m-sequence identity holds for the raw
/// product sum.
std::vector<double> autocorrelation(const Signal& signal, std::size_t max_lag);

} // namespace nsid::signals
