#include "nsid/signal.hpp"

#include <cmath>

#include "nsid/errors.hpp"

namespace nsid::signals {

void Signal::validate() const {
    if (dt <= 0.0)
        throw ArgumentError("Signal: dt must be positive");
    for (double v : samples)
        if (!std::isfinite(v))
            throw ArgumentError("Signal: non-finite sample");
}

std::vector<double> autocorrelation(const Signal& signal, std::size_t max_lag) {
    const auto& x = signal.samples;
    const std::size_t n = x.size();
    if (n == 0)
        throw ArgumentError("autocorrelation: empty signal");
    if (max_lag >= n)
        throw ArgumentError("autocorrelation: max_lag must be < signal length");

    double r0 = 0.0;
    for (double v : x)
        r0 += v * v;

    std::vector<double> r(max_lag + 1, 0.0);
    if (r0 == 0.0) {
        // all-zero signal: define the zero-lag value as 1 (perfect self-similarity)
        for (auto& v : r)
            v = 1.0;
        return r;
    }
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            s += x[k] * x[(k + lag) % n];
        r[lag] = s / r0;
    }
    return r;
}

} // namespace nsid::signals
