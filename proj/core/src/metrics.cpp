#include "nsid/metrics.hpp"

#include <cmath>

#include "nsid/errors.hpp"

namespace nsid::metrics {

namespace {

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

double mse(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size())
        throw ArgumentError("mse: length mismatch");
    if (y.empty())
        throw ArgumentError("mse: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - y_hat[i];
        s += e * e;
    }
    return s / static_cast<double>(y.size());
}

double fit_percent(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size())
        throw ArgumentError("fit_percent: length mismatch");
    if (y.empty())
        throw ArgumentError("fit_percent: empty input");

    const double ym = mean(y);
    double err = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        err += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
        dev += (y[i] - ym) * (y[i] - ym);
    }
    if (dev == 0.0)
        throw ArgumentError("fit_percent: undefined for a constant target");
    return 100.0 * (1.0 - std::sqrt(err) / std::sqrt(dev));
}

double fpe(double mse_est, int n_params, std::size_t n_samples) {
    if (n_params < 0 || static_cast<std::size_t>(n_params) >= n_samples)
        throw ArgumentError("fpe: require 0 <= n_params < n_samples");
    if (mse_est < 0.0)
        throw ArgumentError("fpe: mse must be >= 0");
    const double ratio = static_cast<double>(n_params) / static_cast<double>(n_samples);
    return mse_est * (1.0 + ratio) / (1.0 - ratio);
}

double correlation(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size())
        throw ArgumentError("correlation: length mismatch");
    if (y.size() < 2)
        throw ArgumentError("correlation: need at least two samples");

    const double my = mean(y), mh = mean(y_hat);
    double syy = 0.0, shh = 0.0, syh = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double a = y[i] - my, b = y_hat[i] - mh;
        syy += a * a;
        shh += b * b;
        syh += a * b;
    }
    if (syy == 0.0 || shh == 0.0)
        throw ArgumentError("correlation: undefined for a constant input");
    return syh / std::sqrt(syy * shh);
}

ResidualAutocorr residual_autocorr(std::span<const double> residuals, std::size_t max_lag) {
    const std::size_t n = residuals.size();
    if (n == 0)
        throw ArgumentError("residual_autocorr: empty input");
    if (max_lag >= n)
        throw ArgumentError("residual_autocorr: max_lag must be < sample count");

    const double m = mean(residuals);
    double c0 = 0.0;
    for (double r : residuals)
        c0 += (r - m) * (r - m);
    if (c0 == 0.0)
        throw ArgumentError("residual_autocorr: undefined for constant residuals");

    ResidualAutocorr out;
    out.confidence = 1.96 / std::sqrt(static_cast<double>(n));
    out.rho.resize(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double c = 0.0;
        for (std::size_t k = 0; k + lag < n; ++k)
            c += (residuals[k] - m) * (residuals[k + lag] - m);
        out.rho[lag] = c / c0;
    }
    return out;
}

} // namespace nsid::metrics
