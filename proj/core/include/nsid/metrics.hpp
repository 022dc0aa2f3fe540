#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nsid::metrics {

struct MetricsReport {
    double fit_percent_est{0.0}, fit_percent_val{0.0};
    double mse_est{0.0}, mse_val{0.0};
    double fpe{0.0};
    double r_est{0.0}, r_val{0.0};
    int n_params{0};
    std::size_t n_samples_est{0};
};

/// Mean squared error over the given samples.
double mse(std::span<const double> y, std::span<const double> y_hat);

/// Normalized-RMSE fit: 100 * (1 - ||y - y_hat|| / ||y - mean(y)||).
/// Throws on a constant target (undefined denominator).
double fit_percent(std::span<const double> y, std::span<const double> y_hat);

/// Akaike's final prediction error: mse * (1 + n/N) / (1 - n/N).
double fpe(double mse_est, int n_params, std::size_t n_samples);

/// Pearson product-moment correlation; throws when either input is constant.
double correlation(std::span<const double> y, std::span<const double> y_hat);

struct ResidualAutocorr {
    std::vector<double> rho;       ///< lags 0..max_lag, rho[0] = 1
    double confidence{0.0};        ///< 95% whiteness band, +-1.96/sqrt(N)
};

/// Normalized (mean-removed) autocorrelation of residuals with the whiteness
/// confidence band attached. Throws on constant residuals.
ResidualAutocorr residual_autocorr(std::span<const double> residuals, std::size_t max_lag);

} // namespace nsid::metrics
