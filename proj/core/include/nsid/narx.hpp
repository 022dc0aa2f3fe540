#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nsid/control.hpp"

namespace nsid::narx {

/// Output/input delay orders of the regressor.
struct DelayConfig {
    int na{1}; ///< output delays
    int nb{1}; ///< input delays

    int window() const { return std::max(na, nb); }
    int regressor_size() const { return na + nb; }
    void validate() const;
};

enum class Activation { Linear, Logistic, Tanh, RadialBasis };

double activate(Activation f, double x);
std::string to_string(Activation f);
Activation activation_from_string(const std::string& name);

enum class ArchKind { SigmoidSingle, FeedForwardTwo, CascadeForward };

/// Network family and layer sizes. Three estimator shapes are supported:
///  - SigmoidSingle:   y = W1 * act1(W0 x + b0) + b1            (act1 logistic)
///  - FeedForwardTwo:  y = W2 * act2(W1 * act1(W0 x + b0) + b1) + b2
///                     (act1 tanh, act2 radial basis exp(-n^2))
///  - CascadeForward:  y = W1 * [x; act1(W0 x + b0)] + b1       (act1 tanh)
/// Output heads are linear.
struct Architecture {
    ArchKind kind{ArchKind::SigmoidSingle};
    int h1{1};
    int h2{0}; ///< second hidden layer, FeedForwardTwo only
    Activation act1{Activation::Logistic};
    Activation act2{Activation::RadialBasis};

    static Architecture sigmoid_single(int hidden, Activation act = Activation::Logistic);
    static Architecture feedforward_two(int h1, int h2,
                                        Activation act1 = Activation::Tanh,
                                        Activation act2 = Activation::RadialBasis);
    static Architecture cascade_forward(int hidden, Activation act = Activation::Tanh);

    int n_layers() const { return kind == ArchKind::FeedForwardTwo ? 3 : 2; }
    void validate() const;
};

/// Per-channel affine normalization (z-score), fitted on estimation data.
struct Normalization {
    double u_mean{0.0}, u_std{1.0};
    double y_mean{0.0}, y_std{1.0};

    double norm_u(double v) const { return (v - u_mean) / u_std; }
    double norm_y(double v) const { return (v - y_mean) / y_std; }
    double denorm_y(double v) const { return v * y_std + y_mean; }
    void validate() const;
};

/// Architecture + delays + weights + normalization. Weight block i feeds
/// layer i; for CascadeForward the output block W[1] spans [x; hidden].
struct NarxModel {
    Architecture arch;
    DelayConfig delays;
    Normalization norm;
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;

    int regressor_size() const { return delays.regressor_size(); }
    int param_count() const;
    void validate() const;
};

/// Regressor X(k-1) = [y(k-1)..y(k-na), u(k-1)..u(k-nb)], newest first in
/// each block. Histories are passed in chronological order; the most recent
/// sample is the back of the span.
Eigen::VectorXd build_regressor(std::span<const double> y_hist,
                                std::span<const double> u_hist,
                                const DelayConfig& delays);

/// Single neuron: f(sum_i in_i w_i + b).
double neuron(std::span<const double> inputs, std::span<const double> weights,
              double bias, Activation activation);

/// Forward pass on a normalized regressor; returns the normalized prediction.
double forward(const NarxModel& model, const Eigen::VectorXd& x);

/// One-step predictions over a dataset, first first_valid entries unavailable.
struct Prediction {
    std::vector<double> y_hat;   ///< aligned with the dataset; NaN before first_valid
    std::size_t first_valid{0};
    double dt{0.0};
};

/// Series-parallel (teacher-forced) one-step prediction over the record.
/// Regressors are built from measured y and u; output is de-normalized.
Prediction predict_sp(const NarxModel& model, const control::Dataset& data);

/// Parallel (free-run) simulation: past predictions replace measured outputs
/// in the regressor. y_init seeds the first delay window and is copied to the
/// output verbatim. Requires y_init.size() >= max(na, nb) when nb > na.
std::vector<double> simulate_p(const NarxModel& model, const signals::Signal& u,
                               std::span<const double> y_init);

/// Fresh model with weights ~ U(-1/sqrt(fan_in), +1/sqrt(fan_in)) per layer,
/// deterministic in seed; normalization starts as identity.
NarxModel init_weights(const Architecture& arch, const DelayConfig& delays,
                       std::uint64_t seed);

} // namespace nsid::narx
