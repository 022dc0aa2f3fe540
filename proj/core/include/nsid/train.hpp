#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nsid/control.hpp"
#include "nsid/narx.hpp"

namespace nsid::train {

enum class Algorithm { LevenbergMarquardt, Adam };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm a);

struct TrainingOptions {
    Algorithm algorithm{Algorithm::LevenbergMarquardt};
    int max_epochs{200};
    int patience{6};            ///< epochs without validation improvement
    double lm_lambda0{1e-3};
    double lm_lambda_factor{10.0};
    double learning_rate{1e-2}; ///< first-order fallback
    std::uint64_t seed{1};
    bool gradient_check{false};

    void validate() const;
    std::string digest() const;
};

struct TrainingReport {
    std::vector<double> train_mse; ///< per epoch, physical units
    std::vector<double> val_mse;   ///< per epoch, physical units
    int best_epoch{-1};            ///< 0-based, earliest argmin of val_mse
    double best_val_mse{0.0};
    double wall_seconds{0.0};
    std::uint64_t seed{0};
    std::string options_digest;
};

/// Normalized regressor rows and targets for one contiguous index range.
struct Batch {
    Eigen::MatrixXd X; ///< N x (na + nb)
    Eigen::VectorXd y; ///< N
};

/// Contiguous estimation/validation segments of a dataset per its split index.
struct Segment {
    signals::Signal u;
    signals::Signal y;
};

/// Throws ConfigError when either segment is not longer than the delay window.
std::pair<Segment, Segment> split(const control::Dataset& data, int delay_window);

/// Regressor/target batch over dataset rows [from, to), teacher-forced on the
/// full record and normalized with the model statistics.
Batch make_batch(const narx::NarxModel& model, const control::Dataset& data,
                 std::size_t from, std::size_t to);

/// Flattened parameter vector: W then b per layer, matrices row-major.
Eigen::VectorXd get_params(const narx::NarxModel& model);
void set_params(narx::NarxModel& model, const Eigen::VectorXd& params);

/// Forward pass plus d(y_hat)/d(theta) in the flattened layout.
double forward_with_gradient(const narx::NarxModel& model, const Eigen::VectorXd& x,
                             Eigen::VectorXd& grad);

/// Mean squared one-step error (normalized units) and its parameter gradient.
std::pair<double, Eigen::VectorXd> loss_and_gradient(const narx::NarxModel& model,
                                                     const Batch& batch);

/// Residuals r = y_hat - y and Jacobian dr/dtheta, one row per sample.
void residual_jacobian(const narx::NarxModel& model, const Batch& batch,
                       Eigen::VectorXd& residuals, Eigen::MatrixXd& jacobian);

struct LmStepResult {
    Eigen::VectorXd params; ///< candidate (accepted) or original (rejected)
    double lambda{0.0};     ///< adapted damping
    bool accepted{false};
    double loss_before{0.0};
    double loss_after{0.0};
};

/// One damped Gauss-Newton trial: solves (J'J + lambda diag(J'J)) d = -J'r.
/// Accepted steps divide lambda by `factor`, rejected steps multiply it.
LmStepResult lm_step(const narx::NarxModel& model, const Batch& batch, double lambda,
                     double factor);

/// Series-parallel training with min-validation checkpointing. Fits the
/// normalization on the estimation segment, iterates the chosen algorithm,
/// and returns the weights of the best validation epoch.
std::pair<narx::NarxModel, TrainingReport> fit(const narx::NarxModel& model,
                                               const control::Dataset& data,
                                               const TrainingOptions& opts);

} // namespace nsid::train
