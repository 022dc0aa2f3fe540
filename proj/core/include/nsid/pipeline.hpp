#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

namespace nsid::app {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by the CLI:
//   0 ok, 2 input/config error, 3 simulation instability, 4 training divergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitUnstable = 3;
inline constexpr int kExitDiverged = 4;

/// Runs the closed-loop experiment and writes out/dataset.csv (+ sidecar
/// metadata) and out/manifest.txt.
int cmd_excite(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
               std::optional<std::uint64_t> seed_override = std::nullopt);

/// Trains the configured estimator on a dataset; writes out/model.txt and
/// out/training_report.csv and prints the best epoch.
int cmd_train(const std::filesystem::path& config_path, const std::filesystem::path& dataset_path,
              const std::filesystem::path& out_dir,
              std::optional<std::uint64_t> seed_override = std::nullopt);

/// Evaluates a saved model on a dataset in SP and P mode on both segments;
/// writes out/metrics.txt and out/predictions.csv.
int cmd_eval(const std::filesystem::path& model_path, const std::filesystem::path& dataset_path,
             const std::filesystem::path& out_dir);

/// Renders the four bundle plots (overlay, training curve, scatter, residual
/// autocorrelation) as standalone SVG files inside the bundle directory.
int cmd_report(const std::filesystem::path& bundle_dir);

} // namespace nsid::app
