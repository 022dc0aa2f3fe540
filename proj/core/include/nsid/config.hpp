#pragma once

#include <filesystem>
#include <string>

#include "nsid/control.hpp"
#include "nsid/narx.hpp"
#include "nsid/train.hpp"

namespace nsid::config {

/// Everything one run needs, assembled from a flat key = value file.
/// The PRBS is designed from the band keys unless explicit prbs_* keys are
/// given; amplitude defaults to 10% of the torque saturation limit.
struct ExperimentSetup {
    control::ExperimentConfig experiment;
    signals::BandSpec band{0.1, 20.0};
    narx::Architecture arch;
    narx::DelayConfig delays{15, 7};
    train::TrainingOptions training;
    std::uint64_t seed{42};
    std::string config_digest; ///< FNV-1a of the raw config bytes, hex

    void apply_seed(std::uint64_t s);
};

/// Parses the flat config text. Unknown keys and unparsable values are
/// rejected with their line number; required keys: axis, duration_s, dt,
/// arch, na, nb.
ExperimentSetup parse_config_text(const std::string& text, const std::string& origin = "config");

ExperimentSetup parse_config_file(const std::filesystem::path& path);

/// A ready-to-run roll-axis default config (also documents every key).
std::string default_config_text();

} // namespace nsid::config
