#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "nsid/control.hpp"
#include "nsid/narx.hpp"
#include "nsid/train.hpp"

namespace nsid::io {

/// Shortest decimal form with the given significant digits ("%.Ng").
std::string format_sig(double v, int sig_digits);

std::uint64_t fnv1a64(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Sidecar metadata written next to dataset.csv as dataset.csv.meta.
struct DatasetMeta {
    control::Axis axis{control::Axis::Roll};
    double dt{0.0};
    std::size_t split_index{0};
    std::uint64_t seed{0};
    std::string config_digest;
};

/// CSV with header k,t_s,u,y; LF endings, 9 significant digits.
std::string dataset_csv(const control::Dataset& data);
void write_dataset(const std::filesystem::path& csv_path, const control::Dataset& data,
                   const DatasetMeta& meta);
control::Dataset read_dataset(const std::filesystem::path& csv_path, DatasetMeta* meta = nullptr);

/// Line-oriented model text: header (arch=, na=, nb=, layers=, act=, norm_u=,
/// norm_y=) then W<i>/b<i> blocks, row-major, 17 significant digits.
std::string model_text(const narx::NarxModel& model);
void save_model(const std::filesystem::path& path, const narx::NarxModel& model);
narx::NarxModel load_model(const std::filesystem::path& path);

/// training_report.csv: epoch,train_mse,val_mse rows plus a trailing
/// #-prefixed summary record.
std::string training_report_csv(const train::TrainingReport& report);
train::TrainingReport read_training_report(const std::filesystem::path& path);

} // namespace nsid::io
