#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "nsid/config.hpp"
#include "nsid/errors.hpp"
#include "nsid/io.hpp"
#include "nsid/narx.hpp"

using namespace nsid;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nsid_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

control::Dataset sample_dataset(std::size_t n = 40) {
    control::Dataset ds;
    ds.u.dt = ds.y.dt = 0.004;
    for (std::size_t k = 0; k < n; ++k) {
        ds.u.samples.push_back(0.05 * std::sin(0.3 * static_cast<double>(k)));
        ds.y.samples.push_back(0.2 * std::cos(0.11 * static_cast<double>(k)) - 0.013);
    }
    ds.split_index = (n * 7) / 10;
    return ds;
}

} // namespace

TEST_CASE("significant-digit formatting") {
    CHECK(io::format_sig(0.25, 9) == "0.25");
    CHECK(io::format_sig(1.0 / 3.0, 9) == "0.333333333");
    CHECK(io::format_sig(12345.678, 4) == "1.235e+04");
    CHECK(io::format_sig(-0.0001, 9) == "-0.0001");
    CHECK(io::format_sig(0.0, 17) == "0");
}

TEST_CASE("FNV-1a 64-bit matches published reference digests") {
    CHECK(io::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("17-digit text round-trips doubles exactly") {
    for (double v : {1.0 / 3.0, 0.1, 1e-300, -2.718281828459045, 0.004}) {
        const std::string s = io::format_sig(v, 17);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("dataset CSV serialization is stable and parseable") {
    const control::Dataset ds = sample_dataset();
    const std::string csv = io::dataset_csv(ds);
    CHECK(csv == io::dataset_csv(ds)); // byte-identical reruns
    CHECK(csv.rfind("k,t_s,u,y\n", 0) == 0);
    CHECK(csv.find("\r") == std::string::npos);

    TempDir tmp;
    io::DatasetMeta meta;
    meta.axis = control::Axis::Pitch;
    meta.dt = ds.u.dt;
    meta.split_index = ds.split_index;
    meta.seed = 42;
    meta.config_digest = "deadbeef";
    io::write_dataset(tmp.path / "dataset.csv", ds, meta);
    CHECK(fs::exists(tmp.path / "dataset.csv.meta"));

    io::DatasetMeta rt_meta;
    const control::Dataset rt = io::read_dataset(tmp.path / "dataset.csv", &rt_meta);
    REQUIRE(rt.size() == ds.size());
    CHECK(rt.u.dt == ds.u.dt);
    CHECK(rt.axis == control::Axis::Pitch);
    CHECK(rt.split_index == ds.split_index);
    CHECK(rt_meta.seed == 42);
    CHECK(rt_meta.config_digest == "deadbeef");
    for (std::size_t k = 0; k < ds.size(); ++k) {
        CHECK(rt.u.samples[k] == doctest::Approx(ds.u.samples[k]).epsilon(1e-8));
        CHECK(rt.y.samples[k] == doctest::Approx(ds.y.samples[k]).epsilon(1e-8));
    }
}

TEST_CASE("dataset reading falls back gracefully without the sidecar") {
    TempDir tmp;
    const control::Dataset ds = sample_dataset(50);
    io::write_file(tmp.path / "plain.csv", io::dataset_csv(ds));
    const control::Dataset rt = io::read_dataset(tmp.path / "plain.csv");
    CHECK(rt.u.dt == doctest::Approx(0.004).epsilon(1e-9)); // from the time column
    CHECK(rt.split_index == 35);                            // default 70/30
}

TEST_CASE("dataset reading reports malformed rows") {
    TempDir tmp;
    io::write_file(tmp.path / "bad_header.csv", "time,u,y\n0,0,0\n");
    CHECK_THROWS_AS(io::read_dataset(tmp.path / "bad_header.csv"), ConfigError);

    io::write_file(tmp.path / "bad_row.csv", "k,t_s,u,y\n0,0.0,0.1\n");
    CHECK_THROWS_AS(io::read_dataset(tmp.path / "bad_row.csv"), ConfigError);

    io::write_file(tmp.path / "bad_value.csv", "k,t_s,u,y\n0,0.0,zap,0.1\n");
    CHECK_THROWS_WITH_AS(io::read_dataset(tmp.path / "bad_value.csv"),
                         doctest::Contains("row 2"), ConfigError);

    CHECK_THROWS_AS(io::read_dataset(tmp.path / "missing.csv"), ConfigError);
}

TEST_CASE("model files round-trip bit-exactly for all architectures") {
    TempDir tmp;
    const narx::DelayConfig delays{3, 2};
    const narx::Architecture archs[] = {narx::Architecture::sigmoid_single(4),
                                        narx::Architecture::feedforward_two(3, 5),
                                        narx::Architecture::cascade_forward(4)};
    int i = 0;
    for (const auto& arch : archs) {
        narx::NarxModel m = narx::init_weights(arch, delays, 1000 + i);
        m.norm = {0.01, 0.051234567890123456, -0.002, 0.31415926535897931};
        const fs::path p = tmp.path / ("model" + std::to_string(i++) + ".txt");
        io::save_model(p, m);

        const narx::NarxModel rt = io::load_model(p);
        CHECK(rt.arch.kind == m.arch.kind);
        CHECK(rt.arch.act1 == m.arch.act1);
        CHECK(rt.delays.na == 3);
        CHECK(rt.delays.nb == 2);
        CHECK(rt.norm.u_std == m.norm.u_std);
        CHECK(rt.norm.y_std == m.norm.y_std);
        REQUIRE(rt.W.size() == m.W.size());
        for (std::size_t l = 0; l < m.W.size(); ++l) {
            CHECK(rt.W[l] == m.W[l]);
            CHECK(rt.b[l] == m.b[l]);
        }
        // serialization itself is deterministic
        CHECK(io::model_text(m) == io::model_text(rt));
    }
}

TEST_CASE("model text carries a self-describing header") {
    narx::NarxModel m = narx::init_weights(narx::Architecture::feedforward_two(10, 20),
                                           narx::DelayConfig{15, 7}, 3);
    const std::string text = io::model_text(m);
    CHECK(text.rfind("arch=ffnn\nna=15\nnb=7\nlayers=10,20,1\nact=tanh,radbas,linear\n", 0) == 0);
    CHECK(text.find("norm_u=") != std::string::npos);
    CHECK(text.find("W0 10 22") != std::string::npos);
    CHECK(text.find("b2 1") != std::string::npos);
}

TEST_CASE("model loading rejects corrupt files") {
    TempDir tmp;
    narx::NarxModel m =
        narx::init_weights(narx::Architecture::sigmoid_single(3), narx::DelayConfig{2, 1}, 8);
    const std::string good = io::model_text(m);

    io::write_file(tmp.path / "truncated.txt", good.substr(0, good.size() / 2));
    CHECK_THROWS_AS(io::load_model(tmp.path / "truncated.txt"), ConfigError);

    std::string bad_act = good;
    bad_act.replace(bad_act.find("logistic"), 8, "step_fun");
    io::write_file(tmp.path / "bad_act.txt", bad_act);
    CHECK_THROWS_AS(io::load_model(tmp.path / "bad_act.txt"), ConfigError);

    std::string bad_arch = good;
    bad_arch.replace(bad_arch.find("sigmoid"), 7, "percept");
    io::write_file(tmp.path / "bad_arch.txt", bad_arch);
    CHECK_THROWS_AS(io::load_model(tmp.path / "bad_arch.txt"), ConfigError);
}

TEST_CASE("training reports round-trip through CSV") {
    TempDir tmp;
    train::TrainingReport r;
    r.train_mse = {0.5, 0.25, 0.125};
    r.val_mse = {0.6, 0.31, 0.33};
    r.best_epoch = 1;
    r.best_val_mse = 0.31;
    r.wall_seconds = 1.5;
    r.seed = 77;
    r.options_digest = "abc123";

    io::write_file(tmp.path / "report.csv", io::training_report_csv(r));
    const train::TrainingReport rt = io::read_training_report(tmp.path / "report.csv");
    CHECK(rt.train_mse.size() == 3);
    CHECK(rt.val_mse[1] == doctest::Approx(0.31));
    CHECK(rt.best_epoch == 1);
    CHECK(rt.best_val_mse == 0.31);
    CHECK(rt.seed == 77);
    CHECK(rt.options_digest == "abc123");
}

TEST_CASE("the default configuration parses and matches its documentation") {
    const auto setup = config::parse_config_text(config::default_config_text());
    CHECK(setup.experiment.axis == control::Axis::Roll);
    CHECK(setup.experiment.duration_s == 123.0);
    CHECK(setup.experiment.dt == 0.004);
    CHECK(setup.delays.na == 15);
    CHECK(setup.delays.nb == 7);
    CHECK(setup.arch.kind == narx::ArchKind::SigmoidSingle);
    CHECK(setup.arch.h1 == 30);
    CHECK(setup.seed == 42);
    CHECK(setup.experiment.noise.seed == 42);
    CHECK(setup.training.seed == 42);
    CHECK(setup.experiment.noise.meas_std == 0.01);

    // excitation designed from the band keys; amplitude 10% of torque_limit
    CHECK(setup.experiment.prbs.amplitude == doctest::Approx(0.05));
    CHECK(setup.experiment.prbs.samples_per_bit() == 34);
    CHECK(!setup.config_digest.empty());
}

TEST_CASE("config parsing diagnoses unknown keys with their line number") {
    const std::string text = "axis = roll\nwarp_factor = 9\n";
    CHECK_THROWS_WITH_AS(config::parse_config_text(text), doctest::Contains("line 2"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(config::parse_config_text(text), doctest::Contains("warp_factor"),
                         ConfigError);
}

TEST_CASE("config parsing enforces required keys and value types") {
    CHECK_THROWS_WITH_AS(config::parse_config_text("axis = roll\n"),
                         doctest::Contains("duration_s"), ConfigError);

    std::string text = config::default_config_text();
    text.replace(text.find("na = 15"), 7, "na = 2.5");
    CHECK_THROWS_WITH_AS(config::parse_config_text(text), doctest::Contains("integer"),
                         ConfigError);

    text = config::default_config_text();
    text.replace(text.find("dt = 0.004"), 10, "dt = fast");
    CHECK_THROWS_AS(config::parse_config_text(text), ConfigError);
}

TEST_CASE("comments and overrides behave as documented") {
    std::string text = config::default_config_text();
    text += "\n# trailing comment only\nhidden = 12   # inline comment\n";
    const auto setup = config::parse_config_text(text);
    CHECK(setup.arch.h1 == 12);

    std::string with_prbs = config::default_config_text();
    with_prbs += "prbs_order = 7\nprbs_seed = 3\nprbs_amplitude = 0.02\n";
    const auto s2 = config::parse_config_text(with_prbs);
    CHECK(s2.experiment.prbs.order == 7);
    CHECK(s2.experiment.prbs.seed == 3u);
    CHECK(s2.experiment.prbs.amplitude == 0.02);
}

TEST_CASE("config digests are stable and content-sensitive") {
    const std::string text = config::default_config_text();
    const auto a = config::parse_config_text(text);
    const auto b = config::parse_config_text(text);
    CHECK(a.config_digest == b.config_digest);

    const auto c = config::parse_config_text(text + "\n# changed\n");
    CHECK(a.config_digest != c.config_digest);
}

TEST_CASE("seed application propagates to every random consumer") {
    auto setup = config::parse_config_text(config::default_config_text());
    setup.apply_seed(1234);
    CHECK(setup.seed == 1234);
    CHECK(setup.experiment.noise.seed == 1234);
    CHECK(setup.training.seed == 1234);
}
