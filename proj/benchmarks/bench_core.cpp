// Microbenchmarks for the hot paths: excitation synthesis, plant integration,
// network evaluation, and one Levenberg-Marquardt trial.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "nsid/control.hpp"
#include "nsid/narx.hpp"
#include "nsid/plant.hpp"
#include "nsid/prbs.hpp"
#include "nsid/train.hpp"

namespace {

using namespace nsid;

signals::PrbsSpec full_prbs() {
    return signals::design_prbs_for_band({0.1, 20.0}, 0.004, 0.05);
}

control::Dataset synthetic_dataset(std::size_t n) {
    control::Dataset ds;
    ds.u.dt = ds.y.dt = 0.004;
    ds.u.samples.resize(n);
    ds.y.samples.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        ds.u.samples[k] = 0.05 * std::sin(0.21 * static_cast<double>(k));
    for (std::size_t k = 1; k < n; ++k)
        ds.y.samples[k] = 0.95 * ds.y.samples[k - 1] + 0.4 * ds.u.samples[k - 1];
    ds.split_index = (n * 7) / 10;
    return ds;
}

void bm_prbs_generate(benchmark::State& state) {
    const auto spec = full_prbs();
    for (auto _ : state)
        benchmark::DoNotOptimize(signals::generate_prbs(spec));
}
BENCHMARK(bm_prbs_generate);

void bm_plant_step(benchmark::State& state) {
    plant::QuadrotorParams par;
    plant::NoiseStream stream(plant::NoiseSpec{0.01, 0.002, 1});
    plant::PlantState s;
    plant::ControlInput u;
    u.u1 = par.mass * par.g;
    u.u2 = 0.01;
    int steps = 0;
    for (auto _ : state) {
        // reset before constant torque tips the vehicle into the tilt guard
        if (++steps == 200) {
            s = plant::PlantState{};
            steps = 0;
        }
        s = plant::step(s, u, par, 0.004, stream);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bm_plant_step);

void bm_forward_sigmoid30(benchmark::State& state) {
    const auto m = narx::init_weights(narx::Architecture::sigmoid_single(30),
                                      narx::DelayConfig{15, 7}, 1);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(22, 0.3);
    for (auto _ : state)
        benchmark::DoNotOptimize(narx::forward(m, x));
}
BENCHMARK(bm_forward_sigmoid30);

void bm_forward_with_gradient_sigmoid30(benchmark::State& state) {
    const auto m = narx::init_weights(narx::Architecture::sigmoid_single(30),
                                      narx::DelayConfig{15, 7}, 1);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(22, 0.3);
    Eigen::VectorXd g;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train::forward_with_gradient(m, x, g));
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(bm_forward_with_gradient_sigmoid30);

void bm_predict_sp(benchmark::State& state) {
    const auto ds = synthetic_dataset(4096);
    const auto m = narx::init_weights(narx::Architecture::cascade_forward(20),
                                      narx::DelayConfig{15, 7}, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(narx::predict_sp(m, ds));
}
BENCHMARK(bm_predict_sp);

void bm_lm_step(benchmark::State& state) {
    const auto ds = synthetic_dataset(2048);
    auto m = narx::init_weights(narx::Architecture::sigmoid_single(30),
                                narx::DelayConfig{15, 7}, 1);
    m.norm = {0.0, 0.05, 0.0, 0.2};
    const auto batch = train::make_batch(m, ds, 15, ds.size());
    for (auto _ : state)
        benchmark::DoNotOptimize(train::lm_step(m, batch, 1e-3, 10.0));
}
BENCHMARK(bm_lm_step);

} // namespace

BENCHMARK_MAIN();
