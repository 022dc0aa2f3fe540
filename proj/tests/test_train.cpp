#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nsid/errors.hpp"
#include "nsid/narx.hpp"
#include "nsid/train.hpp"

using namespace nsid;
using namespace nsid::narx;
using namespace nsid::train;

namespace {

control::Dataset arx_dataset(std::size_t n, double noise_std = 0.0,
                             std::uint64_t seed = 3) {
    control::Dataset ds;
    ds.u.dt = ds.y.dt = 0.004;
    ds.u.samples.resize(n);
    ds.y.samples.assign(n, 0.0);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k)
        ds.u.samples[k] = std::sin(0.37 * static_cast<double>(k)) +
                          0.25 * std::cos(1.91 * static_cast<double>(k));
    for (std::size_t k = 2; k < n; ++k)
        ds.y.samples[k] = 0.6 * ds.y.samples[k - 1] - 0.3 * ds.y.samples[k - 2] +
                          0.8 * ds.u.samples[k - 1] + noise_std * dist(gen);
    ds.split_index = (n * 7) / 10;
    return ds;
}

// central-difference gradient of the network output w.r.t. the parameters
Eigen::VectorXd fd_output_gradient(const NarxModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd p0 = get_params(model);
    Eigen::VectorXd g(p0.size());
    NarxModel probe = model;
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < p0.size(); ++i) {
        Eigen::VectorXd p = p0;
        p[i] += h;
        set_params(probe, p);
        const double fp = forward(probe, x);
        p[i] -= 2.0 * h;
        set_params(probe, p);
        const double fm = forward(probe, x);
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

} // namespace

TEST_CASE("dataset split keeps segments contiguous and complete") {
    const control::Dataset ds = arx_dataset(100);
    const auto [est, val] = split(ds, 2);
    CHECK(est.u.size() == 70);
    CHECK(val.u.size() == 30);
    CHECK(est.y.samples[69] == ds.y.samples[69]);
    CHECK(val.y.samples[0] == ds.y.samples[70]);
    CHECK(val.u.samples[29] == ds.u.samples[99]);

    control::Dataset tight = ds;
    tight.split_index = 3;
    CHECK_THROWS_AS(split(tight, 3), ConfigError);
    tight.split_index = 97;
    CHECK_THROWS_AS(split(tight, 3), ConfigError);
}

TEST_CASE("batches hold normalized regressors and targets") {
    const control::Dataset ds = arx_dataset(50);
    NarxModel m = init_weights(Architecture::sigmoid_single(2), DelayConfig{2, 1}, 1);
    m.norm = {0.3, 1.7, -0.1, 0.9};

    const Batch batch = make_batch(m, ds, 2, 50);
    REQUIRE(batch.X.rows() == 48);
    REQUIRE(batch.X.cols() == 3);

    for (std::size_t k = 2; k < 50; ++k) {
        const Eigen::Index row = static_cast<Eigen::Index>(k - 2);
        CHECK(batch.X(row, 0) == doctest::Approx(m.norm.norm_y(ds.y.samples[k - 1])));
        CHECK(batch.X(row, 1) == doctest::Approx(m.norm.norm_y(ds.y.samples[k - 2])));
        CHECK(batch.X(row, 2) == doctest::Approx(m.norm.norm_u(ds.u.samples[k - 1])));
        CHECK(batch.y[row] == doctest::Approx(m.norm.norm_y(ds.y.samples[k])));
    }

    CHECK_THROWS_AS(make_batch(m, ds, 1, 50), ArgumentError); // inside the window
    CHECK_THROWS_AS(make_batch(m, ds, 2, 51), ArgumentError);
    CHECK_THROWS_AS(make_batch(m, ds, 10, 10), ArgumentError);
}

TEST_CASE("parameter packing round-trips and follows the documented layout") {
    NarxModel m = init_weights(Architecture::feedforward_two(3, 4), DelayConfig{2, 2}, 7);
    const Eigen::VectorXd p = get_params(m);
    CHECK(p.size() == m.param_count());
    CHECK(p[0] == m.W[0](0, 0));
    CHECK(p[1] == m.W[0](0, 1)); // row-major
    CHECK(p[m.W[0].size()] == m.b[0][0]);

    NarxModel copy = m;
    Eigen::VectorXd shifted = p;
    for (Eigen::Index i = 0; i < shifted.size(); ++i)
        shifted[i] += 0.01 * static_cast<double>(i);
    set_params(copy, shifted);
    CHECK(get_params(copy) == shifted);

    CHECK_THROWS_AS(set_params(copy, Eigen::VectorXd::Zero(p.size() + 1)), ModelError);
}

TEST_CASE("analytic output gradients match central differences") {
    const DelayConfig delays{2, 2};
    const Eigen::VectorXd x = (Eigen::VectorXd(4) << 0.3, -0.5, 0.2, 0.9).finished();

    const Architecture archs[] = {Architecture::sigmoid_single(3),
                                  Architecture::feedforward_two(3, 4),
                                  Architecture::cascade_forward(3)};
    for (const auto& arch : archs) {
        CAPTURE(static_cast<int>(arch.kind));
        const NarxModel m = init_weights(arch, delays, 17);
        Eigen::VectorXd g;
        const double y = forward_with_gradient(m, x, g);
        CHECK(y == doctest::Approx(forward(m, x)).epsilon(1e-14));

        const Eigen::VectorXd fd = fd_output_gradient(m, x);
        REQUIRE(g.size() == fd.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            CAPTURE(i);
            CHECK(g[i] == doctest::Approx(fd[i]).epsilon(1e-5));
        }
    }
}

TEST_CASE("loss gradient matches finite differences of the batch loss") {
    const control::Dataset ds = arx_dataset(40);
    NarxModel m = init_weights(Architecture::cascade_forward(2), DelayConfig{2, 1}, 23);
    const Batch batch = make_batch(m, ds, 2, 40);

    const auto [loss, grad] = loss_and_gradient(m, batch);
    CHECK(loss > 0.0);

    const Eigen::VectorXd p0 = get_params(m);
    NarxModel probe = m;
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < p0.size(); ++i) {
        Eigen::VectorXd p = p0;
        p[i] += h;
        set_params(probe, p);
        const double lp = loss_and_gradient(probe, batch).first;
        p[i] -= 2.0 * h;
        set_params(probe, p);
        const double lm = loss_and_gradient(probe, batch).first;
        CHECK(grad[i] == doctest::Approx((lp - lm) / (2.0 * h)).epsilon(1e-4));
    }
}

TEST_CASE("residual Jacobian rows agree with the per-sample gradients") {
    const control::Dataset ds = arx_dataset(30);
    NarxModel m = init_weights(Architecture::sigmoid_single(3), DelayConfig{2, 2}, 31);
    const Batch batch = make_batch(m, ds, 2, 30);

    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    residual_jacobian(m, batch, r, j);
    REQUIRE(r.size() == batch.X.rows());
    REQUIRE(j.rows() == batch.X.rows());
    REQUIRE(j.cols() == m.param_count());

    Eigen::VectorXd g;
    for (Eigen::Index k = 0; k < batch.X.rows(); ++k) {
        const double y_hat = forward_with_gradient(m, batch.X.row(k).transpose(), g);
        CHECK(r[k] == doctest::Approx(y_hat - batch.y[k]).epsilon(1e-14));
        CHECK((j.row(k).transpose() - g).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("one damping trial solves the documented normal equations") {
    const control::Dataset ds = arx_dataset(60);
    const NarxModel m = init_weights(Architecture::sigmoid_single(2), DelayConfig{2, 1}, 5);
    const Batch batch = make_batch(m, ds, 2, 60);

    const double lambda = 0.5, factor = 10.0;
    const LmStepResult res = lm_step(m, batch, lambda, factor);

    // independent solve with a different decomposition
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    residual_jacobian(m, batch, r, j);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::MatrixXd damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12 * jtj.diagonal().maxCoeff());
    const Eigen::VectorXd delta = damped.fullPivLu().solve(-(j.transpose() * r));

    NarxModel cand = m;
    set_params(cand, get_params(m) + delta);
    Eigen::VectorXd rc;
    Eigen::MatrixXd jc;
    residual_jacobian(cand, batch, rc, jc);
    const double loss_cand = rc.squaredNorm() / static_cast<double>(batch.X.rows());
    const double loss_orig = r.squaredNorm() / static_cast<double>(batch.X.rows());

    CHECK(res.loss_before == doctest::Approx(loss_orig).epsilon(1e-12));
    if (loss_cand < loss_orig) {
        CHECK(res.accepted);
        CHECK(res.lambda == doctest::Approx(lambda / factor));
        CHECK((res.params - (get_params(m) + delta)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(res.loss_after == doctest::Approx(loss_cand).epsilon(1e-10));
    } else {
        CHECK_FALSE(res.accepted);
        CHECK(res.lambda == doctest::Approx(lambda * factor));
        CHECK(res.params == get_params(m));
    }
}

TEST_CASE("a perfectly fitted model short-circuits the damping trial") {
    // zero weights + zero targets: residuals and gradient both vanish
    NarxModel m = init_weights(Architecture::sigmoid_single(2, Activation::Linear),
                               DelayConfig{1, 1}, 9);
    for (auto& w : m.W)
        w.setZero();
    for (auto& b : m.b)
        b.setZero();
    Batch batch;
    batch.X = Eigen::MatrixXd::Random(8, 2);
    batch.y = Eigen::VectorXd::Zero(8);

    const LmStepResult res = lm_step(m, batch, 1e-3, 10.0);
    CHECK(res.accepted);
    CHECK(res.loss_before == 0.0);
    CHECK(res.loss_after == 0.0);
    CHECK(res.lambda == 1e-3);
    CHECK_THROWS_AS(lm_step(m, batch, 0.0, 10.0), ArgumentError);
}

TEST_CASE("training drives a representable system to near-zero error") {
    const control::Dataset ds = arx_dataset(400);
    const NarxModel m0 =
        init_weights(Architecture::sigmoid_single(3, Activation::Linear), DelayConfig{2, 1}, 11);
    TrainingOptions opts;
    opts.max_epochs = 60;
    opts.patience = 10;

    const auto [model, report] = fit(m0, ds, opts);
    CHECK(report.best_val_mse < 1e-10);
    CHECK(report.train_mse.size() == report.val_mse.size());
    CHECK(report.best_epoch >= 0);

    // returned weights are the checkpoint of the best epoch
    const std::size_t w = 2;
    const Batch val = make_batch(model, ds, ds.split_index, ds.size());
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    residual_jacobian(model, val, r, j);
    const double val_mse =
        r.squaredNorm() / static_cast<double>(val.X.rows()) * model.norm.y_std * model.norm.y_std;
    CHECK(val_mse == doctest::Approx(report.best_val_mse).epsilon(1e-9));
    (void)w;
}

TEST_CASE("training is deterministic and reports the earliest best epoch") {
    const control::Dataset ds = arx_dataset(300, 0.05);
    const NarxModel m0 = init_weights(Architecture::cascade_forward(4), DelayConfig{2, 2}, 21);
    TrainingOptions opts;
    opts.max_epochs = 25;
    opts.patience = 5;
    opts.gradient_check = true;

    const auto [ma, ra] = fit(m0, ds, opts);
    const auto [mb, rb] = fit(m0, ds, opts);
    CHECK(get_params(ma) == get_params(mb));
    CHECK(ra.train_mse == rb.train_mse);
    CHECK(ra.val_mse == rb.val_mse);
    CHECK(ra.best_epoch == rb.best_epoch);

    // earliest argmin of the recorded curve
    int argmin = 0;
    for (std::size_t i = 1; i < ra.val_mse.size(); ++i)
        if (ra.val_mse[i] < ra.val_mse[argmin])
            argmin = static_cast<int>(i);
    CHECK(ra.best_epoch == argmin);
    CHECK(ra.best_val_mse == doctest::Approx(ra.val_mse[argmin]));

    // patience bounds the tail past the best epoch
    CHECK(static_cast<int>(ra.val_mse.size()) - 1 - ra.best_epoch <= opts.patience);
    CHECK(ra.options_digest == opts.digest());
}

TEST_CASE("reported errors are in physical units") {
    // scaling both channels by a power of two leaves the normalized problem
    // bit-identical, so every reported MSE must scale by the squared factor
    const control::Dataset ds = arx_dataset(300, 0.05);
    control::Dataset scaled = ds;
    for (auto& v : scaled.u.samples)
        v *= 4.0;
    for (auto& v : scaled.y.samples)
        v *= 4.0;

    const NarxModel m0 = init_weights(Architecture::sigmoid_single(3), DelayConfig{2, 1}, 13);
    TrainingOptions opts;
    opts.max_epochs = 10;
    opts.patience = 10;

    const auto [ma, ra] = fit(m0, ds, opts);
    const auto [mb, rb] = fit(m0, scaled, opts);
    REQUIRE(ra.val_mse.size() == rb.val_mse.size());
    for (std::size_t i = 0; i < ra.val_mse.size(); ++i)
        CHECK(rb.val_mse[i] == doctest::Approx(16.0 * ra.val_mse[i]).epsilon(1e-12));
}

TEST_CASE("the first-order fallback also reduces the training error") {
    const control::Dataset ds = arx_dataset(300);
    const NarxModel m0 = init_weights(Architecture::sigmoid_single(3), DelayConfig{2, 1}, 29);
    TrainingOptions opts;
    opts.algorithm = Algorithm::Adam;
    opts.max_epochs = 200;
    opts.patience = 200;
    opts.learning_rate = 0.02;

    const auto [model, report] = fit(m0, ds, opts);
    REQUIRE(!report.train_mse.empty());
    CHECK(report.train_mse.back() < 0.25 * report.train_mse.front());

    CHECK(algorithm_from_string("adam") == Algorithm::Adam);
    CHECK(algorithm_from_string("lm") == Algorithm::LevenbergMarquardt);
    CHECK_THROWS_AS(algorithm_from_string("sgd"), ConfigError);
}

TEST_CASE("training rejects degenerate inputs") {
    control::Dataset ds = arx_dataset(100);
    for (auto& v : ds.u.samples)
        v = 1.0; // constant input channel
    const NarxModel m0 = init_weights(Architecture::sigmoid_single(2), DelayConfig{2, 1}, 1);
    TrainingOptions opts;
    CHECK_THROWS_AS(fit(m0, ds, opts), ConfigError);

    TrainingOptions bad;
    bad.max_epochs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = TrainingOptions{};
    bad.lm_lambda_factor = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
