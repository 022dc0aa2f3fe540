#include "nsid/train.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "nsid/errors.hpp"

namespace nsid::train {

namespace {

constexpr double kLambdaMax = 1e12;
constexpr double kLambdaMin = 1e-12;

double dactivate(narx::Activation f, double z, double a) {
    using narx::Activation;
    switch (f) {
    case Activation::Linear: return 1.0;
    case Activation::Logistic: return a * (1.0 - a);
    case Activation::Tanh: return 1.0 - a * a;
    case Activation::RadialBasis: return -2.0 * z * a;
    }
    return 1.0;
}

// Flattened layout: per layer, W row-major then b.
struct ParamLayout {
    std::vector<int> w_offset, b_offset;
    int total{0};
};

ParamLayout layout_of(const narx::NarxModel& m) {
    ParamLayout l;
    int off = 0;
    for (std::size_t i = 0; i < m.W.size(); ++i) {
        l.w_offset.push_back(off);
        off += static_cast<int>(m.W[i].size());
        l.b_offset.push_back(off);
        off += static_cast<int>(m.b[i].size());
    }
    l.total = off;
    return l;
}

void scatter_layer(Eigen::VectorXd& grad, const ParamLayout& l, std::size_t layer,
                   const Eigen::MatrixXd& dW, const Eigen::VectorXd& db) {
    double* base = grad.data() + l.w_offset[layer];
    for (Eigen::Index r = 0; r < dW.rows(); ++r)
        for (Eigen::Index c = 0; c < dW.cols(); ++c)
            base[r * dW.cols() + c] = dW(r, c);
    double* bb = grad.data() + l.b_offset[layer];
    for (Eigen::Index r = 0; r < db.size(); ++r)
        bb[r] = db[r];
}

double batch_loss(const narx::NarxModel& m, const Batch& batch) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < batch.X.rows(); ++k) {
        const double e = narx::forward(m, batch.X.row(k).transpose()) - batch.y[k];
        acc += e * e;
    }
    return acc / static_cast<double>(batch.X.rows());
}

} // namespace

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "lm" || name == "levenberg_marquardt")
        return Algorithm::LevenbergMarquardt;
    if (name == "adam")
        return Algorithm::Adam;
    throw ConfigError("unknown training algorithm '" + name + "' (expected lm|adam)");
}

std::string to_string(Algorithm a) {
    return a == Algorithm::LevenbergMarquardt ? "lm" : "adam";
}

void TrainingOptions::validate() const {
    if (max_epochs < 1)
        throw ConfigError("TrainingOptions: max_epochs must be >= 1");
    if (patience < 1)
        throw ConfigError("TrainingOptions: patience must be >= 1");
    if (!(lm_lambda0 > 0.0) || !(lm_lambda_factor > 1.0) || !(learning_rate > 0.0))
        throw ConfigError("TrainingOptions: damping and learning parameters must be positive");
}

std::string TrainingOptions::digest() const {
    std::ostringstream os;
    os << to_string(algorithm) << '|' << max_epochs << '|' << patience << '|' << lm_lambda0
       << '|' << lm_lambda_factor << '|' << learning_rate << '|' << seed << '|'
       << gradient_check;
    const std::string s = os.str();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

std::pair<Segment, Segment> split(const control::Dataset& data, int delay_window) {
    data.validate();
    const std::size_t n = data.size();
    const std::size_t s = data.split_index;
    if (s <= static_cast<std::size_t>(delay_window) ||
        n - s <= static_cast<std::size_t>(delay_window))
        throw ConfigError("split: each segment must be longer than the delay window");

    Segment est, val;
    est.u.dt = est.y.dt = val.u.dt = val.y.dt = data.u.dt;
    est.u.samples.assign(data.u.samples.begin(), data.u.samples.begin() + s);
    est.y.samples.assign(data.y.samples.begin(), data.y.samples.begin() + s);
    val.u.samples.assign(data.u.samples.begin() + s, data.u.samples.end());
    val.y.samples.assign(data.y.samples.begin() + s, data.y.samples.end());
    return {est, val};
}

Batch make_batch(const narx::NarxModel& model, const control::Dataset& data,
                 std::size_t from, std::size_t to) {
    const std::size_t w = static_cast<std::size_t>(model.delays.window());
    if (from < w || to > data.size() || from >= to)
        throw ArgumentError("make_batch: bad index range");

    const int na = model.delays.na;
    const int nb = model.delays.nb;
    Batch batch;
    batch.X.resize(static_cast<Eigen::Index>(to - from), model.regressor_size());
    batch.y.resize(static_cast<Eigen::Index>(to - from));
    for (std::size_t k = from; k < to; ++k) {
        const Eigen::Index row = static_cast<Eigen::Index>(k - from);
        for (int i = 0; i < na; ++i)
            batch.X(row, i) = model.norm.norm_y(data.y.samples[k - 1 - i]);
        for (int i = 0; i < nb; ++i)
            batch.X(row, na + i) = model.norm.norm_u(data.u.samples[k - 1 - i]);
        batch.y[row] = model.norm.norm_y(data.y.samples[k]);
    }
    return batch;
}

Eigen::VectorXd get_params(const narx::NarxModel& m) {
    const ParamLayout l = layout_of(m);
    Eigen::VectorXd p(l.total);
    for (std::size_t i = 0; i < m.W.size(); ++i) {
        double* base = p.data() + l.w_offset[i];
        for (Eigen::Index r = 0; r < m.W[i].rows(); ++r)
            for (Eigen::Index c = 0; c < m.W[i].cols(); ++c)
                base[r * m.W[i].cols() + c] = m.W[i](r, c);
        double* bb = p.data() + l.b_offset[i];
        for (Eigen::Index r = 0; r < m.b[i].size(); ++r)
            bb[r] = m.b[i][r];
    }
    return p;
}

void set_params(narx::NarxModel& m, const Eigen::VectorXd& params) {
    const ParamLayout l = layout_of(m);
    if (params.size() != l.total)
        throw ModelError("set_params: parameter vector length mismatch");
    for (std::size_t i = 0; i < m.W.size(); ++i) {
        const double* base = params.data() + l.w_offset[i];
        for (Eigen::Index r = 0; r < m.W[i].rows(); ++r)
            for (Eigen::Index c = 0; c < m.W[i].cols(); ++c)
                m.W[i](r, c) = base[r * m.W[i].cols() + c];
        const double* bb = params.data() + l.b_offset[i];
        for (Eigen::Index r = 0; r < m.b[i].size(); ++r)
            m.b[i][r] = bb[r];
    }
}

double forward_with_gradient(const narx::NarxModel& m, const Eigen::VectorXd& x,
                             Eigen::VectorXd& grad) {
    using narx::ArchKind;
    const ParamLayout l = layout_of(m);
    grad.resize(l.total);

    switch (m.arch.kind) {
    case ArchKind::SigmoidSingle: {
        const Eigen::VectorXd z = m.W[0] * x + m.b[0];
        Eigen::VectorXd a(z.size()), da(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            a[i] = narx::activate(m.arch.act1, z[i]);
            da[i] = dactivate(m.arch.act1, z[i], a[i]);
        }
        const double y = (m.W[1] * a)(0) + m.b[1](0);
        const Eigen::VectorXd g0 = m.W[1].transpose().col(0).cwiseProduct(da);
        scatter_layer(grad, l, 0, g0 * x.transpose(), g0);
        scatter_layer(grad, l, 1, a.transpose(), Eigen::VectorXd::Ones(1));
        return y;
    }
    case ArchKind::FeedForwardTwo: {
        const Eigen::VectorXd z1 = m.W[0] * x + m.b[0];
        Eigen::VectorXd a1(z1.size()), da1(z1.size());
        for (Eigen::Index i = 0; i < z1.size(); ++i) {
            a1[i] = narx::activate(m.arch.act1, z1[i]);
            da1[i] = dactivate(m.arch.act1, z1[i], a1[i]);
        }
        const Eigen::VectorXd z2 = m.W[1] * a1 + m.b[1];
        Eigen::VectorXd a2(z2.size()), da2(z2.size());
        for (Eigen::Index i = 0; i < z2.size(); ++i) {
            a2[i] = narx::activate(m.arch.act2, z2[i]);
            da2[i] = dactivate(m.arch.act2, z2[i], a2[i]);
        }
        const double y = (m.W[2] * a2)(0) + m.b[2](0);
        const Eigen::VectorXd g2 = m.W[2].transpose().col(0).cwiseProduct(da2);
        const Eigen::VectorXd g1 = (m.W[1].transpose() * g2).cwiseProduct(da1);
        scatter_layer(grad, l, 0, g1 * x.transpose(), g1);
        scatter_layer(grad, l, 1, g2 * a1.transpose(), g2);
        scatter_layer(grad, l, 2, a2.transpose(), Eigen::VectorXd::Ones(1));
        return y;
    }
    case ArchKind::CascadeForward: {
        const Eigen::VectorXd z = m.W[0] * x + m.b[0];
        Eigen::VectorXd a(z.size()), da(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            a[i] = narx::activate(m.arch.act1, z[i]);
            da[i] = dactivate(m.arch.act1, z[i], a[i]);
        }
        Eigen::VectorXd c(x.size() + a.size());
        c << x, a;
        const double y = (m.W[1] * c)(0) + m.b[1](0);
        const Eigen::VectorXd wh = m.W[1].row(0).segment(x.size(), a.size()).transpose();
        const Eigen::VectorXd g0 = wh.cwiseProduct(da);
        scatter_layer(grad, l, 0, g0 * x.transpose(), g0);
        scatter_layer(grad, l, 1, c.transpose(), Eigen::VectorXd::Ones(1));
        return y;
    }
    }
    throw ModelError("forward_with_gradient: unknown architecture");
}

std::pair<double, Eigen::VectorXd> loss_and_gradient(const narx::NarxModel& m,
                                                     const Batch& batch) {
    if (batch.X.rows() == 0)
        throw ArgumentError("loss_and_gradient: empty batch");
    if (batch.X.cols() != m.regressor_size())
        throw ModelError("loss_and_gradient: regressor width does not match the model");

    const double n = static_cast<double>(batch.X.rows());
    Eigen::VectorXd sample_grad;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout_of(m).total);
    double loss = 0.0;
    for (Eigen::Index k = 0; k < batch.X.rows(); ++k) {
        const double e = forward_with_gradient(m, batch.X.row(k).transpose(), sample_grad) -
                         batch.y[k];
        loss += e * e;
        grad.noalias() += (2.0 * e) * sample_grad;
    }
    return {loss / n, grad / n};
}

void residual_jacobian(const narx::NarxModel& m, const Batch& batch,
                       Eigen::VectorXd& residuals, Eigen::MatrixXd& jacobian) {
    const ParamLayout l = layout_of(m);
    residuals.resize(batch.X.rows());
    jacobian.resize(batch.X.rows(), l.total);
    Eigen::VectorXd g;
    for (Eigen::Index k = 0; k < batch.X.rows(); ++k) {
        residuals[k] = forward_with_gradient(m, batch.X.row(k).transpose(), g) - batch.y[k];
        jacobian.row(k) = g.transpose();
    }
}

namespace {

// Solves the damped normal equations; returns false when the result is not
// finite (treated as a singular system by the caller).
bool solve_damped(const Eigen::MatrixXd& jtj, const Eigen::VectorXd& diag,
                  const Eigen::VectorXd& g, double lambda, Eigen::VectorXd& delta) {
    Eigen::MatrixXd damped = jtj;
    const double maxd = diag.maxCoeff();
    const double floor = maxd > 0.0 ? 1e-12 * maxd : 1e-12;
    damped.diagonal() += lambda * diag.cwiseMax(floor);
    delta = damped.ldlt().solve(-g);
    return delta.allFinite();
}

} // namespace

LmStepResult lm_step(const narx::NarxModel& model, const Batch& batch, double lambda,
                     double factor) {
    if (!(lambda > 0.0))
        throw ArgumentError("lm_step: lambda must be positive");

    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    residual_jacobian(model, batch, r, j);
    const double n = static_cast<double>(batch.X.rows());

    LmStepResult out;
    out.loss_before = r.squaredNorm() / n;
    out.params = get_params(model);

    const Eigen::VectorXd g = j.transpose() * r;
    if (g.norm() == 0.0) { // already at a stationary point (e.g. zero residuals)
        out.lambda = lambda;
        out.accepted = true;
        out.loss_after = out.loss_before;
        return out;
    }

    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd diag = jtj.diagonal();

    Eigen::VectorXd delta;
    double lam = lambda;
    while (!solve_damped(jtj, diag, g, lam, delta)) {
        lam *= factor;
        if (lam > kLambdaMax)
            throw TrainingError("lm_step: damped normal equations stayed singular past "
                                "lambda = 1e12");
    }

    narx::NarxModel candidate = model;
    set_params(candidate, out.params + delta);
    out.loss_after = batch_loss(candidate, batch);
    if (out.loss_after < out.loss_before) {
        out.accepted = true;
        out.params += delta;
        out.lambda = std::max(lam / factor, kLambdaMin);
    } else {
        out.accepted = false;
        out.lambda = lam * factor;
        out.loss_after = out.loss_before;
    }
    return out;
}

std::pair<narx::NarxModel, TrainingReport> fit(const narx::NarxModel& model,
                                               const control::Dataset& data,
                                               const TrainingOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    opts.validate();
    data.validate();

    narx::NarxModel m = model;
    const std::size_t w = static_cast<std::size_t>(m.delays.window());
    const auto [est, val] = split(data, m.delays.window()); // validates segment lengths

    // Normalization from the estimation segment only.
    const auto channel_stats = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double s : v)
            mean += s;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double s : v)
            var += (s - mean) * (s - mean);
        return std::pair{mean, std::sqrt(var / static_cast<double>(v.size()))};
    };
    const auto [um, us] = channel_stats(est.u.samples);
    const auto [ym, ys] = channel_stats(est.y.samples);
    if (!(us > 0.0) || !(ys > 0.0))
        throw ConfigError("fit: constant u or y channel on the estimation segment");
    m.norm = {um, us, ym, ys};

    const Batch est_batch = make_batch(m, data, w, data.split_index);
    const Batch val_batch = make_batch(m, data, data.split_index, data.size());
    const double y_var = m.norm.y_std * m.norm.y_std;

    if (opts.gradient_check) {
        // spot-check a handful of components against central differences
        Batch probe;
        const Eigen::Index rows = std::min<Eigen::Index>(est_batch.X.rows(), 16);
        probe.X = est_batch.X.topRows(rows);
        probe.y = est_batch.y.head(rows);
        auto [l0, g0] = loss_and_gradient(m, probe);
        (void)l0;
        Eigen::VectorXd p = get_params(m);
        const int n_check = std::min<int>(10, static_cast<int>(p.size()));
        for (int i = 0; i < n_check; ++i) {
            const int idx = i * static_cast<int>(p.size()) / n_check;
            const double h = 1e-6;
            narx::NarxModel probe_model = m;
            Eigen::VectorXd pp = p;
            pp[idx] += h;
            set_params(probe_model, pp);
            const double lp = batch_loss(probe_model, probe);
            pp[idx] -= 2.0 * h;
            set_params(probe_model, pp);
            const double lm_ = batch_loss(probe_model, probe);
            const double fd = (lp - lm_) / (2.0 * h);
            const double scale = std::max({std::abs(fd), std::abs(g0[idx]), 1e-8});
            if (std::abs(fd - g0[idx]) / scale > 1e-4)
                throw TrainingError("fit: analytic gradient failed the finite-difference check");
        }
    }

    TrainingReport report;
    report.seed = opts.seed;
    report.options_digest = opts.digest();

    Eigen::VectorXd best_params = get_params(m);
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    double lambda = opts.lm_lambda0;

    // Adam state (unused for LM)
    Eigen::VectorXd adam_m, adam_v;
    if (opts.algorithm == Algorithm::Adam) {
        adam_m = Eigen::VectorXd::Zero(get_params(m).size());
        adam_v = adam_m;
    }

    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
        double train_mse_norm = 0.0;

        if (opts.algorithm == Algorithm::LevenbergMarquardt) {
            residual_jacobian(m, est_batch, r, j);
            const double n = static_cast<double>(est_batch.X.rows());
            const double loss_before = r.squaredNorm() / n;
            if (!std::isfinite(loss_before))
                throw TrainingError("fit: loss diverged at epoch " + std::to_string(epoch));

            const Eigen::VectorXd g = j.transpose() * r;
            const Eigen::MatrixXd jtj = j.transpose() * j;
            const Eigen::VectorXd diag = jtj.diagonal();
            const Eigen::VectorXd params = get_params(m);

            // one accepted (or finally rejected) damping cycle = one epoch
            train_mse_norm = loss_before;
            if (g.norm() > 0.0) {
                bool accepted = false;
                while (lambda <= kLambdaMax) {
                    Eigen::VectorXd delta;
                    if (!solve_damped(jtj, diag, g, lambda, delta)) {
                        lambda *= opts.lm_lambda_factor;
                        continue;
                    }
                    narx::NarxModel cand = m;
                    set_params(cand, params + delta);
                    const double loss_after = batch_loss(cand, est_batch);
                    if (std::isfinite(loss_after) && loss_after < loss_before) {
                        m = std::move(cand);
                        lambda = std::max(lambda / opts.lm_lambda_factor, kLambdaMin);
                        train_mse_norm = loss_after;
                        accepted = true;
                        break;
                    }
                    lambda *= opts.lm_lambda_factor;
                }
                if (!accepted && lambda > kLambdaMax * opts.lm_lambda_factor)
                    lambda = kLambdaMax; // stalled; patience will end the run
            }
        } else {
            auto [loss, grad] = loss_and_gradient(m, est_batch);
            if (!std::isfinite(loss))
                throw TrainingError("fit: loss diverged at epoch " + std::to_string(epoch));
            const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
            adam_m = beta1 * adam_m + (1.0 - beta1) * grad;
            adam_v = beta2 * adam_v.array().matrix() +
                     (1.0 - beta2) * grad.cwiseProduct(grad);
            const double t = static_cast<double>(epoch + 1);
            const double corr = std::sqrt(1.0 - std::pow(beta2, t)) / (1.0 - std::pow(beta1, t));
            Eigen::VectorXd p = get_params(m);
            p -= opts.learning_rate * corr *
                 adam_m.cwiseQuotient((adam_v.cwiseSqrt().array() + eps).matrix());
            set_params(m, p);
            train_mse_norm = batch_loss(m, est_batch);
        }

        const double val_mse_norm = batch_loss(m, val_batch);
        if (!std::isfinite(val_mse_norm) || !std::isfinite(train_mse_norm))
            throw TrainingError("fit: loss diverged at epoch " + std::to_string(epoch));

        report.train_mse.push_back(train_mse_norm * y_var);
        report.val_mse.push_back(val_mse_norm * y_var);

        if (val_mse_norm * y_var < best_val) {
            best_val = val_mse_norm * y_var;
            best_params = get_params(m);
            report.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= opts.patience) {
            break;
        }
    }

    set_params(m, best_params);
    report.best_val_mse = best_val;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {m, report};
}

} // namespace nsid::train
