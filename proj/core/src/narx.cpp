#include "nsid/narx.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "nsid/errors.hpp"

namespace nsid::narx {

void DelayConfig::validate() const {
    if (na < 1 || nb < 1)
        throw ConfigError("DelayConfig: na and nb must be >= 1");
}

double activate(Activation f, double x) {
    switch (f) {
    case Activation::Linear: return x;
    case Activation::Logistic: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Tanh: return std::tanh(x);
    case Activation::RadialBasis: return std::exp(-x * x);
    }
    return x;
}

std::string to_string(Activation f) {
    switch (f) {
    case Activation::Linear: return "linear";
    case Activation::Logistic: return "logistic";
    case Activation::Tanh: return "tanh";
    case Activation::RadialBasis: return "radbas";
    }
    return "linear";
}

Activation activation_from_string(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "logistic") return Activation::Logistic;
    if (name == "tanh") return Activation::Tanh;
    if (name == "radbas") return Activation::RadialBasis;
    throw ConfigError("unknown activation '" + name + "'");
}

Architecture Architecture::sigmoid_single(int hidden, Activation act) {
    Architecture a;
    a.kind = ArchKind::SigmoidSingle;
    a.h1 = hidden;
    a.act1 = act;
    a.validate();
    return a;
}

Architecture Architecture::feedforward_two(int h1, int h2, Activation act1, Activation act2) {
    Architecture a;
    a.kind = ArchKind::FeedForwardTwo;
    a.h1 = h1;
    a.h2 = h2;
    a.act1 = act1;
    a.act2 = act2;
    a.validate();
    return a;
}

Architecture Architecture::cascade_forward(int hidden, Activation act) {
    Architecture a;
    a.kind = ArchKind::CascadeForward;
    a.h1 = hidden;
    a.act1 = act;
    a.validate();
    return a;
}

void Architecture::validate() const {
    if (h1 < 1)
        throw ConfigError("Architecture: hidden layer size must be >= 1");
    if (kind == ArchKind::FeedForwardTwo && h2 < 1)
        throw ConfigError("Architecture: second hidden layer size must be >= 1");
}

void Normalization::validate() const {
    if (!(u_std > 0.0) || !(y_std > 0.0))
        throw ConfigError("Normalization: channel std must be positive");
}

int NarxModel::param_count() const {
    int n = 0;
    for (std::size_t i = 0; i < W.size(); ++i)
        n += static_cast<int>(W[i].size() + b[i].size());
    return n;
}

void NarxModel::validate() const {
    arch.validate();
    delays.validate();
    norm.validate();
    const int d = regressor_size();
    const auto expect = [&](std::size_t i, Eigen::Index rows, Eigen::Index cols) {
        if (i >= W.size() || i >= b.size() || W[i].rows() != rows || W[i].cols() != cols ||
            b[i].size() != rows)
            throw ModelError("NarxModel: weight block " + std::to_string(i) +
                             " has inconsistent shape");
    };
    switch (arch.kind) {
    case ArchKind::SigmoidSingle:
        expect(0, arch.h1, d);
        expect(1, 1, arch.h1);
        break;
    case ArchKind::FeedForwardTwo:
        expect(0, arch.h1, d);
        expect(1, arch.h2, arch.h1);
        expect(2, 1, arch.h2);
        break;
    case ArchKind::CascadeForward:
        expect(0, arch.h1, d);
        expect(1, 1, d + arch.h1);
        break;
    }
}

Eigen::VectorXd build_regressor(std::span<const double> y_hist,
                                std::span<const double> u_hist,
                                const DelayConfig& delays) {
    delays.validate();
    if (y_hist.size() < static_cast<std::size_t>(delays.na) ||
        u_hist.size() < static_cast<std::size_t>(delays.nb))
        throw ArgumentError("build_regressor: insufficient history for the delay orders");

    Eigen::VectorXd x(delays.regressor_size());
    for (int i = 0; i < delays.na; ++i)
        x[i] = y_hist[y_hist.size() - 1 - i];
    for (int i = 0; i < delays.nb; ++i)
        x[delays.na + i] = u_hist[u_hist.size() - 1 - i];
    return x;
}

double neuron(std::span<const double> inputs, std::span<const double> weights,
              double bias, Activation activation) {
    if (inputs.size() != weights.size())
        throw ArgumentError("neuron: input/weight length mismatch");
    double net = bias;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        net += inputs[i] * weights[i];
    return activate(activation, net);
}

namespace {

Eigen::VectorXd apply(Activation f, const Eigen::VectorXd& z) {
    Eigen::VectorXd a(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        a[i] = activate(f, z[i]);
    return a;
}

} // namespace

double forward(const NarxModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.regressor_size())
        throw ModelError("forward: regressor length does not match the model");
    switch (m.arch.kind) {
    case ArchKind::SigmoidSingle: {
        const Eigen::VectorXd a = apply(m.arch.act1, m.W[0] * x + m.b[0]);
        return (m.W[1] * a)(0) + m.b[1](0);
    }
    case ArchKind::FeedForwardTwo: {
        const Eigen::VectorXd a1 = apply(m.arch.act1, m.W[0] * x + m.b[0]);
        const Eigen::VectorXd a2 = apply(m.arch.act2, m.W[1] * a1 + m.b[1]);
        return (m.W[2] * a2)(0) + m.b[2](0);
    }
    case ArchKind::CascadeForward: {
        const Eigen::VectorXd a = apply(m.arch.act1, m.W[0] * x + m.b[0]);
        Eigen::VectorXd c(x.size() + a.size());
        c << x, a;
        return (m.W[1] * c)(0) + m.b[1](0);
    }
    }
    throw ModelError("forward: unknown architecture");
}

Prediction predict_sp(const NarxModel& model, const control::Dataset& data) {
    model.validate();
    data.validate();
    const std::size_t n = data.size();
    const std::size_t w = static_cast<std::size_t>(model.delays.window());
    if (n <= w)
        throw ArgumentError("predict_sp: dataset shorter than the delay window");

    Prediction pred;
    pred.dt = data.u.dt;
    pred.first_valid = w;
    pred.y_hat.assign(n, std::numeric_limits<double>::quiet_NaN());

    const int na = model.delays.na;
    const int nb = model.delays.nb;
    Eigen::VectorXd x(model.regressor_size());
    for (std::size_t k = w; k < n; ++k) {
        for (int i = 0; i < na; ++i)
            x[i] = model.norm.norm_y(data.y.samples[k - 1 - i]);
        for (int i = 0; i < nb; ++i)
            x[na + i] = model.norm.norm_u(data.u.samples[k - 1 - i]);
        pred.y_hat[k] = model.norm.denorm_y(forward(model, x));
    }
    return pred;
}

std::vector<double> simulate_p(const NarxModel& model, const signals::Signal& u,
                               std::span<const double> y_init) {
    model.validate();
    u.validate();
    const std::size_t n = u.size();
    const std::size_t w = static_cast<std::size_t>(model.delays.window());
    if (y_init.size() < static_cast<std::size_t>(model.delays.na) || y_init.size() < w)
        throw ArgumentError("simulate_p: y_init must cover the delay window");
    if (n <= w)
        throw ArgumentError("simulate_p: input shorter than the delay window");

    std::vector<double> y(n, 0.0);
    for (std::size_t k = 0; k < w; ++k)
        y[k] = y_init[k];

    const int na = model.delays.na;
    const int nb = model.delays.nb;
    Eigen::VectorXd x(model.regressor_size());
    for (std::size_t k = w; k < n; ++k) {
        for (int i = 0; i < na; ++i)
            x[i] = model.norm.norm_y(y[k - 1 - i]);
        for (int i = 0; i < nb; ++i)
            x[na + i] = model.norm.norm_u(u.samples[k - 1 - i]);
        y[k] = model.norm.denorm_y(forward(model, x));
    }
    return y;
}

NarxModel init_weights(const Architecture& arch, const DelayConfig& delays,
                       std::uint64_t seed) {
    arch.validate();
    delays.validate();

    NarxModel m;
    m.arch = arch;
    m.delays = delays;

    const int d = delays.regressor_size();
    std::vector<std::pair<int, int>> shapes; // rows, cols per layer
    switch (arch.kind) {
    case ArchKind::SigmoidSingle:
        shapes = {{arch.h1, d}, {1, arch.h1}};
        break;
    case ArchKind::FeedForwardTwo:
        shapes = {{arch.h1, d}, {arch.h2, arch.h1}, {1, arch.h2}};
        break;
    case ArchKind::CascadeForward:
        shapes = {{arch.h1, d}, {1, d + arch.h1}};
        break;
    }

    std::mt19937_64 gen(seed);
    for (auto [rows, cols] : shapes) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        std::uniform_real_distribution<double> u(-bound, bound);
        Eigen::MatrixXd w(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                w(r, c) = u(gen);
        Eigen::VectorXd bias(rows);
        for (int r = 0; r < rows; ++r)
            bias[r] = u(gen);
        m.W.push_back(std::move(w));
        m.b.push_back(std::move(bias));
    }
    m.validate();
    return m;
}

} // namespace nsid::narx
