#include "nsid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "nsid/config.hpp"
#include "nsid/errors.hpp"
#include "nsid/io.hpp"
#include "nsid/metrics.hpp"
#include "nsid/svg.hpp"

namespace nsid::app {

namespace {

namespace fs = std::filesystem;

struct PredictionTable {
    std::vector<double> t, y, y_sp, y_p;
};

std::string manifest_text(const config::ExperimentSetup& setup) {
    std::ostringstream os;
    os << "tool_version=" << kToolVersion << '\n'
       << "config_digest=" << setup.config_digest << '\n'
       << "axis=" << control::to_string(setup.experiment.axis) << '\n'
       << "seed=" << setup.seed << '\n';
    return os.str();
}

int input_error(const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
}

PredictionTable read_predictions(const fs::path& path) {
    const std::string text = io::read_file(path);
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "k,t_s,y,y_hat_sp,y_hat_p")
        throw ConfigError(path.string() + ": expected predictions header");
    PredictionTable tab;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string f[5];
        for (int i = 0; i < 4; ++i)
            std::getline(ls, f[i], ',');
        std::getline(ls, f[4]);
        tab.t.push_back(std::stod(f[1]));
        tab.y.push_back(std::stod(f[2]));
        tab.y_sp.push_back(std::stod(f[3]));
        tab.y_p.push_back(std::stod(f[4]));
    }
    return tab;
}

void decimate(std::vector<double>& x, std::vector<double>& y, std::size_t max_points) {
    if (x.size() <= max_points)
        return;
    const std::size_t stride = (x.size() + max_points - 1) / max_points;
    std::vector<double> dx, dy;
    for (std::size_t i = 0; i < x.size(); i += stride) {
        dx.push_back(x[i]);
        dy.push_back(y[i]);
    }
    x = std::move(dx);
    y = std::move(dy);
}

struct EvalOutputs {
    metrics::MetricsReport sp; ///< series-parallel figures
    metrics::MetricsReport p;  ///< free-run figures (fpe unused)
    std::string metrics_txt;
    std::string predictions_csv;
};

EvalOutputs evaluate(const narx::NarxModel& model, const control::Dataset& data) {
    const std::size_t n = data.size();
    const std::size_t w = static_cast<std::size_t>(model.delays.window());
    const std::size_t split = data.split_index;
    if (split <= w || n - split <= w)
        throw ConfigError("eval: delay window does not fit inside both segments");

    const narx::Prediction sp = narx::predict_sp(model, data);

    // Free-run per segment, seeded with measured history.
    std::vector<double> y_p(n, std::numeric_limits<double>::quiet_NaN());
    {
        signals::Signal u_est;
        u_est.dt = data.u.dt;
        u_est.samples.assign(data.u.samples.begin(), data.u.samples.begin() + split);
        const std::span<const double> init_est(data.y.samples.data(), w);
        const auto sim = narx::simulate_p(model, u_est, init_est);
        for (std::size_t k = w; k < split; ++k)
            y_p[k] = sim[k];
    }
    {
        signals::Signal u_val;
        u_val.dt = data.u.dt;
        u_val.samples.assign(data.u.samples.begin() + (split - w), data.u.samples.end());
        const std::span<const double> init_val(data.y.samples.data() + (split - w), w);
        const auto sim = narx::simulate_p(model, u_val, init_val);
        for (std::size_t k = split; k < n; ++k)
            y_p[k] = sim[k - (split - w)];
    }

    const auto seg = [&](const std::vector<double>& v, std::size_t from, std::size_t to) {
        return std::span<const double>(v.data() + from, to - from);
    };
    const auto y_est = seg(data.y.samples, w, split);
    const auto y_val = seg(data.y.samples, split, n);

    EvalOutputs out;
    out.sp.n_params = model.param_count();
    out.sp.n_samples_est = split - w;
    out.sp.fit_percent_est = metrics::fit_percent(y_est, seg(sp.y_hat, w, split));
    out.sp.fit_percent_val = metrics::fit_percent(y_val, seg(sp.y_hat, split, n));
    out.sp.mse_est = metrics::mse(y_est, seg(sp.y_hat, w, split));
    out.sp.mse_val = metrics::mse(y_val, seg(sp.y_hat, split, n));
    out.sp.r_est = metrics::correlation(y_est, seg(sp.y_hat, w, split));
    out.sp.r_val = metrics::correlation(y_val, seg(sp.y_hat, split, n));
    out.sp.fpe = metrics::fpe(out.sp.mse_est, out.sp.n_params, out.sp.n_samples_est);

    out.p.n_params = out.sp.n_params;
    out.p.n_samples_est = out.sp.n_samples_est;
    out.p.fit_percent_est = metrics::fit_percent(y_est, seg(y_p, w, split));
    out.p.fit_percent_val = metrics::fit_percent(y_val, seg(y_p, split, n));
    out.p.mse_est = metrics::mse(y_est, seg(y_p, w, split));
    out.p.mse_val = metrics::mse(y_val, seg(y_p, split, n));
    out.p.r_est = metrics::correlation(y_est, seg(y_p, w, split));
    out.p.r_val = metrics::correlation(y_val, seg(y_p, split, n));

    std::ostringstream ms;
    const auto put = [&](const char* key, double v) {
        ms << key << " = " << io::format_sig(v, 6) << '\n';
    };
    ms << "n_params = " << out.sp.n_params << '\n';
    ms << "n_samples_est = " << out.sp.n_samples_est << '\n';
    put("sp_fit_percent_est", out.sp.fit_percent_est);
    put("sp_fit_percent_val", out.sp.fit_percent_val);
    put("sp_mse_est", out.sp.mse_est);
    put("sp_mse_val", out.sp.mse_val);
    put("sp_fpe_est", out.sp.fpe);
    put("sp_r_est", out.sp.r_est);
    put("sp_r_val", out.sp.r_val);
    put("p_fit_percent_est", out.p.fit_percent_est);
    put("p_fit_percent_val", out.p.fit_percent_val);
    put("p_mse_est", out.p.mse_est);
    put("p_mse_val", out.p.mse_val);
    put("p_r_est", out.p.r_est);
    put("p_r_val", out.p.r_val);
    out.metrics_txt = ms.str();

    std::string csv = "k,t_s,y,y_hat_sp,y_hat_p\n";
    for (std::size_t k = w; k < n; ++k) {
        csv += std::to_string(k);
        csv += ',';
        csv += io::format_sig(static_cast<double>(k) * data.u.dt, 9);
        csv += ',';
        csv += io::format_sig(data.y.samples[k], 9);
        csv += ',';
        csv += io::format_sig(sp.y_hat[k], 9);
        csv += ',';
        csv += io::format_sig(y_p[k], 9);
        csv += '\n';
    }
    out.predictions_csv = std::move(csv);
    return out;
}

} // namespace

int cmd_excite(const fs::path& config_path, const fs::path& out_dir,
               std::optional<std::uint64_t> seed_override) {
    config::ExperimentSetup setup;
    try {
        setup = config::parse_config_file(config_path);
        if (seed_override)
            setup.apply_seed(*seed_override);
    } catch (const ConfigError& e) {
        return input_error(e);
    }

    control::Dataset data;
    try {
        data = control::run_experiment(setup.experiment);
    } catch (const ExperimentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUnstable;
    } catch (const ConfigError& e) {
        return input_error(e);
    }

    try {
        fs::create_directories(out_dir);
        io::DatasetMeta meta;
        meta.axis = data.axis;
        meta.dt = data.u.dt;
        meta.split_index = data.split_index;
        meta.seed = setup.seed;
        meta.config_digest = setup.config_digest;
        io::write_dataset(out_dir / "dataset.csv", data, meta);
        io::write_file(out_dir / "manifest.txt", manifest_text(setup));
    } catch (const ConfigError& e) {
        return input_error(e);
    }
    std::cout << "wrote " << (out_dir / "dataset.csv").string() << " (" << data.size()
              << " samples)\n";
    return kExitOk;
}

int cmd_train(const fs::path& config_path, const fs::path& dataset_path, const fs::path& out_dir,
              std::optional<std::uint64_t> seed_override) {
    config::ExperimentSetup setup;
    control::Dataset data;
    try {
        setup = config::parse_config_file(config_path);
        if (seed_override)
            setup.apply_seed(*seed_override);
        data = io::read_dataset(dataset_path);
    } catch (const ConfigError& e) {
        return input_error(e);
    }

    try {
        const narx::NarxModel init =
            narx::init_weights(setup.arch, setup.delays, setup.seed);
        const auto [model, report] = train::fit(init, data, setup.training);

        fs::create_directories(out_dir);
        io::save_model(out_dir / "model.txt", model);
        io::write_file(out_dir / "training_report.csv", io::training_report_csv(report));
        std::cout << "best epoch " << report.best_epoch << ", best validation MSE "
                  << io::format_sig(report.best_val_mse, 6) << '\n';
    } catch (const TrainingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const ConfigError& e) {
        return input_error(e);
    } catch (const ArgumentError& e) {
        return input_error(e);
    }
    return kExitOk;
}

int cmd_eval(const fs::path& model_path, const fs::path& dataset_path, const fs::path& out_dir) {
    try {
        const narx::NarxModel model = io::load_model(model_path);
        const control::Dataset data = io::read_dataset(dataset_path);
        const EvalOutputs out = evaluate(model, data);

        fs::create_directories(out_dir);
        io::write_file(out_dir / "metrics.txt", out.metrics_txt);
        io::write_file(out_dir / "predictions.csv", out.predictions_csv);
        std::cout << "SP fit: est " << io::format_sig(out.sp.fit_percent_est, 6) << "%, val "
                  << io::format_sig(out.sp.fit_percent_val, 6) << "%\n";
    } catch (const ConfigError& e) {
        return input_error(e);
    } catch (const ArgumentError& e) {
        return input_error(e);
    } catch (const ModelError& e) {
        return input_error(e);
    }
    return kExitOk;
}

int cmd_report(const fs::path& bundle_dir) {
    try {
        for (const char* name :
             {"dataset.csv", "model.txt", "training_report.csv", "predictions.csv"})
            if (!fs::exists(bundle_dir / name))
                throw ConfigError("report: bundle is missing " + std::string(name));

        const control::Dataset data = io::read_dataset(bundle_dir / "dataset.csv");
        const PredictionTable pred = read_predictions(bundle_dir / "predictions.csv");
        const train::TrainingReport report =
            io::read_training_report(bundle_dir / "training_report.csv");

        const std::size_t n = pred.t.size();
        const std::size_t split_row =
            data.split_index >= (data.size() - n) ? data.split_index - (data.size() - n) : 0;

        // (a) measured vs predicted overlay, one panel per segment
        std::vector<svg::Plot> overlay;
        for (int part = 0; part < 2; ++part) {
            const std::size_t from = part == 0 ? 0 : split_row;
            const std::size_t to = part == 0 ? split_row : n;
            svg::Plot plot(part == 0 ? "Estimation segment" : "Validation segment", "time [s]",
                           "rate [rad/s]");
            std::vector<double> t(pred.t.begin() + from, pred.t.begin() + to);
            std::vector<double> y(pred.y.begin() + from, pred.y.begin() + to);
            std::vector<double> yh(pred.y_sp.begin() + from, pred.y_sp.begin() + to);
            auto t2 = t;
            decimate(t, y, 2000);
            decimate(t2, yh, 2000);
            plot.add_line(std::move(t), std::move(y), "#1f77b4", "measured");
            plot.add_line(std::move(t2), std::move(yh), "#d62728", "one-step prediction");
            overlay.push_back(std::move(plot));
        }
        svg::write_figure(bundle_dir / "overlay.svg", overlay);

        // (b) epoch curves with the best epoch marked
        {
            svg::Plot plot("Training progress", "epoch", "MSE");
            std::vector<double> e(report.train_mse.size());
            for (std::size_t i = 0; i < e.size(); ++i)
                e[i] = static_cast<double>(i);
            plot.add_line(e, report.train_mse, "#1f77b4", "estimation MSE");
            plot.add_line(e, report.val_mse, "#d62728", "validation MSE");
            plot.add_vline(static_cast<double>(report.best_epoch), "#2ca02c");
            plot.add_annotation("best epoch " + std::to_string(report.best_epoch));
            svg::write_figure(bundle_dir / "training_curve.svg", {plot});
        }

        // (c) prediction-target scatter with least-squares line and R
        {
            std::vector<double> y(pred.y.begin() + split_row, pred.y.end());
            std::vector<double> yh(pred.y_sp.begin() + split_row, pred.y_sp.end());
            const double r = metrics::correlation(y, yh);

            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                sx += y[i];
                sy += yh[i];
                sxx += y[i] * y[i];
                sxy += y[i] * yh[i];
            }
            const double m = static_cast<double>(y.size());
            const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            const double icept = (sy - slope * sx) / m;

            svg::Plot plot("Prediction vs target (validation)", "target [rad/s]",
                           "prediction [rad/s]");
            auto yc = y;
            decimate(yc, yh, 4000);
            const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
            plot.add_points(std::move(yc), std::move(yh), "#1f77b4");
            plot.add_line({*lo, *hi}, {slope * *lo + icept, slope * *hi + icept}, "#d62728",
                          "least-squares fit");
            plot.add_annotation("R = " + io::format_sig(r, 6));
            svg::write_figure(bundle_dir / "scatter.svg", {plot});
        }

        // (d) residual autocorrelation with the whiteness band
        {
            std::vector<double> res(pred.y.size());
            for (std::size_t i = 0; i < res.size(); ++i)
                res[i] = pred.y[i] - pred.y_sp[i];
            const std::size_t max_lag = std::min<std::size_t>(50, res.size() - 1);
            const auto acf = metrics::residual_autocorr(res, max_lag);

            svg::Plot plot("Residual autocorrelation (one-step)", "lag", "rho");
            std::vector<double> lags(acf.rho.size());
            for (std::size_t i = 0; i < lags.size(); ++i)
                lags[i] = static_cast<double>(i);
            plot.add_line(lags, acf.rho, "#1f77b4", "residual ACF");
            plot.add_hline(acf.confidence, "#d62728");
            plot.add_hline(-acf.confidence, "#d62728");
            svg::write_figure(bundle_dir / "residual_autocorr.svg", {plot});
        }
    } catch (const ConfigError& e) {
        return input_error(e);
    } catch (const ArgumentError& e) {
        return input_error(e);
    }
    return kExitOk;
}

} // namespace nsid::app
