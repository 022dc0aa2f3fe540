#include "nsid/config.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "nsid/errors.hpp"
#include "nsid/io.hpp"

namespace nsid::config {

namespace {

std::string trim(const std::string& s) {
    auto b = s.begin(), e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b)))
        ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1))))
        --e;
    return {b, e};
}

struct RawConfig {
    std::map<std::string, std::pair<std::string, int>> kv; // key -> (value, line)

    bool has(const std::string& k) const { return kv.count(k) != 0; }

    std::string str(const std::string& k) const { return kv.at(k).first; }

    double num(const std::string& k) const {
        const auto& [v, line] = kv.at(k);
        std::size_t pos = 0;
        double d = 0.0;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != v.size())
            throw ConfigError("line " + std::to_string(line) + ": cannot parse number for '" +
                              k + "' from '" + v + "'");
        return d;
    }

    int integer(const std::string& k) const {
        const double d = num(k);
        const int i = static_cast<int>(d);
        if (d != static_cast<double>(i))
            throw ConfigError("line " + std::to_string(kv.at(k).second) + ": '" + k +
                              "' must be an integer");
        return i;
    }

    std::uint64_t u64(const std::string& k) const {
        const auto& [v, line] = kv.at(k);
        try {
            std::size_t pos = 0;
            const std::uint64_t r = std::stoull(v, &pos);
            if (pos == v.size())
                return r;
        } catch (const std::exception&) {
        }
        throw ConfigError("line " + std::to_string(line) + ": cannot parse integer for '" + k +
                          "'");
    }
};

const std::vector<std::string> kKnownKeys = {
    // experiment
    "axis", "duration_s", "dt", "seed", "split_fraction", "reference_angle",
    // plant
    "mass", "ix", "iy", "iz", "torque_limit", "thrust_limit", "motor_tau_s", "gravity",
    // cascade gains
    "kp_angle", "kp_rate", "ki_rate", "rate_cmd_limit", "integrator_limit",
    // noise
    "meas_noise_std", "dist_noise_std",
    // excitation
    "band_min", "band_max", "prbs_amplitude", "prbs_order", "prbs_bit_interval_s", "prbs_seed",
    // model
    "arch", "na", "nb", "hidden", "hidden1", "hidden2", "act", "act2",
    // training
    "algorithm", "max_epochs", "patience", "lm_lambda0", "lm_lambda_factor", "learning_rate",
};

} // namespace

void ExperimentSetup::apply_seed(std::uint64_t s) {
    seed = s;
    experiment.noise.seed = s;
    training.seed = s;
}

ExperimentSetup parse_config_text(const std::string& text, const std::string& origin) {
    RawConfig raw;
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + " line " + std::to_string(ln) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw ConfigError(origin + " line " + std::to_string(ln) + ": unknown key '" + key +
                              "'");
        raw.kv[key] = {value, ln};
    }

    for (const char* req : {"axis", "duration_s", "dt", "arch", "na", "nb"})
        if (!raw.has(req))
            throw ConfigError(origin + ": missing required key '" + std::string(req) + "'");

    ExperimentSetup setup;
    auto& exp = setup.experiment;
    exp.axis = control::axis_from_string(raw.str("axis"));
    exp.duration_s = raw.num("duration_s");
    exp.dt = raw.num("dt");
    if (raw.has("split_fraction"))
        exp.split_fraction = raw.num("split_fraction");
    if (raw.has("reference_angle"))
        exp.reference_angle = raw.num("reference_angle");

    auto& plant = exp.plant;
    if (raw.has("mass")) plant.mass = raw.num("mass");
    if (raw.has("ix")) plant.ix = raw.num("ix");
    if (raw.has("iy")) plant.iy = raw.num("iy");
    if (raw.has("iz")) plant.iz = raw.num("iz");
    if (raw.has("torque_limit")) plant.torque_limit = raw.num("torque_limit");
    if (raw.has("thrust_limit")) plant.thrust_limit = raw.num("thrust_limit");
    if (raw.has("motor_tau_s")) plant.motor_tau_s = raw.num("motor_tau_s");
    if (raw.has("gravity")) plant.g = raw.num("gravity");

    auto& gains = exp.gains;
    if (raw.has("kp_angle")) gains.kp_angle = raw.num("kp_angle");
    if (raw.has("kp_rate")) gains.kp_rate = raw.num("kp_rate");
    if (raw.has("ki_rate")) gains.ki_rate = raw.num("ki_rate");
    if (raw.has("rate_cmd_limit")) gains.rate_cmd_limit = raw.num("rate_cmd_limit");
    if (raw.has("integrator_limit")) gains.integrator_limit = raw.num("integrator_limit");
    gains.torque_limit = plant.torque_limit;

    if (raw.has("meas_noise_std")) exp.noise.meas_std = raw.num("meas_noise_std");
    if (raw.has("dist_noise_std")) exp.noise.dist_std = raw.num("dist_noise_std");

    if (raw.has("band_min")) setup.band.omega_min = raw.num("band_min");
    if (raw.has("band_max")) setup.band.omega_max = raw.num("band_max");
    const double amplitude =
        raw.has("prbs_amplitude") ? raw.num("prbs_amplitude") : 0.1 * plant.torque_limit;
    exp.prbs = signals::design_prbs_for_band(setup.band, exp.dt, amplitude);
    if (raw.has("prbs_order")) {
        exp.prbs.order = raw.integer("prbs_order");
        exp.prbs.taps = signals::maximal_taps(exp.prbs.order);
        exp.prbs.seed = (1u << exp.prbs.order) - 1u;
    }
    if (raw.has("prbs_bit_interval_s"))
        exp.prbs.bit_interval_s = raw.num("prbs_bit_interval_s");
    if (raw.has("prbs_seed"))
        exp.prbs.seed = static_cast<std::uint32_t>(raw.u64("prbs_seed"));

    setup.delays = {raw.integer("na"), raw.integer("nb")};
    const std::string arch = raw.str("arch");
    if (arch == "sigmoid") {
        const int hidden = raw.has("hidden") ? raw.integer("hidden") : 30;
        const auto act = raw.has("act") ? narx::activation_from_string(raw.str("act"))
                                        : narx::Activation::Logistic;
        setup.arch = narx::Architecture::sigmoid_single(hidden, act);
    } else if (arch == "ffnn") {
        const int h1 = raw.has("hidden1") ? raw.integer("hidden1") : 10;
        const int h2 = raw.has("hidden2") ? raw.integer("hidden2") : 20;
        const auto act1 = raw.has("act") ? narx::activation_from_string(raw.str("act"))
                                         : narx::Activation::Tanh;
        const auto act2 = raw.has("act2") ? narx::activation_from_string(raw.str("act2"))
                                          : narx::Activation::RadialBasis;
        setup.arch = narx::Architecture::feedforward_two(h1, h2, act1, act2);
    } else if (arch == "cascade") {
        const int hidden = raw.has("hidden") ? raw.integer("hidden") : 20;
        const auto act = raw.has("act") ? narx::activation_from_string(raw.str("act"))
                                        : narx::Activation::Tanh;
        setup.arch = narx::Architecture::cascade_forward(hidden, act);
    } else {
        throw ConfigError("line " + std::to_string(raw.kv.at("arch").second) +
                          ": unknown arch '" + arch + "' (expected sigmoid|ffnn|cascade)");
    }

    auto& tr = setup.training;
    if (raw.has("algorithm")) tr.algorithm = train::algorithm_from_string(raw.str("algorithm"));
    if (raw.has("max_epochs")) tr.max_epochs = raw.integer("max_epochs");
    if (raw.has("patience")) tr.patience = raw.integer("patience");
    if (raw.has("lm_lambda0")) tr.lm_lambda0 = raw.num("lm_lambda0");
    if (raw.has("lm_lambda_factor")) tr.lm_lambda_factor = raw.num("lm_lambda_factor");
    if (raw.has("learning_rate")) tr.learning_rate = raw.num("learning_rate");

    setup.apply_seed(raw.has("seed") ? raw.u64("seed") : 42);
    setup.config_digest = [&] {
        std::ostringstream os;
        os << std::hex << io::fnv1a64(text);
        return os.str();
    }();

    setup.experiment.validate();
    setup.training.validate();
    setup.delays.validate();
    return setup;
}

ExperimentSetup parse_config_file(const std::filesystem::path& path) {
    return parse_config_text(io::read_file(path), path.string());
}

std::string default_config_text() {
    return R"(# narx-sysid experiment configuration
axis = roll
duration_s = 123.0
dt = 0.004
seed = 42
split_fraction = 0.7

# plant
mass = 1.05
ix = 0.0095
iy = 0.0095
iz = 0.0186
torque_limit = 0.5
thrust_limit = 30.0
motor_tau_s = 0.02
gravity = 9.81

# cascade loop gains
kp_angle = 4.0
kp_rate = 0.10
ki_rate = 0.05
rate_cmd_limit = 4.0
integrator_limit = 0.25

# noise
meas_noise_std = 0.01
dist_noise_std = 0.0

# excitation band, rad/s
band_min = 0.1
band_max = 20.0

# estimator
arch = sigmoid
na = 15
nb = 7
hidden = 30

# training
algorithm = lm
max_epochs = 200
patience = 6
)";
}

} // namespace nsid::config
