#include "nsid/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nsid/errors.hpp"

namespace nsid::io {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok)
        out.push_back(tok);
    return out;
}

std::string header_value(const std::string& line, const std::string& key, int line_no) {
    if (line.rfind(key + "=", 0) != 0)
        throw ConfigError("model file line " + std::to_string(line_no) + ": expected '" + key +
                          "='");
    return line.substr(key.size() + 1);
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " from '" + s + "'");
    }
    if (pos != s.size())
        throw ConfigError("trailing characters parsing " + what + " from '" + s + "'");
    return v;
}

} // namespace

std::string format_sig(double v, int sig_digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", sig_digits, v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string dataset_csv(const control::Dataset& data) {
    std::string out = "k,t_s,u,y\n";
    for (std::size_t k = 0; k < data.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_sig(static_cast<double>(k) * data.u.dt, 9);
        out += ',';
        out += format_sig(data.u.samples[k], 9);
        out += ',';
        out += format_sig(data.y.samples[k], 9);
        out += '\n';
    }
    return out;
}

void write_dataset(const std::filesystem::path& csv_path, const control::Dataset& data,
                   const DatasetMeta& meta) {
    write_file(csv_path, dataset_csv(data));
    std::ostringstream m;
    m << "axis=" << control::to_string(meta.axis) << '\n'
      << "dt=" << format_sig(meta.dt, 17) << '\n'
      << "split_index=" << meta.split_index << '\n'
      << "seed=" << meta.seed << '\n'
      << "config_digest=" << meta.config_digest << '\n';
    write_file(csv_path.string() + ".meta", m.str());
}

control::Dataset read_dataset(const std::filesystem::path& csv_path, DatasetMeta* meta_out) {
    const std::string text = read_file(csv_path);
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "k,t_s,u,y")
        throw ConfigError(csv_path.string() + " row 1: expected header 'k,t_s,u,y'");

    control::Dataset ds;
    int row = 1;
    double dt_guess = 0.0;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string k_s, t_s, u_s, y_s;
        if (!std::getline(ls, k_s, ',') || !std::getline(ls, t_s, ',') ||
            !std::getline(ls, u_s, ',') || !std::getline(ls, y_s))
            throw ConfigError(csv_path.string() + " row " + std::to_string(row) +
                              ": expected 4 comma-separated fields");
        const std::string where = csv_path.string() + " row " + std::to_string(row);
        const double t = parse_double(t_s, where + " t_s");
        ds.u.samples.push_back(parse_double(u_s, where + " u"));
        ds.y.samples.push_back(parse_double(y_s, where + " y"));
        if (ds.u.samples.size() == 2)
            dt_guess = t;
    }

    DatasetMeta meta;
    const std::filesystem::path meta_path = csv_path.string() + ".meta";
    if (std::filesystem::exists(meta_path)) {
        std::istringstream ms(read_file(meta_path));
        int ln = 0;
        while (std::getline(ms, line)) {
            ++ln;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
            if (key == "axis")
                meta.axis = control::axis_from_string(val);
            else if (key == "dt")
                meta.dt = parse_double(val, "meta dt");
            else if (key == "split_index")
                meta.split_index = static_cast<std::size_t>(std::stoull(val));
            else if (key == "seed")
                meta.seed = std::stoull(val);
            else if (key == "config_digest")
                meta.config_digest = val;
            else
                throw ConfigError(meta_path.string() + " line " + std::to_string(ln) +
                                  ": unknown key '" + key + "'");
        }
        ds.u.dt = ds.y.dt = meta.dt;
        ds.axis = meta.axis;
        ds.split_index = meta.split_index;
    } else {
        // no sidecar: fall back to the time column and a 70/30 split
        ds.u.dt = ds.y.dt = dt_guess;
        ds.split_index = static_cast<std::size_t>(0.7 * ds.u.samples.size());
        meta.dt = dt_guess;
        meta.split_index = ds.split_index;
    }
    ds.validate();
    if (meta_out)
        *meta_out = meta;
    return ds;
}

std::string model_text(const narx::NarxModel& m) {
    m.validate();
    std::ostringstream os;
    std::string arch_tag;
    switch (m.arch.kind) {
    case narx::ArchKind::SigmoidSingle: arch_tag = "sigmoid"; break;
    case narx::ArchKind::FeedForwardTwo: arch_tag = "ffnn"; break;
    case narx::ArchKind::CascadeForward: arch_tag = "cascade"; break;
    }
    os << "arch=" << arch_tag << '\n';
    os << "na=" << m.delays.na << '\n';
    os << "nb=" << m.delays.nb << '\n';

    std::vector<int> layers;
    std::vector<narx::Activation> acts;
    if (m.arch.kind == narx::ArchKind::FeedForwardTwo) {
        layers = {m.arch.h1, m.arch.h2, 1};
        acts = {m.arch.act1, m.arch.act2, narx::Activation::Linear};
    } else {
        layers = {m.arch.h1, 1};
        acts = {m.arch.act1, narx::Activation::Linear};
    }
    os << "layers=";
    for (std::size_t i = 0; i < layers.size(); ++i)
        os << (i ? "," : "") << layers[i];
    os << '\n' << "act=";
    for (std::size_t i = 0; i < acts.size(); ++i)
        os << (i ? "," : "") << narx::to_string(acts[i]);
    os << '\n';
    os << "norm_u=" << format_sig(m.norm.u_mean, 17) << ' ' << format_sig(m.norm.u_std, 17)
       << '\n';
    os << "norm_y=" << format_sig(m.norm.y_mean, 17) << ' ' << format_sig(m.norm.y_std, 17)
       << '\n';

    for (std::size_t i = 0; i < m.W.size(); ++i) {
        os << 'W' << i << ' ' << m.W[i].rows() << ' ' << m.W[i].cols() << '\n';
        for (Eigen::Index r = 0; r < m.W[i].rows(); ++r) {
            for (Eigen::Index c = 0; c < m.W[i].cols(); ++c)
                os << (c ? " " : "") << format_sig(m.W[i](r, c), 17);
            os << '\n';
        }
        os << 'b' << i << ' ' << m.b[i].size() << '\n';
        for (Eigen::Index r = 0; r < m.b[i].size(); ++r)
            os << (r ? " " : "") << format_sig(m.b[i][r], 17);
        os << '\n';
    }
    return os.str();
}

void save_model(const std::filesystem::path& path, const narx::NarxModel& model) {
    write_file(path, model_text(model));
}

narx::NarxModel load_model(const std::filesystem::path& path) {
    std::istringstream is(read_file(path));
    std::string line;
    int ln = 0;
    const auto next_line = [&]() {
        if (!std::getline(is, line))
            throw ConfigError(path.string() + ": truncated model file");
        ++ln;
        return line;
    };

    const std::string arch_tag = header_value(next_line(), "arch", ln);
    const int na = static_cast<int>(parse_double(header_value(next_line(), "na", ln), "na"));
    const int nb = static_cast<int>(parse_double(header_value(next_line(), "nb", ln), "nb"));

    std::vector<int> layers;
    for (std::istringstream ls(header_value(next_line(), "layers", ln)); ls.good();) {
        std::string tok;
        if (std::getline(ls, tok, ','))
            layers.push_back(static_cast<int>(parse_double(tok, "layer size")));
    }
    std::vector<narx::Activation> acts;
    for (std::istringstream ls(header_value(next_line(), "act", ln)); ls.good();) {
        std::string tok;
        if (std::getline(ls, tok, ','))
            acts.push_back(narx::activation_from_string(tok));
    }
    if (layers.size() != acts.size() || layers.empty())
        throw ConfigError(path.string() + ": layers/act lists inconsistent");

    narx::NarxModel m;
    m.delays = {na, nb};
    if (arch_tag == "sigmoid" && layers.size() == 2)
        m.arch = narx::Architecture::sigmoid_single(layers[0], acts[0]);
    else if (arch_tag == "ffnn" && layers.size() == 3)
        m.arch = narx::Architecture::feedforward_two(layers[0], layers[1], acts[0], acts[1]);
    else if (arch_tag == "cascade" && layers.size() == 2)
        m.arch = narx::Architecture::cascade_forward(layers[0], acts[0]);
    else
        throw ConfigError(path.string() + ": unknown architecture tag '" + arch_tag +
                          "' or wrong layer count");

    const auto norm_u = split_ws(header_value(next_line(), "norm_u", ln));
    const auto norm_y = split_ws(header_value(next_line(), "norm_y", ln));
    if (norm_u.size() != 2 || norm_y.size() != 2)
        throw ConfigError(path.string() + ": norm lines must carry mean and std");
    m.norm.u_mean = parse_double(norm_u[0], "u mean");
    m.norm.u_std = parse_double(norm_u[1], "u std");
    m.norm.y_mean = parse_double(norm_y[0], "y mean");
    m.norm.y_std = parse_double(norm_y[1], "y std");

    const std::size_t n_blocks = layers.size();
    for (std::size_t i = 0; i < n_blocks; ++i) {
        auto head = split_ws(next_line());
        if (head.size() != 3 || head[0] != "W" + std::to_string(i))
            throw ConfigError(path.string() + " line " + std::to_string(ln) +
                              ": expected W" + std::to_string(i) + " block header");
        const int rows = std::stoi(head[1]), cols = std::stoi(head[2]);
        Eigen::MatrixXd w(rows, cols);
        for (int r = 0; r < rows; ++r) {
            const auto vals = split_ws(next_line());
            if (static_cast<int>(vals.size()) != cols)
                throw ConfigError(path.string() + " line " + std::to_string(ln) +
                                  ": wrong value count in weight row");
            for (int c = 0; c < cols; ++c)
                w(r, c) = parse_double(vals[c], "weight");
        }
        head = split_ws(next_line());
        if (head.size() != 2 || head[0] != "b" + std::to_string(i))
            throw ConfigError(path.string() + " line " + std::to_string(ln) +
                              ": expected b" + std::to_string(i) + " block header");
        const int size = std::stoi(head[1]);
        const auto vals = split_ws(next_line());
        if (static_cast<int>(vals.size()) != size)
            throw ConfigError(path.string() + " line " + std::to_string(ln) +
                              ": wrong value count in bias row");
        Eigen::VectorXd bias(size);
        for (int r = 0; r < size; ++r)
            bias[r] = parse_double(vals[r], "bias");
        m.W.push_back(std::move(w));
        m.b.push_back(std::move(bias));
    }
    m.validate();
    return m;
}

std::string training_report_csv(const train::TrainingReport& report) {
    std::string out = "epoch,train_mse,val_mse\n";
    for (std::size_t e = 0; e < report.train_mse.size(); ++e) {
        out += std::to_string(e);
        out += ',';
        out += format_sig(report.train_mse[e], 9);
        out += ',';
        out += format_sig(report.val_mse[e], 9);
        out += '\n';
    }
    out += "# best_epoch=" + std::to_string(report.best_epoch) + '\n';
    out += "# best_val_mse=" + format_sig(report.best_val_mse, 17) + '\n';
    out += "# wall_seconds=" + format_sig(report.wall_seconds, 6) + '\n';
    out += "# seed=" + std::to_string(report.seed) + '\n';
    out += "# options_digest=" + report.options_digest + '\n';
    return out;
}

train::TrainingReport read_training_report(const std::filesystem::path& path) {
    std::istringstream is(read_file(path));
    std::string line;
    if (!std::getline(is, line) || line != "epoch,train_mse,val_mse")
        throw ConfigError(path.string() + ": expected training report header");

    train::TrainingReport r;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
            if (key == "best_epoch")
                r.best_epoch = std::stoi(val);
            else if (key == "best_val_mse")
                r.best_val_mse = parse_double(val, "best_val_mse");
            else if (key == "wall_seconds")
                r.wall_seconds = parse_double(val, "wall_seconds");
            else if (key == "seed")
                r.seed = std::stoull(val);
            else if (key == "options_digest")
                r.options_digest = val;
            continue;
        }
        std::istringstream ls(line);
        std::string e_s, t_s, v_s;
        if (!std::getline(ls, e_s, ',') || !std::getline(ls, t_s, ',') || !std::getline(ls, v_s))
            throw ConfigError(path.string() + ": malformed training report row");
        r.train_mse.push_back(parse_double(t_s, "train_mse"));
        r.val_mse.push_back(parse_double(v_s, "val_mse"));
    }
    return r;
}

} // namespace nsid::io
