#include "nnls/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace nnls {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_param(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out.good()) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

[[noreturn]] void fail_at(int line, const std::string& msg) {
    if (line <= 0) throw ConfigError("config flag: " + msg);
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double_at(const std::string& v, int line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
        fail_at(line, "expected a finite number, got '" + v + "'");
    return x;
}

int parse_int_at(const std::string& v, int line) {
    const double x = parse_double_at(v, line);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x) fail_at(line, "expected an integer, got '" + v + "'");
    return i;
}

bool parse_bool_at(const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail_at(line, "expected true or false, got '" + v + "'");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

const std::set<std::string> kKnownKeys = {
    "equation", "initial", "omega", "delta", "alpha", "beta", "x0", "samples_file",
    "grid_n", "grid_l", "scheme", "dt0", "adaptive", "dt_min", "amplitude_threshold",
    "conservation_tol", "dealias", "monitor_stride", "t_end", "output_dir", "experiment"};

}  // namespace

RunConfig parse_config(const std::string& text,
                       const std::map<std::string, std::string>& overrides) {
    RunConfig cfg;
    cfg.stepper = StepperConfig{};

    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail_at(lineno, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail_at(lineno, "empty key");
        if (value.empty()) fail_at(lineno, "empty value for key '" + key + "'");
        if (kKnownKeys.find(key) == kKnownKeys.end())
            fail_at(lineno, "unknown key '" + key + "'");
        if (values.count(key)) fail_at(lineno, "duplicate key '" + key + "'");
        values[key] = value;
        lines[key] = lineno;
    }

    for (const auto& [key, value] : overrides) {
        if (kKnownKeys.find(key) == kKnownKeys.end())
            throw ConfigError("config flag: unknown key '" + key + "'");
        values[key] = value;
        lines[key] = 0;  // flag, not a file line
    }

    auto has = [&](const char* k) { return values.count(k) > 0; };
    auto at = [&](const char* k) { return lines.at(k); };

    if (has("equation")) {
        const std::string& v = values["equation"];
        if (v == "focusing")
            cfg.equation = SignFlag::focusing;
        else if (v == "defocusing")
            cfg.equation = SignFlag::defocusing;
        else
            fail_at(at("equation"), "equation must be focusing or defocusing");
    }

    for (const char* k : {"omega", "delta", "alpha", "beta", "x0"})
        if (has(k)) cfg.numeric_params[k] = parse_double_at(values[k], at(k));

    auto need_param = [&](const char* k, const char* kind) -> double {
        if (!cfg.numeric_params.count(k))
            fail_at(at("initial"), std::string("initial = ") + kind + " requires key '" + k + "'");
        return cfg.numeric_params[k];
    };

    if (has("samples_file")) cfg.samples_file = values["samples_file"];

    if (has("initial")) {
        if (!cfg.samples_file.empty())
            fail_at(at("initial"), "conflicting initial data: both 'initial' and 'samples_file'");
        const std::string& kind = values["initial"];
        if (kind == "zero") {
            cfg.initial = ZeroData{};
        } else if (kind == "soliton") {
            cfg.initial = SolitonParams{need_param("omega", "soliton")};
        } else if (kind == "one_param") {
            cfg.initial = OneParamParams{need_param("alpha", "one_param")};
        } else if (kind == "two_param") {
            cfg.initial =
                TwoSolitonParams{need_param("alpha", "two_param"), need_param("beta", "two_param")};
        } else if (kind == "perturbed_soliton") {
            cfg.initial = PerturbedSolitonParams{need_param("omega", "perturbed_soliton"),
                                                 need_param("delta", "perturbed_soliton")};
        } else {
            fail_at(at("initial"), "unknown initial-data kind '" + kind + "'");
        }
        cfg.initial_set = true;
    }

    if (has("experiment")) cfg.experiment = values["experiment"];
    if (cfg.experiment.empty() && !cfg.initial_set && cfg.samples_file.empty())
        throw ConfigError("config: one initial-data source is required "
                          "(initial = <kind> or samples_file = <path>)");

    if (has("grid_n")) {
        cfg.grid_n = parse_int_at(values["grid_n"], at("grid_n"));
        if (!is_power_of_two(cfg.grid_n) || cfg.grid_n < 8)
            fail_at(at("grid_n"), "grid_n must be a power of two, >= 8");
    }
    if (has("grid_l")) {
        if (values["grid_l"] == "auto") {
            cfg.grid_l_auto = true;
        } else {
            cfg.grid_l = parse_double_at(values["grid_l"], at("grid_l"));
            cfg.grid_l_auto = false;
            if (!(cfg.grid_l > 0.0)) fail_at(at("grid_l"), "grid_l must be positive");
        }
    }

    if (has("scheme")) {
        const std::string& v = values["scheme"];
        if (v == "strang_pair_rk4")
            cfg.stepper.scheme = Scheme::strang_pair_rk4;
        else if (v == "if_rk4")
            cfg.stepper.scheme = Scheme::if_rk4;
        else
            fail_at(at("scheme"), "scheme must be strang_pair_rk4 or if_rk4");
    }
    if (has("dt0")) {
        cfg.stepper.dt0 = parse_double_at(values["dt0"], at("dt0"));
        if (!(cfg.stepper.dt0 > 0.0)) fail_at(at("dt0"), "dt0 must be positive");
    }
    if (has("adaptive")) cfg.stepper.adaptive = parse_bool_at(values["adaptive"], at("adaptive"));
    if (has("dt_min")) {
        cfg.stepper.dt_min = parse_double_at(values["dt_min"], at("dt_min"));
        if (!(cfg.stepper.dt_min > 0.0)) fail_at(at("dt_min"), "dt_min must be positive");
    }
    if (has("amplitude_threshold")) {
        cfg.stepper.amplitude_threshold =
            parse_double_at(values["amplitude_threshold"], at("amplitude_threshold"));
        if (!(cfg.stepper.amplitude_threshold > 1.0))
            fail_at(at("amplitude_threshold"), "amplitude_threshold must exceed 1");
    }
    if (has("conservation_tol")) {
        cfg.stepper.conservation_tol =
            parse_double_at(values["conservation_tol"], at("conservation_tol"));
        if (!(cfg.stepper.conservation_tol > 0.0))
            fail_at(at("conservation_tol"), "conservation_tol must be positive");
    }
    if (has("dealias")) cfg.stepper.dealias = parse_bool_at(values["dealias"], at("dealias"));
    if (has("monitor_stride")) {
        cfg.stepper.monitor_stride = parse_int_at(values["monitor_stride"], at("monitor_stride"));
        if (cfg.stepper.monitor_stride < 1)
            fail_at(at("monitor_stride"), "monitor_stride must be >= 1");
    }
    if (cfg.stepper.adaptive && !(cfg.stepper.dt_min < cfg.stepper.dt0)) {
        const int line = has("dt_min") ? at("dt_min") : (has("dt0") ? at("dt0") : 0);
        fail_at(line, "dt_min must be below dt0");
    }

    if (has("t_end")) cfg.t_end = parse_double_at(values["t_end"], at("t_end"));
    if (has("output_dir")) {
        cfg.output_dir = values["output_dir"];
    } else if (const char* env = std::getenv(kOutputDirEnvVar); env != nullptr && *env != '\0') {
        cfg.output_dir = env;
    } else {
        cfg.output_dir = ".";
    }

    if (cfg.grid_l_auto && cfg.initial_set) cfg.grid_l = resolve_auto_length(cfg);
    return cfg;
}

double resolve_auto_length(const RunConfig& cfg) {
    if (!cfg.initial_set)
        throw ConfigError("grid_l = auto requires catalog initial data (samples files need "
                          "an explicit grid_l)");
    return std::min(40.0 / decay_rate(cfg.initial), 160.0);
}

SpectralField read_samples_file(const std::string& path, const GridPtr& grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open samples file: " + path);
    SpectralField f = zero_field(grid, 0.0);
    std::string line;
    int row = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (row >= grid->num_points())
            throw std::runtime_error(path + ": more samples than grid points");
        std::istringstream ls(s);
        double re = 0.0, im = 0.0;
        if (!(ls >> re >> im))
            throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                     ": expected 're im'");
        if (!std::isfinite(re) || !std::isfinite(im))
            throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                     ": non-finite sample");
        f.samples[static_cast<size_t>(row++)] = Complex(re, im);
    }
    if (row != grid->num_points())
        throw std::runtime_error(path + ": expected " + std::to_string(grid->num_points()) +
                                 " samples, got " + std::to_string(row));
    return f;
}

void write_timeseries(const TrajectoryRecord& traj, const std::string& path) {
    std::ostringstream out;
    out << "t,sup_norm,re_Q,im_Q,re_E,im_E,l2,h1\n";
    for (const auto& s : traj.samples) {
        out << format_double(s.time) << ',' << format_double(s.sup_norm) << ','
            << format_double(s.Q.real()) << ',' << format_double(s.Q.imag()) << ','
            << format_double(s.E.real()) << ',' << format_double(s.E.imag()) << ','
            << format_double(s.l2) << ',' << format_double(s.h1) << '\n';
    }
    out << "# termination=" << to_string(traj.termination) << '\n';
    out << "# final_time=" << format_double(traj.final_time) << '\n';
    if (traj.blowup_estimate.has_value()) {
        out << "# blowup_estimate=" << format_double(traj.blowup_estimate->time) << '\n';
        out << "# blowup_uncertainty=" << format_double(traj.blowup_estimate->uncertainty)
            << '\n';
    }
    atomic_write(path, out.str());
}

namespace {

ordered_json pairs_to_json(const std::vector<std::pair<std::string, double>>& pairs) {
    ordered_json obj = ordered_json::object();
    for (const auto& [k, v] : pairs) {
        if (!std::isfinite(v))
            throw std::runtime_error("report value for '" + k + "' is not finite");
        obj[k] = v;
    }
    return obj;
}

ExperimentReport report_from_json(const ordered_json& j) {
    static const std::vector<std::string> expected = {
        "name", "inputs", "settings", "metrics", "tolerances", "verdict", "artifacts",
        "version"};
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    if (keys != expected) throw std::runtime_error("report schema violation: bad key set/order");

    ExperimentReport rep;
    rep.name = j.at("name").get<std::string>();
    for (auto it = j.at("inputs").begin(); it != j.at("inputs").end(); ++it)
        rep.put_input(it.key(), it.value().get<double>());
    for (auto it = j.at("settings").begin(); it != j.at("settings").end(); ++it)
        rep.put_setting(it.key(), it.value().get<std::string>());
    for (auto it = j.at("metrics").begin(); it != j.at("metrics").end(); ++it)
        rep.put_metric(it.key(), it.value().get<double>());
    for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it)
        rep.put_tolerance(it.key(), it.value().get<double>());
    const std::string verdict = j.at("verdict").get<std::string>();
    if (verdict == "pass")
        rep.verdict = Verdict::pass;
    else if (verdict == "fail")
        rep.verdict = Verdict::fail;
    else if (verdict == "informational")
        rep.verdict = Verdict::informational;
    else
        throw std::runtime_error("report schema violation: verdict '" + verdict + "'");
    for (const auto& a : j.at("artifacts")) rep.artifacts.push_back(a.get<std::string>());
    if (j.at("version").get<std::string>() != kToolVersion)
        throw std::runtime_error("report version mismatch");
    return rep;
}

}  // namespace

void write_report(const ExperimentReport& rep, const std::string& path) {
    ordered_json j;
    j["name"] = rep.name;
    j["inputs"] = pairs_to_json(rep.inputs);
    ordered_json settings = ordered_json::object();
    for (const auto& [k, v] : rep.settings) settings[k] = v;
    j["settings"] = settings;
    j["metrics"] = pairs_to_json(rep.metrics);
    j["tolerances"] = pairs_to_json(rep.tolerances);
    j["verdict"] = to_string(rep.verdict);
    j["artifacts"] = rep.artifacts;
    j["version"] = kToolVersion;

    atomic_write(path, j.dump(2) + "\n");

    // schema self-check: the emitted document must parse back to the input
    if (read_report(path) != rep)
        throw std::runtime_error("report round-trip mismatch for " + path);
}

ExperimentReport read_report(const std::string& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("report parse error in " + path + ": " + e.what());
    }
    return report_from_json(j);
}

}  // namespace nnls
