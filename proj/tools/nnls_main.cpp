// nnls command-line driver: closed-form tabulation, single runs, named
// experiments, parameter sweeps, and the acceptance suite.
//
// Exit codes: 0 success (pass/completed/informational), 1 experiment or
// criterion failure (or a flagged run), 2 usage/config errors.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "nnls/acceptance.hpp"
#include "nnls/analytic.hpp"
#include "nnls/experiments.hpp"
#include "nnls/integrator.hpp"
#include "nnls/io.hpp"

namespace {

using namespace nnls;

struct Range {
    double start = 0.0, stop = 0.0, step = 0.0;
};

Range parse_range(const std::string& s) {
    Range r;
    char c1 = 0, c2 = 0;
    std::istringstream ss(s);
    if (!(ss >> r.start >> c1 >> r.stop >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
        !(r.step > 0.0) || r.stop < r.start)
        throw ConfigError("bad range '" + s + "', expected start:stop:step");
    return r;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad numeric list element '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty numeric list");
    return out;
}

std::string default_out_dir() {
    if (const char* env = std::getenv(kOutputDirEnvVar); env != nullptr && *env != '\0')
        return env;
    return ".";
}

SolutionSpec spec_from_params(const std::string& kind,
                              const std::map<std::string, double>& p) {
    auto need = [&](const char* k) {
        auto it = p.find(k);
        if (it == p.end())
            throw ConfigError("initial '" + kind + "' requires parameter '" + k + "'");
        return it->second;
    };
    if (kind == "zero") return ZeroData{};
    if (kind == "soliton") return SolitonParams{need("omega")};
    if (kind == "one_param") return OneParamParams{need("alpha")};
    if (kind == "two_param") return TwoSolitonParams{need("alpha"), need("beta")};
    if (kind == "perturbed_soliton")
        return PerturbedSolitonParams{need("omega"), need("delta")};
    throw ConfigError("unknown initial-data kind '" + kind + "'");
}

void print_report(const ExperimentReport& rep, std::ostream& os) {
    os << rep.name << ": verdict=" << to_string(rep.verdict) << '\n';
    for (const auto& [k, v] : rep.metrics) os << "  " << k << " = " << format_double(v) << '\n';
}

// ---------------------------------------------------------------- exact ---

int cmd_exact(const std::string& kind, const std::map<std::string, double>& params, double t,
              double x, const std::string& x_range, const std::string& t_range,
              const std::string& out_path) {
    const SolutionSpec spec = spec_from_params(kind, params);
    if (x_range.empty() == t_range.empty())
        throw ConfigError("exact: provide exactly one of --x-range or --t-range");

    std::ostringstream csv;
    if (!x_range.empty()) {
        const Range r = parse_range(x_range);
        csv << "x,re_u,im_u,abs_u\n";
        for (double xi = r.start; xi <= r.stop + 0.5 * r.step; xi += r.step) {
            const Complex u = eval_solution(spec, t, xi);
            csv << format_double(xi) << ',' << format_double(u.real()) << ','
                << format_double(u.imag()) << ',' << format_double(std::abs(u)) << '\n';
        }
    } else {
        const Range r = parse_range(t_range);
        csv << "t,re_u,im_u,abs_u\n";
        for (double ti = r.start; ti <= r.stop + 0.5 * r.step; ti += r.step) {
            const Complex u = eval_solution(spec, ti, x);
            csv << format_double(ti) << ',' << format_double(u.real()) << ','
                << format_double(u.imag()) << ',' << format_double(std::abs(u)) << '\n';
        }
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << csv.str();
    }
    return 0;
}

// ------------------------------------------------------------- simulate ---

int cmd_simulate(const std::string& config_path,
                 const std::map<std::string, std::string>& overrides) {
    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config: " + config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    RunConfig cfg = parse_config(text, overrides);
    if (!cfg.experiment.empty())
        throw ConfigError("config names an experiment; use the 'experiment' subcommand");

    double l = cfg.grid_l;
    if (cfg.grid_l_auto) l = resolve_auto_length(cfg);
    const GridPtr grid = make_grid(cfg.grid_n, l);
    const SpectralField u0 = cfg.samples_file.empty()
                                 ? sample_exact(cfg.initial, 0.0, grid)
                                 : read_samples_file(cfg.samples_file, grid);

    const TrajectoryRecord rec = run(u0, cfg.t_end, cfg.stepper, cfg.equation);

    std::filesystem::create_directories(cfg.output_dir);
    const std::string csv_path = cfg.output_dir + "/timeseries.csv";
    write_timeseries(rec, csv_path);

    std::cout << "equation: " << (cfg.equation == SignFlag::focusing ? "focusing" : "defocusing")
              << "\ngrid: N=" << grid->num_points() << " L=" << format_double(l)
              << "\ntermination: " << to_string(rec.termination)
              << "\nfinal_time: " << format_double(rec.final_time)
              << "\ncharge_drift: " << format_double(rec.charge_drift)
              << "\nenergy_drift: " << format_double(rec.energy_drift) << '\n';
    if (rec.blowup_estimate.has_value())
        std::cout << "blowup_estimate: " << format_double(rec.blowup_estimate->time) << " +- "
                  << format_double(rec.blowup_estimate->uncertainty) << '\n';
    std::cout << "timeseries: " << csv_path << '\n';
    if (!rec.conservation_ok)
        std::cerr << "warning: charge drift " << format_double(rec.charge_drift)
                  << " exceeds conservation_tol "
                  << format_double(cfg.stepper.conservation_tol) << '\n';
    return (rec.termination == Termination::nonfinite_abort || !rec.conservation_ok) ? 1 : 0;
}

// ----------------------------------------------------------- experiment ---

ExperimentReport dispatch_experiment(const std::string& name,
                                     const std::map<std::string, double>& p,
                                     const std::vector<double>& deltas,
                                     const std::vector<double>& alphas,
                                     const std::vector<int>& ks, const std::string& initial_kind,
                                     const StepperConfig& cfg, const ExperimentEnv& env) {
    auto get = [&](const char* k, double dflt) {
        auto it = p.find(k);
        return it == p.end() ? dflt : it->second;
    };
    if (name == "small_data_blowup")
        return exp_small_data_blowup(get("alpha", 0.75), cfg, env);
    if (name == "soliton_instability")
        return exp_soliton_instability(get("omega", 1.0), get("delta", 0.5), cfg, env);
    if (name == "even_equivalence")
        return exp_even_equivalence(get("omega", 1.0), get("t_end", 1.0), cfg, env);
    if (name == "defocusing_probe") {
        std::map<std::string, double> ip = p;
        if (!ip.count("alpha")) ip["alpha"] = 0.75;
        if (!ip.count("omega")) ip["omega"] = 1.0;
        if (!ip.count("delta")) ip["delta"] = 0.5;
        if (!ip.count("beta")) ip["beta"] = 0.5;
        return exp_defocusing_probe(spec_from_params(initial_kind, ip), get("t_end", 3.0), cfg,
                                    env);
    }
    if (name == "h1_convergence") return exp_h1_convergence(get("omega", 1.0), deltas, env);
    if (name == "norm_scaling") return exp_norm_scaling(alphas, ks, env);
    if (name == "offcenter_boundedness")
        return exp_offcenter_boundedness(TwoSolitonParams{get("alpha", 1.0), get("beta", 0.5)},
                                         get("x0", 1.0), env);
    throw ConfigError(
        "unknown experiment '" + name +
        "' (known: small_data_blowup, soliton_instability, even_equivalence, "
        "defocusing_probe, h1_convergence, norm_scaling, offcenter_boundedness)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral laboratory for the nonlocal nonlinear Schroedinger equation "
                 "i u_t + u_xx + u^2(x) conj(u)(-x) = 0"};
    app.require_subcommand(1);

    // ---- shared option state
    std::string kind = "soliton", initial_kind = "one_param";
    std::map<std::string, double> params;
    double opt_t = 0.0, opt_x = 0.0;
    std::string x_range, t_range, out_path, config_path;
    std::string deltas_csv = "0.5,0.25,0.125,0.0625,0.03125";
    std::string alphas_csv = "0.25,0.35,0.5,0.7,1.0";
    std::string ks_csv = "0,1,2,3";
    std::string out_dir = default_out_dir();
    std::string experiment_name;
    std::vector<std::string> sweep_axes;
    std::vector<int> criteria;
    int jobs = 1;
    int grid_n = 0;
    double grid_l = 0.0;
    StepperConfig stepper;

    auto add_param_opts = [&](CLI::App* sub) {
        for (const char* key : {"alpha", "beta", "omega", "delta", "x0", "t_end"}) {
            std::string flag = "--" + std::string(key);
            for (auto& c : flag)
                if (c == '_') c = '-';
            sub->add_option_function<double>(
                flag, [&params, key](double v) { params[key] = v; },
                std::string("parameter ") + key);
        }
    };
    auto add_stepper_opts = [&](CLI::App* sub) {
        sub->add_option("--grid-n", grid_n, "grid points (power of two)");
        sub->add_option("--grid-l", grid_l, "domain half-length (0 = auto)");
        sub->add_option_function<std::string>(
            "--scheme",
            [&](const std::string& s) {
                if (s == "strang_pair_rk4")
                    stepper.scheme = Scheme::strang_pair_rk4;
                else if (s == "if_rk4")
                    stepper.scheme = Scheme::if_rk4;
                else
                    throw CLI::ValidationError("--scheme", "must be strang_pair_rk4 or if_rk4");
            },
            "time-stepping scheme");
        sub->add_option("--dt0", stepper.dt0, "base time step");
        sub->add_option("--dt-min", stepper.dt_min, "adaptive floor");
        sub->add_flag("--no-adaptive", "disable adaptive stepping");
        sub->add_option("--amplitude-threshold", stepper.amplitude_threshold,
                        "blow-up detection multiple of the initial sup-norm");
        sub->add_option("--conservation-tol", stepper.conservation_tol,
                        "relative Re Q drift tolerance");
        sub->add_flag("--no-dealias", "disable two-thirds dealiasing");
        sub->add_option("--monitor-stride", stepper.monitor_stride, "steps between monitors");
    };

    // ---- exact
    CLI::App* exact = app.add_subcommand("exact", "tabulate a closed-form catalog solution");
    exact->add_option("--kind", kind,
                      "soliton | one_param | two_param | perturbed_soliton | zero")
        ->required();
    add_param_opts(exact);
    exact->add_option("--t", opt_t, "fixed time (with --x-range)");
    exact->add_option("--x", opt_x, "fixed position (with --t-range)");
    exact->add_option("--x-range", x_range, "start:stop:step over x");
    exact->add_option("--t-range", t_range, "start:stop:step over t");
    exact->add_option("--out", out_path, "output CSV path (default stdout)");

    // ---- simulate
    CLI::App* simulate = app.add_subcommand("simulate", "run one configured integration");
    simulate->add_option("--config", config_path, "flat key = value run configuration");
    std::map<std::string, std::string> sim_overrides;
    for (const char* key :
         {"equation", "initial", "omega", "delta", "alpha", "beta", "samples_file", "grid_n",
          "grid_l", "scheme", "dt0", "adaptive", "dt_min", "amplitude_threshold",
          "conservation_tol", "dealias", "monitor_stride", "t_end", "output_dir"}) {
        std::string flag = "--" + std::string(key);
        for (auto& c : flag)
            if (c == '_') c = '-';
        simulate->add_option_function<std::string>(
            flag, [&sim_overrides, key](const std::string& v) { sim_overrides[key] = v; },
            std::string("override config key ") + key);
    }

    // ---- experiment
    CLI::App* experiment = app.add_subcommand("experiment", "run a named experiment");
    experiment->add_option("name", experiment_name, "experiment name")->required();
    add_param_opts(experiment);
    add_stepper_opts(experiment);
    experiment->add_option("--initial", initial_kind, "initial-data kind (defocusing probe)");
    experiment->add_option("--deltas", deltas_csv, "comma list (h1_convergence)");
    experiment->add_option("--alphas", alphas_csv, "comma list (norm_scaling)");
    experiment->add_option("--ks", ks_csv, "comma list of derivative orders (norm_scaling)");
    experiment->add_option("--out-dir", out_dir, "report/artifact directory");

    // ---- sweep
    CLI::App* sweep = app.add_subcommand("sweep", "cartesian parameter sweep of an experiment");
    sweep->add_option("--experiment", experiment_name, "experiment name")->required();
    sweep->add_option("--param", sweep_axes, "axis as key=v1,v2,... (repeatable)");
    sweep->add_option("--jobs", jobs, "concurrent jobs")->check(CLI::PositiveNumber);
    add_param_opts(sweep);
    add_stepper_opts(sweep);
    sweep->add_option("--initial", initial_kind, "initial-data kind (defocusing probe)");
    sweep->add_option("--out-dir", out_dir, "sweep output root");

    // ---- verify
    CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--criterion", criteria, "criterion id (1..11, repeatable; default all)");
    std::string verify_out;
    verify->add_option("--out-dir", verify_out, "write reports/artifacts beneath this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    // flags without arguments
    if (experiment->count("--no-adaptive") || sweep->count("--no-adaptive"))
        stepper.adaptive = false;
    if (experiment->count("--no-dealias") || sweep->count("--no-dealias"))
        stepper.dealias = false;

    try {
        if (app.got_subcommand(exact))
            return cmd_exact(kind, params, opt_t, opt_x, x_range, t_range, out_path);

        if (app.got_subcommand(simulate)) return cmd_simulate(config_path, sim_overrides);

        if (app.got_subcommand(experiment)) {
            ExperimentEnv env;
            env.grid_n = grid_n;
            env.grid_l = grid_l;
            env.out_dir = out_dir;
            std::vector<int> ks;
            for (double v : parse_double_list(ks_csv)) ks.push_back(static_cast<int>(v));
            const ExperimentReport rep = dispatch_experiment(
                experiment_name, params, parse_double_list(deltas_csv),
                parse_double_list(alphas_csv), ks, initial_kind, stepper, env);
            std::filesystem::create_directories(out_dir);
            const std::string report_path = out_dir + "/report_" + rep.name + ".json";
            write_report(rep, report_path);
            print_report(rep, std::cout);
            std::cout << "report: " << report_path << '\n';
            return rep.verdict == Verdict::fail ? 1 : 0;
        }

        if (app.got_subcommand(sweep)) {
            // cartesian product of the requested axes over the base params
            std::vector<std::pair<std::string, std::vector<double>>> axes;
            for (const std::string& axis : sweep_axes) {
                const auto eq = axis.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("sweep axis '" + axis + "' must be key=v1,v2,...");
                axes.emplace_back(axis.substr(0, eq), parse_double_list(axis.substr(eq + 1)));
            }
            std::vector<std::map<std::string, double>> combos{params};
            for (const auto& [key, values] : axes) {
                std::vector<std::map<std::string, double>> next;
                for (const auto& base : combos)
                    for (double v : values) {
                        auto c = base;
                        c[key] = v;
                        next.push_back(c);
                    }
                combos = std::move(next);
            }

            std::vector<int> ks;
            for (double v : parse_double_list(ks_csv)) ks.push_back(static_cast<int>(v));
            const std::string root = out_dir + "/sweep_" + experiment_name;
            std::vector<ExperimentReport> reports(combos.size());
            std::vector<std::string> errors(combos.size());
            std::atomic<size_t> cursor{0};
            auto worker = [&]() {
                while (true) {
                    const size_t i = cursor.fetch_add(1);
                    if (i >= combos.size()) break;
                    ExperimentEnv env;
                    env.grid_n = grid_n;
                    env.grid_l = grid_l;
                    env.out_dir = root + "/job_" + std::to_string(i);
                    try {
                        reports[i] = dispatch_experiment(
                            experiment_name, combos[i], parse_double_list(deltas_csv),
                            parse_double_list(alphas_csv), ks, initial_kind, stepper, env);
                        std::filesystem::create_directories(env.out_dir);
                        write_report(reports[i], env.out_dir + "/report.json");
                    } catch (const std::exception& e) {
                        errors[i] = e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(combos.size())));
            for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();

            bool any_fail = false;
            for (size_t i = 0; i < combos.size(); ++i) {
                std::cout << "job_" << i << ":";
                for (const auto& [k, v] : combos[i]) std::cout << ' ' << k << '=' << v;
                if (!errors[i].empty()) {
                    std::cout << " -> error: " << errors[i] << '\n';
                    any_fail = true;
                } else {
                    std::cout << " -> " << to_string(reports[i].verdict) << '\n';
                    any_fail |= reports[i].verdict == Verdict::fail;
                }
            }
            return any_fail ? 1 : 0;
        }

        if (app.got_subcommand(verify)) {
            const auto results = run_acceptance(criteria, verify_out);
            print_acceptance(results, std::cout);
            return count_failures(results) == 0 ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const PoleProximityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
