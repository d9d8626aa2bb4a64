#include "nnls/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "nnls/invariants.hpp"
#include "nnls/io.hpp"

namespace nnls {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::informational: return "informational";
    }
    return "unknown";
}

double ExperimentReport::metric(const std::string& k) const {
    for (const auto& [key, value] : metrics)
        if (key == k) return value;
    throw std::out_of_range("no metric named " + k);
}

bool ExperimentReport::has_metric(const std::string& k) const {
    for (const auto& [key, value] : metrics)
        if (key == k) return true;
    return false;
}

namespace {

constexpr double kDomainCap = 160.0;

double auto_length(double rate) { return std::min(40.0 / rate, kDomainCap); }

GridPtr experiment_grid(const ExperimentEnv& env, int default_n, double default_l) {
    const int n = env.grid_n > 0 ? env.grid_n : default_n;
    const double l = env.grid_l > 0.0 ? env.grid_l : default_l;
    return make_grid(n, l);
}

void put_stepper_settings(ExperimentReport& rep, const GridPtr& grid, const StepperConfig& cfg) {
    rep.put_setting("grid_n", std::to_string(grid->num_points()));
    rep.put_setting("grid_l", format_double(grid->half_length()));
    rep.put_setting("scheme", to_string(cfg.scheme));
    rep.put_setting("dt0", format_double(cfg.dt0));
    rep.put_setting("adaptive", cfg.adaptive ? "true" : "false");
    rep.put_setting("dealias", cfg.dealias ? "true" : "false");
    rep.put_setting("monitor_stride", std::to_string(cfg.monitor_stride));
    rep.put_setting("amplitude_threshold", format_double(cfg.amplitude_threshold));
}

// Run-quality metrics shared by every run-backed experiment; criterion-level
// conservation checks aggregate these across reports.
void put_run_metrics(ExperimentReport& rep, const std::string& prefix,
                     const TrajectoryRecord& rec) {
    rep.put_setting(prefix + "termination", to_string(rec.termination));
    rep.put_metric(prefix + "final_time", rec.final_time);
    rep.put_metric(prefix + "final_sup", rec.samples.back().sup_norm);
    rep.put_metric(prefix + "charge_drift", rec.charge_drift);
    rep.put_metric(prefix + "energy_drift", rec.energy_drift);
    double imq = 0.0, ime = 0.0;
    for (const auto& s : rec.samples) {
        imq = std::max(imq, std::abs(s.Q.imag()) / (1.0 + std::abs(s.Q)));
        ime = std::max(ime, std::abs(s.E.imag()) / (1.0 + std::abs(s.E)));
    }
    rep.put_metric(prefix + "im_q_rel_max", imq);
    rep.put_metric(prefix + "im_e_rel_max", ime);
}

void maybe_write_artifact(ExperimentReport& rep, const ExperimentEnv& env,
                          const std::string& label, const TrajectoryRecord& rec) {
    if (env.out_dir.empty()) return;
    std::filesystem::create_directories(env.out_dir);
    const std::string path = env.out_dir + "/" + rep.name + "_" + label + ".csv";
    write_timeseries(rec, path);
    rep.artifacts.push_back(path);
}

bool gate(ExperimentReport& rep, const std::string& name, double value, double tol) {
    rep.put_metric(name, value);
    rep.put_tolerance(name, tol);
    return value <= tol;
}

SpectralField evolve_fixed(SpectralField u, double t_end, const StepperConfig& cfg,
                           SignFlag sign, NonlinearityKind kind) {
    while (u.time < t_end - 1e-12) {
        const double dt = std::min(cfg.dt0, t_end - u.time);
        u = step(u, dt, cfg, sign, kind);
    }
    return u;
}

double h1_distance(const SpectralField& a, const SpectralField& b) {
    SpectralField diff = a;
    for (size_t j = 0; j < diff.samples.size(); ++j) diff.samples[j] -= b.samples[j];
    return std::sqrt(sobolev_norm_sq(diff, 1));
}

struct BlowupRunSummary {
    TrajectoryRecord rec;
    double track_grid_sup_max_dev = 0.0;
    double track_origin_max_dev = 0.0;
};

// Integrates u0^alpha past its predicted blow-up time and measures how the
// simulated sup-norm tracks the analytic solution: against the analytic
// grid sup over the whole detection window, and against the origin-modulus
// formula once the analytic peak has grown to 3x its initial value (below
// that the genuine sup sits measurably off the origin: the ratio starts at
// 2^{5/3}/3, about 5.8 percent, at t = 0 and decays to zero near blow-up).
BlowupRunSummary run_one_param_blowup(double alpha, const GridPtr& grid,
                                      const StepperConfig& cfg) {
    BlowupRunSummary out;
    const SpectralField u0 = sample_exact(OneParamParams{alpha}, 0.0, grid);
    const double t_alpha = first_blowup_alpha(alpha);
    out.rec = run(u0, 1.1 * t_alpha, cfg, SignFlag::focusing);

    const double sup0 = out.rec.samples.front().sup_norm;
    const double origin0 = origin_modulus_one_param(alpha, 0.0);
    // The analytic profile has a single peak at e^{3 alpha x} = solving a
    // quadratic, always inside (-ln2/(3 alpha), 0]; restricting the grid
    // search to |x| <= 4/alpha loses nothing and saves most of the scan.
    const double window = 4.0 / alpha;
    for (const auto& s : out.rec.samples) {
        if (s.sup_norm > cfg.amplitude_threshold * sup0) continue;
        double analytic_grid_sup = 0.0;
        for (double x : grid->nodes()) {
            if (std::abs(x) > window) continue;
            analytic_grid_sup =
                std::max(analytic_grid_sup, std::abs(eval_one_param(alpha, s.time, x)));
        }
        out.track_grid_sup_max_dev =
            std::max(out.track_grid_sup_max_dev,
                     std::abs(s.sup_norm - analytic_grid_sup) / analytic_grid_sup);
        const double origin = origin_modulus_one_param(alpha, s.time);
        if (origin >= 3.0 * origin0)
            out.track_origin_max_dev =
                std::max(out.track_origin_max_dev, std::abs(s.sup_norm - origin) / origin);
    }
    return out;
}

}  // namespace

ExperimentReport exp_small_data_blowup(double alpha, const StepperConfig& cfg,
                                       const ExperimentEnv& env) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("small_data_blowup requires 0 < alpha < 1");

    ExperimentReport rep;
    rep.name = "small_data_blowup";
    rep.put_input("alpha", alpha);

    const GridPtr grid = experiment_grid(env, 4096, auto_length(alpha));
    put_stepper_settings(rep, grid, cfg);
    bool ok = true;

    // (a) quadrature seminorms against the verified closed-form constants;
    // the catalog prediction is recorded alongside for comparison.
    const SpectralField u0 = sample_exact(OneParamParams{alpha}, 0.0, grid);
    for (int k = 0; k <= 2; ++k) {
        const double measured = seminorm_sq(u0, k);
        const double reference = reference_seminorm_sq(alpha, k);
        const std::string base = "seminorm_sq_k" + std::to_string(k);
        rep.put_metric(base + "_measured", measured);
        rep.put_metric(base + "_reference", reference);
        rep.put_metric(base + "_catalog", predicted_seminorm_sq(alpha, k));
        ok &= gate(rep, base + "_rel_err", std::abs(measured - reference) / reference,
                   k == 2 ? 1e-6 : 1e-8);
    }

    // (b) sup-norm tracking and (c) blow-up time estimate
    const double t_alpha = first_blowup_alpha(alpha);
    rep.put_metric("predicted_blowup_time", t_alpha);
    BlowupRunSummary main_run = run_one_param_blowup(alpha, grid, cfg);
    ok &= main_run.rec.termination == Termination::blowup_detected;
    ok &= gate(rep, "track_grid_sup_max_dev", main_run.track_grid_sup_max_dev, 0.01);
    ok &= gate(rep, "track_origin_max_dev", main_run.track_origin_max_dev, 0.01);
    if (main_run.rec.blowup_estimate.has_value()) {
        const auto& est = *main_run.rec.blowup_estimate;
        rep.put_metric("blowup_estimate", est.time);
        rep.put_metric("blowup_uncertainty", est.uncertainty);
        ok &= gate(rep, "blowup_rel_err", std::abs(est.time - t_alpha) / t_alpha, 0.05);
    } else {
        ok = false;
    }
    put_run_metrics(rep, "run_", main_run.rec);
    maybe_write_artifact(rep, env, "alpha_" + format_param(alpha), main_run.rec);

    // (d) halving alpha shrinks the initial norms and postpones blow-up
    const double alpha2 = alpha / 2.0;
    const GridPtr grid2 = make_grid(grid->num_points(), auto_length(alpha2));
    const SpectralField u0_half = sample_exact(OneParamParams{alpha2}, 0.0, grid2);
    bool norms_smaller = true;
    for (int k = 0; k <= 2; ++k) {
        const double s2 = seminorm_sq(u0_half, k);
        rep.put_metric("secondary_seminorm_sq_k" + std::to_string(k), s2);
        norms_smaller &= s2 < seminorm_sq(u0, k);
    }
    BlowupRunSummary second = run_one_param_blowup(alpha2, grid2, cfg);
    put_run_metrics(rep, "secondary_run_", second.rec);
    maybe_write_artifact(rep, env, "alpha_" + format_param(alpha2), second.rec);
    bool later = second.rec.blowup_estimate.has_value() &&
                 main_run.rec.blowup_estimate.has_value() &&
                 second.rec.blowup_estimate->time > main_run.rec.blowup_estimate->time;
    if (second.rec.blowup_estimate.has_value())
        rep.put_metric("secondary_blowup_estimate", second.rec.blowup_estimate->time);
    rep.put_metric("monotone_norms", norms_smaller ? 1.0 : 0.0);
    rep.put_metric("monotone_blowup_time", later ? 1.0 : 0.0);
    ok &= norms_smaller && later;

    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    return rep;
}

ExperimentReport exp_soliton_instability(double omega, double delta, const StepperConfig& cfg,
                                         const ExperimentEnv& env) {
    if (!(omega > 0.0) || delta < 0.0)
        throw std::invalid_argument("soliton_instability requires omega > 0, delta >= 0");

    ExperimentReport rep;
    rep.name = "soliton_instability";
    rep.put_input("omega", omega);
    rep.put_input("delta", delta);

    // Near the detection threshold the peak width is about 0.1/sqrt(omega)
    // regardless of delta, which needs the finer grid; the delta = 0
    // persistence run has no sharpening to resolve.
    const GridPtr grid = experiment_grid(env, delta > 0.0 ? 4096 : 2048,
                                         auto_length(std::sqrt(omega)));
    put_stepper_settings(rep, grid, cfg);
    bool ok = true;

    const SpectralField phi = sample_exact(SolitonParams{omega}, 0.0, grid);
    const SpectralField q = sample_exact(PerturbedSolitonParams{omega, delta}, 0.0, grid);
    rep.put_metric("h1_distance_to_soliton", h1_distance(phi, q));

    if (delta > 0.0) {
        const double predicted = perturbed_soliton_blowup_time(PerturbedSolitonParams{omega, delta});
        rep.put_metric("predicted_blowup_time", predicted);
        const TrajectoryRecord rec = run(q, 1.2 * predicted, cfg, SignFlag::focusing);
        ok &= rec.termination == Termination::blowup_detected;
        if (rec.blowup_estimate.has_value()) {
            rep.put_metric("blowup_estimate", rec.blowup_estimate->time);
            rep.put_metric("blowup_uncertainty", rec.blowup_estimate->uncertainty);
            ok &= gate(rep, "blowup_rel_err",
                       std::abs(rec.blowup_estimate->time - predicted) / predicted, 0.10);
        } else {
            ok = false;
        }
        put_run_metrics(rep, "run_", rec);
        maybe_write_artifact(rep, env, "delta_" + format_param(delta), rec);
    } else {
        const double t_end = 10.0;
        const TrajectoryRecord rec = run(q, t_end, cfg, SignFlag::focusing);
        ok &= rec.termination == Termination::completed;
        const double expected_sup = std::sqrt(2.0 * omega);
        double dev = 0.0;
        for (const auto& s : rec.samples)
            dev = std::max(dev, std::abs(s.sup_norm - expected_sup) / expected_sup);
        ok &= gate(rep, "sup_rel_dev", dev, 0.10);
        put_run_metrics(rep, "run_", rec);
        maybe_write_artifact(rep, env, "delta_0", rec);
    }

    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    return rep;
}

ExperimentReport exp_even_equivalence(double omega, double t_end, const StepperConfig& cfg,
                                      const ExperimentEnv& env) {
    if (!(omega > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("even_equivalence requires omega > 0, t_end > 0");

    ExperimentReport rep;
    rep.name = "even_equivalence";
    rep.put_input("omega", omega);
    rep.put_input("t_end", t_end);

    const GridPtr grid = experiment_grid(env, 1024, auto_length(std::sqrt(omega)));
    put_stepper_settings(rep, grid, cfg);

    const SpectralField phi = sample_exact(SolitonParams{omega}, 0.0, grid);
    const SpectralField u_nl =
        evolve_fixed(phi, t_end, cfg, SignFlag::focusing, NonlinearityKind::nonlocal);
    const SpectralField u_loc =
        evolve_fixed(phi, t_end, cfg, SignFlag::focusing, NonlinearityKind::local_cubic);

    double cross = 0.0, err_nl = 0.0, err_loc = 0.0;
    for (size_t j = 0; j < phi.samples.size(); ++j) {
        cross = std::max(cross, std::abs(u_nl.samples[j] - u_loc.samples[j]));
        const Complex exact = eval_soliton(SolitonParams{omega}, t_end, grid->nodes()[j]);
        err_nl = std::max(err_nl, std::abs(u_nl.samples[j] - exact));
        err_loc = std::max(err_loc, std::abs(u_loc.samples[j] - exact));
    }
    bool ok = true;
    ok &= gate(rep, "solver_discrepancy", cross, 1e-8);
    ok &= gate(rep, "nonlocal_vs_analytic", err_nl, 1e-5);
    ok &= gate(rep, "local_vs_analytic", err_loc, 1e-5);

    const double q0 = charge_nonlocal(phi).real();
    rep.put_metric("run_charge_drift",
                   std::abs(charge_nonlocal(u_nl).real() - q0) / std::abs(q0));
    rep.put_setting("run_termination", "completed");

    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    return rep;
}

ExperimentReport exp_defocusing_probe(const SolutionSpec& initial, double t_end,
                                      const StepperConfig& cfg, const ExperimentEnv& env) {
    if (!(t_end > 0.0)) throw std::invalid_argument("defocusing_probe requires t_end > 0");

    ExperimentReport rep;
    rep.name = "defocusing_probe";
    rep.put_input("t_end", t_end);

    const GridPtr grid = experiment_grid(env, 2048, auto_length(decay_rate(initial)));
    put_stepper_settings(rep, grid, cfg);

    const SpectralField u0 = sample_exact(initial, 0.0, grid);
    const TrajectoryRecord rec = run(u0, t_end, cfg, SignFlag::defocusing);

    double sup_min = rec.samples.front().sup_norm, sup_max = sup_min;
    for (const auto& s : rec.samples) {
        sup_min = std::min(sup_min, s.sup_norm);
        sup_max = std::max(sup_max, s.sup_norm);
    }
    rep.put_metric("sup_initial", rec.samples.front().sup_norm);
    rep.put_metric("sup_final", rec.samples.back().sup_norm);
    rep.put_metric("sup_min", sup_min);
    rep.put_metric("sup_max", sup_max);
    put_run_metrics(rep, "run_", rec);
    maybe_write_artifact(rep, env, "probe", rec);
    rep.put_tolerance("run_charge_drift", cfg.conservation_tol);

    // Behavioral outcome is informational (global behavior is open); only
    // numerics quality can fail the probe.
    const bool numerics_bad =
        rec.termination == Termination::nonfinite_abort ||
        (rec.termination == Termination::completed && rec.charge_drift > cfg.conservation_tol);
    rep.verdict = numerics_bad ? Verdict::fail : Verdict::informational;
    return rep;
}

ExperimentReport exp_h1_convergence(double omega, const std::vector<double>& deltas,
                                    const ExperimentEnv& env) {
    if (!(omega > 0.0)) throw std::invalid_argument("h1_convergence requires omega > 0");
    if (deltas.size() < 2) throw std::invalid_argument("h1_convergence needs >= 2 deltas");
    for (size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0))
            throw std::invalid_argument("h1_convergence deltas must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw std::invalid_argument("h1_convergence deltas must be strictly decreasing");
    }

    ExperimentReport rep;
    rep.name = "h1_convergence";
    rep.put_input("omega", omega);

    const GridPtr grid = experiment_grid(env, 2048, auto_length(std::sqrt(omega)));
    rep.put_setting("grid_n", std::to_string(grid->num_points()));
    rep.put_setting("grid_l", format_double(grid->half_length()));

    const SpectralField phi = sample_exact(SolitonParams{omega}, 0.0, grid);
    std::vector<double> dists;
    for (double d : deltas) {
        rep.put_input("delta_" + format_param(d), d);
        dists.push_back(
            h1_distance(phi, sample_exact(PerturbedSolitonParams{omega, d}, 0.0, grid)));
        rep.put_metric("h1_dist_" + format_param(d), dists.back());
    }

    bool ok = true;
    for (size_t i = 1; i < dists.size(); ++i) ok &= dists[i] < dists[i - 1];
    rep.put_metric("strictly_decreasing", ok ? 1.0 : 0.0);
    if (deltas.front() / deltas.back() >= 16.0) {
        rep.put_metric("reduction_factor", dists.front() / dists.back());
        rep.put_tolerance("reduction_factor_min", 10.0);
        ok &= dists.back() < dists.front() / 10.0;
    }

    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    return rep;
}

ExperimentReport exp_norm_scaling(const std::vector<double>& alphas, const std::vector<int>& ks,
                                  const ExperimentEnv& env) {
    if (alphas.size() < 4)
        throw std::invalid_argument("norm_scaling needs >= 4 distinct alphas");
    std::set<double> unique(alphas.begin(), alphas.end());
    if (unique.size() != alphas.size())
        throw std::invalid_argument("norm_scaling alphas must be distinct");
    for (double a : alphas)
        if (!(a > 0.0 && a <= 1.0))
            throw std::invalid_argument("norm_scaling alphas must lie in (0, 1]");
    for (int k : ks)
        if (k < 0 || k > 3) throw std::invalid_argument("norm_scaling supports k in 0..3");

    ExperimentReport rep;
    rep.name = "norm_scaling";
    for (double a : alphas) rep.put_input("alpha_" + format_param(a), a);

    bool ok = true;
    for (int k : ks) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, log_c_sum = 0.0;
        for (double a : alphas) {
            const GridPtr grid = experiment_grid(env, 8192, auto_length(a));
            const double s2 = seminorm_sq(sample_exact(OneParamParams{a}, 0.0, grid), k);
            const double lx = std::log(a), ly = std::log(s2);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            log_c_sum += ly - (2.0 * k + 1.0) * lx;
        }
        const double n = static_cast<double>(alphas.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double c_measured = std::exp(log_c_sum / n);
        const std::string base = "k" + std::to_string(k);
        rep.put_metric(base + "_slope", slope);
        rep.put_tolerance(base + "_slope_dev", 0.01);
        ok &= std::abs(slope - (2.0 * k + 1.0)) < 0.01;
        rep.put_metric(base + "_C_measured", c_measured);
        rep.put_metric(base + "_C_reference", reference_seminorm_sq(1.0, k));
        if (k <= 2) {
            rep.put_metric(base + "_C_catalog", predicted_seminorm_sq(1.0, k));
            ok &= gate(rep, base + "_C_rel_err",
                       std::abs(c_measured - reference_seminorm_sq(1.0, k)) /
                           reference_seminorm_sq(1.0, k),
                       1e-6);
        }
    }

    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    return rep;
}

ExperimentReport exp_offcenter_boundedness(const TwoSolitonParams& p, double x0,
                                           const ExperimentEnv& env) {
    (void)env;
    if (p.alpha == p.beta)
        throw std::invalid_argument("offcenter_boundedness requires alpha != beta");
    if (x0 == 0.0) throw std::invalid_argument("offcenter_boundedness requires x0 != 0");

    ExperimentReport rep;
    rep.name = "offcenter_boundedness";
    rep.put_input("alpha", p.alpha);
    rep.put_input("beta", p.beta);
    rep.put_input("x0", x0);

    const double t_final = blow_up_time(p, 0) - 1e-6;
    const int samples = 20000;
    const double initial = std::abs(eval_two_param(p, 0.0, x0));
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = t_final * i / samples;
        worst = std::max(worst, std::abs(eval_two_param(p, t, x0)));
    }
    const double center = std::abs(eval_two_param(p, t_final, 0.0));

    rep.put_metric("offcenter_initial", initial);
    rep.put_metric("offcenter_max", worst);
    rep.put_metric("offcenter_ratio", worst / initial);
    rep.put_tolerance("offcenter_ratio_max", 100.0);
    rep.put_metric("center_modulus_near_T0", center);
    rep.put_tolerance("center_modulus_min", 1e6);

    rep.verdict = (worst < 100.0 * initial && center > 1e6) ? Verdict::pass : Verdict::fail;
    return rep;
}

}  // namespace nnls
