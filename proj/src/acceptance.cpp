#include "nnls/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include "nnls/analytic.hpp"
#include "nnls/experiments.hpp"
#include "nnls/integrator.hpp"
#include "nnls/io.hpp"

namespace nnls {

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

struct RunQuality {
    std::string label;
    std::string termination;
    double charge_drift = 0.0;
    double im_q = 0.0;
    double im_e = 0.0;
    bool has_im = false;
};

// Shared state across criteria: the conservation criterion aggregates the
// run-quality metrics of every run the suite executed.
struct Context {
    std::string out_dir;
    std::vector<RunQuality> runs;
    StepperConfig cfg;  // suite defaults

    ExperimentEnv env(const std::string& sub) const {
        ExperimentEnv e;
        if (!out_dir.empty()) e.out_dir = out_dir + "/" + sub;
        return e;
    }

    void collect(const ExperimentReport& rep) {
        for (const char* prefix : {"run_", "secondary_run_"}) {
            const std::string pterm = std::string(prefix) + "termination";
            std::string term;
            for (const auto& [k, v] : rep.settings)
                if (k == pterm) term = v;
            if (term.empty()) continue;
            RunQuality q;
            q.label = rep.name + "/" + prefix;
            q.termination = term;
            q.charge_drift = rep.metric(std::string(prefix) + "charge_drift");
            if (rep.has_metric(std::string(prefix) + "im_q_rel_max")) {
                q.im_q = rep.metric(std::string(prefix) + "im_q_rel_max");
                q.im_e = rep.metric(std::string(prefix) + "im_e_rel_max");
                q.has_im = true;
            }
            runs.push_back(q);
        }
        maybe_write(rep);
    }

    void maybe_write(const ExperimentReport& rep) const {
        if (out_dir.empty()) return;
        std::filesystem::create_directories(out_dir);
        std::string stem = rep.name;
        for (const auto& [k, v] : rep.inputs) stem += "_" + k + "_" + fmt(v);
        write_report(rep, out_dir + "/" + stem + ".json");
    }
};

bool check(CriterionResult& r, bool ok, const std::string& line) {
    r.details.push_back(std::string(ok ? "ok   " : "FAIL ") + line);
    r.pass = r.pass && ok;
    return ok;
}

// C1: quadrature seminorms of u0^alpha against the pinned catalog constants
// 4 pi a/3, 8 pi a^3/(3 sqrt 3), 8 pi a^5/sqrt 3. The k=0 pin is known to
// disagree with quadrature by a factor sqrt(3); the detail line carries the
// verified reference alongside (see reference_seminorm_sq).
CriterionResult criterion_norm_identities(Context&) {
    CriterionResult r{1, "norm-identities", true, {}};
    for (double alpha : {0.25, 0.5, 0.75}) {
        const GridPtr grid = make_grid(8192, std::min(40.0 / alpha, 160.0));
        const SpectralField u0 = sample_exact(OneParamParams{alpha}, 0.0, grid);
        for (int k = 0; k <= 2; ++k) {
            const double measured = seminorm_sq(u0, k);
            const double pinned = predicted_seminorm_sq(alpha, k);
            const double tol = (k == 2) ? 1e-6 : 1e-8;
            const double rel = std::abs(measured - pinned) / pinned;
            std::string line = "alpha=" + fmt(alpha) + " k=" + std::to_string(k) +
                               ": measured=" + format_double(measured) +
                               " pinned=" + format_double(pinned) + " rel_err=" + fmt(rel) +
                               " (tol " + fmt(tol) + ")";
            if (k == 0) {
                const double ref = reference_seminorm_sq(alpha, 0);
                line += "  [vs verified 4*pi*a/sqrt(3)=" + format_double(ref) +
                        ": rel_err=" + fmt(std::abs(measured - ref) / ref) + "]";
            }
            check(r, rel <= tol, line);
        }
    }
    return r;
}

// C2: fitted slopes of log seminorm^2 vs log alpha equal 2k+1 +- 0.01.
CriterionResult criterion_scaling_law(Context& ctx) {
    CriterionResult r{2, "scaling-law-slopes", true, {}};
    const ExperimentReport rep =
        exp_norm_scaling({0.25, 0.35, 0.5, 0.7, 1.0}, {0, 1, 2, 3}, ctx.env("c2"));
    ctx.collect(rep);
    for (int k = 0; k <= 3; ++k) {
        const double slope = rep.metric("k" + std::to_string(k) + "_slope");
        check(r, std::abs(slope - (2.0 * k + 1.0)) < 0.01,
              "k=" + std::to_string(k) + ": slope=" + format_double(slope) + " target=" +
                  std::to_string(2 * k + 1) + " +- 0.01");
    }
    const double c3 = rep.metric("k3_C_measured");
    r.details.push_back("info C3 measured=" + format_double(c3) +
                        " (56*pi/sqrt(3)=" + format_double(reference_seminorm_sq(1.0, 3)) + ")");
    return r;
}

// C3: spectral PDE residual of the sampled two-exponential solution with the
// analytic time derivative stays below 1e-6 in sup norm.
CriterionResult criterion_residual(Context&) {
    CriterionResult r{3, "exact-solution-residual", true, {}};
    const TwoSolitonParams p{1.0, 0.5};
    const double t0 = 0.9 * blow_up_time(p, 0);
    const GridPtr grid = make_grid(8192, 40.0);
    for (int i = 0; i < 10; ++i) {
        const double t = t0 * i / 9.0;
        const SpectralField u = sample_exact(p, t, grid);
        const SpectralField uxx = spectral_derivative(u, 2);
        const SpectralField fnl = evaluate_F(u, SignFlag::focusing);
        double sup = 0.0;
        for (int j = 0; j < grid->num_points(); ++j) {
            const Complex ut = eval_two_param_dt(p, t, grid->nodes()[j]);
            sup = std::max(sup, std::abs(Complex(0.0, 1.0) * ut + uxx.samples[j] +
                                         fnl.samples[j]));
        }
        check(r, sup < 1e-6, "t=" + fmt(t) + ": residual sup=" + format_double(sup) +
                                 " (tol 1e-06)");
    }
    return r;
}

// C4: nonlocal and local solvers agree on even soliton data and both track
// the analytic rotating soliton.
CriterionResult criterion_even_equivalence(Context& ctx) {
    CriterionResult r{4, "even-data-equivalence", true, {}};
    const ExperimentReport rep = exp_even_equivalence(1.0, 1.0, ctx.cfg, ctx.env("c4"));
    ctx.collect(rep);
    check(r, rep.metric("solver_discrepancy") < 1e-8,
          "nonlocal vs local: " + format_double(rep.metric("solver_discrepancy")) +
              " (tol 1e-08)");
    check(r, rep.metric("nonlocal_vs_analytic") < 1e-5,
          "nonlocal vs analytic: " + format_double(rep.metric("nonlocal_vs_analytic")) +
              " (tol 1e-05)");
    check(r, rep.metric("local_vs_analytic") < 1e-5,
          "local vs analytic: " + format_double(rep.metric("local_vs_analytic")) +
              " (tol 1e-05)");
    return r;
}

// C5: on every completed run of the suite, Re Q drifts less than 1e-8
// relative; imaginary parts of Q and E stay below 1e-10 (1 + magnitude) on
// every run.
CriterionResult criterion_conservation(Context& ctx) {
    CriterionResult r{5, "conservation", true, {}};
    if (ctx.runs.empty()) {
        // invoked standalone: gate a representative pair of runs
        const GridPtr g1 = make_grid(1024, 40.0);
        TrajectoryRecord rec = run(sample_exact(SolitonParams{1.0}, 0.0, g1), 5.0, ctx.cfg,
                                   SignFlag::focusing);
        RunQuality q{"soliton_t5/run_", to_string(rec.termination), rec.charge_drift, 0, 0,
                     true};
        for (const auto& s : rec.samples) {
            q.im_q = std::max(q.im_q, std::abs(s.Q.imag()) / (1.0 + std::abs(s.Q)));
            q.im_e = std::max(q.im_e, std::abs(s.E.imag()) / (1.0 + std::abs(s.E)));
        }
        ctx.runs.push_back(q);
        ctx.collect(exp_defocusing_probe(OneParamParams{0.75}, 3.0, ctx.cfg, ctx.env("c5")));
    }
    for (const auto& q : ctx.runs) {
        if (q.termination == "completed")
            check(r, q.charge_drift < 1e-8,
                  q.label + " (completed): Re Q drift=" + format_double(q.charge_drift) +
                      " (tol 1e-08)");
        if (q.has_im) {
            check(r, q.im_q < 1e-10,
                  q.label + ": |Im Q|/(1+|Q|) max=" + format_double(q.im_q) + " (tol 1e-10)");
            check(r, q.im_e < 1e-10,
                  q.label + ": |Im E|/(1+|E|) max=" + format_double(q.im_e) + " (tol 1e-10)");
        }
    }
    return r;
}

// C6: small-data blow-up runs detect the predicted blow-up time within 5
// percent and the sup-norm tracks the analytic solution within 1 percent
// inside the 10x-amplitude window.
CriterionResult criterion_small_data_blowup(Context& ctx) {
    CriterionResult r{6, "small-data-blowup", true, {}};
    for (double alpha : {0.75, 0.5}) {
        const ExperimentReport rep = exp_small_data_blowup(alpha, ctx.cfg, ctx.env("c6"));
        ctx.collect(rep);
        std::string term;
        for (const auto& [k, v] : rep.settings)
            if (k == "run_termination") term = v;
        check(r, term == "blowup_detected", "alpha=" + fmt(alpha) + ": termination=" + term);
        const double t_alpha = first_blowup_alpha(alpha);
        if (rep.has_metric("blowup_rel_err")) {
            check(r, rep.metric("blowup_rel_err") <= 0.05,
                  "alpha=" + fmt(alpha) + ": estimate=" +
                      format_double(rep.metric("blowup_estimate")) + " vs T_alpha=" +
                      format_double(t_alpha) + ", rel_err=" + fmt(rep.metric("blowup_rel_err")) +
                      " (tol 0.05)");
        } else {
            check(r, false, "alpha=" + fmt(alpha) + ": no blow-up estimate produced");
        }
        check(r, rep.metric("track_grid_sup_max_dev") <= 0.01,
              "alpha=" + fmt(alpha) + ": sup tracking dev=" +
                  fmt(rep.metric("track_grid_sup_max_dev")) + " (tol 0.01, full window)");
        check(r, rep.metric("track_origin_max_dev") <= 0.01,
              "alpha=" + fmt(alpha) + ": origin-modulus tracking dev=" +
                  fmt(rep.metric("track_origin_max_dev")) + " (tol 0.01, late window)");
    }
    return r;
}

// C7: perturbed solitons blow up near pi/delta; the unperturbed soliton
// persists; the smallest perturbation in the sweep still blows up.
CriterionResult criterion_soliton_instability(Context& ctx) {
    CriterionResult r{7, "soliton-instability", true, {}};
    const ExperimentReport big = exp_soliton_instability(1.0, 0.5, ctx.cfg, ctx.env("c7"));
    ctx.collect(big);
    check(r, big.has_metric("blowup_rel_err") && big.metric("blowup_rel_err") <= 0.10,
          "delta=0.5: estimate=" +
              (big.has_metric("blowup_estimate") ? format_double(big.metric("blowup_estimate"))
                                                 : std::string("none")) +
              " vs 2*pi=" + format_double(2.0 * M_PI) + " (tol 10%)");

    const ExperimentReport none = exp_soliton_instability(1.0, 0.0, ctx.cfg, ctx.env("c7"));
    ctx.collect(none);
    std::string term;
    for (const auto& [k, v] : none.settings)
        if (k == "run_termination") term = v;
    check(r, term == "completed" && none.metric("sup_rel_dev") <= 0.10,
          "delta=0: termination=" + term +
              ", sup dev from sqrt(2)=" + fmt(none.metric("sup_rel_dev")) + " (tol 10%)");

    const ExperimentReport tiny = exp_soliton_instability(1.0, 1.0 / 16.0, ctx.cfg, ctx.env("c7"));
    ctx.collect(tiny);
    std::string term_tiny;
    for (const auto& [k, v] : tiny.settings)
        if (k == "run_termination") term_tiny = v;
    check(r, term_tiny == "blowup_detected",
          "delta=1/16: termination=" + term_tiny + " (blow-up expected)");
    check(r,
          tiny.metric("h1_distance_to_soliton") < big.metric("h1_distance_to_soliton"),
          "delta=1/16 is closer to the soliton in H1 than delta=0.5: " +
              fmt(tiny.metric("h1_distance_to_soliton")) + " < " +
              fmt(big.metric("h1_distance_to_soliton")));
    return r;
}

// C8: H1 distance of q_{1,delta} to phi_1 strictly decreases along the
// delta sweep and vanishes at delta = 0.
CriterionResult criterion_h1_convergence(Context& ctx) {
    CriterionResult r{8, "h1-convergence", true, {}};
    const std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625, 0.03125};
    const ExperimentReport rep = exp_h1_convergence(1.0, deltas, ctx.env("c8"));
    ctx.collect(rep);
    check(r, rep.metric("strictly_decreasing") == 1.0, "distances strictly decreasing");
    check(r, rep.metric("reduction_factor") > 10.0,
          "reduction over the sweep: " + fmt(rep.metric("reduction_factor")) + "x (min 10x)");

    const GridPtr grid = make_grid(2048, 40.0);
    const SpectralField phi = sample_exact(SolitonParams{1.0}, 0.0, grid);
    SpectralField q0 = sample_exact(PerturbedSolitonParams{1.0, 0.0}, 0.0, grid);
    for (size_t j = 0; j < q0.samples.size(); ++j) q0.samples[j] -= phi.samples[j];
    const double dist0 = std::sqrt(sobolev_norm_sq(q0, 1));
    check(r, dist0 <= 1e-13, "delta=0 distance=" + format_double(dist0) + " (tol 1e-13)");
    return r;
}

// C9: the two-exponential solution stays bounded off center while the
// origin modulus diverges.
CriterionResult criterion_offcenter(Context& ctx) {
    CriterionResult r{9, "off-center-boundedness", true, {}};
    for (double x0 : {0.1, 1.0}) {
        const ExperimentReport rep =
            exp_offcenter_boundedness(TwoSolitonParams{1.0, 0.5}, x0, ctx.env("c9"));
        ctx.collect(rep);
        check(r, rep.metric("offcenter_ratio") < 100.0,
              "x0=" + fmt(x0) + ": max/initial=" + fmt(rep.metric("offcenter_ratio")) +
                  " (tol 100)");
        check(r, rep.metric("center_modulus_near_T0") > 1e6,
              "x0=" + fmt(x0) + ": center modulus near T0=" +
                  format_double(rep.metric("center_modulus_near_T0")) + " (min 1e6)");
    }
    return r;
}

// C10: structural numerics checks with no external reference: cross-scheme
// agreement, second-order dt convergence, fourth-order substep convergence.
CriterionResult criterion_self_consistency(Context& ctx) {
    CriterionResult r{10, "numerical-self-consistency", true, {}};
    const GridPtr grid = make_grid(1024, 40.0);
    const SpectralField phi = sample_exact(SolitonParams{1.0}, 0.0, grid);

    auto evolve = [&](StepperConfig c, double t_end) {
        SpectralField u = phi;
        while (u.time < t_end - 1e-12)
            u = step(u, std::min(c.dt0, t_end - u.time), c, SignFlag::focusing);
        return u;
    };
    auto max_err = [&](const SpectralField& u) {
        double worst = 0.0;
        for (size_t j = 0; j < u.samples.size(); ++j)
            worst = std::max(worst, std::abs(u.samples[j] - eval_soliton(SolitonParams{1.0},
                                                                         u.time,
                                                                         grid->nodes()[j])));
        return worst;
    };

    StepperConfig strang = ctx.cfg;
    StepperConfig ifc = ctx.cfg;
    ifc.scheme = Scheme::if_rk4;
    const SpectralField us = evolve(strang, 1.0);
    const SpectralField ui = evolve(ifc, 1.0);
    double cross = 0.0;
    for (size_t j = 0; j < us.samples.size(); ++j)
        cross = std::max(cross, std::abs(us.samples[j] - ui.samples[j]));
    check(r, cross < 1e-6,
          "cross-scheme agreement at t=1: " + format_double(cross) + " (tol 1e-06)");

    StepperConfig coarse = ctx.cfg;
    coarse.dt0 = 2e-3;
    const double e1 = max_err(evolve(coarse, 1.0));
    const double e2 = max_err(us);
    check(r, e1 / e2 > 3.0 && e1 / e2 < 5.0,
          "dt-halving error ratio: " + fmt(e1 / e2) + " (window [3, 5])");

    // substep Richardson on non-even data against the exact pair rotation
    const GridPtr g2 = make_grid(2048, 80.0);
    const SpectralField w = sample_exact(OneParamParams{0.6}, 0.0, g2);
    const auto& refl = g2->reflect_index();
    const double dt = 1e-2;
    const SpectralField one = nonlinear_substep(w, dt, SignFlag::focusing);
    const SpectralField half = nonlinear_substep(
        nonlinear_substep(w, dt / 2.0, SignFlag::focusing), dt / 2.0, SignFlag::focusing);
    double err1 = 0.0, err2 = 0.0;
    for (size_t j = 0; j < w.samples.size(); ++j) {
        if (refl[j] == static_cast<int>(j)) continue;
        const Complex p = w.samples[j] * std::conj(w.samples[static_cast<size_t>(refl[j])]);
        const Complex exact = w.samples[j] * std::exp(Complex(0.0, 1.0) * p * dt);
        err1 = std::max(err1, std::abs(one.samples[j] - exact));
        err2 = std::max(err2, std::abs(half.samples[j] - exact));
    }
    const double ratio = err1 / err2;
    check(r, ratio > 12.8 && ratio < 19.2,
          "substep RK4 Richardson ratio: " + fmt(ratio) + " (window 16 +- 20%)");
    return r;
}

// C11: defocusing probes complete with conserved charge; behavior is
// recorded but not judged.
CriterionResult criterion_defocusing(Context& ctx) {
    CriterionResult r{11, "defocusing-probe", true, {}};
    struct Probe {
        const char* label;
        SolutionSpec spec;
    };
    for (const Probe& probe :
         {Probe{"one_param alpha=0.75", OneParamParams{0.75}},
          Probe{"soliton omega=1", SolitonParams{1.0}}}) {
        const ExperimentReport rep =
            exp_defocusing_probe(probe.spec, 3.0, ctx.cfg, ctx.env("c11"));
        ctx.collect(rep);
        std::string term;
        for (const auto& [k, v] : rep.settings)
            if (k == "run_termination") term = v;
        check(r, term == "completed",
              std::string(probe.label) + ": termination=" + term);
        check(r, rep.metric("run_charge_drift") < 1e-8,
              std::string(probe.label) +
                  ": Re Q drift=" + format_double(rep.metric("run_charge_drift")) +
                  " (tol 1e-08)");
        r.details.push_back("info " + std::string(probe.label) + ": sup " +
                            fmt(rep.metric("sup_initial")) + " -> " +
                            fmt(rep.metric("sup_final")) + " over [0,3] (informational)");
    }
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::string& out_dir) {
    Context ctx;
    ctx.out_dir = out_dir;

    using Fn = std::function<CriterionResult(Context&)>;
    const std::vector<std::pair<int, Fn>> table = {
        {1, criterion_norm_identities},   {2, criterion_scaling_law},
        {3, criterion_residual},          {4, criterion_even_equivalence},
        {6, criterion_small_data_blowup}, {7, criterion_soliton_instability},
        {8, criterion_h1_convergence},    {9, criterion_offcenter},
        {10, criterion_self_consistency}, {11, criterion_defocusing},
    };

    auto wanted = [&](int id) {
        return ids.empty() || std::find(ids.begin(), ids.end(), id) != ids.end();
    };

    std::vector<CriterionResult> results;
    for (const auto& [id, fn] : table)
        if (wanted(id)) results.push_back(fn(ctx));
    // the conservation criterion aggregates over everything that ran before
    if (wanted(5)) results.push_back(criterion_conservation(ctx));
    std::sort(results.begin(), results.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
    return results;
}

void print_acceptance(const std::vector<CriterionResult>& results, std::ostream& os) {
    for (const auto& r : results) {
        std::string header = "[C" + std::to_string(r.id) + "] " + r.name + " ";
        while (header.size() < 40) header += '.';
        os << header << ' ' << (r.pass ? "PASS" : "FAIL") << '\n';
        for (const auto& d : r.details) os << "    " << d << '\n';
    }
    const int failures = count_failures(results);
    os << (failures == 0 ? "all criteria passed"
                         : std::to_string(failures) + " criterion(s) failed")
       << '\n';
}

int count_failures(const std::vector<CriterionResult>& results) {
    int n = 0;
    for (const auto& r : results)
        if (!r.pass) ++n;
    return n;
}

}  // namespace nnls
