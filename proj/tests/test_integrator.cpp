#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nnls/analytic.hpp"
#include "nnls/integrator.hpp"
#include "test_util.hpp"

using namespace nnls;
using doctest::Approx;

namespace {

double max_err_vs_soliton(const SpectralField& u, double omega) {
    double worst = 0.0;
    for (size_t j = 0; j < u.samples.size(); ++j) {
        const Complex exact = eval_soliton(SolitonParams{omega}, u.time, u.grid->nodes()[j]);
        worst = std::max(worst, std::abs(u.samples[j] - exact));
    }
    return worst;
}

SpectralField evolve(SpectralField u, double t_end, const StepperConfig& cfg, SignFlag sign,
                     NonlinearityKind kind = NonlinearityKind::nonlocal) {
    while (u.time < t_end - 1e-12) {
        const double dt = std::min(cfg.dt0, t_end - u.time);
        u = step(u, dt, cfg, sign, kind);
    }
    return u;
}

}  // namespace

TEST_CASE("linear_propagate") {
    auto g = make_grid(512, 20.0);

    SUBCASE("dt = 0 is the identity up to transform roundoff") {
        auto f = testutil::random_smooth_field(g, 4u);
        auto out = linear_propagate(f, 0.0);
        CHECK(testutil::max_abs_diff(out.samples, f.samples) < 1e-14);
    }

    SUBCASE("plane wave acquires the exact phase") {
        const double k0 = g->wavenumbers()[3];
        SpectralField f = zero_field(g);
        for (int j = 0; j < 512; ++j) f.samples[j] = std::polar(1.0, k0 * g->nodes()[j]);
        const double dt = 0.37;
        auto out = linear_propagate(f, dt);
        double worst = 0.0;
        for (int j = 0; j < 512; ++j)
            worst = std::max(worst, std::abs(out.samples[j] -
                                             f.samples[j] * std::polar(1.0, -k0 * k0 * dt)));
        CHECK(worst < 1e-14);
    }

    SUBCASE("unitary") {
        auto f = testutil::random_smooth_field(g, 6u);
        CHECK(l2_norm_sq(linear_propagate(f, 1.234)) == Approx(l2_norm_sq(f)).epsilon(1e-13));
    }
}

TEST_CASE("step") {
    StepperConfig cfg;

    SUBCASE("continuity: a tiny step barely moves soliton data") {
        auto g = make_grid(1024, 40.0);
        auto phi = testutil::sample_soliton(1.0, 0.0, g);
        auto out = step(phi, 1e-8, cfg, SignFlag::focusing);
        CHECK(testutil::max_abs_diff(out.samples, phi.samples) < 1e-7);
        CHECK(out.time == Approx(1e-8));
    }

    SUBCASE("soliton accuracy over 1000 steps") {
        auto g = make_grid(1024, 40.0);
        auto u = testutil::sample_soliton(1.0, 0.0, g);
        u = evolve(u, 1.0, cfg, SignFlag::focusing);
        CHECK(u.time == Approx(1.0).epsilon(1e-12));
        CHECK(max_err_vs_soliton(u, 1.0) < 1e-6);
    }

    SUBCASE("cross-scheme agreement on soliton data") {
        auto g = make_grid(1024, 40.0);
        auto base = testutil::sample_soliton(1.0, 0.0, g);
        auto strang = evolve(base, 1.0, cfg, SignFlag::focusing);
        StepperConfig ifc = cfg;
        ifc.scheme = Scheme::if_rk4;
        auto ifr = evolve(base, 1.0, ifc, SignFlag::focusing);
        CHECK(testutil::max_abs_diff(strang.samples, ifr.samples) < 1e-6);
        CHECK(max_err_vs_soliton(ifr, 1.0) < 1e-6);
    }

    SUBCASE("second-order accuracy: halving dt quarters the soliton error") {
        auto g = make_grid(1024, 40.0);
        auto base = testutil::sample_soliton(1.0, 0.0, g);
        StepperConfig coarse = cfg;
        coarse.dt0 = 2e-3;
        StepperConfig fine = cfg;
        fine.dt0 = 1e-3;
        const double e1 = max_err_vs_soliton(evolve(base, 1.0, coarse, SignFlag::focusing), 1.0);
        const double e2 = max_err_vs_soliton(evolve(base, 1.0, fine, SignFlag::focusing), 1.0);
        CHECK(e1 / e2 > 3.0);
        CHECK(e1 / e2 < 5.0);
    }

    SUBCASE("evenness is preserved by the nonlocal evolution") {
        auto g = make_grid(1024, 40.0);
        auto u = evolve(testutil::sample_soliton(1.0, 0.0, g), 1.0, cfg, SignFlag::focusing);
        const auto& r = g->reflect_index();
        double asym = 0.0;
        for (int j = 0; j < 1024; ++j)
            asym = std::max(asym, std::abs(u.samples[j] - u.samples[r[j]]));
        CHECK(asym < 1e-10);
    }
}

TEST_CASE("adapt_dt") {
    StepperConfig cfg;
    cfg.dt0 = 1e-3;
    auto g = make_grid(64, 5.0);

    auto const_field = [&](double amp) {
        SpectralField f = zero_field(g);
        for (auto& v : f.samples) v = amp;
        return f;
    };

    CHECK(adapt_dt(const_field(1.0), cfg, 1.0) == Approx(cfg.dt0));
    CHECK(adapt_dt(const_field(3.0), cfg, 1.0) == Approx(cfg.dt0 / 5.0));
    CHECK(adapt_dt(const_field(1e8), cfg, 1.0) < 1e-12);
}

TEST_CASE("run") {
    SUBCASE("soliton run completes with conserved charge") {
        auto g = make_grid(1024, 40.0);
        StepperConfig cfg;
        auto rec = run(testutil::sample_soliton(1.0, 0.0, g), 5.0, cfg, SignFlag::focusing);
        CHECK(rec.termination == Termination::completed);
        CHECK(rec.final_time == Approx(5.0).epsilon(1e-12));
        CHECK(rec.charge_drift < 1e-8);
        CHECK(rec.conservation_ok);
        CHECK(!rec.blowup_estimate.has_value());
        for (size_t i = 1; i < rec.samples.size(); ++i)
            CHECK(rec.samples[i].time > rec.samples[i - 1].time);
    }

    SUBCASE("one-param data blows up before t = 3 with a 5 percent estimate") {
        const double alpha = 0.75;
        auto g = make_grid(4096, 40.0 / alpha);
        StepperConfig cfg;
        auto rec = run(testutil::sample_one_param(alpha, 0.0, g), 3.0, cfg, SignFlag::focusing);
        CHECK(rec.termination == Termination::blowup_detected);
        CHECK(rec.final_time < 3.0);
        REQUIRE(rec.blowup_estimate.has_value());
        const double Ta = first_blowup_alpha(alpha);
        CHECK(std::abs(rec.blowup_estimate->time - Ta) / Ta < 0.05);
    }

    SUBCASE("zero field stays zero") {
        auto g = make_grid(64, 5.0);
        StepperConfig cfg;
        auto rec = run(zero_field(g), 1.0, cfg, SignFlag::focusing);
        CHECK(rec.termination == Termination::completed);
        for (const auto& s : rec.samples) {
            CHECK(s.sup_norm == 0.0);
            CHECK(s.Q == Complex(0.0, 0.0));
        }
    }

    SUBCASE("gross time step overflows into nonfinite_abort") {
        auto g = make_grid(64, 10.0);
        StepperConfig cfg;
        cfg.dt0 = 1e5;
        cfg.adaptive = false;
        cfg.amplitude_threshold = 1e300;  // let the overflow happen
        auto rec = run(testutil::sample_soliton(1.0, 0.0, g), 1e6, cfg, SignFlag::focusing);
        CHECK(rec.termination == Termination::nonfinite_abort);
        for (const auto& s : rec.samples) CHECK(std::isfinite(s.sup_norm));
    }

    SUBCASE("final_time equals the accumulated steps, including the landing step") {
        auto g = make_grid(64, 5.0);
        StepperConfig cfg;
        cfg.dt0 = 0.1;
        cfg.adaptive = false;
        cfg.monitor_stride = 2;
        auto rec = run(zero_field(g), 0.35, cfg, SignFlag::focusing);
        CHECK(rec.termination == Termination::completed);
        CHECK(rec.final_time == Approx(0.35).epsilon(1e-12));
        CHECK(rec.samples.back().time == Approx(0.35).epsilon(1e-12));
    }

    SUBCASE("input validation") {
        auto g = make_grid(64, 5.0);
        StepperConfig cfg;
        CHECK_THROWS_AS(run(zero_field(g), -1.0, cfg, SignFlag::focusing),
                        std::invalid_argument);
        cfg.dt_min = 1.0;
        CHECK_THROWS_AS(run(zero_field(g), 1.0, cfg, SignFlag::focusing),
                        std::invalid_argument);
    }
}

TEST_CASE("estimate_blowup_time") {
    SUBCASE("exact reciprocal input is recovered") {
        TrajectoryRecord rec;
        rec.termination = Termination::blowup_detected;
        for (int i = 0; i <= 8; ++i) {
            InvariantSample s;
            s.time = 1.5 + 0.05 * i;
            s.sup_norm = 1.0 / (2.0 - s.time);
            rec.samples.push_back(s);
        }
        const auto est = estimate_blowup_time(rec);
        CHECK(est.time == Approx(2.0).epsilon(1e-9));
        CHECK(est.uncertainty <= 1e-6);
    }

    SUBCASE("completed trajectories are rejected") {
        TrajectoryRecord rec;
        rec.termination = Termination::completed;
        for (int i = 0; i <= 8; ++i) {
            InvariantSample s;
            s.time = 0.1 * i;
            s.sup_norm = 1.0 + i;
            rec.samples.push_back(s);
        }
        CHECK_THROWS_AS(estimate_blowup_time(rec), InsufficientTailError);
    }

    SUBCASE("short or non-monotone tails are rejected") {
        TrajectoryRecord rec;
        rec.termination = Termination::blowup_detected;
        for (int i = 0; i <= 8; ++i) {
            InvariantSample s;
            s.time = 0.1 * i;
            s.sup_norm = (i % 2 == 0) ? 2.0 : 1.0;
            rec.samples.push_back(s);
        }
        CHECK_THROWS_AS(estimate_blowup_time(rec), InsufficientTailError);
    }
}
