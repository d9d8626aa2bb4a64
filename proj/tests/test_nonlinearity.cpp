#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nnls/analytic.hpp"
#include "nnls/integrator.hpp"
#include "nnls/nonlinearity.hpp"
#include "test_util.hpp"

using namespace nnls;
using doctest::Approx;

TEST_CASE("evaluate_F") {
    SUBCASE("real even field reduces to the pointwise cube, exactly") {
        auto g = make_grid(256, 20.0);
        auto phi = testutil::sample_soliton(1.0, 0.0, g);
        auto F = evaluate_F(phi, SignFlag::focusing);
        for (size_t j = 0; j < phi.samples.size(); ++j) {
            const Complex u = phi.samples[j];
            CHECK(F.samples[j] == 1.0 * u * u * u);
        }
    }

    SUBCASE("zero field maps to zero") {
        auto g = make_grid(64, 5.0);
        for (const auto& v : evaluate_F(zero_field(g), SignFlag::focusing).samples)
            CHECK(v == Complex(0.0, 0.0));
    }

    SUBCASE("matches the direct closed-form product for one-param data") {
        auto g = make_grid(4096, 80.0);
        auto u0 = testutil::sample_one_param(0.5, 0.0, g);
        auto F = evaluate_F(u0, SignFlag::focusing);
        double peak = 0.0;
        for (const auto& v : F.samples) peak = std::max(peak, std::abs(v));
        // skip the periodic seam node j=0, where the grid identifies +L and -L
        for (int j = 1; j < 4096; ++j) {
            const double x = g->nodes()[j];
            const Complex direct = eval_one_param(0.5, 0.0, x) * eval_one_param(0.5, 0.0, x) *
                                   std::conj(eval_one_param(0.5, 0.0, -x));
            CHECK(std::abs(F.samples[j] - direct) <= 1e-14 * peak);
        }
    }

    SUBCASE("sign symmetry, exactly") {
        auto g = make_grid(256, 20.0);
        auto f = testutil::random_smooth_field(g, 12u);
        auto Fp = evaluate_F(f, SignFlag::focusing);
        auto Fm = evaluate_F(f, SignFlag::defocusing);
        for (size_t j = 0; j < f.samples.size(); ++j) CHECK(Fm.samples[j] == -Fp.samples[j]);
    }
}

TEST_CASE("evaluate_F_x agrees with the spectral derivative of evaluate_F") {
    SUBCASE("soliton data") {
        auto g = make_grid(4096, 40.0);
        auto phi = testutil::sample_soliton(1.0, 0.0, g);
        auto direct = evaluate_F_x(phi, SignFlag::focusing);
        auto spectral = spectral_derivative(evaluate_F(phi, SignFlag::focusing), 1);
        CHECK(testutil::max_abs_diff(direct.samples, spectral.samples) < 1e-9);
    }

    SUBCASE("one-param data") {
        auto g = make_grid(4096, 80.0);
        auto u0 = testutil::sample_one_param(0.5, 0.0, g);
        auto direct = evaluate_F_x(u0, SignFlag::focusing);
        auto spectral = spectral_derivative(evaluate_F(u0, SignFlag::focusing), 1);
        CHECK(testutil::max_abs_diff(direct.samples, spectral.samples) < 1e-9);
    }

    SUBCASE("zero field") {
        auto g = make_grid(64, 5.0);
        for (const auto& v : evaluate_F_x(zero_field(g), SignFlag::focusing).samples)
            CHECK(v == Complex(0.0, 0.0));
    }
}

TEST_CASE("dealias") {
    auto g = make_grid(256, 10.0);

    SUBCASE("idempotent up to transform roundoff") {
        auto f = testutil::random_smooth_field(g, 8u);
        auto once = dealias(f);
        auto twice = dealias(once);
        double scale = 0.0;
        for (const auto& v : once.samples) scale = std::max(scale, std::abs(v));
        CHECK(testutil::max_abs_diff(once.samples, twice.samples) < 1e-14 * scale);
    }

    SUBCASE("pure top mode is annihilated") {
        std::vector<Complex> spec(256, Complex(0.0, 0.0));
        spec[128] = Complex(1.0, 0.0);  // Nyquist
        SpectralField f{g, {}, 0.0};
        g->backward(spec, f.samples);
        for (const auto& v : dealias(f).samples) CHECK(std::abs(v) < 1e-15);
    }

    SUBCASE("well-resolved soliton is essentially unchanged") {
        auto gs = make_grid(1024, 40.0);
        auto phi = testutil::sample_soliton(1.0, 0.0, gs);
        auto d = dealias(phi);
        SpectralField diff = phi;
        for (size_t j = 0; j < diff.samples.size(); ++j) diff.samples[j] -= d.samples[j];
        CHECK(std::sqrt(l2_norm_sq(diff) / l2_norm_sq(phi)) < 1e-12);
    }
}

TEST_CASE("pair_ode_rhs") {
    const Complex i(0.0, 1.0);
    SUBCASE("fixed-point reduction") {
        auto [da, db] = pair_ode_rhs(Complex(1.0, 0.0), Complex(1.0, 0.0), SignFlag::focusing);
        CHECK(da == i);
        CHECK(db == i);
    }
    SUBCASE("one member zero freezes both") {
        auto [da, db] = pair_ode_rhs(Complex(1.0, 0.0), Complex(0.0, 0.0), SignFlag::focusing);
        CHECK(da == Complex(0.0, 0.0));
        CHECK(db == Complex(0.0, 0.0));
    }
    SUBCASE("generic complex pair") {
        auto [da, db] = pair_ode_rhs(Complex(1.0, 0.0), i, SignFlag::focusing);
        CHECK(std::abs(da - Complex(1.0, 0.0)) < 1e-16);
        CHECK(std::abs(db - Complex(0.0, -1.0)) < 1e-16);
    }
    SUBCASE("defocusing flips the sign") {
        auto [da, db] = pair_ode_rhs(Complex(0.4, 0.2), Complex(-0.1, 0.9), SignFlag::focusing);
        auto [ea, eb] = pair_ode_rhs(Complex(0.4, 0.2), Complex(-0.1, 0.9), SignFlag::defocusing);
        CHECK(ea == -da);
        CHECK(eb == -db);
    }
}

// The pure-nonlinear substep dynamics: for each mirrored pair, the product
// p = a conj(b) is a constant of motion, which makes the substep exactly
// solvable as a -> a e^{i s p dt}. Pointwise moduli are NOT conserved when
// Im p != 0, which is why the local-NLS phase rotation cannot be reused for
// non-even data.
TEST_CASE("nonlinear substep structure") {
    auto g = make_grid(256, 15.0);
    auto f = testutil::random_smooth_field(g, 77u, 1.5);
    const auto& r = g->reflect_index();

    SUBCASE("p = a conj(b) is conserved; moduli are not") {
        SpectralField u = f;
        const int steps = 100;
        for (int s = 0; s < steps; ++s)
            u = nonlinear_substep(u, 1e-3, SignFlag::focusing);
        // reference with 100x smaller steps
        SpectralField ref = f;
        for (int s = 0; s < steps * 100; ++s)
            ref = nonlinear_substep(ref, 1e-5, SignFlag::focusing);

        double p_drift = 0.0, modulus_change = 0.0, vs_ref = 0.0;
        for (int j = 0; j < 256; ++j) {
            const Complex p0 = f.samples[j] * std::conj(f.samples[r[j]]);
            const Complex pT = ref.samples[j] * std::conj(ref.samples[r[j]]);
            p_drift = std::max(p_drift, std::abs(pT - p0));
            modulus_change = std::max(
                modulus_change, std::abs(std::abs(ref.samples[j]) - std::abs(f.samples[j])));
            vs_ref = std::max(vs_ref, std::abs(u.samples[j] - ref.samples[j]));
        }
        CHECK(p_drift < 1e-10);
        CHECK(modulus_change > 0.01);
        CHECK(vs_ref < 1e-10);
    }

    SUBCASE("single step matches the exact pair rotation") {
        const double dt = 1e-3;
        auto u = nonlinear_substep(f, dt, SignFlag::focusing);
        for (int j = 0; j < 256; ++j) {
            const Complex p = f.samples[j] * std::conj(f.samples[r[j]]);
            const Complex expect = f.samples[j] * std::exp(Complex(0.0, 1.0) * p * dt);
            CHECK(std::abs(u.samples[j] - expect) < 1e-12);
        }
    }

    SUBCASE("real even data: substep equals the local phase rotation") {
        auto phi = testutil::sample_soliton(1.0, 0.0, g);
        const double dt = 1e-3;
        auto u = nonlinear_substep(phi, dt, SignFlag::focusing);
        double worst = 0.0;
        for (size_t j = 0; j < phi.samples.size(); ++j) {
            const Complex expect =
                phi.samples[j] * std::polar(1.0, std::norm(phi.samples[j]) * dt);
            worst = std::max(worst, std::abs(u.samples[j] - expect));
        }
        CHECK(worst < 1e-13);
    }

    SUBCASE("RK4 self-convergence ratio on non-even data") {
        const double dt = 1e-2;
        auto one = nonlinear_substep(f, dt, SignFlag::focusing);
        auto half = nonlinear_substep(nonlinear_substep(f, dt / 2.0, SignFlag::focusing),
                                      dt / 2.0, SignFlag::focusing);
        double e1 = 0.0, e2 = 0.0;
        for (int j = 0; j < 256; ++j) {
            if (r[j] == j) continue;  // fixed points are integrated exactly
            const Complex p = f.samples[j] * std::conj(f.samples[r[j]]);
            const Complex exact = f.samples[j] * std::exp(Complex(0.0, 1.0) * p * dt);
            e1 = std::max(e1, std::abs(one.samples[j] - exact));
            // two half steps: propagate the exact solution stepwise
            const Complex mid = f.samples[j] * std::exp(Complex(0.0, 1.0) * p * (dt / 2.0));
            (void)mid;
            e2 = std::max(e2, std::abs(half.samples[j] - exact));
        }
        const double ratio = e1 / e2;
        CHECK(ratio > 12.8);
        CHECK(ratio < 19.2);
    }
}
