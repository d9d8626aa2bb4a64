#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nnls/analytic.hpp"
#include "nnls/invariants.hpp"
#include "test_util.hpp"

using namespace nnls;
using doctest::Approx;

TEST_CASE("charge_nonlocal") {
    SUBCASE("soliton: Q = 2 sqrt(omega)") {
        auto g = make_grid(2048, 40.0);
        const Complex q = charge_nonlocal(testutil::sample_soliton(1.0, 0.0, g));
        CHECK(q.real() == Approx(2.0).epsilon(1e-10));
        CHECK(std::abs(q.imag()) < 1e-14);
    }

    SUBCASE("zero field") {
        auto g = make_grid(64, 5.0);
        CHECK(charge_nonlocal(zero_field(g)) == Complex(0.0, 0.0));
    }

    SUBCASE("one-param data: Q = 3 alpha, real") {
        // closed form: u0(x) u0(-x) = (9 a^2 / 2) sech^2(3 a x / 2),
        // confirmed by the quadrature here
        auto g = make_grid(8192, 80.0);
        const Complex q = charge_nonlocal(testutil::sample_one_param(0.5, 0.0, g));
        CHECK(q.real() == Approx(1.5).epsilon(1e-10));
        CHECK(std::abs(q.imag()) < 1e-14);
    }
}

TEST_CASE("energy_nonlocal") {
    SUBCASE("soliton: E = -(2/3) omega^{3/2}") {
        auto g = make_grid(2048, 40.0);
        const Complex e = energy_nonlocal(testutil::sample_soliton(1.0, 0.0, g));
        CHECK(e.real() == Approx(-2.0 / 3.0).epsilon(1e-9));
        CHECK(std::abs(e.imag()) < 1e-12);
    }

    SUBCASE("zero field") {
        auto g = make_grid(64, 5.0);
        CHECK(energy_nonlocal(zero_field(g)) == Complex(0.0, 0.0));
    }

    SUBCASE("one-param data: E = -3 alpha^3, real") {
        auto g = make_grid(8192, 80.0);
        const Complex e = energy_nonlocal(testutil::sample_one_param(0.5, 0.0, g));
        CHECK(e.real() == Approx(-0.375).epsilon(1e-9));
        CHECK(std::abs(e.imag()) < 1e-12);
    }
}

TEST_CASE("local functionals") {
    auto g = make_grid(2048, 40.0);
    auto phi = testutil::sample_soliton(1.0, 0.0, g);
    CHECK(charge_local(phi) == Approx(2.0).epsilon(1e-10));
    CHECK(energy_local(phi) == Approx(-2.0 / 3.0).epsilon(1e-9));
    CHECK(charge_local(zero_field(g)) == 0.0);
    CHECK(energy_local(zero_field(g)) == 0.0);

    SUBCASE("one-param local charge is half the verified l2 norm") {
        auto g2 = make_grid(8192, 80.0);
        auto u0 = testutil::sample_one_param(0.5, 0.0, g2);
        CHECK(charge_local(u0) ==
              Approx(0.5 * reference_seminorm_sq(0.5, 0)).epsilon(1e-10));
        CHECK(charge_local(u0) == Approx(M_PI / std::sqrt(3.0)).epsilon(1e-10));
    }
}

TEST_CASE("sup_norm") {
    auto g = make_grid(8192, 80.0);
    SUBCASE("soliton peak sits exactly on the origin node") {
        CHECK(sup_norm(testutil::sample_soliton(1.0, 0.0, g)) == std::sqrt(2.0));
    }
    SUBCASE("one-param initial datum") {
        const double s = sup_norm(testutil::sample_one_param(0.5, 0.0, g));
        CHECK(s >= 1.0606601717798212);  // origin value is a lower bound
        CHECK(s == Approx(std::pow(2.0, 7.0 / 6.0) * 0.5).epsilon(5e-5));
        CHECK(s == Approx(sup_norm_one_param(0.5, 0.0)).epsilon(5e-5));
    }
    SUBCASE("zero field") { CHECK(sup_norm(zero_field(g)) == 0.0); }
}

TEST_CASE("realness is structural for any field") {
    auto g = make_grid(512, 12.0);
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
        auto f = testutil::random_smooth_field(g, seed, 2.0);
        const Complex q = charge_nonlocal(f);
        const Complex e = energy_nonlocal(f);
        CHECK(std::abs(q.imag()) < 1e-12 * (1.0 + std::abs(q)));
        CHECK(std::abs(e.imag()) < 1e-10 * (1.0 + std::abs(e)));
    }
}

TEST_CASE("even-data coincidence of nonlocal and local functionals") {
    auto g = make_grid(512, 12.0);
    auto f = testutil::random_smooth_field(g, 21u, 1.0, /*symmetrize=*/true,
                                           /*real_valued=*/true);
    const double ql = charge_local(f);
    const double el = energy_local(f);
    CHECK(charge_nonlocal(f).real() == Approx(ql).epsilon(1e-12));
    CHECK(energy_nonlocal(f).real() == Approx(el).epsilon(1e-12));
}

TEST_CASE("monitor bundles the sampled quantities") {
    auto g = make_grid(1024, 40.0);
    auto phi = testutil::sample_soliton(1.0, 0.0, g);
    phi.time = 2.5;
    const InvariantSample s = monitor(phi);
    CHECK(s.time == 2.5);
    CHECK(s.Q.real() == Approx(2.0).epsilon(1e-9));
    CHECK(s.E.real() == Approx(-2.0 / 3.0).epsilon(1e-8));
    CHECK(s.sup_norm == Approx(std::sqrt(2.0)));
    CHECK(s.l2 == Approx(2.0).epsilon(1e-10));                  // sqrt(4 sqrt(omega))
    CHECK(s.h1 == Approx(std::sqrt(4.0 + 4.0 / 3.0)).epsilon(1e-9));
}
