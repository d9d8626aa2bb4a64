#include "nnls/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nnls {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

// The two denominator exponentials e^{-4 i alpha^2 t + 2 alpha x} and
// e^{-4 i beta^2 t - 2 beta x} can overflow for |x| of order L. Both are
// rescaled by e^{-m}, m = max of the real exponents (m >= 0 on the real
// line), so the scaled sum s has modulus in (0, 2] and
// |denominator| = e^m |s|. The pole test compares in log space.
Complex eval_two_param(const TwoSolitonParams& p, double t, double x, double pole_floor) {
    require_positive(p.alpha, "alpha");
    require_positive(p.beta, "beta");
    const Complex ea(2.0 * p.alpha * x, -4.0 * p.alpha * p.alpha * t);
    const Complex eb(-2.0 * p.beta * x, -4.0 * p.beta * p.beta * t);
    const double m = std::max(ea.real(), eb.real());
    const Complex s = std::exp(ea - m) + std::exp(eb - m);
    if (m + std::log(std::abs(s)) < std::log(pole_floor))
        throw PoleProximityError("denominator modulus below pole floor at t=" +
                                 std::to_string(t) + ", x=" + std::to_string(x));
    const double amp = 2.0 * kSqrt2 * (p.alpha + p.beta);
    return amp * std::exp(-m) / s;
}

Complex eval_one_param(double alpha, double t, double x, double pole_floor) {
    return eval_two_param(TwoSolitonParams{alpha, alpha / 2.0}, t, x, pole_floor);
}

Complex eval_two_param_dt(const TwoSolitonParams& p, double t, double x, double pole_floor) {
    const Complex u = eval_two_param(p, t, x, pole_floor);
    const Complex ea(2.0 * p.alpha * x, -4.0 * p.alpha * p.alpha * t);
    const Complex eb(-2.0 * p.beta * x, -4.0 * p.beta * p.beta * t);
    const double m = std::max(ea.real(), eb.real());
    const Complex sa = std::exp(ea - m);
    const Complex sb = std::exp(eb - m);
    const Complex i4a2(0.0, 4.0 * p.alpha * p.alpha);
    const Complex i4b2(0.0, 4.0 * p.beta * p.beta);
    return u * (i4a2 * sa + i4b2 * sb) / (sa + sb);
}

Complex eval_soliton(const SolitonParams& p, double t, double x) {
    require_positive(p.omega, "omega");
    const double s = std::sqrt(p.omega);
    const double ax = std::abs(x);
    // 2 sqrt(2 w) e^{-s|x|} / (1 + e^{-2 s |x|}), overflow-free.
    const double profile =
        2.0 * std::sqrt(2.0 * p.omega) * std::exp(-s * ax) / (1.0 + std::exp(-2.0 * s * ax));
    return std::polar(profile, p.omega * t);
}

double eval_perturbed_soliton_initial(const PerturbedSolitonParams& p, double x) {
    require_positive(p.omega, "omega");
    if (p.delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
    const double ra = std::sqrt(p.omega);
    const double rb = std::sqrt(p.omega + p.delta);
    const double m = std::max(ra * x, -rb * x);  // m >= 0
    const double s = std::exp(ra * x - m) + std::exp(-rb * x - m);
    return kSqrt2 * (ra + rb) * std::exp(-m) / s;
}

double blow_up_time(const TwoSolitonParams& p, int m) {
    require_positive(p.alpha, "alpha");
    require_positive(p.beta, "beta");
    if (p.alpha == p.beta)
        throw NoBlowUpError("no blow-up in this family: alpha == beta is the soliton case");
    return (2.0 * m + 1.0) * M_PI / (4.0 * (p.alpha * p.alpha - p.beta * p.beta));
}

double first_blowup_alpha(double alpha) {
    require_positive(alpha, "alpha");
    return M_PI / (3.0 * alpha * alpha);
}

double perturbed_soliton_blowup_time(const PerturbedSolitonParams& p) {
    require_positive(p.omega, "omega");
    if (p.delta == 0.0)
        throw NoBlowUpError("no blow-up: delta = 0 is the soliton itself");
    if (p.delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
    // alpha^2 - beta^2 = -delta/4, so the first positive time (m = -1 in the
    // T_m formula) is pi/delta, independent of omega.
    return M_PI / p.delta;
}

double predicted_seminorm_sq(double alpha, int k) {
    require_positive(alpha, "alpha");
    switch (k) {
        case 0: return 4.0 * M_PI * alpha / 3.0;
        case 1: return 8.0 * M_PI * std::pow(alpha, 3) / (3.0 * std::sqrt(3.0));
        case 2: return 8.0 * M_PI * std::pow(alpha, 5) / std::sqrt(3.0);
        default:
            throw std::invalid_argument(
                "predicted_seminorm_sq: catalog constants exist for k in {0,1,2} only");
    }
}

double reference_seminorm_sq(double alpha, int k) {
    require_positive(alpha, "alpha");
    switch (k) {
        case 0: return 4.0 * M_PI * alpha / std::sqrt(3.0);
        case 1: return 8.0 * M_PI * std::pow(alpha, 3) / (3.0 * std::sqrt(3.0));
        case 2: return 8.0 * M_PI * std::pow(alpha, 5) / std::sqrt(3.0);
        case 3: return 56.0 * M_PI * std::pow(alpha, 7) / std::sqrt(3.0);
        default:
            throw std::invalid_argument(
                "reference_seminorm_sq: verified constants exist for k in {0,1,2,3} only");
    }
}

double origin_modulus_one_param(double alpha, double t) {
    require_positive(alpha, "alpha");
    return 3.0 * kSqrt2 * alpha / (2.0 * std::abs(std::cos(1.5 * alpha * alpha * t)));
}

double sup_norm_one_param(double alpha, double t) {
    require_positive(alpha, "alpha");
    // |D(t,x)|^2 = v^4 + v^-2 + 2 v c with v = e^{alpha x}, c = cos(3 a^2 t);
    // the minimizer solves 2 v^6 + c v^3 - 1 = 0.
    const double c = std::cos(3.0 * alpha * alpha * t);
    const double v3 = (std::sqrt(c * c + 8.0) - c) / 4.0;
    const double v = std::cbrt(v3);
    const double dmin_sq = std::pow(v, 4) + 1.0 / (v * v) + 2.0 * v * c;
    return 3.0 * kSqrt2 * alpha / std::sqrt(dmin_sq);
}

Complex eval_solution(const SolutionSpec& spec, double t, double x, double pole_floor) {
    return std::visit(
        [&](const auto& s) -> Complex {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroData>) {
                (void)s;
                return Complex(0.0, 0.0);
            } else if constexpr (std::is_same_v<T, SolitonParams>) {
                return eval_soliton(s, t, x);
            } else if constexpr (std::is_same_v<T, OneParamParams>) {
                return eval_one_param(s.alpha, t, x, pole_floor);
            } else if constexpr (std::is_same_v<T, TwoSolitonParams>) {
                return eval_two_param(s, t, x, pole_floor);
            } else {
                const TwoSolitonParams tp{std::sqrt(s.omega) / 2.0,
                                          std::sqrt(s.omega + s.delta) / 2.0};
                return eval_two_param(tp, t, x, pole_floor);
            }
        },
        spec);
}

double decay_rate(const SolutionSpec& spec) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroData>) {
                (void)s;
                return 1.0;
            } else if constexpr (std::is_same_v<T, SolitonParams>) {
                return std::sqrt(s.omega);
            } else if constexpr (std::is_same_v<T, OneParamParams>) {
                return s.alpha;  // min(2 alpha, 2 beta) with beta = alpha/2
            } else if constexpr (std::is_same_v<T, TwoSolitonParams>) {
                return 2.0 * std::min(s.alpha, s.beta);
            } else {
                return std::sqrt(s.omega);
            }
        },
        spec);
}

SpectralField sample_exact(const SolutionSpec& spec, double t, const GridPtr& grid,
                           double pole_floor) {
    SpectralField f = zero_field(grid, t);
    const auto& x = grid->nodes();
    for (size_t j = 0; j < x.size(); ++j)
        f.samples[j] = eval_solution(spec, t, x[j], pole_floor);
    return f;
}

}  // namespace nnls
