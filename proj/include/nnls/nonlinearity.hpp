#pragma once

#include <utility>

#include "nnls/grid.hpp"

namespace nnls {

/// Sign of the cubic term: +1 couples the focusing equation
/// i u_t + u_xx + u^2(x) conj(u)(-x) = 0, -1 the defocusing variant.
enum class SignFlag { focusing, defocusing };

inline double sign_multiplier(SignFlag s) {
    return s == SignFlag::focusing ? 1.0 : -1.0;
}

/// F(u)(x) = sign * u^2(x) * conj(u)(-x), evaluated pointwise on the grid
/// via the reflection index map. Optional two-thirds dealiasing of the
/// product (off by default so oracle comparisons see untouched values).
SpectralField evaluate_F(const SpectralField& f, SignFlag sign, bool dealias_result = false);

/// Spatial derivative of F by the product rule,
///   F(u)_x = sign * [ 2 u u_x conj(u)(-x) - u^2 conj(u_x)(-x) ],
/// with u_x from spectral_derivative. Cross-checked in tests against the
/// spectral derivative of evaluate_F.
SpectralField evaluate_F_x(const SpectralField& f, SignFlag sign);

/// Two-thirds rule: zeroes Fourier modes with |k| above two thirds of the
/// maximum resolved wavenumber. Idempotent up to transform roundoff.
SpectralField dealias(const SpectralField& f);

/// Right-hand side of the pure-nonlinear substep for one mirrored node pair
/// a = u(x), b = u(-x):
///   da/dt = i sign a^2 conj(b),  db/dt = i sign b^2 conj(a).
/// At reflection fixed points (a = b) this reduces to the local rotation law
/// da/dt = i sign |a|^2 a.
std::pair<Complex, Complex> pair_ode_rhs(Complex a, Complex b, SignFlag sign);

}  // namespace nnls
