#pragma once

#include "nnls/grid.hpp"
#include "nnls/nonlinearity.hpp"

namespace nnls {

/// One row of run monitoring. Q and E are stored complex: both are real up
/// to roundoff for any field (an exact symmetry of the discrete sums under
/// the reflection permutation), so the imaginary parts are free consistency
/// diagnostics. l2 and h1 are norms, not squares.
struct InvariantSample {
    double time = 0.0;
    Complex Q{0.0, 0.0};
    Complex E{0.0, 0.0};
    double sup_norm = 0.0;
    double l2 = 0.0;
    double h1 = 0.0;
};

/// Q(u) = 1/2 integral of u(x) conj(u)(-x) dx.
Complex charge_nonlocal(const SpectralField& f);

/// E(u) = -1/2 integral u_x(x) conj(u_x)(-x) dx
///        - sign/4 integral u^2(x) conj(u)^2(-x) dx.
/// The kinetic term is the quadrature of u_x d/dx[conj(u)(-x)]; written via
/// the identity d/dx[conj(u)(-x)] = -conj(u_x)(-x) it needs one derivative.
/// This is the combination conserved by the flow for either sign (the
/// quartic sign follows the equation, so defocusing runs monitor their own
/// conserved energy). For even fields it reduces to the local energy.
Complex energy_nonlocal(const SpectralField& f, SignFlag sign = SignFlag::focusing);

/// Local charge Q = 1/2 integral |u|^2.
double charge_local(const SpectralField& f);

/// Local energy E = 1/2 integral |u_x|^2 - sign/4 integral |u|^4.
double energy_local(const SpectralField& f, SignFlag sign = SignFlag::focusing);

/// max_j |u(x_j)|.
double sup_norm(const SpectralField& f);

/// Evaluates all monitored quantities at the field's time stamp.
InvariantSample monitor(const SpectralField& f, SignFlag sign = SignFlag::focusing);

}  // namespace nnls
