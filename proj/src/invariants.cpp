#include "nnls/invariants.hpp"

#include <cmath>

namespace nnls {

Complex charge_nonlocal(const SpectralField& f) {
    const auto& r = f.grid->reflect_index();
    Complex acc(0.0, 0.0);
    for (size_t j = 0; j < f.samples.size(); ++j)
        acc += f.samples[j] * std::conj(f.samples[static_cast<size_t>(r[j])]);
    return 0.5 * f.grid->spacing() * acc;
}

Complex energy_nonlocal(const SpectralField& f, SignFlag sign) {
    const auto& r = f.grid->reflect_index();
    const SpectralField ux = spectral_derivative(f, 1);
    Complex kin(0.0, 0.0);
    Complex quart(0.0, 0.0);
    for (size_t j = 0; j < f.samples.size(); ++j) {
        const size_t rj = static_cast<size_t>(r[j]);
        kin += ux.samples[j] * std::conj(ux.samples[rj]);
        const Complex p = f.samples[j] * std::conj(f.samples[rj]);
        quart += p * p;
    }
    const double dx = f.grid->spacing();
    return -0.5 * dx * kin - sign_multiplier(sign) * 0.25 * dx * quart;
}

double charge_local(const SpectralField& f) { return 0.5 * l2_norm_sq(f); }

double energy_local(const SpectralField& f, SignFlag sign) {
    const SpectralField ux = spectral_derivative(f, 1);
    double quart = 0.0;
    for (const Complex& v : f.samples) {
        const double m2 = std::norm(v);
        quart += m2 * m2;
    }
    return 0.5 * l2_norm_sq(ux) - sign_multiplier(sign) * 0.25 * quart * f.grid->spacing();
}

double sup_norm(const SpectralField& f) {
    double m = 0.0;
    for (const Complex& v : f.samples) m = std::max(m, std::abs(v));
    return m;
}

// Monitoring runs every few steps; everything is derived from one
// derivative transform into thread-local scratch.
InvariantSample monitor(const SpectralField& f, SignFlag sign) {
    thread_local std::vector<Complex> spec, ux;
    const auto& k = f.grid->wavenumbers();
    const auto& r = f.grid->reflect_index();
    const size_t n = f.samples.size();

    f.grid->forward(f.samples, spec);
    for (size_t j = 0; j < n; ++j) spec[j] *= Complex(0.0, k[j]);
    spec[n / 2] = 0.0;
    f.grid->backward(spec, ux);

    Complex q(0.0, 0.0), kin(0.0, 0.0), quart(0.0, 0.0);
    double sup = 0.0, l2sq = 0.0, ux_sq = 0.0;
    for (size_t j = 0; j < n; ++j) {
        const size_t rj = static_cast<size_t>(r[j]);
        const Complex p = f.samples[j] * std::conj(f.samples[rj]);
        q += p;
        quart += p * p;
        kin += ux[j] * std::conj(ux[rj]);
        sup = std::max(sup, std::abs(f.samples[j]));
        l2sq += std::norm(f.samples[j]);
        ux_sq += std::norm(ux[j]);
    }
    const double dx = f.grid->spacing();
    InvariantSample s;
    s.time = f.time;
    s.Q = 0.5 * dx * q;
    s.E = -0.5 * dx * kin - sign_multiplier(sign) * 0.25 * dx * quart;
    s.sup_norm = sup;
    s.l2 = std::sqrt(l2sq * dx);
    s.h1 = std::sqrt((l2sq + ux_sq) * dx);
    return s;
}

}  // namespace nnls
