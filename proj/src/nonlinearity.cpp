#include "nnls/nonlinearity.hpp"

#include <cmath>

namespace nnls {

SpectralField evaluate_F(const SpectralField& f, SignFlag sign, bool dealias_result) {
    const double s = sign_multiplier(sign);
    const auto& r = f.grid->reflect_index();
    SpectralField out{f.grid, std::vector<Complex>(f.samples.size()), f.time};
    for (size_t j = 0; j < f.samples.size(); ++j) {
        const Complex& u = f.samples[j];
        out.samples[j] = s * u * u * std::conj(f.samples[static_cast<size_t>(r[j])]);
    }
    return dealias_result ? dealias(out) : out;
}

SpectralField evaluate_F_x(const SpectralField& f, SignFlag sign) {
    const double s = sign_multiplier(sign);
    const auto& r = f.grid->reflect_index();
    const SpectralField ux = spectral_derivative(f, 1);
    SpectralField out{f.grid, std::vector<Complex>(f.samples.size()), f.time};
    for (size_t j = 0; j < f.samples.size(); ++j) {
        const size_t rj = static_cast<size_t>(r[j]);
        const Complex& u = f.samples[j];
        const Complex ur = std::conj(f.samples[rj]);    // conj(u)(-x)
        const Complex uxr = std::conj(ux.samples[rj]);  // conj(u_x)(-x)
        out.samples[j] = s * (2.0 * u * ux.samples[j] * ur - u * u * uxr);
    }
    return out;
}

SpectralField dealias(const SpectralField& f) {
    const int n = f.grid->num_points();
    const auto& k = f.grid->wavenumbers();
    const double k_cut = (2.0 / 3.0) * (M_PI / f.grid->half_length()) * (n / 2);
    std::vector<Complex> spec;
    f.grid->forward(f.samples, spec);
    for (int j = 0; j < n; ++j)
        if (std::abs(k[static_cast<size_t>(j)]) > k_cut) spec[static_cast<size_t>(j)] = 0.0;
    SpectralField out{f.grid, {}, f.time};
    f.grid->backward(spec, out.samples);
    return out;
}

std::pair<Complex, Complex> pair_ode_rhs(Complex a, Complex b, SignFlag sign) {
    const Complex is(0.0, sign_multiplier(sign));
    return {is * a * a * std::conj(b), is * b * b * std::conj(a)};
}

}  // namespace nnls
