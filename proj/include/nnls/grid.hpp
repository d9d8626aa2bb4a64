#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace nnls {

using Complex = std::complex<double>;

namespace detail {
class FftEngine;  // FFTW wrapper, defined in grid.cpp
}

/// Uniform periodic grid on [-L, L) with nodes x_j = -L + j*dx, dx = 2L/N.
///
/// The layout is chosen so that spatial reflection x -> -x is an exact index
/// permutation: reflect[j] = (N - j) mod N gives x_{reflect[j]} = -x_j, with
/// x_0 = -L identified with +L by periodicity. Fixed points are j = 0 and
/// j = N/2 (the origin). Wavenumbers are in DFT ordering with fundamental
/// pi/L.
class GridSpec {
  public:
    ~GridSpec();
    GridSpec(const GridSpec&) = delete;
    GridSpec& operator=(const GridSpec&) = delete;

    int num_points() const { return n_; }
    double half_length() const { return half_length_; }
    double spacing() const { return dx_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& wavenumbers() const { return wavenumbers_; }
    /// Index permutation realizing x -> -x.
    const std::vector<int>& reflect_index() const { return reflect_; }

    /// Unnormalized forward DFT; out[m] = sum_j in[j] e^{-2 pi i j m / N}.
    void forward(const std::vector<Complex>& in, std::vector<Complex>& out) const;
    /// Inverse of forward(), including the 1/N normalization.
    void backward(const std::vector<Complex>& in, std::vector<Complex>& out) const;

  private:
    friend std::shared_ptr<const GridSpec> make_grid(int, double);
    GridSpec(int n, double half_length);

    int n_;
    double half_length_;
    double dx_;
    std::vector<double> nodes_;
    std::vector<double> wavenumbers_;
    std::vector<int> reflect_;
    std::unique_ptr<detail::FftEngine> fft_;
};

using GridPtr = std::shared_ptr<const GridSpec>;

/// Complex samples u(t, x_j) on a grid, with the time stamp of the slice.
struct SpectralField {
    GridPtr grid;
    std::vector<Complex> samples;
    double time = 0.0;
};

/// Builds a grid. N must be a power of two, N >= 8; L > 0.
GridPtr make_grid(int num_points, double half_length);

/// Field of zeros at time t.
SpectralField zero_field(const GridPtr& grid, double t = 0.0);

/// True iff every sample is finite (non-finite samples are a detected
/// blow-up state and must never be stored).
bool all_finite(const SpectralField& f);

/// Samples of conj(u(-x)): output[j] = conj(input[reflect[j]]). Time stamp
/// is preserved. Involution.
SpectralField reflect_conjugate(const SpectralField& f);

/// d^order/dx^order via DFT: multiply mode k by (ik)^order. The Nyquist mode
/// is zeroed for odd orders.
SpectralField spectral_derivative(const SpectralField& f, int order);

/// Periodic rectangle rule for |u|^2: sum_j |u_j|^2 dx. Spectrally accurate
/// for smooth data that decays below roundoff at the domain ends.
double l2_norm_sq(const SpectralField& f);

/// Squared L2 norm of the m-th spectral derivative (m = 0 is l2_norm_sq).
double seminorm_sq(const SpectralField& f, int order);

/// sum_{m=0..k} seminorm_sq(f, m); k = 1 gives the squared H1 norm.
double sobolev_norm_sq(const SpectralField& f, int k);

}  // namespace nnls
