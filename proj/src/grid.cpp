#include "nnls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace nnls {

namespace detail {

// FFTW plan creation is not thread-safe; executions via fftw_execute_dft on
// distinct arrays are. Plans are created once per grid under a global mutex
// and used out-of-place with FFTW_UNALIGNED so any buffer is acceptable.
class FftEngine {
  public:
    explicit FftEngine(int n) : n_(n) {
        static std::mutex plan_mutex;
        std::lock_guard<std::mutex> lock(plan_mutex);
        in_ = fftw_alloc_complex(static_cast<size_t>(n));
        out_ = fftw_alloc_complex(static_cast<size_t>(n));
        fwd_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_dft_1d(n, in_, out_, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (fwd_ == nullptr || bwd_ == nullptr)
            throw std::runtime_error("FFT plan creation failed");
    }

    ~FftEngine() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(in_);
        fftw_free(out_);
    }

    void forward(const Complex* in, Complex* out) const {
        fftw_execute_dft(fwd_,
                         reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    void backward(const Complex* in, Complex* out) const {
        fftw_execute_dft(bwd_,
                         reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    int size() const { return n_; }

  private:
    int n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

}  // namespace detail

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec::GridSpec(int n, double half_length)
    : n_(n),
      half_length_(half_length),
      dx_(2.0 * half_length / n),
      nodes_(static_cast<size_t>(n)),
      wavenumbers_(static_cast<size_t>(n)),
      reflect_(static_cast<size_t>(n)),
      fft_(std::make_unique<detail::FftEngine>(n)) {
    const double k0 = M_PI / half_length_;
    for (int j = 0; j < n_; ++j) {
        nodes_[static_cast<size_t>(j)] = -half_length_ + j * dx_;
        const int m = (j <= n_ / 2) ? j : j - n_;
        wavenumbers_[static_cast<size_t>(j)] = k0 * m;
        reflect_[static_cast<size_t>(j)] = (n_ - j) % n_;
    }
}

GridSpec::~GridSpec() = default;

void GridSpec::forward(const std::vector<Complex>& in, std::vector<Complex>& out) const {
    if (static_cast<int>(in.size()) != n_)
        throw std::invalid_argument("forward: sample count does not match grid");
    out.resize(in.size());
    fft_->forward(in.data(), out.data());
}

void GridSpec::backward(const std::vector<Complex>& in, std::vector<Complex>& out) const {
    if (static_cast<int>(in.size()) != n_)
        throw std::invalid_argument("backward: sample count does not match grid");
    out.resize(in.size());
    fft_->backward(in.data(), out.data());
    const double inv_n = 1.0 / n_;
    for (auto& v : out) v *= inv_n;
}

GridPtr make_grid(int num_points, double half_length) {
    if (!is_power_of_two(num_points) || num_points < 8)
        throw std::invalid_argument("make_grid: N must be a power of two, N >= 8 (got " +
                                    std::to_string(num_points) + ")");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw std::invalid_argument("make_grid: L must be positive and finite");
    return GridPtr(new GridSpec(num_points, half_length));
}

SpectralField zero_field(const GridPtr& grid, double t) {
    return SpectralField{grid, std::vector<Complex>(static_cast<size_t>(grid->num_points())), t};
}

bool all_finite(const SpectralField& f) {
    for (const Complex& v : f.samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

SpectralField reflect_conjugate(const SpectralField& f) {
    const auto& r = f.grid->reflect_index();
    SpectralField out{f.grid, std::vector<Complex>(f.samples.size()), f.time};
    for (size_t j = 0; j < f.samples.size(); ++j)
        out.samples[j] = std::conj(f.samples[static_cast<size_t>(r[j])]);
    return out;
}

SpectralField spectral_derivative(const SpectralField& f, int order) {
    if (order < 0) throw std::invalid_argument("spectral_derivative: order must be >= 0");
    if (order == 0) return f;
    const int n = f.grid->num_points();
    const auto& k = f.grid->wavenumbers();
    std::vector<Complex> spec;
    f.grid->forward(f.samples, spec);
    // (ik)^order = i^order * k^order with i^order cycling through {1,i,-1,-i}
    static const Complex i_pow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    const Complex rot = i_pow[order % 4];
    for (int j = 0; j < n; ++j) {
        double kp = 1.0;
        for (int m = 0; m < order; ++m) kp *= k[static_cast<size_t>(j)];
        spec[static_cast<size_t>(j)] *= rot * kp;
    }
    if (order % 2 == 1) spec[static_cast<size_t>(n / 2)] = 0.0;  // sign-ambiguous Nyquist
    SpectralField out{f.grid, {}, f.time};
    f.grid->backward(spec, out.samples);
    return out;
}

double l2_norm_sq(const SpectralField& f) {
    double acc = 0.0;
    for (const Complex& v : f.samples) acc += std::norm(v);
    return acc * f.grid->spacing();
}

double seminorm_sq(const SpectralField& f, int order) {
    if (order == 0) return l2_norm_sq(f);
    return l2_norm_sq(spectral_derivative(f, order));
}

double sobolev_norm_sq(const SpectralField& f, int k) {
    if (k < 0) throw std::invalid_argument("sobolev_norm_sq: k must be >= 0");
    double acc = 0.0;
    for (int m = 0; m <= k; ++m) acc += seminorm_sq(f, m);
    return acc;
}

}  // namespace nnls
