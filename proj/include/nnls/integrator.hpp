#pragma once

#include <optional>
#include <vector>

#include "nnls/grid.hpp"
#include "nnls/invariants.hpp"
#include "nnls/nonlinearity.hpp"

namespace nnls {

enum class Scheme { strang_pair_rk4, if_rk4 };

/// Choice of nonlinear coupling: the nonlocal term pairs each node with its
/// mirror through the reflection map; the local variant replaces the
/// reflected conjugate by the plain conjugate (used for even-data
/// equivalence experiments).
enum class NonlinearityKind { nonlocal, local_cubic };

enum class Termination { completed, blowup_detected, dt_underflow, nonfinite_abort };

const char* to_string(Termination t);
const char* to_string(Scheme s);

struct StepperConfig {
    Scheme scheme = Scheme::strang_pair_rk4;
    double dt0 = 1e-3;
    bool adaptive = true;
    double dt_min = 1e-9;
    /// Stop when sup-norm exceeds this multiple of the initial sup-norm.
    double amplitude_threshold = 10.0;
    /// Completed runs with relative Re Q drift above this are flagged.
    double conservation_tol = 1e-8;
    bool dealias = true;
    int monitor_stride = 10;
};

struct BlowupEstimate {
    double time = 0.0;
    double uncertainty = 0.0;
};

struct TrajectoryRecord {
    std::vector<InvariantSample> samples;  // strictly increasing times
    Termination termination = Termination::completed;
    double final_time = 0.0;
    std::optional<BlowupEstimate> blowup_estimate;
    /// Max relative drift of Re Q / Re E over the monitored samples.
    double charge_drift = 0.0;
    double energy_drift = 0.0;
    /// False when a completed run violates conservation_tol on Re Q.
    bool conservation_ok = true;
};

/// Thrown by estimate_blowup_time when fewer than four monitored points
/// show monotone sup-norm growth (or the trajectory completed normally).
class InsufficientTailError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Exact free-Schroedinger evolution on the grid: multiply mode k by
/// e^{-i k^2 dt}. Unitary, so the l2 norm is preserved to roundoff.
SpectralField linear_propagate(const SpectralField& f, double dt);

/// Advances u_t = i sign u^2(x) conj(u)(-x) by dt. Mirrored index pairs are
/// integrated by one classical RK4 step of the pair system; reflection
/// fixed points (j = reflect[j]) get the exact rotation
/// a -> a e^{i sign |a|^2 dt}, which is the true substep solution there.
/// The local_cubic kind applies the exact rotation at every node.
SpectralField nonlinear_substep(const SpectralField& f, double dt, SignFlag sign,
                                NonlinearityKind kind = NonlinearityKind::nonlocal);

/// One full step of the configured scheme, advancing the time stamp by dt.
/// strang_pair_rk4: linear(dt/2) o nonlinear(dt) o linear(dt/2), with
/// two-thirds dealiasing after the nonlinear substep when enabled.
/// if_rk4: integrating-factor RK4 in the interaction picture, with the same
/// dealiasing policy applied to the transformed nonlinearity.
SpectralField step(const SpectralField& f, double dt, const StepperConfig& cfg, SignFlag sign,
                   NonlinearityKind kind = NonlinearityKind::nonlocal);

/// Amplitude-adaptive step size: dt = min(dt0, c_cfl / (1 + sup^2)) with
/// c_cfl = dt0 (1 + initial_sup^2); the nonlinear rotation rate scales like
/// |u|^2, so this keeps phase-per-step bounded as the amplitude grows.
double adapt_dt(const SpectralField& f, const StepperConfig& cfg, double initial_sup);

/// Integrates from f0 until t_end or a detected singularity, monitoring
/// every monitor_stride steps (plus the initial and final states). On
/// blow-up or dt-underflow termination a reciprocal-fit blow-up estimate is
/// attached when the sup-norm tail allows one.
TrajectoryRecord run(const SpectralField& f0, double t_end, const StepperConfig& cfg,
                     SignFlag sign, NonlinearityKind kind = NonlinearityKind::nonlocal);

/// Fits the last K monitored points of 1/sup_norm(t) by a least-squares
/// line and extrapolates its zero crossing; near blow-up the amplitude of
/// the exact solutions grows like 1/(T - t), so the reciprocal is
/// asymptotically linear. Uncertainty is half the spread against a refit
/// with K/2 points.
BlowupEstimate estimate_blowup_time(const TrajectoryRecord& traj, int tail_points = 8);

}  // namespace nnls
