#include "nnls/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nnls {

const char* to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blowup_detected: return "blowup_detected";
        case Termination::dt_underflow: return "dt_underflow";
        case Termination::nonfinite_abort: return "nonfinite_abort";
    }
    return "unknown";
}

const char* to_string(Scheme s) {
    return s == Scheme::strang_pair_rk4 ? "strang_pair_rk4" : "if_rk4";
}

namespace {

// Scratch buffers for the stepping hot path. Steps are called millions of
// times per run; reusing thread-local arrays avoids a fresh 64+ KB
// allocation per stage, which otherwise dominates the step cost.
struct Workspace {
    std::vector<Complex> spec, phys, phys2, k1, k2, k3, k4, w, phase;
    void ensure(size_t n) {
        for (auto* v : {&spec, &phys, &phys2, &k1, &k2, &k3, &k4, &w, &phase})
            if (v->size() != n) v->resize(n);
    }
};

Workspace& workspace(size_t n) {
    thread_local Workspace ws;
    ws.ensure(n);
    return ws;
}

void substep_rhs(const std::vector<Complex>& w, const std::vector<int>& partner, double s,
                 std::vector<Complex>& out) {
    const Complex is(0.0, s);
    for (size_t j = 0; j < w.size(); ++j)
        out[j] = is * w[j] * w[j] * std::conj(w[static_cast<size_t>(partner[j])]);
}

// RK4 on the pair system U'[j] = i s U[j]^2 conj(U[partner(j)]), in place.
// The system is block-diagonal in mirrored pairs, so grid-wide RK4 is
// exactly per-pair RK4. Fixed points of the reflection get the exact
// rotation (|a| is conserved there).
void substep_inplace(std::vector<Complex>& u, double dt, double s,
                     const std::vector<int>& partner, bool pairs) {
    const size_t n = u.size();
    if (!pairs) {  // local cubic: exact rotation at every node
        for (size_t j = 0; j < n; ++j) u[j] *= std::polar(1.0, s * std::norm(u[j]) * dt);
        return;
    }
    Workspace& ws = workspace(n);
    substep_rhs(u, partner, s, ws.k1);
    for (size_t j = 0; j < n; ++j) ws.w[j] = u[j] + 0.5 * dt * ws.k1[j];
    substep_rhs(ws.w, partner, s, ws.k2);
    for (size_t j = 0; j < n; ++j) ws.w[j] = u[j] + 0.5 * dt * ws.k2[j];
    substep_rhs(ws.w, partner, s, ws.k3);
    for (size_t j = 0; j < n; ++j) ws.w[j] = u[j] + dt * ws.k3[j];
    substep_rhs(ws.w, partner, s, ws.k4);
    for (size_t j = 0; j < n; ++j) {
        if (partner[j] == static_cast<int>(j)) {
            u[j] *= std::polar(1.0, s * std::norm(u[j]) * dt);
        } else {
            u[j] += (dt / 6.0) * (ws.k1[j] + 2.0 * ws.k2[j] + 2.0 * ws.k3[j] + ws.k4[j]);
        }
    }
}

void strang_step_into(const SpectralField& f, double dt, const StepperConfig& cfg,
                      SignFlag sign, NonlinearityKind kind, std::vector<Complex>& out) {
    const GridPtr& grid = f.grid;
    const auto& k = grid->wavenumbers();
    const size_t n = f.samples.size();
    const double k_cut = (2.0 / 3.0) * (M_PI / grid->half_length()) * (grid->num_points() / 2);
    Workspace& ws = workspace(n);

    for (size_t j = 0; j < n; ++j) ws.phase[j] = std::polar(1.0, -k[j] * k[j] * dt * 0.5);

    grid->forward(f.samples, ws.spec);
    for (size_t j = 0; j < n; ++j) ws.spec[j] *= ws.phase[j];
    grid->backward(ws.spec, ws.phys);

    substep_inplace(ws.phys, dt, sign_multiplier(sign), grid->reflect_index(),
                    kind == NonlinearityKind::nonlocal);

    grid->forward(ws.phys, ws.spec);
    if (cfg.dealias) {
        for (size_t j = 0; j < n; ++j)
            ws.spec[j] = (std::abs(k[j]) > k_cut) ? Complex(0.0, 0.0) : ws.spec[j] * ws.phase[j];
    } else {
        for (size_t j = 0; j < n; ++j) ws.spec[j] *= ws.phase[j];
    }
    grid->backward(ws.spec, out);
}

// Integrating-factor RK4: v(t0+tau) = S(-tau) u(t0+tau) satisfies
// v' = S(-tau) [ i F(S(tau) v) ], integrated by classical RK4 in spectral
// space with the exact propagator as integrating factor.
void if_step_into(const SpectralField& f, double dt, const StepperConfig& cfg, SignFlag sign,
                  NonlinearityKind kind, std::vector<Complex>& out) {
    const GridPtr& grid = f.grid;
    const auto& k = grid->wavenumbers();
    const size_t n = f.samples.size();
    const double k_cut = (2.0 / 3.0) * (M_PI / grid->half_length()) * (grid->num_points() / 2);
    const auto& r = grid->reflect_index();
    const double s = sign_multiplier(sign);

    Workspace& ws = workspace(n);
    std::vector<Complex>& vhat = ws.phase;  // reused as the transformed state
    grid->forward(f.samples, vhat);

    auto eval_G = [&](double tau, const std::vector<Complex>& v, std::vector<Complex>& g) {
        for (size_t j = 0; j < n; ++j) ws.spec[j] = v[j] * std::polar(1.0, -k[j] * k[j] * tau);
        grid->backward(ws.spec, ws.phys);
        const Complex is(0.0, s);
        // the reflected read requires a separate output buffer
        if (kind == NonlinearityKind::nonlocal) {
            for (size_t j = 0; j < n; ++j)
                ws.phys2[j] = is * ws.phys[j] * ws.phys[j] *
                              std::conj(ws.phys[static_cast<size_t>(r[j])]);
        } else {
            for (size_t j = 0; j < n; ++j) ws.phys2[j] = is * std::norm(ws.phys[j]) * ws.phys[j];
        }
        grid->forward(ws.phys2, g);
        for (size_t j = 0; j < n; ++j) {
            if (cfg.dealias && std::abs(k[j]) > k_cut)
                g[j] = 0.0;
            else
                g[j] *= std::polar(1.0, k[j] * k[j] * tau);
        }
    };

    eval_G(0.0, vhat, ws.k1);
    for (size_t j = 0; j < n; ++j) ws.w[j] = vhat[j] + 0.5 * dt * ws.k1[j];
    eval_G(0.5 * dt, ws.w, ws.k2);
    for (size_t j = 0; j < n; ++j) ws.w[j] = vhat[j] + 0.5 * dt * ws.k2[j];
    eval_G(0.5 * dt, ws.w, ws.k3);
    for (size_t j = 0; j < n; ++j) ws.w[j] = vhat[j] + dt * ws.k3[j];
    eval_G(dt, ws.w, ws.k4);
    for (size_t j = 0; j < n; ++j) {
        const Complex v =
            vhat[j] + (dt / 6.0) * (ws.k1[j] + 2.0 * ws.k2[j] + 2.0 * ws.k3[j] + ws.k4[j]);
        ws.spec[j] = v * std::polar(1.0, -k[j] * k[j] * dt);
    }
    grid->backward(ws.spec, out);
}

void step_into(const SpectralField& f, double dt, const StepperConfig& cfg, SignFlag sign,
               NonlinearityKind kind, SpectralField& out) {
    out.grid = f.grid;
    if (cfg.scheme == Scheme::strang_pair_rk4)
        strang_step_into(f, dt, cfg, sign, kind, out.samples);
    else
        if_step_into(f, dt, cfg, sign, kind, out.samples);
    out.time = f.time + dt;
}

double relative_drift(double value, double reference) {
    const double scale = std::max(std::abs(reference), 1e-30);
    return std::abs(value - reference) / scale;
}

}  // namespace

SpectralField linear_propagate(const SpectralField& f, double dt) {
    const auto& k = f.grid->wavenumbers();
    std::vector<Complex> spec;
    f.grid->forward(f.samples, spec);
    for (size_t j = 0; j < spec.size(); ++j)
        spec[j] *= std::polar(1.0, -k[j] * k[j] * dt);
    SpectralField out{f.grid, {}, f.time};
    f.grid->backward(spec, out.samples);
    return out;
}

SpectralField nonlinear_substep(const SpectralField& f, double dt, SignFlag sign,
                                NonlinearityKind kind) {
    SpectralField out = f;
    substep_inplace(out.samples, dt, sign_multiplier(sign), f.grid->reflect_index(),
                    kind == NonlinearityKind::nonlocal);
    return out;
}

SpectralField step(const SpectralField& f, double dt, const StepperConfig& cfg, SignFlag sign,
                   NonlinearityKind kind) {
    SpectralField out;
    step_into(f, dt, cfg, sign, kind, out);
    return out;
}

double adapt_dt(const SpectralField& f, const StepperConfig& cfg, double initial_sup) {
    const double c_cfl = cfg.dt0 * (1.0 + initial_sup * initial_sup);
    const double sup = sup_norm(f);
    return std::min(cfg.dt0, c_cfl / (1.0 + sup * sup));
}

TrajectoryRecord run(const SpectralField& f0, double t_end, const StepperConfig& cfg,
                     SignFlag sign, NonlinearityKind kind) {
    if (!(t_end > f0.time))
        throw std::invalid_argument("run: t_end must exceed the initial time stamp");
    if (!(cfg.dt0 > 0.0)) throw std::invalid_argument("run: dt0 must be positive");
    if (cfg.adaptive && !(cfg.dt_min < cfg.dt0))
        throw std::invalid_argument("run: dt_min must be below dt0");
    if (!(cfg.amplitude_threshold > 1.0))
        throw std::invalid_argument("run: amplitude_threshold must exceed 1");
    if (!all_finite(f0)) throw std::invalid_argument("run: initial field has non-finite samples");

    TrajectoryRecord rec;
    SpectralField cur = f0;
    SpectralField nxt = f0;  // ping-pong buffer, reused across steps
    const double initial_sup = sup_norm(cur);
    const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end));

    rec.samples.push_back(monitor(cur, sign));
    rec.termination = Termination::completed;

    long step_count = 0;
    while (true) {
        if (cur.time >= t_end - t_eps) {
            rec.termination = Termination::completed;
            break;
        }
        const double sup = sup_norm(cur);
        if (initial_sup > 0.0 && sup > cfg.amplitude_threshold * initial_sup) {
            rec.termination = Termination::blowup_detected;
            break;
        }
        double dt = cfg.adaptive ? std::min(cfg.dt0, cfg.dt0 * (1.0 + initial_sup * initial_sup) /
                                                         (1.0 + sup * sup))
                                 : cfg.dt0;
        if (cfg.adaptive && dt < cfg.dt_min) {
            rec.termination = Termination::dt_underflow;
            break;
        }
        if (cur.time + dt > t_end) dt = t_end - cur.time;  // landing step

        step_into(cur, dt, cfg, sign, kind, nxt);
        if (!all_finite(nxt)) {
            rec.termination = Termination::nonfinite_abort;
            break;
        }
        std::swap(cur, nxt);
        ++step_count;
        if (step_count % cfg.monitor_stride == 0) rec.samples.push_back(monitor(cur, sign));
    }

    if (rec.samples.back().time < cur.time - t_eps) rec.samples.push_back(monitor(cur, sign));
    rec.final_time = cur.time;

    const double q0 = rec.samples.front().Q.real();
    const double e0 = rec.samples.front().E.real();
    for (const auto& s : rec.samples) {
        rec.charge_drift = std::max(rec.charge_drift, relative_drift(s.Q.real(), q0));
        rec.energy_drift = std::max(rec.energy_drift, relative_drift(s.E.real(), e0));
    }
    rec.conservation_ok = !(rec.termination == Termination::completed &&
                            rec.charge_drift > cfg.conservation_tol);

    if (rec.termination == Termination::blowup_detected ||
        rec.termination == Termination::dt_underflow) {
        try {
            rec.blowup_estimate = estimate_blowup_time(rec);
        } catch (const InsufficientTailError&) {
            // leave empty: detection happened before a usable tail formed
        }
    }
    return rec;
}

BlowupEstimate estimate_blowup_time(const TrajectoryRecord& traj, int tail_points) {
    if (traj.termination != Termination::blowup_detected &&
        traj.termination != Termination::dt_underflow)
        throw InsufficientTailError("trajectory did not terminate in a blow-up state");
    const auto& s = traj.samples;

    // Maximal trailing run of strictly growing sup-norm samples.
    size_t tail = 1;
    while (tail < s.size() && s[s.size() - tail - 1].sup_norm < s[s.size() - tail].sup_norm)
        ++tail;
    if (tail < 4)
        throw InsufficientTailError("fewer than 4 monitored points of monotone sup-norm growth");

    auto fit_zero_crossing = [&](size_t points) -> double {
        const size_t first = s.size() - points;
        double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
        for (size_t i = first; i < s.size(); ++i) {
            const double t = s[i].time;
            const double y = 1.0 / s[i].sup_norm;
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        const double n = static_cast<double>(points);
        const double slope = (n * sty - st * sy) / (n * stt - st * st);
        const double intercept = (sy - slope * st) / n;
        if (!(slope < 0.0))
            throw InsufficientTailError("reciprocal sup-norm tail is not decreasing");
        return -intercept / slope;
    };

    const size_t k_full = std::min<size_t>(static_cast<size_t>(tail_points), tail);
    const size_t k_half = std::max<size_t>(4, k_full / 2);
    const double t_full = fit_zero_crossing(k_full);
    const double t_half = fit_zero_crossing(std::min(k_half, tail));
    return BlowupEstimate{t_full, 0.5 * std::abs(t_full - t_half)};
}

}  // namespace nnls
