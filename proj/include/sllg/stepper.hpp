#pragma once

#include <cmath>
#include <string>

#include "sllg/diagnostics.hpp"
#include "sllg/model.hpp"
#include "sllg/wiener.hpp"

namespace sllg {

enum class Scheme { euler_maruyama_ito, heun_stratonovich, implicit_midpoint };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::euler_maruyama_ito: return "euler";
        case Scheme::heun_stratonovich: return "heun";
        case Scheme::implicit_midpoint: return "midpoint";
    }
    return "?";
}

inline Scheme scheme_from_name(const std::string& name) {
    if (name == "euler" || name == "euler_maruyama_ito") return Scheme::euler_maruyama_ito;
    if (name == "heun" || name == "heun_stratonovich") return Scheme::heun_stratonovich;
    if (name == "midpoint" || name == "implicit_midpoint") return Scheme::implicit_midpoint;
    throw ConfigError("unknown scheme '" + name + "' (euler|heun|midpoint)");
}

struct StepperConfig {
    Scheme scheme = Scheme::implicit_midpoint;
    double dt = 1e-3;
    double t_final = 1.0;
    double fp_tol = 1e-13;
    int fp_max_iters = 100;

    long steps() const {
        const long s = std::lround(t_final / dt);
        return s;
    }

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("stepper: dt must be > 0");
        if (!(t_final >= 0.0)) throw ConfigError("stepper: t_final must be >= 0");
        if (!(fp_tol > 0.0)) throw ConfigError("stepper: fixed-point tolerance must be > 0");
        if (fp_max_iters < 1) throw ConfigError("stepper: need at least 1 fixed-point iteration");
        const long s = steps();
        if (s < 0 || std::abs(s * dt - t_final) > 1e-9 * std::max(1.0, t_final))
            throw ConfigError("stepper: dt must divide t_final");
    }
};

namespace detail {

/// One fused increment of the Stratonovich vector fields:
/// pi[ dt (lambda1 u x rho - lambda2 u x (u x rho)) + sum_j (u x h_j) dW_j ].
/// Everything is assembled pointwise so only one analysis pass runs.
inline FieldCoeffs strat_increment(const FieldCoeffs& u, const ModelParams& m,
                                   const double* dws, double dt) {
    const PhysicalField u_phys = to_physical(u);
    const FieldCoeffs rho = effective_field_with(u, u_phys, m);
    const PhysicalField rho_phys = to_physical(rho);
    PhysicalField combo(u.basis);
    const int nq = u.basis->n_quad();
    for (int q = 0; q < nq; ++q) {
        const Vec3 uq = u_phys.at(q);
        const Vec3 c1 = cross(uq, rho_phys.at(q));
        combo.set(q, dt * (m.lambda1 * c1 - m.lambda2 * cross(uq, c1)));
    }
    for (int j = 0; j < m.n_channels(); ++j) {
        const double dw = dws[j];
        const PhysicalField& h = m.channels[static_cast<size_t>(j)];
        for (int q = 0; q < nq; ++q)
            combo.set(q, combo.at(q) + dw * cross(u_phys.at(q), h.at(q)));
    }
    return to_coeffs(combo);
}

/// Same, plus the Ito correction folded into the dt part.
inline FieldCoeffs ito_increment(const FieldCoeffs& u, const ModelParams& m,
                                 const double* dws, double dt) {
    const PhysicalField u_phys = to_physical(u);
    const FieldCoeffs rho = effective_field_with(u, u_phys, m);
    const PhysicalField rho_phys = to_physical(rho);
    PhysicalField combo(u.basis);
    const int nq = u.basis->n_quad();
    for (int q = 0; q < nq; ++q) {
        const Vec3 uq = u_phys.at(q);
        const Vec3 c1 = cross(uq, rho_phys.at(q));
        combo.set(q, dt * (m.lambda1 * c1 - m.lambda2 * cross(uq, c1)));
    }
    for (int j = 0; j < m.n_channels(); ++j) {
        const double dw = dws[j];
        const PhysicalField& h = m.channels[static_cast<size_t>(j)];
        const FieldCoeffs gj = to_coeffs(cross(u_phys, h));
        const PhysicalField gj_phys = to_physical(gj);
        for (int q = 0; q < nq; ++q)
            combo.set(q, combo.at(q) + dw * cross(u_phys.at(q), h.at(q)) +
                             (0.5 * dt) * cross(gj_phys.at(q), h.at(q)));
    }
    return to_coeffs(combo);
}

inline void guard_finite(const FieldCoeffs& u, const char* scheme) {
    if (!all_finite(u)) throw Error(std::string(scheme) + ": non-finite state");
}

} // namespace detail

/// Explicit Euler-Maruyama on the Ito form (drift includes the correction).
inline FieldCoeffs step_euler_ito(const FieldCoeffs& u, const double* dws,
                                  const ModelParams& m, const StepperConfig& cfg) {
    FieldCoeffs next = u;
    add_scaled(next, detail::ito_increment(u, m, dws, cfg.dt), 1.0);
    detail::guard_finite(next, "euler");
    return next;
}

/// Heun predictor-corrector on the Stratonovich form.
inline FieldCoeffs step_heun_stratonovich(const FieldCoeffs& u, const double* dws,
                                          const ModelParams& m, const StepperConfig& cfg) {
    const FieldCoeffs inc0 = detail::strat_increment(u, m, dws, cfg.dt);
    FieldCoeffs pred = u;
    add_scaled(pred, inc0, 1.0);
    detail::guard_finite(pred, "heun predictor");
    const FieldCoeffs inc1 = detail::strat_increment(pred, m, dws, cfg.dt);
    FieldCoeffs next = u;
    add_scaled(next, inc0, 0.5);
    add_scaled(next, inc1, 0.5);
    detail::guard_finite(next, "heun");
    return next;
}

/// Semi-implicit midpoint: solves v = u + inc((u+v)/2) by fixed-point
/// iteration. Because every vector field is pointwise orthogonal to the
/// midpoint state, the converged step preserves the L2 norm up to solver
/// tolerance.
inline FieldCoeffs step_implicit_midpoint(const FieldCoeffs& u, const double* dws,
                                          const ModelParams& m, const StepperConfig& cfg) {
    FieldCoeffs v = u;
    add_scaled(v, detail::strat_increment(u, m, dws, cfg.dt), 1.0);
    double delta = 0.0;
    for (int it = 0; it < cfg.fp_max_iters; ++it) {
        const FieldCoeffs mid = lin_comb(u, 0.5, v, 0.5);
        FieldCoeffs next = u;
        add_scaled(next, detail::strat_increment(mid, m, dws, cfg.dt), 1.0);
        detail::guard_finite(next, "midpoint");
        delta = l2_norm(lin_comb(next, 1.0, v, -1.0));
        v = next;
        if (delta <= cfg.fp_tol) return v;
    }
    throw Error("midpoint: fixed-point iteration did not reach tol " +
                std::to_string(cfg.fp_tol) + " within " + std::to_string(cfg.fp_max_iters) +
                " iterations (last update " + std::to_string(delta) + "); reduce dt");
}

struct ObserverConfig {
    long diag_stride = 1;     // 0 = initial and final rows only
    long snapshot_stride = 0; // 0 = initial and final snapshots only
    double beta = 0.3;
};

/// Drives the chosen scheme over cfg.steps() steps of the supplied path,
/// recording diagnostics and snapshots at the configured strides (the initial
/// and final states are always included).
inline TrajectoryRecord integrate(const FieldCoeffs& u0, const ModelParams& m,
                                  const StepperConfig& cfg, const WienerPath& path,
                                  const ObserverConfig& obs = {}) {
    cfg.validate();
    m.validate();
    detail::check_state(u0, m, "integrate");
    const long steps = cfg.steps();
    if (path.channels() != m.n_channels())
        throw ConfigError("integrate: path has " + std::to_string(path.channels()) +
                          " channels, model has " + std::to_string(m.n_channels()));
    if (path.steps() < steps) throw ConfigError("integrate: path too short");
    if (std::abs(path.dt() - cfg.dt) > 1e-12 * std::max(1.0, cfg.dt))
        throw ConfigError("integrate: path dt does not match stepper dt");
    if (obs.diag_stride < 0 || obs.snapshot_stride < 0)
        throw ConfigError("integrate: strides must be >= 0");

    TrajectoryRecord rec;
    rec.beta = obs.beta;
    observe(u0, 0.0, m, rec);
    rec.snapshots.push_back({0.0, u0});

    FieldCoeffs u = u0;
    for (long k = 0; k < steps; ++k) {
        const double* dws = path.step_increments(k);
        try {
            switch (cfg.scheme) {
                case Scheme::euler_maruyama_ito: u = step_euler_ito(u, dws, m, cfg); break;
                case Scheme::heun_stratonovich: u = step_heun_stratonovich(u, dws, m, cfg); break;
                case Scheme::implicit_midpoint: u = step_implicit_midpoint(u, dws, m, cfg); break;
            }
        } catch (const Error& e) {
            throw StepError(e.what(), k);
        }
        const double t = (k + 1) * cfg.dt;
        const bool last = (k + 1 == steps);
        if (last || (obs.diag_stride > 0 && (k + 1) % obs.diag_stride == 0))
            observe(u, t, m, rec);
        if (last || (obs.snapshot_stride > 0 && (k + 1) % obs.snapshot_stride == 0))
            rec.snapshots.push_back({t, u});
    }
    return rec;
}

} // namespace sllg
