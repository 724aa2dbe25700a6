#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sllg/model.hpp"
#include "sllg/wiener.hpp"

namespace sllg {

/// One diagnostics sample. The first nine fields are the CSV columns, in
/// order; the trailing fields are internal running data (instantaneous rates
/// and the extra integrals the ensemble functionals need).
struct DiagRow {
    double time = 0.0;
    double l2 = 0.0;
    double v_norm = 0.0;
    double energy = 0.0;
    double exchange = 0.0;
    double anisotropy = 0.0;
    double cum_dissipation = 0.0; // integral of ||u x rho||^2, left-endpoint
    double sphere_dev = 0.0;
    double xneg_beta = 0.0;       // ||pi(u x (u x rho))|| in the X^{-beta} scale

    double diss_rate = 0.0;       // ||u x rho||^2 at this time
    double l32_rate = 0.0;        // ||u x (u x rho)||^2 in the L^{3/2} surrogate
    double xneg_sq_rate = 0.0;    // xneg_beta^2
    double cum_l32 = 0.0;
    double cum_xneg_sq = 0.0;
};

struct Snapshot {
    double time = 0.0;
    FieldCoeffs state;
};

struct TrajectoryRecord {
    std::vector<DiagRow> rows;
    std::vector<Snapshot> snapshots;
    double beta = 0.3;
};

/// Appends the full diagnostics sample for state u at time t. Integral
/// columns use the left-endpoint rule between consecutive observations.
inline void observe(const FieldCoeffs& u, double t, const ModelParams& m,
                    TrajectoryRecord& rec) {
    detail::check_state(u, m, "observe");
    const double beta = rec.beta;
    DiagRow row;
    row.time = t;
    row.l2 = l2_norm(u);
    row.v_norm = fractional_norm(u, 0.5);
    row.exchange = exchange_energy(u);
    row.anisotropy = anisotropy_energy(u, m);
    row.energy = row.exchange + row.anisotropy;

    const PhysicalField u_phys = to_physical(u);
    row.sphere_dev = sup_deviation_from_sphere(u_phys);

    const FieldCoeffs rho = effective_field_with(u, u_phys, m);
    const PhysicalField rho_phys = to_physical(rho);
    const PhysicalField uxrho = cross(u_phys, rho_phys);
    const PhysicalField uxuxrho = cross(u_phys, uxrho);
    row.diss_rate = l2_inner(uxrho, uxrho);
    row.l32_rate = l32_norm_sq(uxuxrho);
    row.xneg_beta = fractional_norm(to_coeffs(uxuxrho), -beta);
    row.xneg_sq_rate = row.xneg_beta * row.xneg_beta;

    if (rec.rows.empty()) {
        row.cum_dissipation = 0.0;
        row.cum_l32 = 0.0;
        row.cum_xneg_sq = 0.0;
    } else {
        const DiagRow& prev = rec.rows.back();
        if (!(t > prev.time)) throw Error("observe: times must be strictly increasing");
        const double h = t - prev.time;
        row.cum_dissipation = prev.cum_dissipation + h * prev.diss_rate;
        row.cum_l32 = prev.cum_l32 + h * prev.l32_rate;
        row.cum_xneg_sq = prev.cum_xneg_sq + h * prev.xneg_sq_rate;
    }
    rec.rows.push_back(row);
}

/// max over stored snapshot pairs of ||u(t) - u(s)|| / |t - s|^alpha.
inline double holder_quotient(const TrajectoryRecord& rec, double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw ConfigError("holder_quotient: alpha must lie in (0, 1/2)");
    if (rec.snapshots.size() < 2) throw Error("holder_quotient: need at least 2 snapshots");
    double best = 0.0;
    for (size_t i = 0; i < rec.snapshots.size(); ++i) {
        for (size_t j = i + 1; j < rec.snapshots.size(); ++j) {
            const Snapshot& a = rec.snapshots[i];
            const Snapshot& b = rec.snapshots[j];
            const double dtij = std::abs(b.time - a.time);
            if (dtij == 0.0) continue;
            const FieldCoeffs diff = lin_comb(b.state, 1.0, a.state, -1.0);
            best = std::max(best, l2_norm(diff) / std::pow(dtij, alpha));
        }
    }
    return best;
}

/// sin(mode pi x / L) times a constant vector; vanishes at both endpoints.
struct TestFunction {
    int mode = 1;
    Vec3 amplitude{1.0, 0.0, 0.0};
    PhysicalField values;
    PhysicalField derivative;

    static TestFunction make(const BasisPtr& basis, int mode, const Vec3& amplitude) {
        if (!basis) throw ConfigError("test function: null basis");
        if (mode < 1 || mode > basis->n_quad() - 2)
            throw ConfigError("test function: mode must lie in [1, n_quad-2]");
        TestFunction psi;
        psi.mode = mode;
        psi.amplitude = amplitude;
        psi.values = PhysicalField(basis);
        psi.derivative = PhysicalField(basis);
        const double kappa = mode * std::numbers::pi / basis->length();
        for (int q = 0; q < basis->n_quad(); ++q) {
            const double x = basis->node(q);
            psi.values.set(q, amplitude * std::sin(kappa * x));
            psi.derivative.set(q, amplitude * (kappa * std::cos(kappa * x)));
        }
        return psi;
    }
};

enum class StochasticRule { stratonovich_midpoint, ito_left };

namespace detail {

/// Weak-form drift pairing D(u; psi): the exchange torque and damping terms in
/// their integrated-by-parts form (derivatives land on u and psi, never on a
/// second derivative of u), plus the unprojected anisotropy torque terms.
inline double weak_drift_pairing(const FieldCoeffs& u, const TestFunction& psi,
                                 const ModelParams& m) {
    const PhysicalField u_phys = to_physical(u);
    const PhysicalField du = to_physical_derivative(u);
    const int nq = u.basis->n_quad();

    // lambda1 <du, u x dpsi>  +  lambda2 <du, d(psi x u) x u>
    PhysicalField rhs1(u.basis);
    for (int q = 0; q < nq; ++q) {
        const Vec3 uq = u_phys.at(q);
        const Vec3 duq = du.at(q);
        const Vec3 dpsi = psi.derivative.at(q);
        const Vec3 psiq = psi.values.at(q);
        const Vec3 d_psixu = cross(dpsi, uq) + cross(psiq, duq);
        rhs1.set(q, m.lambda1 * cross(uq, dpsi) + m.lambda2 * cross(d_psixu, uq));
    }
    double s = 0.0;
    {
        const std::vector<double>& w = u.basis->sine_weights();
        for (int q = 0; q < nq; ++q) s += w[static_cast<size_t>(q)] * dot(du.at(q), rhs1.at(q));
    }

    if (m.anisotropy.active()) {
        PhysicalField rhs2(u.basis);
        for (int q = 0; q < nq; ++q) {
            const Vec3 uq = u_phys.at(q);
            const Vec3 gp = m.anisotropy.grad(uq);
            const Vec3 uxgp = cross(uq, gp);
            rhs2.set(q, -m.lambda1 * uxgp + m.lambda2 * cross(uq, uxgp));
        }
        s += sine_inner(rhs2, psi.values);
    }
    return s;
}

} // namespace detail

/// Signed defect of the weak form at the final time:
/// <u_M, psi> - <u_0, psi> - sum_m dt D(u_m; psi) - noise sums.
/// Drift sums are left-endpoint; the stochastic integral uses midpoint states
/// (Stratonovich-consistent) or left states (negative control).
inline double weak_residual_signed(const TrajectoryRecord& rec, const WienerPath& path,
                                   const TestFunction& psi, const ModelParams& m,
                                   StochasticRule rule = StochasticRule::stratonovich_midpoint) {
    const long steps = path.steps();
    if (static_cast<long>(rec.snapshots.size()) != steps + 1)
        throw Error("weak_residual: need a snapshot at every step (stride 1)");
    const double dt = path.dt();
    const int nch = path.channels();
    if (nch != m.n_channels()) throw Error("weak_residual: channel count mismatch");

    double drift_sum = 0.0;
    double noise_sum = 0.0;
    for (long k = 0; k < steps; ++k) {
        const FieldCoeffs& uk = rec.snapshots[static_cast<size_t>(k)].state;
        drift_sum += dt * detail::weak_drift_pairing(uk, psi, m);

        if (nch > 0) {
            FieldCoeffs ubar = (rule == StochasticRule::stratonovich_midpoint)
                                   ? lin_comb(uk, 0.5,
                                              rec.snapshots[static_cast<size_t>(k + 1)].state, 0.5)
                                   : uk;
            const PhysicalField ubar_phys = to_physical(ubar);
            for (int j = 0, ncj = nch; j < ncj; ++j) {
                const PhysicalField uxh = cross(ubar_phys, m.channels[static_cast<size_t>(j)]);
                noise_sum += sine_inner(uxh, psi.values) * path.increment(k, j);
            }
        }
    }

    const PhysicalField uM = to_physical(rec.snapshots.back().state);
    const PhysicalField u0 = to_physical(rec.snapshots.front().state);
    const double lhs = sine_inner(uM, psi.values) - sine_inner(u0, psi.values);
    return lhs - drift_sum - noise_sum;
}

inline double weak_residual(const TrajectoryRecord& rec, const WienerPath& path,
                            const TestFunction& psi, const ModelParams& m,
                            StochasticRule rule = StochasticRule::stratonovich_midpoint) {
    return std::abs(weak_residual_signed(rec, path, psi, m, rule));
}

/// Reference value for the left-rule gap: the time integral of the projected
/// correction term paired with psi, left-endpoint in time.
inline double ito_gap_reference(const TrajectoryRecord& rec, const WienerPath& path,
                                const TestFunction& psi, const ModelParams& m) {
    const long steps = path.steps();
    if (static_cast<long>(rec.snapshots.size()) != steps + 1)
        throw Error("ito_gap_reference: need a snapshot at every step (stride 1)");
    const double dt = path.dt();
    double s = 0.0;
    for (long k = 0; k < steps; ++k) {
        const FieldCoeffs& uk = rec.snapshots[static_cast<size_t>(k)].state;
        s += dt * sine_inner(to_physical(ito_correction(uk, m)), psi.values);
    }
    return s;
}

} // namespace sllg
