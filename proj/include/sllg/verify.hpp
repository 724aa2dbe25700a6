#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sllg/model.hpp"
#include "sllg/wiener.hpp"

namespace sllg {

struct CheckResult {
    std::string name;
    double max_err = 0.0; // relative where a natural scale exists
    double tol = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace verifydetail {

/// Deterministic pseudo-random state with O(1)-decaying mode amplitudes.
inline FieldCoeffs random_state(const BasisPtr& basis, uint64_t seed, uint64_t tag) {
    FieldCoeffs u(basis);
    for (int k = 0; k < basis->n_modes(); ++k) {
        const double decay = 1.0 / (1.0 + 0.25 * k * k);
        for (int i = 0; i < 3; ++i)
            u(k, i) = decay * rng::gaussian(seed, tag, 7, static_cast<uint64_t>(k),
                                            static_cast<uint64_t>(i));
    }
    return u;
}

inline double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

} // namespace verifydetail

/// Operator-identity suite over random states: the structural orthogonality,
/// antisymmetry, integration-by-parts and energy-balance identities that the
/// discretization preserves exactly (up to roundoff).
inline VerifyReport run_verify(const BasisPtr& basis, const ModelParams& params,
                               int n_states = 100, uint64_t seed = 2024,
                               double tol = 1e-9) {
    using verifydetail::random_state;
    using verifydetail::rel;
    VerifyReport report;

    auto add = [&report](const std::string& name, double err, double tolerance) {
        report.checks.push_back({name, err, tolerance, err <= tolerance});
    };

    // Basis: orthonormality under quadrature.
    {
        double worst = 0.0;
        const int n = basis->n_modes();
        for (int a = 0; a < n; ++a) {
            for (int b = a; b < n; ++b) {
                double s = 0.0;
                for (int q = 0; q < basis->n_quad(); ++q)
                    s += basis->weight(q) * basis->mode_value(a, q) * basis->mode_value(b, q);
                worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
            }
        }
        add("basis_orthonormality", worst, 1e-12);
    }

    // Basis: Parseval and integration by parts on random states.
    {
        double worst_parseval = 0.0, worst_parts = 0.0;
        for (int t = 0; t < n_states; ++t) {
            const FieldCoeffs u = random_state(basis, seed, 1000 + static_cast<uint64_t>(t));
            const FieldCoeffs v = random_state(basis, seed, 2000 + static_cast<uint64_t>(t));
            const PhysicalField u_phys = to_physical(u);
            const double spectral = l2_norm(u);
            const double quad = l2_norm(u_phys);
            worst_parseval = std::max(worst_parseval, rel(std::abs(spectral - quad), spectral));

            // <A u, v> spectrally vs quadrature of <grad u, grad v>
            double lhs = 0.0;
            for (int k = 0; k < basis->n_modes(); ++k)
                lhs += basis->eigenvalue(k) * dot(u.mode(k), v.mode(k));
            const double rhs = l2_inner(to_physical_derivative(u), to_physical_derivative(v));
            worst_parts = std::max(
                worst_parts, rel(std::abs(lhs - rhs), std::abs(lhs) + std::abs(rhs) + 1.0));
        }
        add("parseval", worst_parseval, 1e-10);
        add("integration_by_parts", worst_parts, 1e-10);
    }

    // Drift maps orthogonal to the state.
    {
        double worst = 0.0;
        for (int t = 0; t < n_states; ++t) {
            const FieldCoeffs u = random_state(basis, seed, 3000 + static_cast<uint64_t>(t));
            const double nu = l2_norm(u);
            const FieldCoeffs f1 = drift_f1(u, params);
            const FieldCoeffs f2 = drift_f2(u, params);
            const FieldCoeffs f3 = drift_f3(u, params);
            const FieldCoeffs f4 = drift_f4(u, params);
            for (const FieldCoeffs* f : {&f1, &f2, &f3, &f4}) {
                const double nf = l2_norm(*f);
                if (nf == 0.0) continue;
                worst = std::max(worst, std::abs(coeff_inner(*f, u)) / (nf * nu));
            }
        }
        add("drift_orthogonality", worst, tol);
    }

    // Noise map antisymmetry.
    if (params.n_channels() > 0) {
        double worst = 0.0;
        for (int t = 0; t < n_states; ++t) {
            const FieldCoeffs u = random_state(basis, seed, 4000 + static_cast<uint64_t>(t));
            const FieldCoeffs v = random_state(basis, seed, 5000 + static_cast<uint64_t>(t));
            for (int j = 0; j < params.n_channels(); ++j) {
                const double s =
                    coeff_inner(noise_g(u, params, j), v) + coeff_inner(u, noise_g(v, params, j));
                worst = std::max(worst, std::abs(s) / (l2_norm(u) * l2_norm(v)));
            }
        }
        add("noise_antisymmetry", worst, tol);
    }

    // Exchange-torque pairings with the exchange field itself.
    {
        double worst_perp = 0.0, worst_lagrange = 0.0, worst29 = 0.0, worst291 = 0.0;
        for (int t = 0; t < n_states; ++t) {
            const FieldCoeffs u = random_state(basis, seed, 6000 + static_cast<uint64_t>(t));
            const FieldCoeffs v = random_state(basis, seed, 6500 + static_cast<uint64_t>(t));
            const PhysicalField u_phys = to_physical(u);
            const PhysicalField v_phys = to_physical(v);
            const FieldCoeffs Au = scaled(apply_laplacian(u), -1.0);
            const PhysicalField Au_phys = to_physical(Au);
            const PhysicalField uxAu = cross(u_phys, Au_phys);
            const PhysicalField uxuxAu = cross(u_phys, uxAu);
            const double n_uxAu = l2_norm(uxAu);
            const double n_Au = l2_norm(Au_phys);
            if (n_uxAu > 0.0 && n_Au > 0.0) {
                worst_perp =
                    std::max(worst_perp, std::abs(l2_inner(uxAu, Au_phys)) / (n_uxAu * n_Au));
                worst_lagrange = std::max(
                    worst_lagrange,
                    std::abs(l2_inner(uxuxAu, Au_phys) + n_uxAu * n_uxAu) / (n_uxAu * n_uxAu));
            }

            // weak pairings: <u x Au, v> = <du, dv x u>, and the damped variant
            const PhysicalField du = to_physical_derivative(u);
            const PhysicalField dv = to_physical_derivative(v);
            const int nq = basis->n_quad();
            double rhs29 = 0.0, rhs291 = 0.0;
            for (int q = 0; q < nq; ++q) {
                const Vec3 uq = u_phys.at(q);
                const Vec3 duq = du.at(q);
                const Vec3 d_vxu = cross(dv.at(q), uq) + cross(v_phys.at(q), duq);
                rhs29 += basis->weight(q) * dot(duq, cross(dv.at(q), uq));
                rhs291 += basis->weight(q) * dot(duq, cross(d_vxu, uq));
            }
            const double lhs29 = l2_inner(uxAu, v_phys);
            const double lhs291 = l2_inner(uxuxAu, v_phys);
            worst29 = std::max(worst29,
                               rel(std::abs(lhs29 - rhs29), std::abs(lhs29) + std::abs(rhs29) + 1.0));
            worst291 = std::max(
                worst291, rel(std::abs(lhs291 - rhs291), std::abs(lhs291) + std::abs(rhs291) + 1.0));
        }
        add("exchange_torque_perp", worst_perp, tol);
        add("exchange_damping_lagrange", worst_lagrange, tol);
        add("weak_pairing_precession", worst29, tol);
        add("weak_pairing_damping", worst291, tol);
    }

    // Energy balance identity, dual evaluation.
    {
        double worst = 0.0;
        for (int t = 0; t < n_states; ++t) {
            const FieldCoeffs u = random_state(basis, seed, 8000 + static_cast<uint64_t>(t));
            const double lhs = energy_drift_identity_lhs(u, params);
            const double rhs = energy_drift_identity_rhs(u, params);
            worst = std::max(worst, rel(std::abs(lhs - rhs), std::abs(lhs) + std::abs(rhs) + 1.0));
        }
        add("energy_drift_identity", worst, 1e-8);
    }

    // Full drift equals the recomposition from its six pieces.
    {
        double worst = 0.0;
        for (int t = 0; t < n_states; ++t) {
            const FieldCoeffs u = random_state(basis, seed, 9000 + static_cast<uint64_t>(t));
            FieldCoeffs recomposed(basis);
            add_scaled(recomposed, drift_f1(u, params), params.lambda1);
            add_scaled(recomposed, drift_f3(u, params), params.lambda1);
            add_scaled(recomposed, drift_f2(u, params), -params.lambda2);
            add_scaled(recomposed, drift_f4(u, params), -params.lambda2);
            add_scaled(recomposed, ito_correction(u, params), 1.0);
            const FieldCoeffs fused = full_drift(u, params);
            const double diff = l2_norm(lin_comb(fused, 1.0, recomposed, -1.0));
            worst = std::max(worst, rel(diff, l2_norm(fused) + 1.0));
        }
        add("drift_recomposition", worst, 1e-12);
    }

    return report;
}

} // namespace sllg
