#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sllg/basis.hpp"
#include "sllg/field_ops.hpp"

namespace sllg {

/// Anisotropy density phi acting pointwise on the magnetization vector.
/// Built-ins: none (phi = 0) and uniaxial phi(u) = K (1 - <u, axis>^2) with
/// unit axis and K >= 0. A custom variant takes user callables for phi, its
/// gradient, and its Hessian as a bilinear form.
struct Anisotropy {
    enum class Kind { none, uniaxial, custom };

    Kind kind = Kind::none;
    Vec3 axis{0.0, 0.0, 1.0};
    double strength = 0.0;
    std::function<double(const Vec3&)> phi_fn;
    std::function<Vec3(const Vec3&)> grad_fn;
    std::function<double(const Vec3&, const Vec3&, const Vec3&)> hess_fn;

    static Anisotropy none() { return {}; }

    static Anisotropy uniaxial(const Vec3& axis, double strength) {
        if (strength < 0.0) throw ConfigError("anisotropy: strength must be >= 0");
        if (norm(axis) == 0.0) throw ConfigError("anisotropy: axis must be nonzero");
        Anisotropy a;
        a.kind = Kind::uniaxial;
        a.axis = normalized(axis);
        a.strength = strength;
        return a;
    }

    static Anisotropy custom(std::function<double(const Vec3&)> phi,
                             std::function<Vec3(const Vec3&)> grad,
                             std::function<double(const Vec3&, const Vec3&, const Vec3&)> hess) {
        if (!phi || !grad || !hess)
            throw ConfigError("anisotropy: custom variant needs phi, grad and hess");
        Anisotropy a;
        a.kind = Kind::custom;
        a.phi_fn = std::move(phi);
        a.grad_fn = std::move(grad);
        a.hess_fn = std::move(hess);
        return a;
    }

    bool active() const { return kind != Kind::none; }

    double phi(const Vec3& u) const {
        switch (kind) {
            case Kind::none: return 0.0;
            case Kind::uniaxial: {
                const double p = dot(u, axis);
                return strength * (1.0 - p * p);
            }
            case Kind::custom: return phi_fn(u);
        }
        return 0.0;
    }

    Vec3 grad(const Vec3& u) const {
        switch (kind) {
            case Kind::none: return {};
            case Kind::uniaxial: return axis * (-2.0 * strength * dot(u, axis));
            case Kind::custom: return grad_fn(u);
        }
        return {};
    }

    double hess(const Vec3& u, const Vec3& g, const Vec3& k) const {
        switch (kind) {
            case Kind::none: return 0.0;
            case Kind::uniaxial: return -2.0 * strength * dot(g, axis) * dot(k, axis);
            case Kind::custom: return hess_fn(u, g, k);
        }
        return 0.0;
    }
};

/// Model data bound to one discretization: coupling constants, anisotropy,
/// and the noise channel fields h_j sampled on the quadrature grid.
struct ModelParams {
    BasisPtr basis;
    double lambda1 = 1.0;
    double lambda2 = 0.5;
    Anisotropy anisotropy;
    std::vector<PhysicalField> channels;

    int n_channels() const { return static_cast<int>(channels.size()); }

    void validate() const {
        if (!basis) throw ConfigError("model: missing basis");
        if (!(lambda2 >= 0.0)) throw ConfigError("model: lambda2 must be >= 0");
        if (!std::isfinite(lambda1) || !std::isfinite(lambda2))
            throw ConfigError("model: coupling constants must be finite");
        for (const PhysicalField& h : channels) {
            detail::require_compatible(basis, h.basis, "model channel");
            if (!all_finite(h)) throw ConfigError("model: channel field is not finite");
        }
    }
};

namespace detail {

inline PhysicalField grad_phi_phys(const PhysicalField& u_phys, const Anisotropy& a) {
    PhysicalField g(u_phys.basis);
    const int nq = u_phys.basis->n_quad();
    for (int q = 0; q < nq; ++q) g.set(q, a.grad(u_phys.at(q)));
    return g;
}

inline void check_state(const FieldCoeffs& u, const ModelParams& m, const char* where) {
    require_compatible(u.basis, m.basis, where);
}

} // namespace detail

inline FieldCoeffs scaled(FieldCoeffs u, double a) {
    for (double& x : u.c) x *= a;
    return u;
}

/// Projected effective field: Laplacian of u minus the projected anisotropy
/// gradient. The grid samples of u are taken as an argument so fused callers
/// can reuse them.
inline FieldCoeffs effective_field_with(const FieldCoeffs& u, const PhysicalField& u_phys,
                                        const ModelParams& m) {
    detail::check_state(u, m, "effective_field");
    FieldCoeffs rho = apply_laplacian(u);
    if (m.anisotropy.active()) {
        const FieldCoeffs p = to_coeffs(detail::grad_phi_phys(u_phys, m.anisotropy));
        add_scaled(rho, p, -1.0);
    }
    return rho;
}

inline FieldCoeffs effective_field(const FieldCoeffs& u, const ModelParams& m) {
    return effective_field_with(u, to_physical(u), m);
}

/// Precession against the exchange field.
inline FieldCoeffs drift_f1(const FieldCoeffs& u, const ModelParams& m) {
    detail::check_state(u, m, "drift_f1");
    const PhysicalField u_phys = to_physical(u);
    const PhysicalField lap = to_physical(apply_laplacian(u));
    return to_coeffs(cross(u_phys, lap));
}

/// Damping against the exchange field.
inline FieldCoeffs drift_f2(const FieldCoeffs& u, const ModelParams& m) {
    detail::check_state(u, m, "drift_f2");
    const PhysicalField u_phys = to_physical(u);
    const PhysicalField lap = to_physical(apply_laplacian(u));
    return to_coeffs(cross(u_phys, cross(u_phys, lap)));
}

/// Precession against the projected anisotropy gradient.
inline FieldCoeffs drift_f3(const FieldCoeffs& u, const ModelParams& m) {
    detail::check_state(u, m, "drift_f3");
    const PhysicalField u_phys = to_physical(u);
    const FieldCoeffs p = to_coeffs(detail::grad_phi_phys(u_phys, m.anisotropy));
    return scaled(to_coeffs(cross(u_phys, to_physical(p))), -1.0);
}

/// Damping against the projected anisotropy gradient.
inline FieldCoeffs drift_f4(const FieldCoeffs& u, const ModelParams& m) {
    detail::check_state(u, m, "drift_f4");
    const PhysicalField u_phys = to_physical(u);
    const FieldCoeffs p = to_coeffs(detail::grad_phi_phys(u_phys, m.anisotropy));
    const PhysicalField p_phys = to_physical(p);
    return scaled(to_coeffs(cross(u_phys, cross(u_phys, p_phys))), -1.0);
}

/// Diffusion of channel j: projection of u x h_j.
inline FieldCoeffs noise_g(const FieldCoeffs& u, const ModelParams& m, int j) {
    detail::check_state(u, m, "noise_g");
    if (j < 0 || j >= m.n_channels()) throw Error("noise_g: channel index out of range");
    return to_coeffs(cross(to_physical(u), m.channels[static_cast<size_t>(j)]));
}

/// Ito drift correction: half the sum over channels of the projected
/// (projected u x h_j) x h_j.
inline FieldCoeffs ito_correction(const FieldCoeffs& u, const ModelParams& m) {
    detail::check_state(u, m, "ito_correction");
    FieldCoeffs r(u.basis);
    if (m.channels.empty()) return r;
    const PhysicalField u_phys = to_physical(u);
    PhysicalField acc(u.basis);
    for (const PhysicalField& h : m.channels) {
        const FieldCoeffs gj = to_coeffs(cross(u_phys, h));
        const PhysicalField gj_phys = to_physical(gj);
        const int nq = u.basis->n_quad();
        for (int q = 0; q < nq; ++q) acc.set(q, acc.at(q) + cross(gj_phys.at(q), h.at(q)));
    }
    return scaled(to_coeffs(acc), 0.5);
}

/// Deterministic Stratonovich drift (no Ito correction):
/// lambda1 pi(u x rho) - lambda2 pi(u x (u x rho)).
inline FieldCoeffs stratonovich_drift(const FieldCoeffs& u, const ModelParams& m) {
    detail::check_state(u, m, "stratonovich_drift");
    const PhysicalField u_phys = to_physical(u);
    const FieldCoeffs rho = effective_field_with(u, u_phys, m);
    const PhysicalField rho_phys = to_physical(rho);
    PhysicalField combo(u.basis);
    const int nq = u.basis->n_quad();
    for (int q = 0; q < nq; ++q) {
        const Vec3 uq = u_phys.at(q);
        const Vec3 c1 = cross(uq, rho_phys.at(q));
        combo.set(q, m.lambda1 * c1 - m.lambda2 * cross(uq, c1));
    }
    return to_coeffs(combo);
}

/// Full Ito drift: Stratonovich drift plus the correction, fused so the grid
/// synthesis of u happens once.
inline FieldCoeffs full_drift(const FieldCoeffs& u, const ModelParams& m) {
    detail::check_state(u, m, "full_drift");
    const PhysicalField u_phys = to_physical(u);
    const FieldCoeffs rho = effective_field_with(u, u_phys, m);
    const PhysicalField rho_phys = to_physical(rho);
    PhysicalField combo(u.basis);
    const int nq = u.basis->n_quad();
    for (int q = 0; q < nq; ++q) {
        const Vec3 uq = u_phys.at(q);
        const Vec3 c1 = cross(uq, rho_phys.at(q));
        combo.set(q, m.lambda1 * c1 - m.lambda2 * cross(uq, c1));
    }
    for (const PhysicalField& h : m.channels) {
        const FieldCoeffs gj = to_coeffs(cross(u_phys, h));
        const PhysicalField gj_phys = to_physical(gj);
        for (int q = 0; q < nq; ++q)
            combo.set(q, combo.at(q) + 0.5 * cross(gj_phys.at(q), h.at(q)));
    }
    return to_coeffs(combo);
}

/// Exchange part of the energy, 1/2 ||grad u||^2, by Parseval.
inline double exchange_energy(const FieldCoeffs& u) {
    const int n = u.basis->n_modes();
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += u.basis->eigenvalue(k) * norm2(u.mode(k));
    return 0.5 * s;
}

inline double anisotropy_energy(const FieldCoeffs& u, const ModelParams& m) {
    if (!m.anisotropy.active()) return 0.0;
    const PhysicalField u_phys = to_physical(u);
    const int nq = u.basis->n_quad();
    double s = 0.0;
    for (int q = 0; q < nq; ++q)
        s += u.basis->weight(q) * m.anisotropy.phi(u_phys.at(q));
    return s;
}

/// Total energy Phi(u) = 1/2 ||grad u||^2 + integral of phi(u).
inline double energy(const FieldCoeffs& u, const ModelParams& m) {
    return exchange_energy(u) + anisotropy_energy(u, m);
}

/// First variation of Phi at u in direction g:
/// <grad u, grad g> + integral of <grad phi(u), g>.
inline double energy_gradient_pairing(const FieldCoeffs& u, const FieldCoeffs& g,
                                      const ModelParams& m) {
    detail::require_compatible(u.basis, g.basis, "energy_gradient_pairing");
    const int n = u.basis->n_modes();
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += u.basis->eigenvalue(k) * dot(u.mode(k), g.mode(k));
    if (m.anisotropy.active()) {
        const PhysicalField u_phys = to_physical(u);
        const PhysicalField g_phys = to_physical(g);
        const int nq = u.basis->n_quad();
        for (int q = 0; q < nq; ++q)
            s += u.basis->weight(q) * dot(m.anisotropy.grad(u_phys.at(q)), g_phys.at(q));
    }
    return s;
}

/// Second variation of Phi at u on the pair (g, k):
/// <grad g, grad k> + integral of phi''(u)(g, k).
inline double energy_hessian_pairing(const FieldCoeffs& u, const FieldCoeffs& g,
                                     const FieldCoeffs& k, const ModelParams& m) {
    detail::require_compatible(u.basis, g.basis, "energy_hessian_pairing");
    detail::require_compatible(u.basis, k.basis, "energy_hessian_pairing");
    const int n = u.basis->n_modes();
    double s = 0.0;
    for (int kk = 0; kk < n; ++kk)
        s += u.basis->eigenvalue(kk) * dot(g.mode(kk), k.mode(kk));
    if (m.anisotropy.active()) {
        const PhysicalField u_phys = to_physical(u);
        const PhysicalField g_phys = to_physical(g);
        const PhysicalField k_phys = to_physical(k);
        const int nq = u.basis->n_quad();
        for (int q = 0; q < nq; ++q)
            s += u.basis->weight(q) *
                 m.anisotropy.hess(u_phys.at(q), g_phys.at(q), k_phys.at(q));
    }
    return s;
}

/// Left side of the energy-drift balance: Phi'(u) applied to the full Ito
/// drift.
inline double energy_drift_identity_lhs(const FieldCoeffs& u, const ModelParams& m) {
    return energy_gradient_pairing(u, full_drift(u, m), m);
}

/// Right side in closed form:
/// -lambda2 ||u x rho||^2 - 1/2 sum_j <rho, (pi(u x h_j)) x h_j>.
inline double energy_drift_identity_rhs(const FieldCoeffs& u, const ModelParams& m) {
    detail::check_state(u, m, "energy_drift_identity_rhs");
    const PhysicalField u_phys = to_physical(u);
    const FieldCoeffs rho = effective_field_with(u, u_phys, m);
    const PhysicalField rho_phys = to_physical(rho);
    const PhysicalField uxrho = cross(u_phys, rho_phys);
    double s = -m.lambda2 * l2_inner(uxrho, uxrho);
    for (const PhysicalField& h : m.channels) {
        const FieldCoeffs gj = to_coeffs(cross(u_phys, h));
        const PhysicalField gj_phys = to_physical(gj);
        s -= 0.5 * l2_inner(rho_phys, cross(gj_phys, h));
    }
    return s;
}

/// --- declarative specs, realizable on any basis (used for coupled-n work) --

struct ChannelSpec {
    enum class Type { constant, cosine, table };
    Type type = Type::constant;
    Vec3 value{0.0, 0.0, 1.0};
    int mode = 0;                // cosine frequency, 0 = constant profile
    std::vector<Vec3> table;     // nodal values, grid-bound

    PhysicalField realize(const BasisPtr& basis) const {
        PhysicalField h(basis);
        const int nq = basis->n_quad();
        switch (type) {
            case Type::constant:
                for (int q = 0; q < nq; ++q) h.set(q, value);
                break;
            case Type::cosine: {
                if (mode < 0) throw ConfigError("channel: cosine mode must be >= 0");
                const double kappa = mode * std::numbers::pi / basis->length();
                for (int q = 0; q < nq; ++q)
                    h.set(q, value * std::cos(kappa * basis->node(q)));
                break;
            }
            case Type::table:
                if (static_cast<int>(table.size()) != nq)
                    throw ConfigError("channel: table size " + std::to_string(table.size()) +
                                      " does not match quadrature grid " + std::to_string(nq));
                for (int q = 0; q < nq; ++q) h.set(q, table[static_cast<size_t>(q)]);
                break;
        }
        return h;
    }
};

struct InitSpec {
    enum class Type { constant, great_circle, modes };
    Type type = Type::constant;
    Vec3 value{1.0, 0.0, 0.0};                 // constant variant
    double amplitude = 0.0;                    // great-circle angle amplitude
    int mode = 1;                              // great-circle angle frequency
    std::vector<std::pair<int, Vec3>> entries; // raw coefficient entries

    FieldCoeffs realize(const BasisPtr& basis) const {
        FieldCoeffs u(basis);
        switch (type) {
            case Type::constant: {
                if (norm(value) == 0.0)
                    throw ConfigError("initial: constant value must be nonzero");
                u.set_mode(0, normalized(value) * std::sqrt(basis->length()));
                break;
            }
            case Type::great_circle: {
                if (mode < 0) throw ConfigError("initial: great_circle mode must be >= 0");
                PhysicalField f(basis);
                const double kappa = mode * std::numbers::pi / basis->length();
                const int nq = basis->n_quad();
                for (int q = 0; q < nq; ++q) {
                    const double theta = amplitude * std::cos(kappa * basis->node(q));
                    f.set(q, {std::cos(theta), std::sin(theta), 0.0});
                }
                u = to_coeffs(f);
                break;
            }
            case Type::modes: {
                for (const auto& [k, amp] : entries) {
                    if (k < 0 || k >= basis->n_modes())
                        throw ConfigError("initial: mode index " + std::to_string(k) +
                                          " outside basis of size " +
                                          std::to_string(basis->n_modes()));
                    u.set_mode(k, u.mode(k) + amp);
                }
                break;
            }
        }
        return u;
    }
};

struct ModelSpec {
    double lambda1 = 1.0;
    double lambda2 = 0.5;
    Anisotropy anisotropy;
    std::vector<ChannelSpec> channels;
    InitSpec init;

    ModelParams realize(const BasisPtr& basis) const {
        ModelParams p;
        p.basis = basis;
        p.lambda1 = lambda1;
        p.lambda2 = lambda2;
        p.anisotropy = anisotropy;
        p.channels.reserve(channels.size());
        for (const ChannelSpec& cs : channels) p.channels.push_back(cs.realize(basis));
        p.validate();
        return p;
    }
};

} // namespace sllg
