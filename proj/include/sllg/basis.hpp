#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "sllg/errors.hpp"
#include "sllg/vec3.hpp"

namespace sllg {

/// Neumann cosine eigenbasis of the 1-D Laplacian on [0, L].
///
/// Modes are orthonormal in L2(0, L):
///   e_0(x) = sqrt(1/L),  e_k(x) = sqrt(2/L) cos(k pi x / L),  k >= 1,
/// with -e_k'' = lambda_k e_k, lambda_k = (k pi / L)^2 and zero normal
/// derivative at both endpoints.
///
/// Physical-space work lives on a uniform grid of n_quad = oversample * n_modes
/// nodes (endpoints included) with trapezoidal weights. The trapezoid rule on
/// this grid integrates cosine polynomials exactly up to frequency
/// 2 (n_quad - 1) - 1, which covers triple products of retained modes at the
/// default oversample of 4. A second weight set integrates sine polynomials
/// exactly up to frequency n_quad - 2; it backs the weak-form diagnostics whose
/// integrands are sine-type.
class SpectralBasis {
  public:
    static std::shared_ptr<const SpectralBasis> build(double length, int n_modes,
                                                      int oversample = 4) {
        if (!(length > 0.0)) throw ConfigError("basis: length must be > 0");
        if (n_modes < 1) throw ConfigError("basis: n_modes must be >= 1");
        if (oversample < 4) throw ConfigError("basis: oversample must be >= 4");
        return std::shared_ptr<const SpectralBasis>(
            new SpectralBasis(length, n_modes, oversample));
    }

    double length() const { return length_; }
    int n_modes() const { return n_modes_; }
    int n_quad() const { return n_quad_; }
    int oversample() const { return oversample_; }

    double eigenvalue(int k) const { return eigenvalues_[static_cast<size_t>(k)]; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    double node(int q) const { return nodes_[static_cast<size_t>(q)]; }
    const std::vector<double>& nodes() const { return nodes_; }

    double weight(int q) const { return weights_[static_cast<size_t>(q)]; }
    const std::vector<double>& weights() const { return weights_; }

    /// Quadrature weights exact for pure sine polynomials sin(k pi x / L),
    /// 1 <= k <= n_quad - 2.
    const std::vector<double>& sine_weights() const { return sine_weights_; }

    /// e_k evaluated at node q.
    double mode_value(int k, int q) const {
        return values_[static_cast<size_t>(q) * n_modes_ + k];
    }
    /// e_k' evaluated at node q.
    double mode_deriv(int k, int q) const {
        return derivs_[static_cast<size_t>(q) * n_modes_ + k];
    }

    const std::vector<double>& value_matrix() const { return values_; }
    const std::vector<double>& deriv_matrix() const { return derivs_; }

    /// Same discretization (not necessarily the same object).
    bool compatible(const SpectralBasis& o) const {
        return length_ == o.length_ && n_modes_ == o.n_modes_ && n_quad_ == o.n_quad_;
    }

  private:
    SpectralBasis(double length, int n_modes, int oversample)
        : length_(length), n_modes_(n_modes), oversample_(oversample),
          n_quad_(oversample * n_modes) {
        const double pi = std::numbers::pi;
        const int panels = n_quad_ - 1;
        const double h = length_ / panels;

        eigenvalues_.resize(static_cast<size_t>(n_modes_));
        for (int k = 0; k < n_modes_; ++k) {
            const double kappa = k * pi / length_;
            eigenvalues_[static_cast<size_t>(k)] = kappa * kappa;
        }

        nodes_.resize(static_cast<size_t>(n_quad_));
        weights_.assign(static_cast<size_t>(n_quad_), h);
        for (int q = 0; q < n_quad_; ++q) nodes_[static_cast<size_t>(q)] = q * h;
        weights_.front() *= 0.5;
        weights_.back() *= 0.5;

        // Exact-for-sines weights: expand the indicator of each frequency in
        // the discrete sine transform and resum. Only odd frequencies carry a
        // nonzero integral, L (1 - (-1)^j) / (j pi).
        sine_weights_.assign(static_cast<size_t>(n_quad_), 0.0);
        for (int q = 1; q < panels; ++q) {
            double w = 0.0;
            for (int j = 1; j < panels; j += 2) {
                const double cj = (2.0 / panels) * length_ * 2.0 / (j * pi);
                w += cj * std::sin(j * pi * static_cast<double>(q) / panels);
            }
            sine_weights_[static_cast<size_t>(q)] = w;
        }

        values_.resize(static_cast<size_t>(n_quad_) * n_modes_);
        derivs_.resize(static_cast<size_t>(n_quad_) * n_modes_);
        const double a0 = std::sqrt(1.0 / length_);
        const double ak = std::sqrt(2.0 / length_);
        for (int q = 0; q < n_quad_; ++q) {
            const double x = nodes_[static_cast<size_t>(q)];
            values_[static_cast<size_t>(q) * n_modes_] = a0;
            derivs_[static_cast<size_t>(q) * n_modes_] = 0.0;
            for (int k = 1; k < n_modes_; ++k) {
                const double kappa = k * pi / length_;
                values_[static_cast<size_t>(q) * n_modes_ + k] = ak * std::cos(kappa * x);
                derivs_[static_cast<size_t>(q) * n_modes_ + k] =
                    -ak * kappa * std::sin(kappa * x);
            }
        }
    }

    double length_;
    int n_modes_;
    int oversample_;
    int n_quad_;
    std::vector<double> eigenvalues_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> sine_weights_;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

namespace detail {
inline void require_compatible(const BasisPtr& a, const BasisPtr& b, const char* where) {
    if (!a || !b) throw Error(std::string(where) + ": null basis handle");
    if (a.get() != b.get() && !a->compatible(*b))
        throw Error(std::string(where) + ": basis mismatch");
}
} // namespace detail

/// R^3-valued element of the span of the first n_modes eigenfunctions,
/// stored as coefficients c[k][i], i in {x, y, z}.
struct FieldCoeffs {
    BasisPtr basis;
    std::vector<double> c; // [k * 3 + i]

    FieldCoeffs() = default;
    explicit FieldCoeffs(BasisPtr b)
        : basis(std::move(b)), c(static_cast<size_t>(basis->n_modes()) * 3, 0.0) {}

    double& operator()(int k, int i) { return c[static_cast<size_t>(k) * 3 + i]; }
    double operator()(int k, int i) const { return c[static_cast<size_t>(k) * 3 + i]; }

    Vec3 mode(int k) const {
        const size_t o = static_cast<size_t>(k) * 3;
        return {c[o], c[o + 1], c[o + 2]};
    }
    void set_mode(int k, const Vec3& v) {
        const size_t o = static_cast<size_t>(k) * 3;
        c[o] = v.x; c[o + 1] = v.y; c[o + 2] = v.z;
    }
};

/// Grid samples f[q][i] on the quadrature nodes.
struct PhysicalField {
    BasisPtr basis;
    std::vector<double> v; // [q * 3 + i]

    PhysicalField() = default;
    explicit PhysicalField(BasisPtr b)
        : basis(std::move(b)), v(static_cast<size_t>(basis->n_quad()) * 3, 0.0) {}

    Vec3 at(int q) const {
        const size_t o = static_cast<size_t>(q) * 3;
        return {v[o], v[o + 1], v[o + 2]};
    }
    void set(int q, const Vec3& val) {
        const size_t o = static_cast<size_t>(q) * 3;
        v[o] = val.x; v[o + 1] = val.y; v[o + 2] = val.z;
    }
};

inline PhysicalField to_physical(const FieldCoeffs& u) {
    PhysicalField f(u.basis);
    const int n = u.basis->n_modes();
    const int nq = u.basis->n_quad();
    const std::vector<double>& vm = u.basis->value_matrix();
    for (int q = 0; q < nq; ++q) {
        double ax = 0.0, ay = 0.0, az = 0.0;
        const double* row = vm.data() + static_cast<size_t>(q) * n;
        const double* cc = u.c.data();
        for (int k = 0; k < n; ++k) {
            const double e = row[k];
            ax += e * cc[3 * k];
            ay += e * cc[3 * k + 1];
            az += e * cc[3 * k + 2];
        }
        f.v[static_cast<size_t>(q) * 3] = ax;
        f.v[static_cast<size_t>(q) * 3 + 1] = ay;
        f.v[static_cast<size_t>(q) * 3 + 2] = az;
    }
    return f;
}

/// Spatial derivative d/dx, synthesized from the analytic mode derivatives.
inline PhysicalField to_physical_derivative(const FieldCoeffs& u) {
    PhysicalField f(u.basis);
    const int n = u.basis->n_modes();
    const int nq = u.basis->n_quad();
    const std::vector<double>& dm = u.basis->deriv_matrix();
    for (int q = 0; q < nq; ++q) {
        double ax = 0.0, ay = 0.0, az = 0.0;
        const double* row = dm.data() + static_cast<size_t>(q) * n;
        const double* cc = u.c.data();
        for (int k = 0; k < n; ++k) {
            const double e = row[k];
            ax += e * cc[3 * k];
            ay += e * cc[3 * k + 1];
            az += e * cc[3 * k + 2];
        }
        f.v[static_cast<size_t>(q) * 3] = ax;
        f.v[static_cast<size_t>(q) * 3 + 1] = ay;
        f.v[static_cast<size_t>(q) * 3 + 2] = az;
    }
    return f;
}

/// L2 projection onto the retained modes via quadrature.
inline FieldCoeffs to_coeffs(const PhysicalField& f) {
    FieldCoeffs u(f.basis);
    const int n = f.basis->n_modes();
    const int nq = f.basis->n_quad();
    const std::vector<double>& vm = f.basis->value_matrix();
    const std::vector<double>& w = f.basis->weights();
    for (int q = 0; q < nq; ++q) {
        const double wq = w[static_cast<size_t>(q)];
        const double fx = wq * f.v[static_cast<size_t>(q) * 3];
        const double fy = wq * f.v[static_cast<size_t>(q) * 3 + 1];
        const double fz = wq * f.v[static_cast<size_t>(q) * 3 + 2];
        const double* row = vm.data() + static_cast<size_t>(q) * n;
        double* cc = u.c.data();
        for (int k = 0; k < n; ++k) {
            const double e = row[k];
            cc[3 * k] += e * fx;
            cc[3 * k + 1] += e * fy;
            cc[3 * k + 2] += e * fz;
        }
    }
    return u;
}

/// Laplacian: coefficient k scales by -lambda_k.
inline FieldCoeffs apply_laplacian(const FieldCoeffs& u) {
    FieldCoeffs r(u.basis);
    const int n = u.basis->n_modes();
    for (int k = 0; k < n; ++k) {
        const double s = -u.basis->eigenvalue(k);
        r.c[3 * k] = s * u.c[3 * k];
        r.c[3 * k + 1] = s * u.c[3 * k + 1];
        r.c[3 * k + 2] = s * u.c[3 * k + 2];
    }
    return r;
}

/// Truncation to the first m modes (tail zeroed, same basis handle).
inline FieldCoeffs project_modes(const FieldCoeffs& u, int m) {
    const int n = u.basis->n_modes();
    if (m < 1 || m > n) throw Error("project_modes: mode count out of range");
    FieldCoeffs r = u;
    for (int k = m; k < n; ++k) r.set_mode(k, Vec3{});
    return r;
}

/// Norm of (I - Laplacian)^beta u: coefficients scale by (1 + lambda_k)^beta.
/// beta = 0 is the L2 norm, beta = 1/2 the first-order Sobolev norm,
/// negative beta the dual-scale norms.
inline double fractional_norm(const FieldCoeffs& u, double beta) {
    const int n = u.basis->n_modes();
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double g = std::pow(1.0 + u.basis->eigenvalue(k), 2.0 * beta);
        s += g * (u.c[3 * k] * u.c[3 * k] + u.c[3 * k + 1] * u.c[3 * k + 1] +
                  u.c[3 * k + 2] * u.c[3 * k + 2]);
    }
    return std::sqrt(s);
}

inline double l2_norm(const FieldCoeffs& u) {
    double s = 0.0;
    for (double x : u.c) s += x * x;
    return std::sqrt(s);
}

/// Coefficient-space arithmetic helpers.
inline FieldCoeffs& add_scaled(FieldCoeffs& u, const FieldCoeffs& g, double a) {
    detail::require_compatible(u.basis, g.basis, "add_scaled");
    for (size_t i = 0; i < u.c.size(); ++i) u.c[i] += a * g.c[i];
    return u;
}

inline FieldCoeffs lin_comb(const FieldCoeffs& u, double a, const FieldCoeffs& g, double b) {
    detail::require_compatible(u.basis, g.basis, "lin_comb");
    FieldCoeffs r(u.basis);
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = a * u.c[i] + b * g.c[i];
    return r;
}

inline double coeff_inner(const FieldCoeffs& u, const FieldCoeffs& g) {
    detail::require_compatible(u.basis, g.basis, "coeff_inner");
    double s = 0.0;
    for (size_t i = 0; i < u.c.size(); ++i) s += u.c[i] * g.c[i];
    return s;
}

inline bool all_finite(const FieldCoeffs& u) {
    for (double x : u.c)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace sllg
