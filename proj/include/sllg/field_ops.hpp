#pragma once

#include <algorithm>
#include <cmath>

#include "sllg/basis.hpp"

namespace sllg {

inline PhysicalField cross(const PhysicalField& f, const PhysicalField& g) {
    detail::require_compatible(f.basis, g.basis, "cross");
    PhysicalField r(f.basis);
    const int nq = f.basis->n_quad();
    for (int q = 0; q < nq; ++q) r.set(q, cross(f.at(q), g.at(q)));
    return r;
}

/// Trapezoid inner product on the quadrature grid.
inline double l2_inner(const PhysicalField& f, const PhysicalField& g) {
    detail::require_compatible(f.basis, g.basis, "l2_inner");
    const int nq = f.basis->n_quad();
    const std::vector<double>& w = f.basis->weights();
    double s = 0.0;
    for (int q = 0; q < nq; ++q) s += w[static_cast<size_t>(q)] * dot(f.at(q), g.at(q));
    return s;
}

inline double l2_norm(const PhysicalField& f) {
    return std::sqrt(std::max(0.0, l2_inner(f, f)));
}

/// Inner product with the sine-exact weights; valid when <f, g> pointwise is a
/// sine polynomial below the grid limit.
inline double sine_inner(const PhysicalField& f, const PhysicalField& g) {
    detail::require_compatible(f.basis, g.basis, "sine_inner");
    const int nq = f.basis->n_quad();
    const std::vector<double>& w = f.basis->sine_weights();
    double s = 0.0;
    for (int q = 0; q < nq; ++q) s += w[static_cast<size_t>(q)] * dot(f.at(q), g.at(q));
    return s;
}

inline double sup_deviation_from_sphere(const PhysicalField& f) {
    const int nq = f.basis->n_quad();
    double m = 0.0;
    for (int q = 0; q < nq; ++q) m = std::max(m, std::abs(norm(f.at(q)) - 1.0));
    return m;
}

/// ( integral |f|^{3/2} dx )^{4/3}: squared Lebesgue-3/2 norm via quadrature.
inline double l32_norm_sq(const PhysicalField& f) {
    const int nq = f.basis->n_quad();
    const std::vector<double>& w = f.basis->weights();
    double s = 0.0;
    for (int q = 0; q < nq; ++q)
        s += w[static_cast<size_t>(q)] * std::pow(norm(f.at(q)), 1.5);
    return std::pow(s, 4.0 / 3.0);
}

inline bool all_finite(const PhysicalField& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace sllg
