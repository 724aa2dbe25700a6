#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sllg/basis.hpp"

using namespace sllg;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

FieldCoeffs random_coeffs(const BasisPtr& basis, unsigned s) {
    FieldCoeffs u(basis);
    unsigned state = s;
    auto next = [&state]() {
        state = state * 1664525u + 1013904223u;
        return static_cast<double>(state) / 4294967296.0 - 0.5;
    };
    for (int k = 0; k < basis->n_modes(); ++k)
        u.set_mode(k, Vec3{next(), next(), next()} * (1.0 / (1.0 + k)));
    return u;
}
} // namespace

TEST_CASE("eigenvalues of the Neumann Laplacian", "[basis]") {
    auto b = SpectralBasis::build(kPi, 4, 4);
    CHECK(b->eigenvalue(0) == 0.0);
    CHECK(b->eigenvalue(1) == Approx(1.0).margin(1e-14));
    CHECK(b->eigenvalue(2) == Approx(4.0).margin(1e-13));
    CHECK(b->eigenvalue(3) == Approx(9.0).margin(1e-13));

    auto b2 = SpectralBasis::build(2.0, 5, 4);
    CHECK(b2->eigenvalue(3) == Approx(22.206609902451056).epsilon(1e-14));
}

TEST_CASE("basis functions are orthonormal under the quadrature rule", "[basis]") {
    auto b = SpectralBasis::build(1.7, 8, 4);
    for (int j = 0; j < b->n_modes(); ++j) {
        for (int k = 0; k < b->n_modes(); ++k) {
            double s = 0.0;
            for (int q = 0; q < b->n_quad(); ++q)
                s += b->weight(q) * b->mode_value(j, q) * b->mode_value(k, q);
            CHECK(s == Approx(j == k ? 1.0 : 0.0).margin(1e-12));
        }
    }
}

TEST_CASE("endpoint values and derivative normalization", "[basis]") {
    const double L = 2.5;
    auto b = SpectralBasis::build(L, 6, 4);
    CHECK(b->mode_value(0, 0) == Approx(std::sqrt(1.0 / L)).epsilon(1e-14));
    for (int k = 1; k < b->n_modes(); ++k) {
        CHECK(b->mode_value(k, 0) == Approx(std::sqrt(2.0 / L)).epsilon(1e-14));
        CHECK(b->mode_deriv(k, 0) == Approx(0.0).margin(1e-14));
        // <e_k', e_k'> = lambda_k after integrating by parts
        double s = 0.0;
        for (int q = 0; q < b->n_quad(); ++q)
            s += b->weight(q) * b->mode_deriv(k, q) * b->mode_deriv(k, q);
        CHECK(s == Approx(b->eigenvalue(k)).epsilon(1e-12));
    }
}

TEST_CASE("trapezoid rule is exact exactly up to the aliasing frequency", "[basis]") {
    const double L = kPi;
    auto b = SpectralBasis::build(L, 8, 4); // 32 nodes, 31 intervals
    auto integrate_cos = [&](int m) {
        double s = 0.0;
        for (int q = 0; q < b->n_quad(); ++q)
            s += b->weight(q) * std::cos(m * kPi * b->node(q) / L);
        return s;
    };
    // \int_0^L cos(m pi x / L) dx = 0 for m >= 1; exact through frequency 61
    CHECK(integrate_cos(61) == Approx(0.0).margin(1e-12));
    // frequency 62 = 2 * 31 aliases to the constant and integrates to L
    CHECK(integrate_cos(62) == Approx(L).epsilon(1e-12));
}

TEST_CASE("sine quadrature weights integrate odd modes exactly", "[basis]") {
    const double L = 1.3;
    auto b = SpectralBasis::build(L, 8, 4);
    auto integrate_sin = [&](int j) {
        double s = 0.0;
        const auto& w = b->sine_weights();
        for (int q = 0; q < b->n_quad(); ++q)
            s += w[static_cast<size_t>(q)] * std::sin(j * kPi * b->node(q) / L);
        return s;
    };
    // \int_0^L sin(j pi x / L) dx = 2L/(j pi) for odd j, 0 for even j
    CHECK(integrate_sin(1) == Approx(2.0 * L / kPi).epsilon(1e-12));
    CHECK(integrate_sin(2) == Approx(0.0).margin(1e-12));
    CHECK(integrate_sin(29) == Approx(2.0 * L / (29.0 * kPi)).epsilon(1e-10));
    CHECK(b->sine_weights().front() == Approx(0.0).margin(1e-15));
    CHECK(b->sine_weights().back() == Approx(0.0).margin(1e-15));
}

TEST_CASE("analysis and synthesis round trip", "[basis]") {
    auto b = SpectralBasis::build(2.2, 12, 4);
    FieldCoeffs u = random_coeffs(b, 7u);
    FieldCoeffs v = to_coeffs(to_physical(u));
    for (int k = 0; k < b->n_modes(); ++k) {
        CHECK(v.mode(k).x == Approx(u.mode(k).x).margin(1e-13));
        CHECK(v.mode(k).y == Approx(u.mode(k).y).margin(1e-13));
        CHECK(v.mode(k).z == Approx(u.mode(k).z).margin(1e-13));
    }
}

TEST_CASE("laplacian acts diagonally", "[basis]") {
    auto b = SpectralBasis::build(kPi, 6, 4);
    FieldCoeffs u = random_coeffs(b, 3u);
    FieldCoeffs lu = apply_laplacian(u);
    for (int k = 0; k < b->n_modes(); ++k) {
        const Vec3 expect = u.mode(k) * (-b->eigenvalue(k));
        CHECK(lu.mode(k).x == Approx(expect.x).margin(1e-14));
        CHECK(lu.mode(k).y == Approx(expect.y).margin(1e-14));
        CHECK(lu.mode(k).z == Approx(expect.z).margin(1e-14));
    }
}

TEST_CASE("mode projection truncates and validates", "[basis]") {
    auto b = SpectralBasis::build(kPi, 6, 4);
    FieldCoeffs u = random_coeffs(b, 11u);
    FieldCoeffs p = project_modes(u, 3);
    for (int k = 0; k < 3; ++k) CHECK(norm(p.mode(k) - u.mode(k)) == 0.0);
    for (int k = 3; k < 6; ++k) CHECK(norm(p.mode(k)) == 0.0);
    CHECK_THROWS_AS(project_modes(u, 0), Error);
    CHECK_THROWS_AS(project_modes(u, 7), Error);
}

TEST_CASE("fractional norms", "[basis]") {
    const double L = kPi;
    auto b = SpectralBasis::build(L, 4, 4);

    SECTION("single unit mode at k=1") {
        FieldCoeffs u(b);
        u.set_mode(1, {0.0, 0.0, 1.0});
        // lambda_1 = 1, so (1 + lambda_1)^{2 * 1/2} = 2
        CHECK(fractional_norm(u, 0.5) == Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(fractional_norm(u, -0.5) == Approx(std::sqrt(0.5)).epsilon(1e-14));
        CHECK(fractional_norm(u, 0.0) == Approx(1.0).epsilon(1e-14));
    }

    SECTION("constant fields see no scale weight") {
        FieldCoeffs u(b);
        const double a = 0.37;
        u.set_mode(0, {a * std::sqrt(L), 0.0, 0.0});
        for (double beta : {-0.7, -0.3, 0.0, 0.5, 1.0})
            CHECK(fractional_norm(u, beta) == Approx(a * std::sqrt(L)).epsilon(1e-14));
    }

    SECTION("parseval: l2_norm matches the physical-space integral") {
        FieldCoeffs u = random_coeffs(b, 5u);
        PhysicalField f = to_physical(u);
        double s = 0.0;
        for (int q = 0; q < b->n_quad(); ++q) s += b->weight(q) * dot(f.at(q), f.at(q));
        CHECK(l2_norm(u) == Approx(std::sqrt(s)).epsilon(1e-12));
    }
}

TEST_CASE("construction rejects bad arguments", "[basis]") {
    CHECK_THROWS_AS(SpectralBasis::build(0.0, 4, 4), ConfigError);
    CHECK_THROWS_AS(SpectralBasis::build(-1.0, 4, 4), ConfigError);
    CHECK_THROWS_AS(SpectralBasis::build(1.0, 0, 4), ConfigError);
    CHECK_THROWS_AS(SpectralBasis::build(1.0, 4, 3), ConfigError);
}

TEST_CASE("operations require a common basis", "[basis]") {
    auto b1 = SpectralBasis::build(kPi, 4, 4);
    auto b2 = SpectralBasis::build(kPi, 5, 4);
    FieldCoeffs u(b1), v(b2);
    CHECK_THROWS_AS(coeff_inner(u, v), Error);
    CHECK_THROWS_AS(add_scaled(u, v, 1.0), Error);
}

TEST_CASE("linear combinations", "[basis]") {
    auto b = SpectralBasis::build(kPi, 4, 4);
    FieldCoeffs u = random_coeffs(b, 1u);
    FieldCoeffs v = random_coeffs(b, 2u);
    FieldCoeffs w = lin_comb(u, 2.0, v, -3.0);
    for (int k = 0; k < b->n_modes(); ++k) {
        const Vec3 expect = u.mode(k) * 2.0 + v.mode(k) * (-3.0);
        CHECK(norm(w.mode(k) - expect) == Approx(0.0).margin(1e-15));
    }
    FieldCoeffs a = u;
    add_scaled(a, v, 0.5);
    for (int k = 0; k < b->n_modes(); ++k)
        CHECK(norm(a.mode(k) - (u.mode(k) + v.mode(k) * 0.5)) == Approx(0.0).margin(1e-15));
}
