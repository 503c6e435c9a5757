#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "leapfrog/errors.hpp"
#include "leapfrog/fields.hpp"

using namespace leapfrog;
using namespace leapfrog::fields;

namespace {

constexpr double kPi = std::numbers::pi;

double analytic_psi(double r, double z) { return std::pow(1.0 + r * r + z * z, -1.5); }
double analytic_omega(double r, double z) { return 15.0 * std::pow(1.0 + r * r + z * z, -3.5); }

ScalarField sample(const AxiGrid& g, double (*f)(double, double), FieldRole role) {
    auto out = ScalarField::zeros(g, role);
    for (std::size_t i = 0; i < g.nr; ++i)
        for (std::size_t m = 0; m < g.nz; ++m) out.at(i, m) = f(g.r(i), g.z(m));
    return out;
}

double analytic_error(std::size_t n) {
    const auto g = AxiGrid::span(8.0, -8.0, 8.0, n, 2 * n - 1);
    const auto psi = solve_delta5(sample(g, analytic_omega, FieldRole::relative_vorticity), 1e-4);
    double err = 0.0;
    for (std::size_t i = 0; i < g.nr; ++i)
        for (std::size_t m = 0; m < g.nz; ++m) err = std::max(err, std::abs(psi.at(i, m) - analytic_psi(g.r(i), g.z(m))));
    return err;
}

ScalarField compact_bump(const AxiGrid& g, Vec2 c, double radius) {
    auto f = ScalarField::zeros(g, FieldRole::relative_stream);
    for (std::size_t i = 0; i < g.nr; ++i) {
        for (std::size_t m = 0; m < g.nz; ++m) {
            const double d2 = (norm2(Vec2{g.r(i), g.z(m)} - c)) / (radius * radius);
            if (d2 < 1.0) f.at(i, m) = std::pow(1.0 - d2, 4);
        }
    }
    return f;
}

}  // namespace

TEST_CASE("grid construction") {
    const auto g = AxiGrid::span(2.0, -1.0, 3.0, 21, 41);
    CHECK(g.hr == doctest::Approx(0.1));
    CHECK(g.hz == doctest::Approx(0.1));
    CHECK(g.r(0) == 0.0);
    CHECK(g.z_max() == doctest::Approx(3.0));
    CHECK_THROWS_AS(AxiGrid::span(2.0, -1.0, 3.0, 4, 41), InvalidInput);
}

TEST_CASE("near-field Green's function") {
    CHECK(greens_near({3.0, 1.0}, {3.0, 0.0}) == 0.0);
    CHECK(greens_near({1.0, 0.1}, {1.0, 0.0}) == doctest::Approx(-2.0 * std::log(0.01)));
    CHECK(greens_near({1.0, 0.1}, {1.0, 0.0}) == doctest::Approx(9.2103).epsilon(1e-5));
    CHECK_THROWS_AS(greens_near({1.0, 0.0}, {1.0, 0.0}), DomainError);
}

TEST_CASE("mollified Green's function carries mass 8 pi") {
    // -Delta_5 of the eps-regularized kernel, integrated over the disk
    // |x - P0| < R against dr dz. The 2D part gives 8 pi R^2/(R^2+eps^2).
    const Vec2 P0{1.0, 0.0};
    const double eps = 0.002;
    const double R = 0.04;
    const double h = 2e-4;
    auto G = [&](double r, double z) {
        const double d2 = (r - P0.x) * (r - P0.x) + z * z;
        return -2.0 * std::log(d2 + eps * eps) * (1.0 - 1.5 * (r - P0.x) / P0.x);
    };
    double total = 0.0;
    const int n = static_cast<int>(R / h);
    for (int a = -n; a <= n; ++a) {
        for (int b = -n; b <= n; ++b) {
            const double r = P0.x + (a + 0.5) * h;
            const double z = (b + 0.5) * h;
            if ((r - P0.x) * (r - P0.x) + z * z > R * R) continue;
            const double lap = (G(r + h, z) - 2 * G(r, z) + G(r - h, z)) / (h * h) +
                               (G(r, z + h) - 2 * G(r, z) + G(r, z - h)) / (h * h) +
                               3.0 / r * (G(r + h, z) - G(r - h, z)) / (2 * h);
            total -= lap * h * h;
        }
    }
    const double expected = 8 * kPi * R * R / (R * R + eps * eps);
    MESSAGE("mollified mass " << total << " vs " << expected);
    CHECK(total == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("ring stream function") {
    RingFieldOptions off;
    off.include_Gamma = false;
    const double eps = 0.05;
    CHECK(1.0 * stream_ring({1.0, 0.0}, {1.0, 0.0}, eps, off) == doctest::Approx(4 * std::abs(std::log(eps))));
    CHECK(2.0 * stream_ring({2.0, 0.0}, {2.0, 0.0}, eps, off) == doctest::Approx(4 * std::abs(std::log(eps))));

    const Vec2 P{3.0, 0.0};
    const Vec2 x{3.0, 1.0};
    CHECK(std::abs(stream_ring(x, P, 1e-3, off) - greens_near(x, P) / 3.0) < 1e-2);

    RingFieldOptions with_gamma;
    for (double z : {0.01, 0.05, 0.3}) {
        CHECK(stream_ring({1.0, z}, {1.0, 0.0}, eps, with_gamma) == doctest::Approx(stream_ring({1.0, z}, {1.0, 0.0}, eps, off)));
        // even in z - z0
        CHECK(stream_ring({1.03, 0.2 + z}, {1.0, 0.2}, eps, with_gamma) ==
              doctest::Approx(stream_ring({1.03, 0.2 - z}, {1.0, 0.2}, eps, with_gamma)));
    }
    CHECK(stream_ring({1.05, 0.0}, {1.0, 0.0}, eps, with_gamma) != doctest::Approx(stream_ring({1.05, 0.0}, {1.0, 0.0}, eps, off)));

    RingFieldOptions hk = off;
    hk.include_H = true;
    hk.include_K = true;
    hk.H = [](Vec2, Vec2) { return 0.5; };
    hk.K = [](Vec2, Vec2) { return 2.0; };
    const double base = stream_ring({1.1, 0.1}, {1.0, 0.0}, eps, off);
    const double reg = -2.0 * std::log(eps * eps + 0.02);
    CHECK(stream_ring({1.1, 0.1}, {1.0, 0.0}, eps, hk) == doctest::Approx(base + 0.5 * reg + 2.0));
    CHECK_THROWS_AS(stream_ring({1, 0}, {1, 0}, 0.6, off), InvalidInput);
}

TEST_CASE("leading vorticity") {
    const double eps = 0.02;
    const Vec2 P{1.2, 0.3};
    CHECK(vorticity_leading(P, P, eps) == doctest::Approx(8.0 / (eps * eps * 1.2)));
    CHECK(vorticity_leading({1.2 + eps, 0.3}, P, eps) == doctest::Approx(2.0 / (eps * eps * 1.2)));

    // int r W dr dz over |x - P| <= 10 eps by a fine midpoint rule
    const double R = 10 * eps;
    const int n = 800;
    const double h = 2 * R / n;
    double mass = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const Vec2 x{P.x - R + (a + 0.5) * h, P.y - R + (b + 0.5) * h};
            if (norm(x - P) > R) continue;
            mass += x.x * vorticity_leading(x, P, eps) * h * h;
        }
    }
    // exact 2D value 8 pi (1 - 1/(1+100))
    MESSAGE("windowed mass / 8 pi = " << mass / (8 * kPi));
    CHECK(mass == doctest::Approx(8 * kPi).epsilon(0.02));
}

TEST_CASE("superposition") {
    const auto g = AxiGrid::span(2.5, -1.5, 2.7, 512, 512);
    reduced::RingFamily none{{}, {}, 0.05, 1.0};
    CHECK(superpose(none, g).max_abs() == 0.0);

    // one ring on a node
    const auto gn = AxiGrid::span(2.0, -1.0, 1.0, 201, 201);
    reduced::RingFamily one{{{1.0, 0.0}}, {0.02}, 0.02, 1.0};
    const auto w1 = superpose(one, gn);
    CHECK(w1.max_abs() == doctest::Approx(8.0 / (0.02 * 0.02)));
    CHECK(w1.at(100, 100) == doctest::Approx(8.0 / (0.02 * 0.02)));
    // compact truncation at 20 eps = 0.4
    CHECK(w1.at(100, 139) > 0.0);
    CHECK(w1.at(100, 141) == 0.0);
    CHECK(w1.at(145, 100) == 0.0);

    const auto rings = reduced::scaled_to_physical(reduced::ScaledConfig{{{0.25, 0}, {-0.25, 0}}, 1.0}, 0.05);
    const auto w2 = superpose(rings, g);
    const double mass = weighted_mass(w2);
    MESSAGE("k = 2 weighted mass / 16 pi = " << mass / (16 * kPi));
    CHECK(mass == doctest::Approx(16 * kPi).epsilon(0.02));

    const auto coarse = AxiGrid::span(2.0, -1.0, 1.0, 21, 21);
    try {
        superpose(rings, coarse);
        FAIL("expected resolution error");
    } catch (const ResolutionError& e) {
        CHECK(e.ring() == 0);  // wider ring has the smaller core
    }
}

TEST_CASE("analytic Delta_5 pair (independent stencil)") {
    // plain centered (3/r) d_r form, small h, away from the axis
    const double h = 1e-3;
    for (Vec2 p : {Vec2{0.5, 0.2}, Vec2{1.3, -0.7}, Vec2{2.0, 1.5}}) {
        auto f = [](double r, double z) { return analytic_psi(r, z); };
        const double lap = (f(p.x + h, p.y) - 2 * f(p.x, p.y) + f(p.x - h, p.y)) / (h * h) +
                           3.0 / p.x * (f(p.x + h, p.y) - f(p.x - h, p.y)) / (2 * h) +
                           (f(p.x, p.y + h) - 2 * f(p.x, p.y) + f(p.x, p.y - h)) / (h * h);
        CHECK(-lap == doctest::Approx(analytic_omega(p.x, p.y)).epsilon(1e-5));
    }
}

TEST_CASE("apply_delta5") {
    const auto g = AxiGrid::span(4.0, -4.0, 4.0, 129, 257);
    auto c = ScalarField::zeros(g, FieldRole::relative_stream);
    for (auto& v : c.values) v = 3.5;
    CHECK(apply_delta5(c).max_abs() < 1e-9);

    const auto lap = apply_delta5(sample(g, analytic_psi, FieldRole::relative_stream));
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < g.nr; ++i)
        for (std::size_t m = 1; m + 1 < g.nz; ++m)
            err = std::max(err, std::abs(lap.at(i, m) + analytic_omega(g.r(i), g.z(m))));
    MESSAGE("apply_delta5 error at h = 1/32: " << err);
    CHECK(err < 15.0 * 30.0 * g.hr * g.hr);
}

TEST_CASE("solve_delta5 basics") {
    const auto g = AxiGrid::span(3.0, -3.0, 3.0, 97, 193);
    const auto zero = solve_delta5(ScalarField::zeros(g, FieldRole::relative_vorticity));
    CHECK(zero.max_abs() == 0.0);
    CHECK(zero.role == FieldRole::relative_stream);

    // solve(apply(psi)) = psi for compact psi
    const auto psi = compact_bump(g, {0.0, 0.3}, 1.2);
    auto omega = apply_delta5(psi);
    for (auto& v : omega.values) v = -v;
    for (std::size_t i = 0; i < g.nr; ++i)
        for (std::size_t m = 0; m < g.nz; ++m)
            if (i + 1 >= g.nr || m == 0 || m + 1 >= g.nz) omega.at(i, m) = 0.0;
    const auto back = solve_delta5(omega);
    double err = 0.0;
    for (std::size_t k = 0; k < psi.values.size(); ++k) err = std::max(err, std::abs(back.values[k] - psi.values[k]));
    CHECK(err < 1e-6);

    // apply(solve(omega)) = -omega in the interior
    const auto gw = AxiGrid::span(4.0, -3.0, 3.0, 129, 193);
    reduced::RingFamily ring{{{1.0, 0.0}}, {0.08}, 0.08, 1.0};
    const auto w = superpose(ring, gw);
    const auto s = solve_delta5(w);
    const auto a = apply_delta5(s);
    double res = 0.0;
    for (std::size_t i = 0; i + 1 < gw.nr; ++i)
        for (std::size_t m = 1; m + 1 < gw.nz; ++m) res = std::max(res, std::abs(a.at(i, m) + w.at(i, m)));
    CHECK(res < 1e-6 * w.max_abs());

    // Neumann condition at the axis: one-sided slope is O(hr^2)
    double slope = 0.0;
    for (std::size_t m = 0; m < gw.nz; ++m)
        slope = std::max(slope, std::abs(-3 * s.at(0, m) + 4 * s.at(1, m) - s.at(2, m)) / (2 * gw.hr));
    MESSAGE("axis slope " << slope);
    CHECK(slope < gw.hr * gw.hr * s.max_abs());

    // support touching the edge
    auto bad = ScalarField::zeros(g, FieldRole::relative_vorticity);
    bad.at(g.nr - 2, 50) = 1.0;
    CHECK_THROWS_AS(solve_delta5(bad), DomainError);
    auto wrong_grid = ScalarField::zeros(AxiGrid::span(3.0, -3.0, 3.0, 33, 65), FieldRole::relative_vorticity);
    Delta5Solver solver(g);
    CHECK_THROWS_AS(solver.solve(wrong_grid), InvalidInput);
}

TEST_CASE("analytic pair accuracy and convergence") {
    const double e64 = analytic_error(65);
    const double e128 = analytic_error(129);
    MESSAGE("analytic errors: " << e64 << ", " << e128 << " slope " << std::log2(e64 / e128));
    CHECK(e128 < 0.02);
    CHECK(std::log2(e64 / e128) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("velocity field") {
    const auto g = AxiGrid::span(2.0, -2.0, 2.0, 65, 129);
    const double log_eps = std::log(0.05);
    const double L = -log_eps;
    auto c = ScalarField::zeros(g, FieldRole::relative_stream);
    for (auto& v : c.values) v = 4.0;
    const auto u = velocity_field(c, log_eps, 1.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(std::abs(u.ur.values[k]) < 1e-12);
        CHECK(u.uz.values[k] == doctest::Approx(2.0 * (4.0 - L) / L));
    }

    // z-even psi: u_r odd, u_z even; axis u_r = 0
    auto psi = ScalarField::zeros(g, FieldRole::relative_stream);
    for (std::size_t i = 0; i < g.nr; ++i)
        for (std::size_t m = 0; m < g.nz; ++m)
            psi.at(i, m) = std::exp(-(g.r(i) - 1) * (g.r(i) - 1) / 0.1 - g.z(m) * g.z(m) / 0.2);
    const auto v = velocity_field(psi, log_eps, 1.0);
    for (std::size_t i = 0; i < g.nr; ++i) {
        CHECK(v.ur.at(0, i % g.nz) == 0.0);
        for (std::size_t m = 0; m < g.nz; ++m) {
            CHECK(v.ur.at(i, m) == doctest::Approx(-v.ur.at(i, g.nz - 1 - m)).epsilon(1e-12));
            CHECK(v.uz.at(i, m) == doctest::Approx(v.uz.at(i, g.nz - 1 - m)).epsilon(1e-12));
        }
    }

    // discrete divergence d_r(r u_r) + d_z(r u_z)
    double div = 0.0;
    double curv = 0.0;
    for (std::size_t i = 1; i + 1 < g.nr; ++i) {
        for (std::size_t m = 1; m + 1 < g.nz; ++m) {
            const double d = (g.r(i + 1) * v.ur.at(i + 1, m) - g.r(i - 1) * v.ur.at(i - 1, m)) / (2 * g.hr) +
                             g.r(i) * (v.uz.at(i, m + 1) - v.uz.at(i, m - 1)) / (2 * g.hz);
            div = std::max(div, std::abs(d));
            curv = std::max(curv, std::abs(psi.at(i + 1, m) - 2 * psi.at(i, m) + psi.at(i - 1, m)) / (g.hr * g.hr));
            curv = std::max(curv, std::abs(psi.at(i, m + 1) - 2 * psi.at(i, m) + psi.at(i, m - 1)) / (g.hz * g.hz));
        }
    }
    MESSAGE("divergence " << div << " bound " << 10 * g.hr * curv);
    CHECK(div < 10 * g.hr * curv);
}

TEST_CASE("alpha speed") {
    const auto k = profiles::compute_constants(1e-12);
    CHECK(std::abs(alpha_speed(1.0, 1e-6, k) - 1.0) < 0.5);
    // A0 - A = 3 exactly
    CHECK(alpha_speed(1.0, 0.05, k) == doctest::Approx(1.0 + 3.0 / (4.0 * std::abs(std::log(0.05)))));
    CHECK(alpha_speed(2.5, 0.01, k) * 2.5 == doctest::Approx(alpha_speed(1.0, 0.01, k)));
    const double d1 = alpha_speed(1.0, 1e-3, k) - 1.0;
    const double d2 = alpha_speed(1.0, 1e-6, k) - 1.0;
    CHECK(d2 / d1 == doctest::Approx(0.5).epsilon(0.1));
    CHECK_THROWS_AS(alpha_speed(1.0, 1.0, k), InvalidInput);
}

TEST_CASE("snapshot I/O") {
    const auto g = AxiGrid::span(1.0, -0.5, 0.5, 9, 11);
    auto f = ScalarField::zeros(g, FieldRole::relative_vorticity);
    for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = 0.25 * static_cast<double>(k) - 3.0;
    std::stringstream ss;
    write_binary(ss, f);
    CHECK(ss.str().size() == 16 + 24 + 8 * g.size());
    const auto back = read_binary(ss, FieldRole::relative_vorticity);
    CHECK(back.grid == g);
    CHECK(back.values == f.values);

    std::stringstream truncated(ss.str().substr(0, 20));
    CHECK_THROWS_AS(read_binary(truncated), InvalidInput);

    std::ostringstream csv;
    write_csv(csv, f);
    CHECK(csv.str().rfind("r,z,value\n0,-0.5,-3\n", 0) == 0);
}
