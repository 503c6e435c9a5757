#include "leapfrog/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "leapfrog/errors.hpp"
#include "leapfrog/quadrature.hpp"

namespace leapfrog::profiles {

namespace {

constexpr double kPi = std::numbers::pi;

// Fornberg's recursion: weights[d][j] for derivative d (0..2) at x0 using nodes x[j].
std::array<std::array<double, 5>, 3> fornberg5(const std::array<double, 5>& x, double x0) {
    constexpr int n = 5;
    constexpr int order = 2;
    std::array<std::array<double, 5>, 3> c{};
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

void require_nonzero_mode(int n) {
    if (n == 0) throw UnsupportedMode("Fourier mode n = 0 is not supported");
}

}  // namespace

RadialProfile RadialProfile::sample(const std::function<double(double)>& f, double rho0, double h,
                                    std::size_t count, int mode_n) {
    RadialProfile p;
    p.mode_n = mode_n;
    p.rho.resize(count);
    p.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        p.rho[i] = rho0 + static_cast<double>(i) * h;
        p.values[i] = f(p.rho[i]);
    }
    return p;
}

double RadialProfile::uniform_spacing() const {
    if (rho.size() < 2) throw InvalidInput("radial profile needs at least two samples");
    const double h = (rho.back() - rho.front()) / static_cast<double>(rho.size() - 1);
    for (std::size_t i = 1; i < rho.size(); ++i) {
        if (std::abs((rho[i] - rho[i - 1]) - h) > 1e-8 * h) {
            throw InvalidInput("radial grid is not uniform");
        }
    }
    return h;
}

double RadialProfile::at(double r) const {
    if (rho.empty() || r < rho.front() || r > rho.back()) return 0.0;
    const auto it = std::upper_bound(rho.begin(), rho.end(), r);
    if (it == rho.end()) return values.back();
    const auto i = static_cast<std::size_t>(it - rho.begin());
    const double t = (r - rho[i - 1]) / (rho[i] - rho[i - 1]);
    return (1.0 - t) * values[i - 1] + t * values[i];
}

void RadialProfile::validate() const {
    if (rho.size() != values.size()) throw InvalidInput("rho and values differ in length");
    if (!rho.empty() && rho.front() < 0.0) throw InvalidInput("rho must be non-negative");
    for (std::size_t i = 1; i < rho.size(); ++i) {
        if (!(rho[i] > rho[i - 1])) throw InvalidInput("rho must be strictly increasing");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFiniteError("radial profile holds a non-finite value");
    }
}

double U_radial(double rho) {
    const double d = 1.0 + rho * rho;
    return 8.0 / (d * d);
}

double eval_U(Vec2 y) { return U_radial(norm(y)); }

double Gamma0_radial(double rho) { return std::log(8.0) - 2.0 * std::log1p(rho * rho); }

double eval_Gamma0(Vec2 y) { return std::log(8.0) - 2.0 * std::log1p(norm2(y)); }

double kernel_Z(int l, Vec2 y) {
    const double d = 1.0 + norm2(y);
    switch (l) {
        case 0: return 2.0 * (1.0 - norm2(y)) / d;
        case 1: return -4.0 * y.x / d;
        case 2: return -4.0 * y.y / d;
        default: throw InvalidInput("kernel index must be 0, 1 or 2");
    }
}

double zeta(int n, double rho) {
    require_nonzero_mode(n);
    const int m = std::abs(n);
    const double r2 = rho * rho;
    return std::pow(rho, m) * ((m + 1) + (m - 1) * r2) / ((m + 1) * (1.0 + r2));
}

RadialProfile mode_operator_apply(int n, const RadialProfile& p) {
    require_nonzero_mode(n);
    p.validate();
    if (p.size() < 5) throw InvalidInput("mode_operator_apply needs at least 5 grid points");
    const double h = p.uniform_spacing();
    const std::size_t N = p.size();
    const double n2 = static_cast<double>(n) * n;

    RadialProfile out;
    out.rho = p.rho;
    out.values.assign(N, 0.0);
    out.mode_n = n;

    // Weights depend only on the offset of the evaluation node inside its
    // window, so five stencils cover the whole grid.
    std::array<std::array<std::array<double, 5>, 3>, 5> stencils{};
    for (int off = 0; off < 5; ++off) {
        std::array<double, 5> x{};
        for (int j = 0; j < 5; ++j) x[j] = static_cast<double>(j - off) * h;
        stencils[off] = fornberg5(x, 0.0);
    }

    for (std::size_t i = 0; i < N; ++i) {
        const double r = p.rho[i];
        if (r == 0.0) {
            if (p.values[i] != 0.0) {
                throw InvalidInput("profile must vanish at rho = 0 for a nonzero mode");
            }
            continue;  // regular profiles p ~ rho^|n| give L_n[p](0) = 0
        }
        const std::size_t start = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - 2, 0,
                                                             static_cast<std::ptrdiff_t>(N) - 5);
        const auto& w = stencils[i - start];
        double d1 = 0.0;
        double d2 = 0.0;
        for (int j = 0; j < 5; ++j) {
            d1 += w[1][j] * p.values[start + j];
            d2 += w[2][j] * p.values[start + j];
        }
        const double d = 1.0 + r * r;
        out.values[i] = d2 + d1 / r - n2 * p.values[i] / (r * r) + 8.0 * p.values[i] / (d * d);
    }
    return out;
}

namespace {

// Running integral c_i = gap + \int_{x_0}^{x_i} f on a uniform grid, exact
// for cubics on every cell (4-point Lagrange, one-sided at the ends).
std::vector<double> cumulative4(const std::vector<double>& f, double h, double gap) {
    const std::size_t N = f.size();
    std::vector<double> c(N, gap);
    const double k = h / 24.0;
    for (std::size_t i = 0; i + 1 < N; ++i) {
        double seg;
        if (i == 0) {
            seg = k * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        } else if (i + 2 == N) {
            seg = k * (f[i - 2] - 5.0 * f[i - 1] + 19.0 * f[i] + 9.0 * f[i + 1]);
        } else {
            seg = k * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
        }
        c[i + 1] = c[i] + seg;
    }
    return c;
}

// Given J(rho) = \int_rho^inf g zeta s ds, returns p = zeta v with
// rho zeta^2 v' = -J and v(R) = 0.
std::vector<double> assemble_from_flux(const std::vector<double>& rho, const std::vector<double>& zeta_v,
                                       const std::vector<double>& flux, double h) {
    const std::size_t N = rho.size();
    std::vector<double> integrand(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        if (rho[i] > 0.0) integrand[i] = flux[i] / (rho[i] * zeta_v[i] * zeta_v[i]);
    }
    const auto c = cumulative4(integrand, h, 0.0);
    std::vector<double> p(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        if (rho[i] > 0.0) p[i] = zeta_v[i] * (c[N - 1] - c[i]);
    }
    return p;
}

// Mode-1 flux for a datum whose total is zero up to a discretization defect.
// The defect is removed with a localized multiple of zeta_1^2 rho U. The
// inward sum is used near the axis, where J/(rho zeta^2) amplifies rounding.
std::vector<double> mode1_flux(const std::vector<double>& rho, const std::vector<double>& zeta_v,
                               const std::vector<double>& w, double h, double gap_w, double tail) {
    const std::size_t N = rho.size();
    std::vector<double> phi(N);
    for (std::size_t i = 0; i < N; ++i) phi[i] = zeta_v[i] * zeta_v[i] * rho[i] * U_radial(rho[i]);
    const auto cw = cumulative4(w, h, gap_w);
    const auto cp = cumulative4(phi, h, rho[0] > 0.0 ? phi[0] * rho[0] / 4.0 : 0.0);
    const double c = (cw.back() + tail) / cp.back();

    std::vector<double> flux(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double inner = cw[i] - c * cp[i];
        const double outer = (cw.back() - cw[i]) - c * (cp.back() - cp[i]) + tail;
        flux[i] = rho[i] <= 1.0 ? -inner : outer;
    }
    return flux;
}

}  // namespace

RadialProfile mode_solve(int n, const RadialProfile& g, double R_out) {
    require_nonzero_mode(n);
    g.validate();
    if (g.size() < 5) throw InvalidInput("mode_solve needs at least 5 grid points");
    const double h = g.uniform_spacing();
    if (std::abs(g.rho.back() - R_out) > 1e-9 * std::max(1.0, R_out)) {
        throw InvalidInput("datum grid must end at R_out");
    }
    const int m = std::abs(n);
    const std::size_t N = g.size();

    std::vector<double> z(N);
    std::vector<double> w(N);
    for (std::size_t i = 0; i < N; ++i) {
        z[i] = zeta(n, g.rho[i]);
        w[i] = g.values[i] * z[i] * g.rho[i];
    }

    // First gap [0, rho_0]: g ~ s^m and zeta ~ s^m, so the integrand is ~ s^(2m+1).
    auto cumulative = [&](const std::vector<double>& f) {
        return cumulative4(f, h, g.rho[0] > 0.0 ? f[0] * g.rho[0] / (2 * m + 2) : 0.0);
    };

    RadialProfile out;
    out.rho = g.rho;
    out.mode_n = n;

    if (m == 1) {
        std::vector<double> absw(N);
        std::transform(w.begin(), w.end(), absw.begin(), [](double x) { return std::abs(x); });
        const double mass = cumulative(absw).back();
        if (mass == 0.0) {
            out.values.assign(N, 0.0);
            return out;
        }
        const double defect = cumulative(w).back();
        if (std::abs(defect) > 1e-8 * mass) throw OrthogonalityError(defect, mass);

        const auto flux = mode1_flux(g.rho, z, w, h, w[0] * g.rho[0] / 4.0, 0.0);
        out.values = assemble_from_flux(g.rho, z, flux, h);
        return out;
    }

    // Inward form, |n| >= 2: rho zeta^2 v' = \int_0^rho w, v(R) = 0.
    const auto inner = cumulative(w);
    std::vector<double> flux(N);
    for (std::size_t i = 0; i < N; ++i) flux[i] = -inner[i];
    out.values = assemble_from_flux(g.rho, z, flux, h);
    return out;
}

ProfileConstants compute_constants(double quadrature_tol) {
    if (!(quadrature_tol > 0.0)) throw InvalidInput("quadrature tolerance must be positive");
    // U y1 d1Gamma0 = -32 y1^2 / (1+|y|^2)^3; the angular integral of cos^2 is pi.
    auto base = [](double r) {
        const double d = 1.0 + r * r;
        return -32.0 * kPi * r * r * r / (d * d * d);
    };
    const auto i0 = quadrature::half_line(base, 0.0, quadrature_tol);
    const auto i1 = quadrature::half_line([&](double r) { return base(r) * Gamma0_radial(r); }, 0.0,
                                          quadrature_tol);
    ProfileConstants c;
    c.I0 = i0.value;
    c.I1 = i1.value;
    c.A = -c.I1 / c.I0;
    c.A_bar = c.A - 6.0;
    return c;
}

double corrector_datum(double rho, double shift) {
    return -0.5 * rho * U_radial(rho) * (Gamma0_radial(rho) + shift);
}

RadialProfile solve_corrector(double shift, double R_out, double h) {
    if (!(h > 0.0) || !(R_out > 10.0 * h)) throw InvalidInput("invalid corrector grid");
    const auto weight = [shift](double r) { return corrector_datum(r, shift) * zeta(1, r) * r; };

    const auto mass =
        quadrature::half_line([&](double r) { return std::abs(weight(r)); }, 0.0, 1e-6).value;
    const auto defect = quadrature::half_line(weight, 0.0, 1e-12, 1e-14 * mass).value;
    if (std::abs(defect) > 1e-6 * mass) throw OrthogonalityError(defect, mass);

    const auto count = static_cast<std::size_t>(std::llround(R_out / h));
    const double hh = R_out / static_cast<double>(count);
    const double tail = quadrature::half_line(weight, R_out, 1e-12, 1e-300).value;

    std::vector<double> rho(count + 1);
    std::vector<double> z(count + 1);
    std::vector<double> w(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
        rho[i] = static_cast<double>(i) * hh;
        z[i] = zeta(1, rho[i]);
        w[i] = weight(rho[i]);
    }
    const auto flux = mode1_flux(rho, z, w, hh, 0.0, tail);
    const auto p = assemble_from_flux(rho, z, flux, hh);

    RadialProfile gamma;
    gamma.rho = rho;
    gamma.values.resize(count + 1);
    for (std::size_t i = 1; i <= count; ++i) gamma.values[i] = 2.0 * p[i] / rho[i];
    // Gamma is even in rho: extrapolate in rho^2.
    gamma.values[0] = (4.0 * gamma.values[1] - gamma.values[2]) / 3.0;
    // 2 zeta_1 / rho = 2/(1+rho^2) is in the kernel and its weight depends on
    // R_out; fix it by Gamma(0) = 0.
    const double g0 = gamma.values[0];
    for (std::size_t i = 0; i <= count; ++i) gamma.values[i] -= g0 / (1.0 + rho[i] * rho[i]);
    return gamma;
}

RadialProfile compute_Gamma(double R_out, double h) {
    if (R_out < 100.0) throw InvalidInput("compute_Gamma requires R_out >= 100");
    const auto consts = compute_constants(1e-12);
    return solve_corrector(consts.A, R_out, h);
}

void write_csv(std::ostream& os, const RadialProfile& p) {
    const auto old = os.precision(17);
    os << "rho,value\n";
    for (std::size_t i = 0; i < p.size(); ++i) os << p.rho[i] << ',' << p.values[i] << '\n';
    os.precision(old);
}

}  // namespace leapfrog::profiles
