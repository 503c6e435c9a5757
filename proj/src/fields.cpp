#include "leapfrog/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>

#include "leapfrog/errors.hpp"

namespace leapfrog::fields {

static_assert(std::endian::native == std::endian::little, "binary snapshots assume a little-endian host");

AxiGrid AxiGrid::span(double r_max, double z_min, double z_max, std::size_t nr, std::size_t nz) {
    if (nr < 2 || nz < 2) throw InvalidInput("grid needs at least two nodes per direction");
    AxiGrid g;
    g.nr = nr;
    g.nz = nz;
    g.hr = r_max / static_cast<double>(nr - 1);
    g.hz = (z_max - z_min) / static_cast<double>(nz - 1);
    g.z_min = z_min;
    g.validate();
    return g;
}

void AxiGrid::validate() const {
    if (nr < 8 || nz < 8) throw InvalidInput("grid needs nr, nz >= 8");
    if (!(hr > 0.0) || !(hz > 0.0) || !std::isfinite(hr) || !std::isfinite(hz)) {
        throw InvalidInput("grid spacings must be positive");
    }
    if (!std::isfinite(z_min)) throw InvalidInput("z_min must be finite");
}

ScalarField ScalarField::zeros(const AxiGrid& grid, FieldRole role) {
    grid.validate();
    return ScalarField{grid, std::vector<double>(grid.size(), 0.0), role};
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

void ScalarField::validate() const {
    grid.validate();
    if (values.size() != grid.size()) throw InvalidInput("field size does not match its grid");
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFiniteError("field contains non-finite values");
    }
}

std::shared_ptr<const profiles::RadialProfile> default_Gamma() {
    static std::once_flag once;
    static std::shared_ptr<const profiles::RadialProfile> gamma;
    std::call_once(once, [] {
        gamma = std::make_shared<const profiles::RadialProfile>(profiles::compute_Gamma(200.0));
    });
    return gamma;
}

double greens_near(Vec2 x, Vec2 P0) {
    const double d2 = norm2(x - P0);
    if (d2 == 0.0) throw DomainError("greens_near is singular at x = P0");
    const double r0 = P0.x;
    if (!(r0 > 0.0)) throw DomainError("P0 must lie in r > 0");
    if (!(std::sqrt(d2) < 0.5 * r0)) throw InvalidInput("greens_near requires |x - P0| < r0/2");
    return -2.0 * std::log(d2) * (1.0 - 1.5 * (x.x - r0) / r0);
}

double stream_ring(Vec2 x, Vec2 P0, double eps, const RingFieldOptions& opts) {
    if (!(eps > 0.0 && eps < 0.5)) throw InvalidInput("stream_ring requires eps in (0, 0.5)");
    const double r0 = P0.x;
    if (!(r0 > 0.0)) throw DomainError("P0 must lie in r > 0");
    const double d2 = norm2(x - P0);
    const double reg = eps * eps + d2;
    double factor = 1.0 - 1.5 * (x.x - r0) / r0;
    if (opts.include_H && opts.H) factor += opts.H(x, P0);
    double value = -2.0 * std::log(reg) * factor;
    if (opts.include_K && opts.K) value += opts.K(x, P0);
    if (opts.include_Gamma) {
        const auto gamma = opts.Gamma ? opts.Gamma : default_Gamma();
        value += (x.x - r0) / (2.0 * r0) * gamma->at(std::sqrt(d2) / eps);
    }
    return value / r0;
}

double vorticity_leading(Vec2 x, Vec2 P, double eps) {
    if (!(eps > 0.0)) throw InvalidInput("core scale must be positive");
    if (!(P.x > 0.0)) throw DomainError("ring center must lie in r > 0");
    return profiles::eval_U((1.0 / eps) * (x - P)) / (P.x * eps * eps);
}

ScalarField superpose(const reduced::RingFamily& rings, const AxiGrid& grid) {
    auto out = ScalarField::zeros(grid, FieldRole::relative_vorticity);
    if (rings.centers.size() != rings.core_scales.size()) {
        throw InvalidInput("ring family needs one core scale per center");
    }
    const double spacing = std::max(grid.hr, grid.hz);
    std::size_t worst = 0;
    for (std::size_t j = 0; j < rings.core_scales.size(); ++j) {
        if (rings.core_scales[j] < rings.core_scales[worst]) worst = j;
    }
    if (!rings.core_scales.empty() && rings.core_scales[worst] < 2.0 * spacing) {
        throw ResolutionError(worst, rings.core_scales[worst], spacing);
    }
    for (std::size_t j = 0; j < rings.centers.size(); ++j) {
        const Vec2 P = rings.centers[j];
        const double eps = rings.core_scales[j];
        const double cut = 20.0 * eps;
        const auto lo_i = static_cast<long>(std::floor((P.x - cut) / grid.hr));
        const auto hi_i = static_cast<long>(std::ceil((P.x + cut) / grid.hr));
        const auto lo_m = static_cast<long>(std::floor((P.y - cut - grid.z_min) / grid.hz));
        const auto hi_m = static_cast<long>(std::ceil((P.y + cut - grid.z_min) / grid.hz));
        for (long i = std::max(lo_i, 0L); i <= std::min(hi_i, static_cast<long>(grid.nr) - 1); ++i) {
            for (long m = std::max(lo_m, 0L); m <= std::min(hi_m, static_cast<long>(grid.nz) - 1); ++m) {
                const Vec2 x{grid.r(static_cast<std::size_t>(i)), grid.z(static_cast<std::size_t>(m))};
                if (norm(x - P) > cut) continue;
                out.at(static_cast<std::size_t>(i), static_cast<std::size_t>(m)) += vorticity_leading(x, P, eps);
            }
        }
    }
    return out;
}

double weighted_mass(const ScalarField& omega) {
    const auto& g = omega.grid;
    double s = 0.0;
    for (std::size_t i = 1; i < g.nr; ++i) {
        const double w = (i == g.nr - 1 ? 0.5 : 1.0) * g.r(i);
        double row = 0.0;
        for (std::size_t m = 0; m < g.nz; ++m) row += (m == 0 || m == g.nz - 1 ? 0.5 : 1.0) * omega.at(i, m);
        s += w * row;
    }
    return s * g.hr * g.hz;
}

double monopole(Vec2 x, double m5, double z_c) {
    const double s2 = x.x * x.x + (x.y - z_c) * (x.y - z_c);
    return m5 / (8.0 * std::numbers::pi * std::numbers::pi * s2 * std::sqrt(s2));
}

Velocity velocity_field(const ScalarField& psi, double log_eps, double alpha0) {
    psi.validate();
    const auto& g = psi.grid;
    const double L = std::abs(log_eps);
    if (!(L > 0.0)) throw InvalidInput("log eps must be nonzero");
    Velocity u{ScalarField::zeros(g, FieldRole::generic), ScalarField::zeros(g, FieldRole::generic)};
    const double shift = alpha0 * L;

    auto dz = [&](std::size_t i, std::size_t m) {
        if (m == 0) return (-3.0 * psi.at(i, 0) + 4.0 * psi.at(i, 1) - psi.at(i, 2)) / (2.0 * g.hz);
        if (m == g.nz - 1) {
            return (3.0 * psi.at(i, m) - 4.0 * psi.at(i, m - 1) + psi.at(i, m - 2)) / (2.0 * g.hz);
        }
        return (psi.at(i, m + 1) - psi.at(i, m - 1)) / (2.0 * g.hz);
    };
    auto dr = [&](std::size_t i, std::size_t m) {
        if (i == g.nr - 1) {
            return (3.0 * psi.at(i, m) - 4.0 * psi.at(i - 1, m) + psi.at(i - 2, m)) / (2.0 * g.hr);
        }
        return (psi.at(i + 1, m) - psi.at(i - 1, m)) / (2.0 * g.hr);
    };

    for (std::size_t m = 0; m < g.nz; ++m) {
        u.ur.at(0, m) = 0.0;
        u.uz.at(0, m) = 2.0 * (psi.at(0, m) - shift) / L;
    }
    for (std::size_t i = 1; i < g.nr; ++i) {
        const double r = g.r(i);
        for (std::size_t m = 0; m < g.nz; ++m) {
            u.ur.at(i, m) = -r * dz(i, m) / L;
            u.uz.at(i, m) = (2.0 * (psi.at(i, m) - shift) + r * dr(i, m)) / L;
        }
    }
    return u;
}

double alpha_speed(double r0, double eps, const profiles::ProfileConstants& consts) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("alpha_speed requires eps in (0, 1)");
    if (!(r0 > 0.0)) throw InvalidInput("r0 must be positive");
    const double A0 = 6.0 - std::log(8.0);
    return 1.0 / r0 - (A0 - consts.A) / (4.0 * r0 * std::log(eps));
}

void write_binary(std::ostream& os, const ScalarField& f) {
    const std::uint64_t nr = f.grid.nr;
    const std::uint64_t nz = f.grid.nz;
    os.write(reinterpret_cast<const char*>(&nr), sizeof nr);
    os.write(reinterpret_cast<const char*>(&nz), sizeof nz);
    for (double v : {f.grid.hr, f.grid.hz, f.grid.z_min}) os.write(reinterpret_cast<const char*>(&v), sizeof v);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!os) throw Error("failed to write field snapshot");
}

ScalarField read_binary(std::istream& is, FieldRole role) {
    std::uint64_t nr = 0;
    std::uint64_t nz = 0;
    double hdr[3] = {0.0, 0.0, 0.0};
    is.read(reinterpret_cast<char*>(&nr), sizeof nr);
    is.read(reinterpret_cast<char*>(&nz), sizeof nz);
    is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (!is) throw InvalidInput("truncated field snapshot header");
    if (nr > (1u << 20) || nz > (1u << 20)) throw InvalidInput("implausible snapshot dimensions");
    AxiGrid g{static_cast<std::size_t>(nr), static_cast<std::size_t>(nz), hdr[0], hdr[1], hdr[2]};
    auto f = ScalarField::zeros(g, role);
    is.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!is) throw InvalidInput("truncated field snapshot body");
    return f;
}

void write_csv(std::ostream& os, const ScalarField& f) {
    const auto old = os.precision(17);
    os << "r,z,value\n";
    for (std::size_t i = 0; i < f.grid.nr; ++i) {
        for (std::size_t m = 0; m < f.grid.nz; ++m) os << f.grid.r(i) << ',' << f.grid.z(m) << ',' << f.at(i, m) << '\n';
    }
    os.precision(old);
}

}  // namespace leapfrog::fields
