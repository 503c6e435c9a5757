#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "delta5_stencil.hpp"
#include "leapfrog/errors.hpp"
#include "leapfrog/fields.hpp"

namespace leapfrog::fields {

namespace {

// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double radial_part(const ScalarField& psi, std::size_t i, std::size_t m) {
    const auto c = detail::radial_coeffs(i, psi.grid.hr);
    const double h2 = psi.grid.hr * psi.grid.hr;
    const double centre = psi.at(i, m);
    double v = c.plus * (psi.at(i + 1, m) - centre);
    if (i > 0) v -= c.minus * (centre - psi.at(i - 1, m));
    return v / h2;
}

double delta5_at(const ScalarField& psi, std::size_t i, std::size_t m) {
    const double hz2 = psi.grid.hz * psi.grid.hz;
    return radial_part(psi, i, m) + (psi.at(i, m + 1) - 2.0 * psi.at(i, m) + psi.at(i, m - 1)) / hz2;
}

}  // namespace

ScalarField apply_delta5(const ScalarField& psi) {
    psi.validate();
    const auto& g = psi.grid;
    auto out = ScalarField::zeros(g, FieldRole::generic);
    for (std::size_t i = 0; i + 1 < g.nr; ++i) {
        for (std::size_t m = 1; m + 1 < g.nz; ++m) out.at(i, m) = delta5_at(psi, i, m);
        out.at(i, 0) = out.at(i, 1);
        out.at(i, g.nz - 1) = out.at(i, g.nz - 2);
    }
    for (std::size_t m = 0; m < g.nz; ++m) out.at(g.nr - 1, m) = out.at(g.nr - 2, m);
    return out;
}

struct Delta5Solver::Impl {
    std::size_t rows = 0;  // unknown radial nodes i = 0..nr-2
    std::size_t cols = 0;  // unknown axial nodes m = 1..nz-2
    std::vector<double> buffer;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> diag_r;
    std::vector<double> eig;
    std::vector<double> cprime;
    std::vector<double> dprime;
    fftw_plan plan = nullptr;
};

Delta5Solver::Delta5Solver(const AxiGrid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
    grid_.validate();
    auto& s = *impl_;
    s.rows = grid_.nr - 1;
    s.cols = grid_.nz - 2;
    s.buffer.assign(s.rows * s.cols, 0.0);
    const double h2 = grid_.hr * grid_.hr;
    for (std::size_t i = 0; i < s.rows; ++i) {
        const auto c = detail::radial_coeffs(i, grid_.hr);
        s.lower.push_back(-c.minus / h2);
        s.upper.push_back(-c.plus / h2);
        s.diag_r.push_back((c.minus + c.plus) / h2);
    }
    const double hz2 = grid_.hz * grid_.hz;
    for (std::size_t k = 1; k <= s.cols; ++k) {
        const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(s.cols + 1);
        s.eig.push_back((2.0 - 2.0 * std::cos(theta)) / hz2);  // eigenvalue of -d_zz
    }
    s.cprime.resize(s.rows);
    s.dprime.resize(s.rows);

    const int n = static_cast<int>(s.cols);
    const fftw_r2r_kind kind = FFTW_RODFT00;
    std::lock_guard<std::mutex> lock(planner_mutex());
    s.plan = fftw_plan_many_r2r(1, &n, static_cast<int>(s.rows), s.buffer.data(), nullptr, 1, n, s.buffer.data(),
                                nullptr, 1, n, &kind, FFTW_ESTIMATE);
    if (s.plan == nullptr) throw Error("FFTW could not plan the sine transform");
}

Delta5Solver::~Delta5Solver() {
    if (impl_ && impl_->plan != nullptr) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(impl_->plan);
    }
}

ScalarField Delta5Solver::solve(const ScalarField& omega, double support_tol) {
    omega.validate();
    if (!(omega.grid == grid_)) throw InvalidInput("vorticity grid differs from the solver grid");
    const auto& g = grid_;
    auto psi = ScalarField::zeros(g, FieldRole::relative_stream);
    const double peak = omega.max_abs();
    if (peak == 0.0) return psi;

    double edge = 0.0;
    for (std::size_t i = 0; i < g.nr; ++i) {
        for (std::size_t m = 0; m < g.nz; ++m) {
            if (i + 3 >= g.nr || m < 3 || m + 3 >= g.nz) edge = std::max(edge, std::abs(omega.at(i, m)));
        }
    }
    if (edge > support_tol * peak) {
        throw DomainError("vorticity support reaches the outer boundary (edge/peak = " +
                          std::to_string(edge / peak) + ")");
    }

    // monopole moment with the operator's own r^3 cell measure
    double moment = 0.0;
    double z_moment = 0.0;
    for (std::size_t i = 0; i < g.nr; ++i) {
        const double v = detail::cell_volume(i, g.hr);
        for (std::size_t m = 0; m < g.nz; ++m) {
            moment += omega.at(i, m) * v;
            z_moment += omega.at(i, m) * v * g.z(m);
        }
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double m5 = 2.0 * pi2 * moment * g.hr * g.hz;
    const double z_c = moment != 0.0 ? z_moment / moment : 0.5 * (g.z_min + g.z_max());
    for (std::size_t m = 0; m < g.nz; ++m) psi.at(g.nr - 1, m) = monopole({g.r_max(), g.z(m)}, m5, z_c);
    for (std::size_t i = 0; i + 1 < g.nr; ++i) {
        psi.at(i, 0) = monopole({g.r(i), g.z_min}, m5, z_c);
        psi.at(i, g.nz - 1) = monopole({g.r(i), g.z_max()}, m5, z_c);
    }

    auto& s = *impl_;
    const double hz2 = g.hz * g.hz;
    for (std::size_t i = 0; i < s.rows; ++i) {
        double* row = s.buffer.data() + i * s.cols;
        for (std::size_t c = 0; c < s.cols; ++c) row[c] = omega.at(i, c + 1);
        row[0] += psi.at(i, 0) / hz2;
        row[s.cols - 1] += psi.at(i, g.nz - 1) / hz2;
    }
    for (std::size_t c = 0; c < s.cols; ++c) {
        s.buffer[(s.rows - 1) * s.cols + c] -= s.upper[s.rows - 1] * psi.at(g.nr - 1, c + 1);
    }

    fftw_execute(s.plan);
    for (std::size_t k = 0; k < s.cols; ++k) {
        // Thomas sweep down the column k
        double denom = s.diag_r[0] + s.eig[k];
        s.cprime[0] = s.upper[0] / denom;
        s.dprime[0] = s.buffer[k] / denom;
        for (std::size_t i = 1; i < s.rows; ++i) {
            denom = s.diag_r[i] + s.eig[k] - s.lower[i] * s.cprime[i - 1];
            s.cprime[i] = s.upper[i] / denom;
            s.dprime[i] = (s.buffer[i * s.cols + k] - s.lower[i] * s.dprime[i - 1]) / denom;
        }
        double x = s.dprime[s.rows - 1];
        s.buffer[(s.rows - 1) * s.cols + k] = x;
        for (std::size_t i = s.rows - 1; i-- > 0;) {
            x = s.dprime[i] - s.cprime[i] * x;
            s.buffer[i * s.cols + k] = x;
        }
    }
    fftw_execute(s.plan);
    const double scale = 1.0 / (2.0 * static_cast<double>(s.cols + 1));
    for (std::size_t i = 0; i < s.rows; ++i) {
        for (std::size_t c = 0; c < s.cols; ++c) psi.at(i, c + 1) = s.buffer[i * s.cols + c] * scale;
    }

    double residual = 0.0;
    for (std::size_t i = 0; i + 1 < g.nr; ++i) {
        for (std::size_t m = 1; m + 1 < g.nz; ++m) {
            residual = std::max(residual, std::abs(delta5_at(psi, i, m) + omega.at(i, m)));
        }
    }
    if (!(residual <= 1e-9 * peak)) {
        throw ConvergenceError("Delta_5 direct solve residual above 1e-9 relative", residual / peak, 1e-9);
    }
    psi.validate();
    return psi;
}

ScalarField solve_delta5(const ScalarField& omega, double support_tol) {
    Delta5Solver solver(omega.grid);
    return solver.solve(omega, support_tol);
}

}  // namespace leapfrog::fields
