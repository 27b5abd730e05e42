#pragma once

// Independent checks for the matrix method: a uniform-grid central-difference
// solver of  R'' - 2 V_eff R + 2 E R = 0  with Dirichlet ends, and the closed
// form of the Hulthen levels that the potential reduces to when B = C = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tra/error.hpp"
#include "tra/hmd_spectrum.hpp"
#include "tra/hpoly.hpp"
#include "tra/linalg.hpp"

namespace tra::oracle {

using hmd::PotentialParams;

struct GridConfig {
    double r_max_scaled = 40.0; ///< r_max in units of 1/lambda
    int points = 20000;
    double convergence_tol = 1e-2; ///< allowed relative change of a level under grid doubling
};

struct GridSpectrum {
    std::vector<double> eps;         ///< Richardson-extrapolated -eps, deepest first
    std::vector<double> eps_coarse;  ///< -eps at `points`
    std::vector<double> eps_fine;    ///< -eps at 2*points
};

namespace detail {

struct Grid {
    std::vector<double> r;
    std::vector<double> diag;
    std::vector<double> off;
    double h = 0.0;
};

inline Grid build_grid(const PotentialParams& params, double r_max, int points) {
    Grid g;
    g.h = r_max / points;
    const std::size_t n = static_cast<std::size_t>(points) - 1;
    g.r.resize(n);
    g.diag.resize(n);
    g.off.assign(n - 1, -0.5 / (g.h * g.h));
    for (std::size_t i = 0; i < n; ++i) {
        g.r[i] = g.h * static_cast<double>(i + 1);
        g.diag[i] = 1.0 / (g.h * g.h) + hpoly::eval_potential(params, g.r[i]);
    }
    return g;
}

inline void check(const PotentialParams& params, const GridConfig& grid) {
    hmd::validate(params);
    if (params.C < 0.0) {
        throw InvalidArgument("grid oracle refuses C < 0 (Hamiltonian unbounded below)");
    }
    if (grid.points < 1000) {
        throw InvalidArgument("grid needs at least 1000 points");
    }
    if (!(grid.r_max_scaled > 0.0)) {
        throw InvalidArgument("r_max must be positive");
    }
}

/// Negative eigenvalues (hartree) among the lowest `count`, ascending.
inline std::vector<double> bound_energies(const Grid& g, int count) {
    const std::size_t below_zero = sturm_count(g.diag, g.off, 0.0);
    const std::size_t k_max = std::min<std::size_t>(below_zero, static_cast<std::size_t>(count));
    std::vector<double> out;
    for (std::size_t k = 0; k < k_max; ++k) {
        out.push_back(kth_eigenvalue_bisection(g.diag, g.off, k));
    }
    return out;
}

} // namespace detail

/// Lowest `count` bound levels (only the negative ones) as -eps = -2E/lambda^2,
/// deepest first, extrapolated from `points` and `2*points`.
inline GridSpectrum grid_spectrum(const PotentialParams& params, const GridConfig& grid, int count) {
    detail::check(params, grid);
    const double r_max = grid.r_max_scaled / params.lambda;
    const double to_eps = -2.0 / (params.lambda * params.lambda);
    const auto coarse = detail::bound_energies(detail::build_grid(params, r_max, grid.points), count);
    const auto fine = detail::bound_energies(detail::build_grid(params, r_max, 2 * grid.points), count);
    GridSpectrum out;
    const std::size_t n = std::min(coarse.size(), fine.size());
    for (std::size_t k = 0; k < n; ++k) {
        const double a = to_eps * coarse[k];
        const double b = to_eps * fine[k];
        if (std::abs(a - b) > grid.convergence_tol * std::abs(b)) {
            throw ConvergenceFailure("grid level " + std::to_string(k) + " moved from " + std::to_string(a) +
                                     " to " + std::to_string(b) + " under grid doubling");
        }
        const double extrapolated = (4.0 * b - a) / 3.0;
        if (extrapolated <= 0.0) {
            break;
        }
        out.eps_coarse.push_back(a);
        out.eps_fine.push_back(b);
        out.eps.push_back(extrapolated);
    }
    return out;
}

/// -eps of the k-th level at a single resolution (no extrapolation).
inline double grid_level(const PotentialParams& params, double r_max_scaled, int points, int k) {
    detail::check(params, {r_max_scaled, points});
    const auto g = detail::build_grid(params, r_max_scaled / params.lambda, points);
    return -2.0 / (params.lambda * params.lambda) *
           kth_eigenvalue_bisection(g.diag, g.off, static_cast<std::size_t>(k));
}

struct GridState {
    double eps_table = 0.0;
    std::vector<double> r;
    std::vector<double> psi;
};

/// k-th eigenfunction by inverse iteration on the tridiagonal grid operator.
inline GridState grid_eigenfunction(const PotentialParams& params, const GridConfig& grid, int k) {
    detail::check(params, grid);
    const auto g = detail::build_grid(params, grid.r_max_scaled / params.lambda, grid.points);
    const double e = kth_eigenvalue_bisection(g.diag, g.off, static_cast<std::size_t>(k));
    const double shift = e + 1e-10 * std::max(1.0, std::abs(e));
    const std::size_t n = g.diag.size();
    std::vector<double> v(n, 1.0);
    std::vector<double> c(n), d(n);
    for (int it = 0; it < 4; ++it) {
        // Thomas solve of (T - shift) y = v
        double denom = g.diag[0] - shift;
        c[0] = n > 1 ? g.off[0] / denom : 0.0;
        d[0] = v[0] / denom;
        for (std::size_t i = 1; i < n; ++i) {
            denom = g.diag[i] - shift - g.off[i - 1] * c[i - 1];
            if (denom == 0.0) {
                denom = 1e-300;
            }
            c[i] = i + 1 < n ? g.off[i] / denom : 0.0;
            d[i] = (v[i] - g.off[i - 1] * d[i - 1]) / denom;
        }
        v[n - 1] = d[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            v[i] = d[i] - c[i] * v[i + 1];
        }
        double norm = 0.0;
        for (double x : v) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : v) {
            x /= norm;
        }
    }
    return GridState{-2.0 * e / (params.lambda * params.lambda), g.r, v};
}

/// Closed-form Hulthen levels  -eps_n = (beta - n^2)^2 / n^2,  beta = Q/lambda,
/// for 1 <= n < sqrt(beta), deepest first.
inline std::vector<double> hulthen_levels(double Q, double lambda) {
    if (!(lambda > 0.0)) {
        throw InvalidArgument("lambda must be positive");
    }
    const double beta = Q / lambda;
    std::vector<double> out;
    for (int n = 1; static_cast<double>(n) * n < beta; ++n) {
        const double nn = static_cast<double>(n) * n;
        out.push_back((beta - nn) * (beta - nn) / nn);
    }
    return out;
}

} // namespace tra::oracle
