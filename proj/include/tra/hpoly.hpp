#pragma once

// Energy-dependent basis parameters, the three-term recursion for the
// expansion ratios P_n = f_n / f_0, basis-function evaluation and assembly of
// (unnormalised) radial wavefunctions.
//
// Coordinates: x = coth(lambda r) sends r -> 0+ to x -> inf and r -> inf to
// x -> 1+. R(inf) = 0 needs mu > 0; R(0) = 0 needs mu + nu + 2n < 0.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tra/basis_quadrature.hpp"
#include "tra/error.hpp"
#include "tra/hmd_spectrum.hpp"

namespace tra::hpoly {

using hmd::PotentialParams;

struct HPolyParams {
    double mu = 0.0;
    double nu = 0.0;
    double z = 0.0;           ///< -sqrt(B^2 - C^2)
    double cosh_omega = 1.0;  ///< B / C
    double sinh_omega = 0.0;  ///< non-negative root
    double sigma = -0.25;
    double eps = 0.0;
};

inline HPolyParams basis_params(double eps, double A, double B, double C) {
    if (!(eps < 0.0)) {
        throw DomainError("energy-dependent basis needs a bound state (eps < 0)");
    }
    if (-eps - 2.0 * A < 0.0) {
        throw DomainError("-eps - 2A must be non-negative for a real nu");
    }
    if (C == 0.0) {
        throw InvalidArgument("C = 0 leaves cosh(omega) = B/C undefined");
    }
    const double ratio = B / C;
    if (ratio < 1.0) {
        throw DomainError("B/C < 1: the potential cannot support bound states in this representation");
    }
    HPolyParams p;
    p.eps = eps;
    p.mu = std::sqrt(-eps);
    p.nu = -std::sqrt(-eps - 2.0 * A);
    p.z = -std::sqrt(B * B - C * C);
    p.cosh_omega = ratio;
    p.sinh_omega = std::sqrt(ratio * ratio - 1.0);
    return p;
}

/// Diagonal term of the recursion at degree n:
/// z^{-1} sinh(omega) [(n + (mu+nu+1)/2)^2 + sigma] + F_n.
inline double recursion_diagonal(const HPolyParams& p, int n) {
    const double shift = n + 0.5 * (p.mu + p.nu + 1.0);
    const double zinv_sinh = p.z == 0.0 ? 0.0 : p.sinh_omega / p.z;
    return zinv_sinh * (shift * shift + p.sigma) + basis::diagonal_coefficient(n, p.mu, p.nu);
}

/// H_0..H_{n_max} from H_{-1} = 0, H_0 = 1 and
///   cosh(omega) H_n = D_{n-1} H_{n-1} + D_n H_{n+1} + diag_n H_n.
inline std::vector<double> hpoly_sequence(const HPolyParams& p, int n_max) {
    if (n_max < 0) {
        throw InvalidArgument("n_max must be non-negative");
    }
    std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
    h[0] = 1.0;
    double prev = 0.0;
    double d_prev = 0.0;
    for (int n = 0; n < n_max; ++n) {
        const double dn = basis::coupling_coefficient(n, p.mu, p.nu);
        if (!std::isfinite(dn) || dn == 0.0) {
            throw NumericalBreakdown("recursion coupling D_" + std::to_string(n) + " is not real and nonzero", n);
        }
        const double cur = h[static_cast<std::size_t>(n)];
        const double next = ((p.cosh_omega - recursion_diagonal(p, n)) * cur - d_prev * prev) / dn;
        prev = cur;
        d_prev = dn;
        h[static_cast<std::size_t>(n) + 1] = next;
    }
    return h;
}

/// Jacobi polynomial P_n^{(a,b)}(x) by the standard three-term recurrence.
inline double jacobi_p(int n, double a, double b, double x) {
    if (n == 0) {
        return 1.0;
    }
    double p0 = 1.0;
    double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
    for (int k = 1; k < n; ++k) {
        const double kk = k;
        const double s = 2.0 * kk + a + b;
        const double c1 = 2.0 * (kk + 1.0) * (kk + a + b + 1.0) * s;
        const double c2 = (s + 1.0) * (a * a - b * b);
        const double c3 = s * (s + 1.0) * (s + 2.0);
        const double c4 = 2.0 * (kk + a) * (kk + b) * (s + 2.0);
        const double p2 = ((c2 + c3 * x) * p1 - c4 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

/// phi_0..phi_{n_max} at x via the orthonormal recursion, carried in scaled
/// form so that large degrees at large x neither overflow nor underflow.
inline std::vector<double> basis_functions(int n_max, double mu, double nu, double x) {
    if (!(x > 1.0)) {
        throw DomainError("basis functions are defined for x > 1");
    }
    if (n_max < 0) {
        throw InvalidArgument("n_max must be non-negative");
    }
    const double log_base = 0.5 * basis::log_norm_squared(0, mu, nu) + 0.5 * mu * std::log(x - 1.0) +
                            0.5 * nu * std::log(x + 1.0);
    std::vector<double> scaled(static_cast<std::size_t>(n_max) + 1);
    std::vector<double> log_scale(static_cast<std::size_t>(n_max) + 1, 0.0);
    double p_prev = 0.0;
    double p_cur = 1.0;
    double acc = 0.0;
    scaled[0] = 1.0;
    for (int n = 0; n < n_max; ++n) {
        const double f = basis::diagonal_coefficient(n, mu, nu);
        const double dn = basis::coupling_coefficient(n, mu, nu);
        const double dm = n > 0 ? basis::coupling_coefficient(n - 1, mu, nu) : 0.0;
        if (!std::isfinite(dn) || dn == 0.0) {
            throw NumericalBreakdown("basis recursion coupling is not real", n);
        }
        double p_next = ((x - f) * p_cur - dm * p_prev) / dn;
        const double mag = std::abs(p_next);
        if (mag > 1e150) {
            p_next /= mag;
            p_cur /= mag;
            acc += std::log(mag);
        }
        p_prev = p_cur;
        p_cur = p_next;
        scaled[static_cast<std::size_t>(n) + 1] = p_cur;
        log_scale[static_cast<std::size_t>(n) + 1] = acc;
    }
    std::vector<double> out(scaled.size());
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = scaled[n] == 0.0 ? 0.0 : scaled[n] * std::exp(log_scale[n] + log_base);
    }
    return out;
}

inline double basis_function(int n, double mu, double nu, double x) {
    return basis_functions(n, mu, nu, x).back();
}

inline double x_of_r(double lambda, double r) { return 1.0 / std::tanh(lambda * r); }

inline double r_of_x(double lambda, double x) { return 0.5 / lambda * std::log1p(2.0 / (x - 1.0)); }

/// Neumaier-compensated sum.
inline double compensated_sum(std::span<const double> terms) {
    double sum = 0.0;
    double c = 0.0;
    for (double t : terms) {
        const double s = sum + t;
        if (std::abs(sum) >= std::abs(t)) {
            c += (sum - s) + t;
        } else {
            c += (t - s) + sum;
        }
        sum = s;
    }
    return sum + c;
}

struct WavefunctionOptions {
    bool normalize = false; ///< scale so that the trapezoidal integral of R^2 over the grid is 1
};

/// R(r) = sum_n coeffs[n] phi_n(coth(lambda r)) with basis (mu, nu), up to a
/// global factor.
inline std::vector<double> radial_wavefunction(double mu, double nu, double lambda, std::span<const double> coeffs,
                                               std::span<const double> r_grid, const WavefunctionOptions& opt = {}) {
    if (coeffs.empty()) {
        throw InvalidArgument("no expansion coefficients");
    }
    const int n_max = static_cast<int>(coeffs.size()) - 1;
    std::vector<double> out(r_grid.size());
    std::vector<double> terms(coeffs.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const double r = r_grid[i];
        if (!(r > 0.0)) {
            throw DomainError("radial grid must be positive");
        }
        const double x = x_of_r(lambda, r);
        if (!(x > 1.0)) {
            out[i] = 0.0; // coth rounds to 1 far outside the range of any bound state
            continue;
        }
        const std::vector<double> phi = basis_functions(n_max, mu, nu, x);
        for (std::size_t n = 0; n < coeffs.size(); ++n) {
            terms[n] = coeffs[n] * phi[n];
        }
        out[i] = compensated_sum(terms);
    }
    if (opt.normalize && r_grid.size() > 1) {
        double norm = 0.0;
        for (std::size_t i = 0; i + 1 < r_grid.size(); ++i) {
            norm += 0.5 * (r_grid[i + 1] - r_grid[i]) * (out[i] * out[i] + out[i + 1] * out[i + 1]);
        }
        if (norm > 0.0) {
            const double s = 1.0 / std::sqrt(norm);
            for (double& v : out) {
                v *= s;
            }
        }
    }
    return out;
}

/// Sign changes of a sampled function, ignoring values below `floor` times
/// the largest magnitude.
inline int count_nodes(std::span<const double> values, double floor = 1e-8) {
    double peak = 0.0;
    for (double v : values) {
        peak = std::max(peak, std::abs(v));
    }
    int nodes = 0;
    int last_sign = 0;
    for (double v : values) {
        if (std::abs(v) <= floor * peak) {
            continue;
        }
        const int s = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) {
            ++nodes;
        }
        last_sign = s;
    }
    return nodes;
}

/// V_eff(r) in hartree.
inline double eval_potential(const PotentialParams& params, double r) {
    if (!(r > 0.0)) {
        throw DomainError("potential is evaluated for r > 0");
    }
    const double s = params.lambda * r;
    double coth_m1 = 0.0;
    double inv_sinh2 = 0.0;
    double cosh_sinh3 = 0.0;
    if (s > 20.0) {
        const double q = std::exp(-2.0 * s);
        const double one_m = 1.0 - q;
        coth_m1 = 2.0 * q / one_m;
        inv_sinh2 = 4.0 * q / (one_m * one_m);
        cosh_sinh3 = 4.0 * q * (1.0 + q) / (one_m * one_m * one_m);
    } else {
        const double sh = std::sinh(s);
        const double ch = std::cosh(s);
        // coth(s) - 1 = 2 / (e^{2s} - 1)
        coth_m1 = 2.0 / std::expm1(2.0 * s);
        inv_sinh2 = 1.0 / (sh * sh);
        cosh_sinh3 = ch / (sh * sh * sh);
    }
    const double lam2 = params.lambda * params.lambda;
    return 0.5 * lam2 * (params.A * coth_m1 - params.B * inv_sinh2 + params.C * cosh_sinh3);
}

/// Leading small-r form 1/2 [lambda A / r - B / r^2 + (C/lambda) / r^3].
inline double near_origin_potential(const PotentialParams& params, double r) {
    return 0.5 * (params.lambda * params.A / r - params.B / (r * r) + params.C / params.lambda / (r * r * r));
}

} // namespace tra::hpoly
