#pragma once

// Jacobi-type L^2 basis on x in (1, inf):
//
//   phi_n(x) = c_n (x-1)^{mu/2} (x+1)^{nu/2} P_n^{(mu,nu)}(x),  mu + nu < -2N-1,
//
// its three-term recursion coefficients, the tridiagonal matrix of x, and the
// Gauss rule derived from that matrix. Matrix elements of an arbitrary
// function W(x) are approximated as (lambda^2/2) Lambda diag(W(tau)) Lambda^T.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "tra/error.hpp"
#include "tra/linalg.hpp"

namespace tra::basis {

struct BasisConfig {
    int N = 100;          ///< highest degree; matrices are (N+1)x(N+1)
    double mu = 0.0;
    double nu = -201.5;
    double lambda = 1.0;  ///< length scale, screening alpha = 2 lambda

    std::size_t dim() const noexcept { return static_cast<std::size_t>(N) + 1; }
};

inline void validate(const BasisConfig& c) {
    if (c.N < 0) {
        throw InvalidArgument("basis degree N must be non-negative");
    }
    if (!(c.mu > -1.0)) {
        throw InvalidArgument("basis parameter mu must exceed -1");
    }
    if (!(c.mu + c.nu < -2.0 * c.N - 1.0)) {
        throw InvalidArgument("basis requires mu + nu < -2N-1 (got mu=" + std::to_string(c.mu) +
                              ", nu=" + std::to_string(c.nu) + ", N=" + std::to_string(c.N) + ")");
    }
    if (!(c.lambda > 0.0)) {
        throw InvalidArgument("lambda must be positive");
    }
}

struct RecursionCoefficients {
    std::vector<double> F; ///< F_0..F_N
    std::vector<double> D; ///< D_0..D_{N-1}
};

/// Radicand of D_n, i.e. D_n^2 times ((2n+mu+nu+2)/2)^2. Negative values mean
/// the symmetric recursion has no real coupling at this degree.
inline double coupling_radicand(int n, double mu, double nu) {
    const double k = n;
    const double s = 2.0 * k + mu + nu;
    return (k + 1.0) * (k + mu + 1.0) * (k + nu + 1.0) * (k + mu + nu + 1.0) / ((s + 1.0) * (s + 3.0));
}

inline double diagonal_coefficient(int n, double mu, double nu) {
    const double s = 2.0 * n + mu + nu;
    return (nu * nu - mu * mu) / (s * (s + 2.0));
}

/// D_n; NaN when the radicand is negative.
inline double coupling_coefficient(int n, double mu, double nu) {
    const double s = 2.0 * n + mu + nu;
    return 2.0 / (s + 2.0) * std::sqrt(coupling_radicand(n, mu, nu));
}

/// F_0..F_N and D_0..D_{N-1} from the closed forms, without parameter checks.
inline RecursionCoefficients jacobi_recursion(double mu, double nu, int N) {
    RecursionCoefficients rc;
    rc.F.resize(static_cast<std::size_t>(N) + 1);
    rc.D.resize(static_cast<std::size_t>(N));
    for (int n = 0; n <= N; ++n) {
        rc.F[static_cast<std::size_t>(n)] = diagonal_coefficient(n, mu, nu);
    }
    for (int n = 0; n < N; ++n) {
        rc.D[static_cast<std::size_t>(n)] = coupling_coefficient(n, mu, nu);
    }
    return rc;
}

inline RecursionCoefficients recursion_coefficients(const BasisConfig& config) {
    validate(config);
    RecursionCoefficients rc = jacobi_recursion(config.mu, config.nu, config.N);
    for (std::size_t n = 0; n < rc.D.size(); ++n) {
        if (!std::isfinite(rc.D[n]) || rc.D[n] == 0.0) {
            throw NumericalBreakdown("recursion coupling D_n is not real and nonzero", static_cast<std::ptrdiff_t>(n));
        }
    }
    for (std::size_t n = 0; n < rc.F.size(); ++n) {
        if (!std::isfinite(rc.F[n])) {
            throw NumericalBreakdown("recursion coefficient F_n is not finite", static_cast<std::ptrdiff_t>(n));
        }
    }
    return rc;
}

/// Matrix of x in the orthonormal basis: F on the diagonal, D beside it.
inline Tridiagonal build_X(const BasisConfig& config) {
    RecursionCoefficients rc = recursion_coefficients(config);
    return Tridiagonal{std::move(rc.F), std::move(rc.D)};
}

struct QuadratureRule {
    Eigen::VectorXd tau;    ///< ascending nodes
    Eigen::MatrixXd Lambda; ///< orthonormal eigenvectors, column n <-> tau(n)

    Eigen::Index size() const noexcept { return tau.size(); }
    double min_node() const { return tau.minCoeff(); }
};

inline QuadratureRule gauss_rule(const Tridiagonal& x) {
    SpectralDecomposition sd = eigh_tridiagonal(x);
    if (!sd.values.allFinite() || !sd.vectors.allFinite()) {
        throw NumericalBreakdown("Gauss rule contains non-finite entries");
    }
    return QuadratureRule{std::move(sd.values), std::move(sd.vectors)};
}

/// Gauss rule for the basis; rejects rules whose nodes leave (1, inf), which
/// happens when nu sits too close to -2N-1.
inline QuadratureRule basis_rule(const BasisConfig& config) {
    QuadratureRule rule = gauss_rule(build_X(config));
    if (!(rule.min_node() > 1.0)) {
        throw NumericalBreakdown("Gauss node " + std::to_string(rule.min_node()) + " is not above 1 (nu=" +
                                     std::to_string(config.nu) + ")",
                                 0);
    }
    return rule;
}

/// (lambda^2/2) Lambda diag(W(tau)) Lambda^T.
inline Eigen::MatrixXd function_matrix(const QuadratureRule& rule, double lambda,
                                       const std::function<double(double)>& W) {
    Eigen::VectorXd w(rule.size());
    for (Eigen::Index i = 0; i < rule.size(); ++i) {
        w(i) = W(rule.tau(i));
        if (!std::isfinite(w(i))) {
            throw NumericalBreakdown("W is not finite at node " + std::to_string(rule.tau(i)),
                                     static_cast<std::ptrdiff_t>(i));
        }
    }
    Eigen::MatrixXd out = 0.5 * lambda * lambda * (rule.Lambda * w.asDiagonal() * rule.Lambda.transpose());
    return 0.5 * (out + out.transpose());
}

/// Lambda diag(g(tau)) Lambda^T without the lambda prefactor.
inline Eigen::MatrixXd node_matrix(const QuadratureRule& rule, const Eigen::VectorXd& g) {
    Eigen::MatrixXd out = rule.Lambda * g.asDiagonal() * rule.Lambda.transpose();
    return 0.5 * (out + out.transpose());
}

// ---------------------------------------------------------------------------
// Normalisation constant c_n.

namespace detail {

/// Sign of Gamma(x); x must not be a non-positive integer.
inline double gamma_sign(double x) {
    if (x > 0.0) {
        return 1.0;
    }
    const double k = std::ceil(-x);
    return std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0;
}

} // namespace detail

/// log of c_n^2 where
///   c_n^2 = sin(pi(mu+nu+1)) / (2^{mu+nu+1} sin(pi nu)) * (2n+mu+nu+1)
///           * Gamma(n+1) Gamma(n+mu+nu+1) / (Gamma(n+mu+1) Gamma(n+nu+1)).
/// The factors are combined with explicit sign tracking; the product must be
/// positive for a valid basis.
inline double log_norm_squared(int n, double mu, double nu) {
    const double k = n;
    double sign = 1.0;
    double log_mag = 0.0;
    auto absorb = [&](double v) {
        if (v == 0.0 || !std::isfinite(v)) {
            throw NumericalBreakdown("normalisation factor vanishes or diverges", n);
        }
        sign *= v < 0.0 ? -1.0 : 1.0;
        log_mag += std::log(std::abs(v));
    };
    auto absorb_gamma = [&](double x, double power) {
        if (x <= 0.0 && x == std::floor(x)) {
            throw NumericalBreakdown("Gamma pole in normalisation", n);
        }
        if (power > 0) {
            sign *= detail::gamma_sign(x);
            log_mag += std::lgamma(x);
        } else {
            sign *= detail::gamma_sign(x);
            log_mag -= std::lgamma(x);
        }
    };
    absorb(std::sin(std::numbers::pi * (mu + nu + 1.0)));
    absorb(1.0 / std::sin(std::numbers::pi * nu));
    log_mag -= (mu + nu + 1.0) * std::numbers::ln2;
    absorb(2.0 * k + mu + nu + 1.0);
    absorb_gamma(k + 1.0, 1);
    absorb_gamma(k + mu + nu + 1.0, 1);
    absorb_gamma(k + mu + 1.0, -1);
    absorb_gamma(k + nu + 1.0, -1);
    if (sign < 0.0) {
        throw NumericalBreakdown("c_n^2 is negative for these parameters", n);
    }
    return log_mag;
}

inline double norm_constant(int n, double mu, double nu) {
    return std::exp(0.5 * log_norm_squared(n, mu, nu));
}

} // namespace tra::basis
