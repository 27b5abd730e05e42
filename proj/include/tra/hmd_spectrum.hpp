#pragma once

// Hamiltonian matrix diagonalisation in the energy-independent basis (mu = 0).
//
// In units of lambda^2/2 the Hamiltonian and overlap are
//
//   H2 = -1/4 [(2n+nu+1)^2 + 4B - 1] delta + C X + (nu^2+2A)/2 Lambda diag(1/(1+tau)) Lambda^T
//   omega = -Lambda diag(1/(1-tau^2)) Lambda^T
//
// and the generalized eigenvalues of (H2, omega) are eps = 2E/lambda^2. The
// basis parameter nu is free; converged levels are those that stay put while
// nu sweeps a window below -2N-1 (the stability plateau).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tra/basis_quadrature.hpp"
#include "tra/error.hpp"
#include "tra/linalg.hpp"

namespace tra::hmd {

using basis::BasisConfig;
using basis::QuadratureRule;

/// Dimensionless constants of
///   (2/lambda^2) V(r) = A [coth(lambda r) - 1] - B / sinh^2(lambda r) + C cosh(lambda r) / sinh^3(lambda r).
struct PotentialParams {
    double A = -1.0;
    double B = 0.0;
    double C = 0.0;
    double lambda = 1.0;
};

inline void validate(const PotentialParams& p) {
    if (!(p.A <= -0.5)) {
        throw InvalidArgument("potential requires A <= -1/2 (got " + std::to_string(p.A) + ")");
    }
    if (!(p.lambda > 0.0)) {
        throw InvalidArgument("lambda must be positive");
    }
    if (!std::isfinite(p.B) || !std::isfinite(p.C)) {
        throw InvalidArgument("B and C must be finite");
    }
}

struct HmdMatrices {
    Eigen::MatrixXd h2;    ///< (2/lambda^2) H
    Eigen::MatrixXd omega; ///< overlap
    BasisConfig config;
};

inline void require_hmd_basis(const BasisConfig& config, const QuadratureRule& rule) {
    if (config.mu != 0.0) {
        throw InvalidArgument("HMD matrices are defined for mu = 0 only");
    }
    if (rule.size() != static_cast<Eigen::Index>(config.dim())) {
        throw InvalidArgument("quadrature rule does not match the basis size");
    }
}

inline Eigen::MatrixXd hamiltonian_matrix(const PotentialParams& params, const BasisConfig& config,
                                          const QuadratureRule& rule) {
    require_hmd_basis(config, rule);
    const Eigen::Index dim = rule.size();
    const double nu = config.nu;
    Eigen::VectorXd inv_one_plus(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double denom = 1.0 + rule.tau(i);
        if (denom == 0.0) {
            throw NumericalBreakdown("Gauss node at x = -1", static_cast<std::ptrdiff_t>(i));
        }
        inv_one_plus(i) = 1.0 / denom;
    }
    // X is exact for W linear in x, so use the closed form.
    const Eigen::MatrixXd x = basis::build_X(config).dense();
    Eigen::MatrixXd h = params.C * x + 0.5 * (nu * nu + 2.0 * params.A) * basis::node_matrix(rule, inv_one_plus);
    for (Eigen::Index n = 0; n < dim; ++n) {
        const double t = 2.0 * static_cast<double>(n) + nu + 1.0;
        h(n, n) += -0.25 * (t * t + 4.0 * params.B - 1.0);
    }
    return 0.5 * (h + h.transpose());
}

inline Eigen::MatrixXd overlap_matrix(const BasisConfig& config, const QuadratureRule& rule) {
    require_hmd_basis(config, rule);
    Eigen::VectorXd g(rule.size());
    for (Eigen::Index i = 0; i < rule.size(); ++i) {
        const double t = rule.tau(i);
        g(i) = -1.0 / (1.0 - t * t);
    }
    return basis::node_matrix(rule, g);
}

inline HmdMatrices build_matrices(const PotentialParams& params, const BasisConfig& config) {
    validate(params);
    const QuadratureRule rule = basis::basis_rule(config);
    return HmdMatrices{hamiltonian_matrix(params, config, rule), overlap_matrix(config, rule), config};
}

struct GeneralizedSolution {
    Eigen::VectorXd eps;     ///< ascending
    Eigen::MatrixXd vectors; ///< omega-orthonormal columns
};

/// H2 f = eps omega f via omega = L L^T and the symmetric L^{-1} H2 L^{-T}.
inline GeneralizedSolution solve_generalized(const Eigen::MatrixXd& h2, const Eigen::MatrixXd& omega) {
    if (h2.rows() != omega.rows() || h2.cols() != omega.cols() || h2.rows() != h2.cols()) {
        throw InvalidArgument("H and omega must be square and of equal size");
    }
    const Eigen::MatrixXd l = cholesky_lower(omega);
    const auto lower = l.triangularView<Eigen::Lower>();
    Eigen::MatrixXd tmp = lower.solve(h2);
    Eigen::MatrixXd reduced = lower.solve(tmp.transpose());
    reduced = 0.5 * (reduced + reduced.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
    if (es.info() != Eigen::Success) {
        throw NumericalBreakdown("reduced eigenproblem did not converge");
    }
    Eigen::MatrixXd f = l.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    return GeneralizedSolution{es.eigenvalues(), std::move(f)};
}

// ---------------------------------------------------------------------------
// Plateau scan.

struct NuWindow {
    double upper = 0.0; ///< first nu sampled (closest to -2N-1)
    double lower = 0.0; ///< last nu sampled
};

/// Half-integer samples from -2N-1.5 down to -2N-20.5: the integer grid hits
/// the F_N pole at nu = -2N-2.
inline NuWindow default_window(int N) {
    return NuWindow{-2.0 * N - 1.5, -2.0 * N - 20.5};
}

struct PlateauOptions {
    double step = 1.0;
    double rel_tol = 1e-5;        ///< spread/|eps| limit for |eps| >= shallow_cutoff
    double abs_tol = 5e-3;        ///< spread limit for |eps| < shallow_cutoff
    double shallow_cutoff = 1.0;
    int min_samples = 5;          ///< shortest run of nu samples that counts as a plateau
};

struct BoundLevel {
    double eps_table = 0.0;   ///< -eps = -2E/lambda^2 (> 0)
    double e_hartree = 0.0;   ///< E = -(lambda^2/2) eps_table
    double spread = 0.0;      ///< max - min of -eps over the plateau
    double nu_first = 0.0;    ///< plateau bounds
    double nu_last = 0.0;
    int samples = 0;
};

struct BoundSpectrum {
    std::vector<BoundLevel> levels; ///< deepest first
    NuWindow window;
    int N = 0;
    double lambda = 1.0;
    int valid_samples = 0;
    int rejected_samples = 0;

    std::size_t size() const noexcept { return levels.size(); }
    std::vector<double> eps_table() const {
        std::vector<double> out;
        for (const auto& l : levels) {
            out.push_back(l.eps_table);
        }
        return out;
    }
};

/// -eps of every negative generalized eigenvalue at a single nu, deepest first.
inline std::vector<double> negative_levels(const PotentialParams& params, const BasisConfig& config) {
    const HmdMatrices m = build_matrices(params, config);
    const GeneralizedSolution sol = solve_generalized(m.h2, m.omega);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < sol.eps.size() && sol.eps(i) < 0.0; ++i) {
        out.push_back(-sol.eps(i));
    }
    return out;
}

struct NuSample {
    double nu = 0.0;
    std::vector<double> levels; ///< -eps, deepest first
};

inline std::vector<double> nu_grid(const NuWindow& window, double step) {
    if (!(step > 0.0)) {
        throw InvalidArgument("nu step must be positive");
    }
    if (window.lower > window.upper) {
        throw InvalidArgument("nu window is empty");
    }
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double nu = window.upper - k * step;
        if (nu < window.lower - 1e-9 * step) {
            break;
        }
        out.push_back(nu);
    }
    return out;
}

namespace detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline bool within_tolerance(const std::vector<double>& run, const PlateauOptions& opt) {
    const auto [lo, hi] = std::minmax_element(run.begin(), run.end());
    const double spread = *hi - *lo;
    const double centre = median(run);
    if (std::abs(centre) >= opt.shallow_cutoff) {
        return spread <= opt.rel_tol * std::abs(centre);
    }
    return spread <= opt.abs_tol;
}

/// Longest contiguous run of present values meeting the tolerance; ties go to
/// the run with the smaller spread.
inline std::optional<BoundLevel> stable_run(const std::vector<NuSample>& samples, std::size_t level,
                                            const PlateauOptions& opt, double lambda) {
    std::optional<BoundLevel> best;
    double best_spread = 0.0;
    std::size_t best_len = 0;
    for (std::size_t a = 0; a < samples.size(); ++a) {
        std::vector<double> run;
        for (std::size_t b = a; b < samples.size(); ++b) {
            if (samples[b].levels.size() <= level) {
                break;
            }
            run.push_back(samples[b].levels[level]);
            if (!within_tolerance(run, opt)) {
                break;
            }
            const auto [lo, hi] = std::minmax_element(run.begin(), run.end());
            const double spread = *hi - *lo;
            if (run.size() > best_len || (run.size() == best_len && spread < best_spread)) {
                best_len = run.size();
                best_spread = spread;
                BoundLevel bl;
                bl.eps_table = median(run);
                bl.e_hartree = -0.5 * lambda * lambda * bl.eps_table;
                bl.spread = spread;
                bl.nu_first = samples[a].nu;
                bl.nu_last = samples[b].nu;
                bl.samples = static_cast<int>(run.size());
                best = bl;
            }
        }
    }
    if (best && best->samples >= opt.min_samples) {
        return best;
    }
    return std::nullopt;
}

} // namespace detail

/// Solve at every nu in the window (rejecting samples whose quadrature or
/// overlap breaks down) and keep the levels that form a plateau.
inline BoundSpectrum plateau_from_samples(const std::vector<NuSample>& samples, int rejected, const NuWindow& window,
                                          int N, double lambda, const PlateauOptions& opt) {
    BoundSpectrum out;
    out.window = window;
    out.N = N;
    out.lambda = lambda;
    out.valid_samples = static_cast<int>(samples.size());
    out.rejected_samples = rejected;
    std::size_t max_levels = 0;
    for (const auto& s : samples) {
        max_levels = std::max(max_levels, s.levels.size());
    }
    for (std::size_t j = 0; j < max_levels; ++j) {
        if (auto lvl = detail::stable_run(samples, j, opt, lambda)) {
            out.levels.push_back(*lvl);
        }
    }
    return out;
}

inline std::vector<NuSample> scan_samples(const PotentialParams& params, int N, const NuWindow& window, double step,
                                          int* rejected = nullptr) {
    std::vector<NuSample> samples;
    int bad = 0;
    for (double nu : nu_grid(window, step)) {
        BasisConfig config{N, 0.0, nu, params.lambda};
        try {
            samples.push_back({nu, negative_levels(params, config)});
        } catch (const NumericalBreakdown&) {
            ++bad;
        } catch (const ConditioningError&) {
            ++bad;
        }
    }
    if (rejected) {
        *rejected = bad;
    }
    return samples;
}

inline BoundSpectrum plateau_scan(const PotentialParams& params, int N, const NuWindow& window,
                                  const PlateauOptions& opt = {}) {
    validate(params);
    if (N < 0) {
        throw InvalidArgument("N must be non-negative");
    }
    if (!(window.upper < -2.0 * N - 1.0)) {
        throw InvalidArgument("nu window must lie below -2N-1");
    }
    int rejected = 0;
    const std::vector<NuSample> samples = scan_samples(params, N, window, opt.step, &rejected);
    return plateau_from_samples(samples, rejected, window, N, params.lambda, opt);
}

inline BoundSpectrum bound_spectrum(const PotentialParams& params, int N = 100, const PlateauOptions& opt = {}) {
    return plateau_scan(params, N, default_window(N), opt);
}

} // namespace tra::hmd
