#pragma once

// Polar separation constants for an electron in a point-dipole field.
//
// For azimuthal number ell = |k| the constants 2*E_theta are the eigenvalues
// of an infinite symmetric tridiagonal matrix with diagonal
// (n + ell + 1/2)^2 - 1/4 and couplings proportional to the dipole moment.
// The matrix is truncated at size M and M is doubled until the requested
// eigenvalues settle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tra/error.hpp"
#include "tra/linalg.hpp"

namespace tra::angular {

inline constexpr int kDefaultSize = 200;
inline constexpr int kMaxSize = 1 << 15;

struct DipoleMatrixSpec {
    int ell = 0;
    double dipole = 0.0; ///< Q_d in e*a0
    int size = kDefaultSize;
};

struct AngularChannel {
    int ell = 0;
    int m = 0;             ///< rank of E_theta within its ell, 0 = most negative
    int k = 0;             ///< azimuthal number, ell = |k|, 2 E_phi = k^2
    double e_theta = 0.0;  ///< half an eigenvalue of the dipole matrix

    double e_phi() const noexcept { return 0.5 * k * k; }
};

struct ChannelTable {
    std::vector<AngularChannel> entries; ///< sorted by (ell, m)
    double dipole = 0.0;
    int size = 0;                        ///< largest truncation that was needed
    int converged_digits = 0;
};

inline Tridiagonal build_dipole_matrix(const DipoleMatrixSpec& spec) {
    if (spec.ell < 0) {
        throw InvalidArgument("ell must be non-negative");
    }
    if (spec.size < 1) {
        throw InvalidArgument("dipole matrix size must be >= 1");
    }
    const auto m = static_cast<std::size_t>(spec.size);
    const double l = spec.ell;
    Tridiagonal t;
    t.diag.resize(m);
    t.off.resize(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double n = static_cast<double>(i);
        t.diag[i] = (n + l + 0.5) * (n + l + 0.5) - 0.25;
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double n = static_cast<double>(i);
        const double s = (n + l + 1.0) * (n + l + 1.0) - 0.25;
        t.off[i] = spec.dipole * std::sqrt((n + 1.0) * (n + 2.0 * l + 1.0) / s);
    }
    return t;
}

namespace detail {

inline std::vector<double> lowest_half_eigenvalues(int ell, double dipole, int size, int count) {
    const Eigen::VectorXd ev = eigvalsh_tridiagonal(build_dipole_matrix({ell, dipole, size}));
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        out[static_cast<std::size_t>(j)] = 0.5 * ev(j);
    }
    return out;
}

} // namespace detail

struct ConvergedValues {
    std::vector<double> values;
    int size = 0; ///< truncation at which the values were accepted
};

/// Lowest `count` separation constants E_theta, ascending, converged so that
/// doubling the truncation moves none of them by more than `tol`.
inline ConvergedValues channel_eigenvalues_converged(int ell, double dipole, int size, int count,
                                                     double tol = 1e-9) {
    if (count < 0 || count > size) {
        throw InvalidArgument("count must lie in [0, M]");
    }
    if (!(tol > 0.0)) {
        throw InvalidArgument("tolerance must be positive");
    }
    if (count == 0) {
        return {{}, size};
    }
    int m = size;
    std::vector<double> current = detail::lowest_half_eigenvalues(ell, dipole, m, count);
    while (2 * m <= kMaxSize) {
        std::vector<double> next = detail::lowest_half_eigenvalues(ell, dipole, 2 * m, count);
        double worst = 0.0;
        for (std::size_t j = 0; j < current.size(); ++j) {
            worst = std::max(worst, std::abs(next[j] - current[j]));
        }
        if (worst < tol) {
            return {next, 2 * m};
        }
        current = std::move(next);
        m *= 2;
    }
    throw ConvergenceFailure("E_theta did not converge for ell=" + std::to_string(ell) +
                             " up to M=" + std::to_string(kMaxSize));
}

inline std::vector<double> channel_eigenvalues(int ell, double dipole, int size, int count,
                                               double tol = 1e-9) {
    return channel_eigenvalues_converged(ell, dipole, size, count, tol).values;
}

inline int digits_for(double tol) {
    return std::max(0, static_cast<int>(std::floor(-std::log10(tol))));
}

/// Table of (ell, m, E_theta) for ell in [ell_min, ell_max] and m < per_channel.
inline ChannelTable build_channel_table(double dipole, int ell_min, int ell_max, int per_channel,
                                        int size = kDefaultSize, double tol = 1e-9) {
    if (!(tol > 0.0)) {
        throw InvalidArgument("tolerance must be positive");
    }
    if (ell_min < 0 || ell_max < ell_min) {
        throw InvalidArgument("invalid ell range");
    }
    if (per_channel < 1) {
        throw InvalidArgument("per-channel count must be >= 1");
    }
    ChannelTable table;
    table.dipole = dipole;
    table.converged_digits = digits_for(tol);
    const int m0 = std::max(size, per_channel);
    for (int ell = ell_min; ell <= ell_max; ++ell) {
        const auto conv = channel_eigenvalues_converged(ell, dipole, m0, per_channel, tol);
        table.size = std::max(table.size, conv.size);
        for (int m = 0; m < per_channel; ++m) {
            table.entries.push_back({ell, m, ell, conv.values[static_cast<std::size_t>(m)]});
        }
    }
    return table;
}

/// Lowest eigenvalue of T + I/4 for the given dipole (the quantity whose sign
/// change marks the critical dipole).
inline double shifted_lowest_eigenvalue(int ell, double dipole, int size) {
    Tridiagonal t = build_dipole_matrix({ell, dipole, size});
    for (double& d : t.diag) {
        d += 0.25;
    }
    return eigvalsh_tridiagonal(t)(0);
}

struct CriticalDipoleOptions {
    double q_max = 1000.0;   ///< upper end of the bracket search
    double q_step = 0.05;    ///< initial bracket step
};

namespace detail {

inline double bisect_critical(int ell, int size, double tol, const CriticalDipoleOptions& opt) {
    double lo = 0.0;
    double hi = opt.q_step;
    double step = opt.q_step;
    while (shifted_lowest_eigenvalue(ell, hi, size) > 0.0) {
        lo = hi;
        step *= 1.5;
        hi += step;
        if (hi > opt.q_max) {
            throw SearchFailure("no critical dipole below " + std::to_string(opt.q_max) +
                                " for ell=" + std::to_string(ell));
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (shifted_lowest_eigenvalue(ell, mid, size) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Smallest Q_d > 0 at which det(T + I/4) vanishes, i.e. the lowest
/// 2 E_theta reaches -1/4. Bisected to `tol` and re-run with doubled M until
/// two successive truncations agree to `tol`.
inline double critical_dipole(int ell, int size = kDefaultSize, double tol = 1e-10,
                              const CriticalDipoleOptions& opt = {}) {
    if (!(tol > 0.0)) {
        throw InvalidArgument("tolerance must be positive");
    }
    if (ell < 0 || size < 1) {
        throw InvalidArgument("invalid critical-dipole arguments");
    }
    int m = size;
    double current = detail::bisect_critical(ell, m, tol, opt);
    while (2 * m <= kMaxSize) {
        const double next = detail::bisect_critical(ell, 2 * m, tol, opt);
        if (std::abs(next - current) < 10.0 * tol) {
            return next;
        }
        current = next;
        m *= 2;
    }
    throw ConvergenceFailure("critical dipole did not settle under M-doubling");
}

} // namespace tra::angular
