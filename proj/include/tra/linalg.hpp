#pragma once

// Small dense / tridiagonal helpers shared by the solvers. Eigen does the
// heavy lifting; the Cholesky here exists only to report the failing pivot.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tra/error.hpp"

namespace tra {

/// Real symmetric tridiagonal matrix stored by diagonals.
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off; ///< off[i] couples rows i and i+1

    std::size_t size() const noexcept { return diag.size(); }

    Eigen::MatrixXd dense() const {
        const auto n = static_cast<Eigen::Index>(diag.size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            m(i, i) = diag[static_cast<std::size_t>(i)];
        }
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            m(i, i + 1) = off[static_cast<std::size_t>(i)];
            m(i + 1, i) = off[static_cast<std::size_t>(i)];
        }
        return m;
    }
};

struct SpectralDecomposition {
    Eigen::VectorXd values;  ///< ascending
    Eigen::MatrixXd vectors; ///< column j belongs to values[j]
};

namespace detail {

inline void check_shape(const Tridiagonal& t) {
    if (t.diag.empty()) {
        throw InvalidArgument("tridiagonal matrix is empty");
    }
    if (t.off.size() + 1 != t.diag.size()) {
        throw InvalidArgument("tridiagonal off-diagonal has wrong length");
    }
}

/// Make the first component with |v| > tiny positive in every column.
inline void fix_signs(Eigen::MatrixXd& v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            if (std::abs(v(i, j)) > 1e-14) {
                if (v(i, j) < 0.0) {
                    v.col(j) *= -1.0;
                }
                break;
            }
        }
    }
}

} // namespace detail

/// Full eigen-decomposition of a symmetric tridiagonal matrix.
inline SpectralDecomposition eigh_tridiagonal(const Tridiagonal& t) {
    detail::check_shape(t);
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(t.diag.data(), n);
    Eigen::VectorXd e = n > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(t.off.data(), n - 1))
                              : Eigen::VectorXd(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalBreakdown("tridiagonal eigensolver did not converge");
    }
    SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
    detail::fix_signs(out.vectors);
    return out;
}

/// Eigenvalues only, ascending.
inline Eigen::VectorXd eigvalsh_tridiagonal(const Tridiagonal& t) {
    detail::check_shape(t);
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(t.diag.data(), n);
    Eigen::VectorXd e = n > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(t.off.data(), n - 1))
                              : Eigen::VectorXd(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalBreakdown("tridiagonal eigensolver did not converge");
    }
    return solver.eigenvalues();
}

/// Number of eigenvalues strictly below `x` (Sturm count via LDL^T pivots).
inline std::size_t sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x) {
    std::size_t count = 0;
    double q = diag[0] - x;
    if (q < 0.0) {
        ++count;
    }
    for (std::size_t i = 1; i < diag.size(); ++i) {
        if (q == 0.0) {
            q = 1e-300;
        }
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if (q < 0.0) {
            ++count;
        }
    }
    return count;
}

/// k-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix by
/// Sturm bisection. Linear memory; meant for very large grids.
inline double kth_eigenvalue_bisection(const std::vector<double>& diag, const std::vector<double>& off,
                                       std::size_t k, double rel_tol = 1e-14) {
    // Gershgorin bracket
    double lo = diag[0];
    double hi = diag[0];
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double radius = 0.0;
        if (i > 0) {
            radius += std::abs(off[i - 1]);
        }
        if (i + 1 < diag.size()) {
            radius += std::abs(off[i]);
        }
        lo = std::min(lo, diag[i] - radius);
        hi = std::max(hi, diag[i] + radius);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(diag, off, mid) > k) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

/// Lower Cholesky factor of a symmetric matrix; throws with the first
/// non-positive pivot.
inline Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) {
        throw InvalidArgument("cholesky: matrix is not square");
    }
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw ConditioningError("matrix is not positive definite at pivot " + std::to_string(j),
                                    static_cast<std::size_t>(j));
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
        }
    }
    return l;
}

inline double max_asymmetry(const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

} // namespace tra
