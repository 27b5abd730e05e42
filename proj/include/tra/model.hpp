#pragma once

// Physical layer: charge/dipole/quadrupole inputs, screening choice, the map
// to the dimensionless potential constants, the admissibility filter on the
// angular table, and the end-to-end spectrum procedure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tra/angular.hpp"
#include "tra/error.hpp"
#include "tra/hmd_spectrum.hpp"
#include "tra/parallel.hpp"

namespace tra::model {

using angular::AngularChannel;
using angular::ChannelTable;
using hmd::BoundSpectrum;
using hmd::PotentialParams;

struct MoleculeSpec {
    int Z = 1;
    double dipole = 0.0;     ///< Q_d (e a0)
    double quadrupole = 0.0; ///< p (atomic units)
};

struct ScreeningChoice {
    int Q = 1;
    double lambda = 1.0;
    double eta = 0.0;

    double effective_quadrupole(double p) const noexcept { return eta * p; }
};

/// Which length scale enters A, C, the filter and the hartree conversion.
///   screening:     lambda as given            A = -2Q/lambda,      C = 2 lambda eta p
///   charge_scaled: lambda' = Q lambda         A = -2/lambda,       C = 2 Q lambda eta p
/// The bundled reference spectrum was produced under charge_scaled.
enum class ScaleConvention { screening, charge_scaled };

inline double effective_lambda(const ScreeningChoice& c, ScaleConvention conv) {
    return conv == ScaleConvention::charge_scaled ? c.Q * c.lambda : c.lambda;
}

inline const char* to_string(ScaleConvention c) {
    return c == ScaleConvention::charge_scaled ? "charge_scaled" : "screening";
}

inline ScaleConvention parse_convention(const std::string& s) {
    if (s == "screening") {
        return ScaleConvention::screening;
    }
    if (s == "charge_scaled" || s == "charge-scaled") {
        return ScaleConvention::charge_scaled;
    }
    throw InvalidArgument("unknown scale convention '" + s + "'");
}

struct Violation {
    std::string field;
    std::string message;
};

inline std::vector<Violation> validate(const MoleculeSpec& mol, const ScreeningChoice& choice,
                                       ScaleConvention conv = ScaleConvention::screening) {
    std::vector<Violation> out;
    if (mol.Z < 1) {
        out.push_back({"Z", "charge number must be >= 1"});
    }
    if (mol.dipole < 0.0) {
        out.push_back({"dipole", "dipole moment must be >= 0"});
    }
    if (choice.Q < 1 || choice.Q > mol.Z) {
        out.push_back({"Q", "net charge must lie in {1..Z}"});
    }
    if (!(choice.lambda > 0.0) || choice.lambda > 4.0 * choice.Q) {
        out.push_back({"lambda", "screening scale must satisfy 0 < lambda <= 4Q"});
    } else if (effective_lambda(choice, conv) > 4.0 * choice.Q) {
        out.push_back({"lambda", "effective scale Q*lambda exceeds 4Q (A > -1/2)"});
    }
    if (!(choice.eta >= -0.5 && choice.eta <= 1.0)) {
        out.push_back({"eta", "quadrupole factor must satisfy -1/2 <= eta <= 1"});
    }
    return out;
}

inline PotentialParams map_params(const ScreeningChoice& choice, double p, double e_theta,
                                  ScaleConvention conv = ScaleConvention::screening) {
    const double lam = effective_lambda(choice, conv);
    return PotentialParams{-2.0 * choice.Q / lam, -2.0 * e_theta, 2.0 * lam * choice.eta * p, lam};
}

/// (Q, E_theta, Q_q) recovered from the potential constants.
struct PhysicalConstants {
    double Q = 0.0;
    double e_theta = 0.0;
    double quadrupole_eff = 0.0;
};

inline PhysicalConstants unmap_params(const PotentialParams& pp) {
    return {-pp.lambda * pp.A / 2.0, -pp.B / 2.0, pp.C / (2.0 * pp.lambda)};
}

struct FilteredTable {
    ChannelTable table;
    int ell_max = -1;                  ///< -1 when nothing survives
    bool negative_quadrupole = false;  ///< eta*p < 0: literal filter, flagged for review
};

/// Relative slack on the filter boundary so that decimal inputs sitting on it
/// (e.g. -0.42 / 2.1 against -0.2) are not lost to rounding.
inline constexpr double kFilterSlack = 1e-12;

/// True when E_theta / (eta p) <= -lambda.
inline bool admissible(double e_theta, double eta_p, double lambda) {
    return e_theta / eta_p <= -lambda * (1.0 - kFilterSlack);
}

inline FilteredTable admissible_channels(const ChannelTable& table, const ScreeningChoice& choice, double p,
                                         ScaleConvention conv = ScaleConvention::screening) {
    const double eta_p = choice.effective_quadrupole(p);
    if (eta_p == 0.0) {
        throw InvalidArgument("admissibility filter is undefined for eta*p = 0");
    }
    const double lam = effective_lambda(choice, conv);
    FilteredTable out;
    out.table.dipole = table.dipole;
    out.table.size = table.size;
    out.table.converged_digits = table.converged_digits;
    out.negative_quadrupole = eta_p < 0.0;
    for (const auto& ch : table.entries) {
        if (admissible(ch.e_theta, eta_p, lam)) {
            out.table.entries.push_back(ch);
            out.ell_max = std::max(out.ell_max, ch.ell);
        }
    }
    return out;
}

struct SolverConfig {
    int N = 100;
    std::optional<hmd::NuWindow> nu_window; ///< default: hmd::default_window(N)
    hmd::PlateauOptions plateau;
    ScaleConvention convention = ScaleConvention::screening;
    bool allow_zero_quadrupole = false;
    int zero_quadrupole_ell_max = 4;
    int zero_quadrupole_per_channel = 3;
    int max_per_channel = 12;  ///< cap on m per ell (matters for eta*p < 0)
    int max_ell = 40;
    int angular_size = angular::kDefaultSize;
    double angular_tol = 1e-9;

    hmd::NuWindow window() const { return nu_window.value_or(hmd::default_window(N)); }
};

struct ChannelSpectrum {
    AngularChannel channel;
    PotentialParams params;
    BoundSpectrum spectrum;
};

struct SpectrumReport {
    MoleculeSpec molecule;
    ScreeningChoice choice;
    ScaleConvention convention = ScaleConvention::screening;
    std::vector<ChannelSpectrum> rows;
    int ell_max = -1;
    bool negative_quadrupole = false;

    std::size_t level_count() const {
        std::size_t n = 0;
        for (const auto& r : rows) {
            n += r.spectrum.size();
        }
        return n;
    }
};

/// Admissible channels for one ell: eigenvalues are computed until the first
/// one that fails the filter (plus that one, which proves the cut).
inline std::vector<AngularChannel> admissible_for_ell(int ell, double dipole, double eta_p, double lam,
                                                      const SolverConfig& solver) {
    std::vector<AngularChannel> out;
    int count = 1;
    while (true) {
        const auto values = angular::channel_eigenvalues(ell, dipole, std::max(solver.angular_size, count), count,
                                                         solver.angular_tol);
        const double last = values.back();
        if (!admissible(last, eta_p, lam)) {
            for (int m = 0; m + 1 < count; ++m) {
                out.push_back({ell, m, ell, values[static_cast<std::size_t>(m)]});
            }
            // filter order is monotone in m only for eta*p > 0
            if (eta_p > 0.0) {
                return out;
            }
        }
        if (count >= solver.max_per_channel) {
            out.clear();
            for (int m = 0; m < count; ++m) {
                if (admissible(values[static_cast<std::size_t>(m)], eta_p, lam)) {
                    out.push_back({ell, m, ell, values[static_cast<std::size_t>(m)]});
                }
            }
            return out;
        }
        ++count;
    }
}

/// Steps: channel table, admissibility filter, parameter map, HMD spectrum.
inline SpectrumReport run_procedure(const MoleculeSpec& mol, const ScreeningChoice& choice,
                                    const SolverConfig& solver = {}) {
    if (const auto v = validate(mol, choice, solver.convention); !v.empty()) {
        std::string msg = "invalid model parameters:";
        for (const auto& e : v) {
            msg += " " + e.field + " (" + e.message + ")";
        }
        throw InvalidArgument(msg);
    }
    const double eta_p = choice.effective_quadrupole(mol.quadrupole);
    const double lam = effective_lambda(choice, solver.convention);

    SpectrumReport report;
    report.molecule = mol;
    report.choice = choice;
    report.convention = solver.convention;
    report.negative_quadrupole = eta_p < 0.0;

    std::vector<AngularChannel> channels;
    if (eta_p == 0.0) {
        if (!solver.allow_zero_quadrupole) {
            throw InvalidArgument("eta*p = 0: the admissibility filter is undefined; opt in to the C = 0 path");
        }
        const auto table = angular::build_channel_table(mol.dipole, 0, solver.zero_quadrupole_ell_max,
                                                        solver.zero_quadrupole_per_channel, solver.angular_size,
                                                        solver.angular_tol);
        channels = table.entries;
    } else {
        for (int ell = 0; ell <= solver.max_ell; ++ell) {
            auto found = admissible_for_ell(ell, mol.dipole, eta_p, lam, solver);
            if (found.empty()) {
                break;
            }
            channels.insert(channels.end(), found.begin(), found.end());
        }
    }
    for (const auto& ch : channels) {
        report.ell_max = std::max(report.ell_max, ch.ell);
    }

    const hmd::NuWindow window = solver.window();
    report.rows = parallel_map<ChannelSpectrum>(channels.size(), [&](std::size_t i) {
        const PotentialParams pp = map_params(choice, mol.quadrupole, channels[i].e_theta, solver.convention);
        return ChannelSpectrum{channels[i], pp, hmd::plateau_scan(pp, solver.N, window, solver.plateau)};
    });
    return report;
}

/// All bound energies of a report in hartree, most negative first.
inline std::vector<double> report_energies(const SpectrumReport& report) {
    std::vector<double> out;
    for (const auto& row : report.rows) {
        for (const auto& lvl : row.spectrum.levels) {
            out.push_back(lvl.e_hartree);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct TuneGrid {
    std::vector<int> Q;
    std::vector<double> lambda;
    std::vector<double> eta;
};

struct TuneOptions {
    /// Cost of a target with no computed partner; default (nullopt) charges
    /// the squared target energy, as if the computed level sat at threshold.
    std::optional<double> unmatched_penalty;
};

struct TuneResult {
    ScreeningChoice best;
    double misfit = 0.0;
    SpectrumReport report;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

/// Sum of squared differences (hartree) pairing levels by descending depth.
inline double misfit(std::vector<double> computed, std::vector<double> targets, const TuneOptions& opt = {}) {
    std::sort(computed.begin(), computed.end());
    std::sort(targets.begin(), targets.end());
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (i < computed.size()) {
            const double d = computed[i] - targets[i];
            total += d * d;
        } else {
            total += opt.unmatched_penalty.value_or(targets[i] * targets[i]);
        }
    }
    return total;
}

/// Exhaustive search over the (Q, lambda, eta) grid; ties resolved by the
/// lexicographically smallest (Q, lambda, eta).
inline TuneResult tune_parameters(const MoleculeSpec& mol, const std::vector<double>& targets, const TuneGrid& grid,
                                  const SolverConfig& solver = {}, const TuneOptions& opt = {}) {
    std::vector<ScreeningChoice> points;
    for (int q : grid.Q) {
        for (double l : grid.lambda) {
            for (double e : grid.eta) {
                points.push_back({q, l, e});
            }
        }
    }
    std::sort(points.begin(), points.end(), [](const ScreeningChoice& a, const ScreeningChoice& b) {
        return std::tie(a.Q, a.lambda, a.eta) < std::tie(b.Q, b.lambda, b.eta);
    });
    TuneResult result;
    bool have = false;
    for (const auto& pt : points) {
        if (!validate(mol, pt, solver.convention).empty() ||
            (pt.effective_quadrupole(mol.quadrupole) == 0.0 && !solver.allow_zero_quadrupole)) {
            ++result.skipped;
            continue;
        }
        SpectrumReport rep = run_procedure(mol, pt, solver);
        ++result.evaluated;
        const double m = misfit(report_energies(rep), targets, opt);
        if (!have || m < result.misfit) {
            have = true;
            result.best = pt;
            result.misfit = m;
            result.report = std::move(rep);
        }
    }
    if (!have) {
        throw SearchFailure("no valid point in the tuning grid");
    }
    return result;
}

struct LimitPoint {
    double lambda = 0.0;
    double C = 0.0;
    double Q = 0.0;          ///< -lambda A / 2
    double eps = std::numeric_limits<double>::quiet_NaN();      ///< ground eps (< 0), NaN if nothing binds
    double e_hartree = std::numeric_limits<double>::quiet_NaN();
};

struct LimitStudy {
    std::vector<LimitPoint> points;
    double slope = std::numeric_limits<double>::quiet_NaN(); ///< d ln|E| / d ln lambda
};

/// Least-squares slope of ln|y| against ln x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Weak-screening limit at fixed A, B with C = 2 lambda Q_q.
inline LimitStudy anion_limit_study(double A, double B, double quadrupole_eff, const std::vector<double>& lambdas,
                                    int N = 100, const hmd::PlateauOptions& plateau = {}) {
    if (!(A <= -0.5)) {
        throw InvalidArgument("anion-limit study requires A <= -1/2");
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0) || (i > 0 && !(lambdas[i] < lambdas[i - 1]))) {
            throw InvalidArgument("lambda sequence must be positive and decreasing");
        }
    }
    LimitStudy out;
    out.points = parallel_map<LimitPoint>(lambdas.size(), [&](std::size_t i) {
        const double lam = lambdas[i];
        LimitPoint pt;
        pt.lambda = lam;
        pt.C = 2.0 * lam * quadrupole_eff;
        pt.Q = -lam * A / 2.0;
        const BoundSpectrum bs = hmd::bound_spectrum({A, B, pt.C, lam}, N, plateau);
        if (!bs.levels.empty()) {
            pt.eps = -bs.levels.front().eps_table;
            pt.e_hartree = bs.levels.front().e_hartree;
        }
        return pt;
    });
    std::vector<double> xs, ys;
    for (const auto& p : out.points) {
        if (std::isfinite(p.e_hartree)) {
            xs.push_back(p.lambda);
            ys.push_back(p.e_hartree);
        }
    }
    if (xs.size() >= 2) {
        out.slope = loglog_slope(xs, ys);
    }
    return out;
}

} // namespace tra::model
