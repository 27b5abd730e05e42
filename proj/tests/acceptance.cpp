// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion, exit 1 if any fails
//   acceptance --only 3   run a single criterion (used by ctest)

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "tra/angular.hpp"
#include "tra/basis_quadrature.hpp"
#include "tra/hmd_spectrum.hpp"
#include "tra/hpoly.hpp"
#include "tra/model.hpp"
#include "tra/oracle.hpp"

namespace {

// Pinned tolerances.
constexpr double kAngularTol = 1e-6;
constexpr double kAngularSeconds = 1.0;
constexpr double kShallowAbsTol = 1e-2;
constexpr int kSignificantDigits = 5;
constexpr double kSpectrumSeconds = 60.0;
constexpr double kHulthenDeepRel = 1e-4;
constexpr double kHulthenShallowRel = 1e-2;
constexpr double kHulthenGridRel = 1e-4;
constexpr double kCrossMethodRel = 1e-3;
constexpr double kCriticalStability = 1e-4;
constexpr double kCriticalExpected = 0.639;
constexpr double kCriticalExpectedTol = 1e-3;
constexpr double kSlopeTarget = 2.0;
constexpr double kSlopeTol = 0.05;
constexpr double kSymmetryTol = 1e-10;
constexpr double kOrthogonalityTol = 1e-12;
constexpr double kRecursionTol = 1e-10;
constexpr double kRoundTripTol = 1e-12;
constexpr double kDecadeGain = 10.0;
constexpr double kScalingTol = 1e-9;
constexpr double kPlateauSpreadTol = 1e-6;
constexpr double kDeepLevel = 50.0;

struct Row {
    int ell;
    int m;
    double e_theta;
    std::vector<double> eps;
};

const std::vector<Row> kReference{
    {0, 0, -29.336747, {458.70220564, 201.89558358, 83.02498131, 29.27760795, 6.7669578, 0.175}},
    {0, 1, -18.028503, {98.32461711, 30.95016950, 6.3724845, 0.099}},
    {0, 2, -7.279835, {4.41151545}},
    {1, 0, -23.414383, {225.280359848, 87.366542332, 29.136472495, 6.28034949, 0.109}},
    {1, 1, -12.362103, {29.004443567, 5.05763725}},
    {2, 0, -17.193036, {84.506325074, 25.319280377, 4.49358085}},
    {2, 1, -6.360787, {2.517451}},
    {3, 0, -10.624897, {17.45549174, 1.86655}},
    {4, 0, -3.653598, {0.074}},
};

const tra::model::MoleculeSpec kMolecule{12, 35.0, 7.0};
const tra::model::ScreeningChoice kChoice{8, 0.2, 0.3};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// Five significant digits: within half a unit of the fifth digit.
bool matches_digits(double computed, double ref, int digits) {
    const double unit = std::pow(10.0, std::floor(std::log10(std::abs(ref))) - (digits - 1));
    return std::abs(computed - ref) <= 0.5 * unit;
}

// ------------------------------------------------------------------ 1

Outcome angular_regression() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto table = tra::angular::build_channel_table(35.0, 0, 4, 3);
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    int found = 0;
    for (const Row& r : kReference) {
        for (const auto& ch : table.entries) {
            if (ch.ell == r.ell && ch.m == r.m) {
                worst = std::max(worst, std::abs(ch.e_theta - r.e_theta));
                ++found;
            }
        }
    }
    const bool pass = found == 9 && worst <= kAngularTol && elapsed < kAngularSeconds;
    return {pass, fmt("9 values, max |dE_theta| = %.2e (tol %.0e), %.3f s (limit %.0f s)", worst, kAngularTol,
                      elapsed, kAngularSeconds)};
}

// ------------------------------------------------------------------ 2

Outcome spectrum_regression() {
    tra::model::SolverConfig solver;
    solver.N = 100;
    solver.convention = tra::model::ScaleConvention::charge_scaled;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = tra::model::run_procedure(kMolecule, kChoice, solver);
    const double elapsed = seconds_since(t0);
    bool pass = rep.rows.size() == kReference.size() && elapsed < kSpectrumSeconds;
    int checked = 0;
    int failed = 0;
    std::string counts;
    std::string misses;
    for (std::size_t i = 0; i < kReference.size() && i < rep.rows.size(); ++i) {
        const Row& ref = kReference[i];
        const auto& row = rep.rows[i];
        counts += (i ? "," : "") + std::to_string(row.spectrum.size());
        if (row.channel.ell != ref.ell || row.channel.m != ref.m || row.spectrum.size() != ref.eps.size()) {
            pass = false;
            continue;
        }
        for (std::size_t k = 0; k < ref.eps.size(); ++k) {
            const double c = row.spectrum.levels[k].eps_table;
            const bool ok = ref.eps[k] >= 1.0 ? matches_digits(c, ref.eps[k], kSignificantDigits)
                                              : std::abs(c - ref.eps[k]) <= kShallowAbsTol;
            ++checked;
            if (!ok) {
                ++failed;
                pass = false;
                misses += fmt(" (%d,%d)#%zu %.10g vs %.10g;", ref.ell, ref.m, k, c, ref.eps[k]);
            }
        }
    }
    return {pass, fmt("%d/%d levels match, counts [%s] (expected 6,4,1,5,2,3,1,2,1), %.2f s (limit %.0f s)%s",
                      checked - failed, checked, counts.c_str(), elapsed, kSpectrumSeconds, misses.c_str())};
}

// ------------------------------------------------------------------ 3

Outcome hulthen_equivalence() {
    const double expected[] = {1521.0, 324.0, 106.7778, 36.0, 9.0, 0.4444};
    const auto closed = tra::oracle::hulthen_levels(8.0, 0.2);
    bool closed_ok = closed.size() == 6;
    for (std::size_t k = 0; closed_ok && k < 6; ++k) {
        closed_ok = std::abs(closed[k] - expected[k]) <= 5e-5; // values printed to 4 decimals
    }
    // pre-validation of the closed form against the grid oracle (deep five)
    const auto grid = tra::oracle::grid_spectrum({-80.0, 0.0, 0.0, 0.2}, {40.0, 160000, 1e-2}, 5);
    double grid_worst = 0.0;
    for (std::size_t k = 0; k < grid.eps.size() && k < closed.size(); ++k) {
        grid_worst = std::max(grid_worst, std::abs(grid.eps[k] - closed[k]) / closed[k]);
    }
    const bool grid_ok = grid.eps.size() == 5 && grid_worst <= kHulthenGridRel;

    const auto hmd = tra::hmd::bound_spectrum({-80.0, 0.0, 0.0, 0.2}, 100);
    bool hmd_ok = hmd.size() == 6;
    double hmd_worst = 0.0;
    for (std::size_t k = 0; k < hmd.size() && k < 6; ++k) {
        const double rel = std::abs(hmd.levels[k].eps_table - closed[k]) / closed[k];
        hmd_worst = std::max(hmd_worst, rel);
        hmd_ok = hmd_ok && rel <= (k < 5 ? kHulthenDeepRel : kHulthenShallowRel);
    }
    // diagnostic: best single-sample error of the ground level over the window
    const auto samples = tra::hmd::scan_samples({-80.0, 0.0, 0.0, 0.2}, 100, tra::hmd::default_window(100), 1.0);
    double best = INFINITY;
    for (const auto& s : samples) {
        if (!s.levels.empty()) {
            best = std::min(best, std::abs(s.levels[0] - closed[0]) / closed[0]);
        }
    }
    return {closed_ok && grid_ok && hmd_ok,
            fmt("closed form %s; grid vs closed max rel %.1e (tol %.0e) %s; HMD plateau levels %zu (need 6), "
                "%s; best single-nu ground error %.1e",
                closed_ok ? "ok" : "WRONG", grid_worst, kHulthenGridRel, grid_ok ? "ok" : "FAIL", hmd.size(),
                hmd.size() ? fmt("max rel %.1e", hmd_worst).c_str() : "no plateau in the nu window", best)};
}

// ------------------------------------------------------------------ 4

Outcome cross_method() {
    const auto pp = tra::model::map_params(kChoice, kMolecule.quadrupole,
                                           tra::angular::channel_eigenvalues(0, 35.0, 200, 1)[0],
                                           tra::model::ScaleConvention::charge_scaled);
    const auto g = tra::oracle::grid_spectrum(pp, {}, 1);
    const double ref = 458.70220564;
    const double rel = g.eps.empty() ? INFINITY : std::abs(g.eps[0] - ref) / ref;
    return {rel <= kCrossMethodRel,
            fmt("grid -eps = %.9g vs %.8f, rel %.1e (tol %.0e)", g.eps.empty() ? NAN : g.eps[0], ref, rel,
                kCrossMethodRel)};
}

// ------------------------------------------------------------------ 5

Outcome critical_dipole() {
    const double a = tra::angular::critical_dipole(0, 200);
    const double b = tra::angular::critical_dipole(0, 400);
    double prev = a;
    bool monotone = true;
    std::string seq = fmt("%.6f", a);
    for (int ell = 1; ell <= 3; ++ell) {
        const double q = tra::angular::critical_dipole(ell);
        monotone = monotone && q > prev;
        prev = q;
        seq += fmt(", %.6f", q);
    }
    const bool pass = std::abs(a - b) <= kCriticalStability &&
                      std::abs(a - kCriticalExpected) <= kCriticalExpectedTol && monotone;
    return {pass, fmt("Q_crit(0) = %.10f (M=200) vs %.10f (M=400), diff %.1e (tol %.0e); ell 0..3: %s %s", a, b,
                      std::abs(a - b), kCriticalStability, seq.c_str(), monotone ? "increasing" : "NOT increasing")};
}

// ------------------------------------------------------------------ 6

Outcome anion_limit() {
    const std::vector<double> lambdas{0.2, 0.1, 0.05, 0.025};
    // pure-quadrupole ell = 1 channel (E_theta = 1, B = -2) at fixed A
    const auto s = tra::model::anion_limit_study(-20.0, -2.0, 0.021, lambdas);
    bool finite = true;
    std::string es;
    for (const auto& p : s.points) {
        finite = finite && std::isfinite(p.e_hartree);
        es += fmt(" %.4g", p.e_hartree);
    }
    const bool pass = finite && std::abs(s.slope - kSlopeTarget) <= kSlopeTol;
    return {pass, fmt("A=-20, B=-2, Q_q=0.021: E =%s, slope %.4f (target %.0f +- %.2f)", es.c_str(), s.slope,
                      kSlopeTarget, kSlopeTol)};
}

Outcome anion_limit_reference_info() {
    tra::hmd::PlateauOptions opt;
    opt.rel_tol = 1e-4;
    const auto s = tra::model::anion_limit_study(-80.0, 58.673494, 2.1, {0.2, 0.1, 0.05}, 100, opt);
    std::string es;
    for (const auto& p : s.points) {
        es += fmt(" %.6g", p.e_hartree);
    }
    return {true, fmt("info only: A=-80, B=58.673494, Q_q=2.1: E =%s, slope %.3f", es.c_str(), s.slope)};
}

// ------------------------------------------------------------------ 7

const tra::hmd::PotentialParams kRow00{-10.0, 2.0 * 29.3367465196, 6.72, 1.6};

Outcome matrix_symmetry() {
    double worst = 0.0;
    for (double nu : tra::hmd::nu_grid({-202.5, -220.5}, 1.0)) {
        const auto m = tra::hmd::build_matrices(kRow00, {100, 0.0, nu, kRow00.lambda});
        worst = std::max(worst, (m.h2 - m.h2.transpose()).cwiseAbs().maxCoeff() / m.h2.cwiseAbs().maxCoeff());
        worst = std::max(worst,
                         (m.omega - m.omega.transpose()).cwiseAbs().maxCoeff() / m.omega.cwiseAbs().maxCoeff());
    }
    return {worst <= kSymmetryTol, fmt("max relative asymmetry %.1e (tol %.0e)", worst, kSymmetryTol)};
}

Outcome overlap_positive() {
    double min_ev = INFINITY;
    for (double nu : tra::hmd::nu_grid({-202.5, -220.5}, 1.0)) {
        const auto m = tra::hmd::build_matrices(kRow00, {100, 0.0, nu, kRow00.lambda});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.omega, Eigen::EigenvaluesOnly);
        min_ev = std::min(min_ev, es.eigenvalues().minCoeff());
    }
    return {min_ev > 0.0, fmt("smallest overlap eigenvalue %.3e over 19 nu samples", min_ev)};
}

Outcome nodes_above_one() {
    double min_node = INFINITY;
    for (double nu : tra::hmd::nu_grid({-202.5, -220.5}, 1.0)) {
        min_node = std::min(min_node, tra::basis::basis_rule({100, 0.0, nu, 1.0}).min_node());
    }
    return {min_node > 1.0, fmt("smallest Gauss node %.6g", min_node)};
}

Outcome lambda_orthogonality() {
    double worst = 0.0;
    for (double nu : {-202.5, -211.5, -220.5}) {
        const auto rule = tra::basis::basis_rule({100, 0.0, nu, 1.0});
        const Eigen::MatrixXd g = rule.Lambda.transpose() * rule.Lambda;
        worst = std::max(worst, (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
    }
    return {worst <= kOrthogonalityTol, fmt("max |Lambda^T Lambda - I| = %.1e (tol %.0e)", worst, kOrthogonalityTol)};
}

Outcome recursion_residuals() {
    const auto p = tra::hpoly::basis_params(-1.0, -800.0, 5.0, 3.0);
    const int n_max = 15;
    const auto h = tra::hpoly::hpoly_sequence(p, n_max);
    double worst = 0.0;
    for (int n = 0; n < n_max; ++n) {
        const auto i = static_cast<std::size_t>(n);
        const double dm = n > 0 ? tra::basis::coupling_coefficient(n - 1, p.mu, p.nu) : 0.0;
        const double dn = tra::basis::coupling_coefficient(n, p.mu, p.nu);
        const double terms[] = {p.cosh_omega * h[i], dm * (n > 0 ? h[i - 1] : 0.0), dn * h[i + 1],
                                tra::hpoly::recursion_diagonal(p, n) * h[i]};
        double scale = 0.0;
        for (double t : terms) {
            scale = std::max(scale, std::abs(t));
        }
        worst = std::max(worst, std::abs(terms[0] - terms[1] - terms[2] - terms[3]) / scale);
    }
    return {worst <= kRecursionTol, fmt("max relative residual %.1e over n < %d (tol %.0e)", worst, n_max,
                                        kRecursionTol)};
}

Outcome coordinate_roundtrip() {
    double worst = 0.0;
    for (double lam : {0.2, 1.6}) {
        for (double s = 1e-4; s <= 10.0; s *= 1.7) {
            const double r = s / lam;
            worst = std::max(worst, std::abs(tra::hpoly::r_of_x(lam, tra::hpoly::x_of_r(lam, r)) - r) / r);
        }
    }
    return {worst <= kRoundTripTol, fmt("max relative error %.1e for lambda r in [1e-4, 10] (tol %.0e)", worst,
                                        kRoundTripTol)};
}

Outcome near_origin() {
    double prev = 0.0;
    double worst_gain = INFINITY;
    std::string errs;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double full = tra::hpoly::eval_potential(kRow00, r);
        const double err = std::abs(full - tra::hpoly::near_origin_potential(kRow00, r)) / std::abs(full);
        if (prev > 0.0) {
            worst_gain = std::min(worst_gain, prev / err);
        }
        prev = err;
        errs += fmt(" %.1e", err);
    }
    return {worst_gain >= kDecadeGain,
            fmt("relative error at r = 1e-1..1e-4:%s, smallest gain per decade %.3g (need %.0f)", errs.c_str(),
                worst_gain, kDecadeGain)};
}

Outcome lambda_scaling() {
    const auto a = tra::hmd::bound_spectrum(kRow00);
    double worst = 0.0;
    bool same_count = true;
    for (double lam : {0.2, 0.7, 3.0}) {
        auto p = kRow00;
        p.lambda = lam;
        const auto b = tra::hmd::bound_spectrum(p);
        same_count = same_count && a.size() == b.size();
        for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
            worst = std::max(worst, std::abs(a.levels[k].eps_table - b.levels[k].eps_table) / a.levels[k].eps_table);
        }
    }
    return {same_count && worst <= kScalingTol,
            fmt("eps at fixed (A,B,C) for lambda in {1.6, 0.2, 0.7, 3}: max rel change %.1e (tol %.0e)", worst,
                kScalingTol)};
}

Outcome plateau_spread() {
    tra::model::SolverConfig solver;
    solver.convention = tra::model::ScaleConvention::charge_scaled;
    const auto rep = tra::model::run_procedure(kMolecule, kChoice, solver);
    double worst = 0.0;
    int deep = 0;
    for (const auto& row : rep.rows) {
        for (const auto& l : row.spectrum.levels) {
            if (l.eps_table >= kDeepLevel) {
                worst = std::max(worst, l.spread / l.eps_table);
                ++deep;
            }
        }
    }
    return {deep > 0 && worst < kPlateauSpreadTol,
            fmt("%d deep levels (-eps >= %.0f): max spread/eps %.1e (tol %.0e)", deep, kDeepLevel, worst,
                kPlateauSpreadTol)};
}

struct Criterion {
    std::string id;
    std::string name;
    std::function<Outcome()> run;
    bool informational = false;
};

std::vector<Criterion> criteria() {
    return {
        {"1", "angular regression (Q_d = 35)", angular_regression},
        {"2", "reference spectrum regression (N = 100)", spectrum_regression},
        {"3", "Hulthen oracle equivalence (B = C = 0)", hulthen_equivalence},
        {"4", "cross-method check, grid vs row (0,0) ground", cross_method},
        {"5", "critical dipole, M-doubling stability and ell order", critical_dipole},
        {"6", "anion-limit slope of |E_ground| vs lambda", anion_limit},
        {"6i", "anion-limit, reference-channel constants", anion_limit_reference_info, true},
        {"7a", "property: matrix symmetry", matrix_symmetry},
        {"7b", "property: overlap positive definite", overlap_positive},
        {"7c", "property: quadrature nodes > 1", nodes_above_one},
        {"7d", "property: Lambda orthogonality", lambda_orthogonality},
        {"7e", "property: H-polynomial recursion residuals", recursion_residuals},
        {"7f", "property: x <-> r round trip", coordinate_roundtrip},
        {"7g", "property: near-origin potential agreement", near_origin},
        {"7h", "property: lambda-scaling invariance of eps", lambda_scaling},
        {"7i", "property: plateau spread of deep levels", plateau_spread},
    };
}

} // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance [--only ID]\n");
            return 2;
        }
    }
    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria()) {
        if (!only.empty() && c.id != only && c.id.rfind(only, 0) != 0) {
            continue;
        }
        ++ran;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const char* tag = c.informational ? "INFO" : (o.pass ? "PASS" : "FAIL");
        std::printf("[%s] %-3s %s: %s\n", tag, c.id.c_str(), c.name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        if (!c.informational && !o.pass) {
            ++failures;
        }
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion matches '%s'\n", only.c_str());
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
