#pragma once

#include <cstdint>
#include <string>

#include "mic/checkerboard.hpp"

namespace mic {

enum class SweepOrder { row_major, random_permutation };
enum class Family { mick, mics };
enum class Measure { kendall, spearman };

struct SolverConfig {
    double ratio = 0.0;       // target pseudo log odds ratio (mick) or log odds ratio (mics)
    double tol = 1e-10;       // max window deviation from the target ratio
    int max_sweeps = 10000;
    SweepOrder sweep_order = SweepOrder::row_major;
    std::uint64_t seed = 0;   // only used by random_permutation sweeps
};

struct SolveReport {
    CheckerboardCopula copula;
    int sweeps_used = 0;
    double final_residual = 0.0;  // max over windows of |achieved ratio - target|
    bool converged = false;
    double tau = 0.0;
    double rho = 0.0;
    double information = 0.0;
    double ratio = 0.0;           // the target ratio that was solved for
    long clamped_updates = 0;     // window updates cut short to keep entries positive

    std::string to_text() const;  // line-oriented key: value block
};

/// Root of (a+d)(d+d) = K (b-d)(c-d) that keeps all four updated window
/// entries non-negative, where K = exp(ratio*eta) for the pseudo kind and
/// exp(ratio) for the plain kind (a, d diagonal; b, c anti-diagonal).
/// Exactly one admissible root exists for positive windows; throws
/// ValidationError (carrying the window state) when none does.
double window_delta(double a, double b, double c, double d, double ratio, OddsKind kind);

/// Greedy sweep solver: starting from the uniform copula, repeatedly
/// re-solves 2x2 windows until the pseudo log odds ratio is constant at
/// cfg.ratio across all windows (max deviation < cfg.tol) or max_sweeps
/// is exhausted.  Requires cfg.ratio >= 0; negative dependence is reached
/// by reflecting the result (see reflect_columns).
SolveReport solve_mick(int n, const SolverConfig& cfg);

/// Same sweep with the plain log odds ratio as the window target.
SolveReport solve_mics(int n, const SolverConfig& cfg);

/// Reverses the column order.  Negates both tau and rho.
CheckerboardCopula reflect_columns(const CheckerboardCopula& p);

struct CalibrationResult {
    double ratio = 0.0;                 // ratio of the positive-dependence solve
    double achieved_correlation = 0.0;  // signed, on the (possibly reflected) copula
    double target = 0.0;
    int iterations = 0;                 // solver invocations spent bracketing + bisecting
};

/// Finds the ratio whose solved copula attains `target` in the chosen
/// measure, by bracket doubling and bisection (the measure is monotone in
/// the ratio).  |target| must be strictly below the attainable bound:
/// 1 - 1/n for Kendall, 1 - 1/n^2 for Spearman.  Negative targets are
/// calibrated on |target|; apply reflect_columns to the solved copula.
CalibrationResult calibrate(int n, double target, Measure measure, Family family,
                            const SolverConfig& base = SolverConfig{},
                            double calibration_tol = 1e-4);

/// Convenience: calibrate, solve at the found ratio, and reflect when the
/// target is negative.  The report's tau/rho/information describe the
/// returned (possibly reflected) copula.
SolveReport solve_calibrated(int n, double target, Measure measure, Family family,
                             const SolverConfig& base = SolverConfig{},
                             double calibration_tol = 1e-4);

struct BruteForceResult {
    CheckerboardCopula copula;
    double tau = 0.0;
    double information = 0.0;
    long feasible_in_band = 0;  // grid points inspected inside the tau band
};

/// Independent oracle for n in {2, 3}: exhaustively scans the basis
/// coordinates of all valid copulas on a uniform grid (`resolution` steps
/// per axis) and returns the minimum-information point whose Kendall tau
/// lies within `band` of mu.  The default band is about a third of the
/// per-grid-step tau change at resolution 200, thick enough to hug the
/// constraint surface without admitting materially easier points.  Throws
/// ValidationError when the band contains no feasible grid point.
BruteForceResult brute_force_mick(int n, double mu, int resolution, double band = 5e-4);

}  // namespace mic
