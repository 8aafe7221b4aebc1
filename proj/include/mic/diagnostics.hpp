#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mic/checkerboard.hpp"

namespace mic {

/// Least-squares fit of the stationarity condition
///   log p_ij + 1 + lambda (W p)_ij - alpha_j - beta_i = 0
/// over all n^2 cells, gauge-fixed by sum(alpha) = 0.
struct StationarityFit {
    double lambda = 0.0;
    Eigen::VectorXd alpha;       // column multipliers
    Eigen::VectorXd beta;        // row multipliers
    double residual_norm = 0.0;  // RMS of the cell equations at the fit
    bool lambda_identifiable = true;
};

/// Requires strictly positive entries; throws ValidationError naming the
/// first zero cell otherwise.
StationarityFit stationarity_fit(const CheckerboardCopula& p);

/// Definiteness of D1 + lambda D2 on the margin-preserving subspace,
/// where D1 = (A (x) A)^T Diag(1/p) (A (x) A) and D2 = -(M (x) M).
struct DefinitenessReport {
    double lambda_used = 0.0;
    double min_eigenvalue = 0.0;     // of D1 + lambda D2
    bool positive_definite = false;
    double max_abs_rayleigh = 0.0;   // max |v^T D2 v / v^T D1 v| over v != 0
    double gershgorin_bound = 0.0;   // block row-sum bound dominating the above
};

/// Dense eigensolve; guarded to n <= 30.  Requires strictly positive entries.
DefinitenessReport hessian_definiteness(const CheckerboardCopula& p, double lambda);

enum class Tp2Mode { adjacent, all_pairs };

struct Tp2Report {
    double min_minor = 0.0;
    int i = 0, j = 0, i2 = 0, j2 = 0;  // rows i < i2 and columns j < j2 of the minimal minor
    bool holds = false;                // min_minor >= -tolerance
    double tolerance = 0.0;
    long minors_checked = 0;
};

/// Checks 2x2 minors taken with increasing row and column indices.
/// adjacent mode restricts to contiguous windows (i2 = i+1, j2 = j+1),
/// which implies the full property for strictly positive matrices;
/// all_pairs checks every minor.  Violations are findings, not errors.
Tp2Report tp2_check(const CheckerboardCopula& p, Tp2Mode mode, double tolerance = 1e-12);

struct WindowAudit {
    int i = 0, j = 0;
    double log_odds = 0.0;
    double eta = 0.0;
    double pseudo_log_odds = 0.0;
    double minor = 0.0;
};

struct RatioConstancyReport {
    double mean_ratio = 0.0;
    double max_deviation = 0.0;  // max |ratio - mean_ratio| over windows
    std::vector<WindowAudit> windows;
};

/// Statistics of the (pseudo) log odds ratio over all (n-1)^2 windows.
/// Requires strictly positive entries.
RatioConstancyReport ratio_constancy(const CheckerboardCopula& p, OddsKind kind);

/// Writes the per-window table as CSV with columns
/// i,j,log_odds,eta,pseudo_log_odds,minor.
void write_window_table_csv(const RatioConstancyReport& report, const std::string& path);

}  // namespace mic
