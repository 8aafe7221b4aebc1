#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mic/checkerboard.hpp"

namespace mic {

/// A bivariate point set on (0,1)^2.  Produced either by the mid-rank
/// transform of observed data (then each coordinate, sorted, is
/// (k - 0.5)/N) or by sampling a copula (raw uniforms).
struct PseudoObservations {
    std::vector<double> u;
    std::vector<double> v;
    std::size_t size() const { return u.size(); }
};

/// Mid-ranks (rank - 0.5)/N, ties resolved by average rank.
std::vector<double> mid_ranks(const std::vector<double>& values);

/// Rank-transforms both coordinates.
PseudoObservations rank_transform(const PseudoObservations& obs);

/// Draws `count` points: cell (i, j) with probability p_ij, then a
/// uniform position inside the cell.  Deterministic given the seed.
///
/// Random source: std::mt19937_64 seeded with `seed`; each uniform is
/// (x >> 11) * 2^-53 from one raw 64-bit output, consumed in the order
/// cell-selector, u-offset, v-offset per point.  This keeps sample sets
/// reproducible across platforms and languages.
PseudoObservations sample_copula(const CheckerboardCopula& p, std::size_t count,
                                 std::uint64_t seed);

/// Kendall's tau-a: (concordant - discordant) / C(N,2), ties counted as
/// neither.  O(N log N).
double empirical_tau(const PseudoObservations& obs);

/// Spearman's rho: linear correlation of the mid-ranks of u and v.
double empirical_rho(const PseudoObservations& obs);

/// Empirical tail dependence at level u% in (0, 50):
///   lower = #(u < q and v < q) / #(u < q),   q = u_percent/100,
///   upper analogously with coordinates above 1 - q (strict inequalities).
/// Throws ValidationError when a conditioning set is empty.
struct TailDependence {
    double lower = 0.0;
    double upper = 0.0;
};
TailDependence tail_dependence(const PseudoObservations& obs, double u_percent);

struct DependenceSummary {
    double tau = 0.0;
    double rho = 0.0;
    double lower_tail_5 = 0.0;
    double upper_tail_5 = 0.0;
    double lower_tail_1 = 0.0;
    double upper_tail_1 = 0.0;
};

/// The six statistics above in one pass.
DependenceSummary summarize_dependence(const PseudoObservations& obs);

/// Cell-frequency histogram of the point set scaled to a checkerboard
/// copula by iterative proportional fitting of the row/column sums
/// (at most `max_iters` passes to `tol`).  Requires size() >= n^2;
/// throws ConvergenceError if the scaling stalls.
CheckerboardCopula empirical_checkerboard(const PseudoObservations& obs, int n,
                                          double tol = 1e-10, int max_iters = 500);

/// Rescales a non-negative matrix to row/column sums 1/n (Sinkhorn / IPF).
/// Shared by empirical_checkerboard and test fixtures.
Eigen::MatrixXd fit_margins(Eigen::MatrixXd m, double tol = 1e-10, int max_iters = 500);

// Two-column CSV (u,v) with header.
void write_points_csv(const PseudoObservations& obs, const std::string& path);
PseudoObservations read_points_csv(const std::string& path);

}  // namespace mic
