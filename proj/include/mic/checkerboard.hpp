#pragma once

#include <Eigen/Dense>
#include <string>

#include "mic/errors.hpp"

namespace mic {

// Row/column-sum tolerance for values constructed in memory.
inline constexpr double kInternalTol = 1e-12;
// Looser tolerance for matrices read from files (serialization noise).
inline constexpr double kFileTol = 1e-9;
// Entries below this are treated as exact zero in p*log(p).
inline constexpr double kZeroFloor = 1e-300;

/// An n x n checkerboard copula: a non-negative matrix whose row and
/// column sums are all 1/n.  Immutable after construction; the class
/// validates the invariants once and every operation may rely on them.
///
/// Indexing is 0-based.  Entry (i, j) carries the mass of the cell
/// (i/n, (i+1)/n) x (j/n, (j+1)/n) on the unit square, so the first
/// index moves along the u (x) axis and the second along v (y).
class CheckerboardCopula {
public:
    static CheckerboardCopula uniform(int n);
    static CheckerboardCopula comonotone(int n);
    static CheckerboardCopula anti_comonotone(int n);

    /// Validates and wraps an arbitrary matrix.  Throws ValidationError
    /// if it is not square, has a negative entry, or a row/column sum
    /// deviates from 1/n by more than `tol`.
    static CheckerboardCopula from_matrix(Eigen::MatrixXd m, double tol = kInternalTol);

    int size() const { return static_cast<int>(p_.rows()); }
    const Eigen::MatrixXd& matrix() const { return p_; }
    double operator()(int i, int j) const { return p_(i, j); }

    /// True if every entry is strictly positive.
    bool strictly_positive() const;

private:
    explicit CheckerboardCopula(Eigen::MatrixXd p) : p_(std::move(p)) {}
    Eigen::MatrixXd p_;
};

/// Kendall's tau, 1 - tr(Xi P Xi P^T).  Quadratic in P.
double kendall_tau(const CheckerboardCopula& p);

/// Spearman's rho, 12 (tr(Omega P) - 1/4).  Linear in P.
double spearman_rho(const CheckerboardCopula& p);

/// Sum of p*log(p) over all cells (negative Shannon entropy), with
/// 0*log(0) = 0.  Ranges over [-2 log n, -log n].
double information(const CheckerboardCopula& p);

enum class OddsKind { pseudo, plain };

/// Local dependence of the 2x2 window anchored at (i, j), 0 <= i,j <= n-2.
struct LocalOdds {
    double log_odds;         // log(p_ij p_{i+1,j+1} / (p_{i+1,j} p_{i,j+1}))
    double pseudo_log_odds;  // log_odds / eta
    double eta;              // total window mass
    bool defined;            // false when a window entry is zero
};

LocalOdds local_odds(const CheckerboardCopula& p, int i, int j);

/// Returns P + eps * T^{ij}: moves eps from the anti-diagonal pair of the
/// window at (i, j) to its diagonal pair.  Row and column sums are
/// unchanged.  Throws ValidationError if an entry would become negative.
CheckerboardCopula mass_transfer(const CheckerboardCopula& p, int i, int j, double eps);

// Plain CSV matrix files: n rows by n columns of probabilities, no header.
CheckerboardCopula read_matrix_csv(const std::string& path);
void write_matrix_csv(const CheckerboardCopula& p, const std::string& path);

}  // namespace mic
