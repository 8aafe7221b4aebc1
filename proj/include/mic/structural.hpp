#pragma once

#include <Eigen/Dense>

#include "mic/checkerboard.hpp"

namespace mic {

// The fixed matrices behind the rank-correlation formulas and the
// second-order analysis.  All are pure functions of the grid size.

/// Lower-triangular concordance matrix: 1 on the diagonal, 2 below, 0 above.
Eigen::MatrixXd xi_matrix(int n);

/// omega_ij = (n - i + 1/2)(n - j + 1/2) / n^2  (1-based i, j).
Eigen::MatrixXd omega_matrix(int n);

/// V = Xi - J, skew-symmetric.
Eigen::MatrixXd v_matrix(int n);

/// The n^2 x n^2 quadratic form of Kendall's tau, -(V (x) V) + J.
/// Materialized only for small grids; refuses n > 32.
Eigen::MatrixXd w_matrix(int n);

/// Difference operator, n x (n-1): column k is e_k - e_{k+1}.
Eigen::MatrixXd a_matrix(int n);

/// Left inverse of A with zero row sums: A^+ A = I_{n-1},
/// A A^+ = I_n - J/n.
Eigen::MatrixXd a_dagger_matrix(int n);

/// k x k Toeplitz(1, 0, -1): +1 on the subdiagonal, -1 on the
/// superdiagonal.  Used at k = n-1, where -(M (x) M) equals
/// (A (x) A)^T W (A (x) A).
Eigen::MatrixXd m_matrix(int k);

/// n x n skew Toeplitz form of (A^+)^T M A^+: entry (i, j) with j > i
/// equals (2(j-i) - n)/n.
Eigen::MatrixXd x_matrix(int n);

/// (W p) reshaped to n x n, computed without materializing W:
/// (W p)_{ij} = 1 + (V P V)_{ij}.
Eigen::MatrixXd w_apply(const CheckerboardCopula& p);

/// Bundle of the structural matrices for one grid size.
struct StructuralMatrices {
    int n;
    Eigen::MatrixXd xi, omega, v, a, a_dagger, m, x;

    static StructuralMatrices build(int n);

    /// Materializes W; same n <= 32 guard as w_matrix.
    Eigen::MatrixXd w() const { return w_matrix(n); }
};

}  // namespace mic
