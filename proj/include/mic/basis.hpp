#pragma once

#include <Eigen/Dense>

#include "mic/checkerboard.hpp"

namespace mic {

/// Coordinates of a copula in the mass-transfer basis {T^{ij}}:
/// P = U + sum_ij c(i,j) T^{ij}, where U is the uniform copula and T^{ij}
/// adds the pattern [[1,-1],[-1,1]] at window (i, j).  The coordinates of
/// a valid copula are unique; arbitrary coordinates produce a valid copula
/// only when every resulting entry stays non-negative.
struct BasisCoordinates {
    int n = 0;                // grid size of the copula, coefficients are (n-1)x(n-1)
    Eigen::MatrixXd c;
};

/// c = A^+ (P - U) (A^+)^T.  Exact inverse of to_copula.
BasisCoordinates to_coordinates(const CheckerboardCopula& p);

/// U + A c A^T.  Throws ValidationError naming the first negative entry.
CheckerboardCopula to_copula(const BasisCoordinates& coords);

}  // namespace mic
