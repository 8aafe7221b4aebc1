#include "mic/basis.hpp"

#include <sstream>

#include "mic/structural.hpp"

namespace mic {

BasisCoordinates to_coordinates(const CheckerboardCopula& p) {
    const int n = p.size();
    const Eigen::MatrixXd ad = a_dagger_matrix(n);
    BasisCoordinates out;
    out.n = n;
    // A^+ U (A^+)^T vanishes (A^+ has zero row sums), so P - U can be P.
    out.c = ad * p.matrix() * ad.transpose();
    return out;
}

CheckerboardCopula to_copula(const BasisCoordinates& coords) {
    const int n = coords.n;
    if (n < 2 || coords.c.rows() != n - 1 || coords.c.cols() != n - 1) {
        throw ValidationError("coordinate array must be (n-1)x(n-1) with n >= 2");
    }
    const Eigen::MatrixXd a = a_matrix(n);
    Eigen::MatrixXd m = a * coords.c * a.transpose();
    m.array() += 1.0 / (static_cast<double>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (m(i, j) < 0.0) {
                std::ostringstream os;
                os << "coordinates drive entry (" << i << "," << j << ") to " << m(i, j);
                throw ValidationError(os.str());
            }
        }
    }
    // Row/column sums are exact by construction of the basis; validation
    // only guards against accumulated rounding.
    return CheckerboardCopula::from_matrix(std::move(m));
}

}  // namespace mic
