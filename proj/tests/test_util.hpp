#pragma once

#include <cstdint>
#include <random>

#include "mic/checkerboard.hpp"
#include "mic/stats.hpp"

namespace mic::test {

inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Strictly positive random copula: exponentiated noise rescaled to the
// doubly stochastic margins.
inline CheckerboardCopula random_positive_copula(int n, std::mt19937_64& rng) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = 0.1 + unit_double(rng);
    m = fit_margins(std::move(m), 1e-14, 5000);
    return CheckerboardCopula::from_matrix(std::move(m), 1e-11);
}

}  // namespace mic::test
