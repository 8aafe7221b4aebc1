#include "mic/structural.hpp"

#include <string>

namespace mic {

Eigen::MatrixXd xi_matrix(int n) {
    Eigen::MatrixXd xi(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            xi(i, j) = (i == j) ? 1.0 : (i > j ? 2.0 : 0.0);
        }
    }
    return xi;
}

Eigen::MatrixXd omega_matrix(int n) {
    Eigen::MatrixXd omega(n, n);
    const double inv = 1.0 / (static_cast<double>(n) * n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            omega(i - 1, j - 1) = inv * (n - i + 0.5) * (n - j + 0.5);
        }
    }
    return omega;
}

Eigen::MatrixXd v_matrix(int n) {
    return xi_matrix(n) - Eigen::MatrixXd::Ones(n, n);
}

Eigen::MatrixXd w_matrix(int n) {
    if (n > 32) {
        throw ValidationError("W has n^4 entries and is not materialized for n > 32 (n = " +
                              std::to_string(n) + ")");
    }
    const Eigen::MatrixXd v = v_matrix(n);
    Eigen::MatrixXd w(n * n, n * n);
    // -(V (x) V) + J with row-major cell indexing (i*n + j).
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            w.block(i * n, k * n, n, n) = -v(i, k) * v + Eigen::MatrixXd::Ones(n, n);
    return w;
}

Eigen::MatrixXd a_matrix(int n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n - 1);
    for (int k = 0; k < n - 1; ++k) {
        a(k, k) = 1.0;
        a(k + 1, k) = -1.0;
    }
    return a;
}

Eigen::MatrixXd a_dagger_matrix(int n) {
    // Row i (1-based) is (n-i, ..., n-i, -i, ..., -i)/n with i leading entries.
    Eigen::MatrixXd ad(n - 1, n);
    for (int i = 1; i <= n - 1; ++i) {
        for (int j = 1; j <= n; ++j) {
            ad(i - 1, j - 1) = (j <= i ? static_cast<double>(n - i) : -static_cast<double>(i)) / n;
        }
    }
    return ad;
}

Eigen::MatrixXd m_matrix(int k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i + 1 < k; ++i) {
        m(i + 1, i) = 1.0;
        m(i, i + 1) = -1.0;
    }
    return m;
}

Eigen::MatrixXd x_matrix(int n) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            x(i, j) = (2.0 * (j - i) - n) / n;
            x(j, i) = -x(i, j);
        }
    }
    return x;
}

Eigen::MatrixXd w_apply(const CheckerboardCopula& p) {
    const Eigen::MatrixXd v = v_matrix(p.size());
    return (v * p.matrix() * v).array() + 1.0;
}

StructuralMatrices StructuralMatrices::build(int n) {
    if (n < 2) throw ValidationError("grid size must be at least 2");
    StructuralMatrices s;
    s.n = n;
    s.xi = xi_matrix(n);
    s.omega = omega_matrix(n);
    s.v = v_matrix(n);
    s.a = a_matrix(n);
    s.a_dagger = a_dagger_matrix(n);
    s.m = m_matrix(n - 1);
    s.x = x_matrix(n);
    return s;
}

}  // namespace mic
