#include "mic/checkerboard.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mic/structural.hpp"

namespace mic {

namespace {

void check_size(int n) {
    if (n < 2) {
        throw ValidationError("grid size must be at least 2, got " + std::to_string(n));
    }
}

}  // namespace

CheckerboardCopula CheckerboardCopula::uniform(int n) {
    check_size(n);
    return CheckerboardCopula(
        Eigen::MatrixXd::Constant(n, n, 1.0 / (static_cast<double>(n) * n)));
}

CheckerboardCopula CheckerboardCopula::comonotone(int n) {
    check_size(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m.diagonal().setConstant(1.0 / n);
    return CheckerboardCopula(std::move(m));
}

CheckerboardCopula CheckerboardCopula::anti_comonotone(int n) {
    check_size(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, n - 1 - i) = 1.0 / n;
    return CheckerboardCopula(std::move(m));
}

CheckerboardCopula CheckerboardCopula::from_matrix(Eigen::MatrixXd m, double tol) {
    if (m.rows() != m.cols()) {
        throw ValidationError("checkerboard matrix must be square, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    const int n = static_cast<int>(m.rows());
    check_size(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!(m(i, j) >= 0.0)) {  // also catches NaN
                std::ostringstream os;
                os << "entry (" << i << "," << j << ") = " << m(i, j) << " is negative";
                throw ValidationError(os.str());
            }
        }
    }
    const double target = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const double rs = m.row(i).sum();
        if (std::abs(rs - target) > tol) {
            std::ostringstream os;
            os << "row " << i << " sums to " << std::setprecision(17) << rs
               << ", expected " << target << " (tol " << tol << ")";
            throw ValidationError(os.str());
        }
    }
    for (int j = 0; j < n; ++j) {
        const double cs = m.col(j).sum();
        if (std::abs(cs - target) > tol) {
            std::ostringstream os;
            os << "column " << j << " sums to " << std::setprecision(17) << cs
               << ", expected " << target << " (tol " << tol << ")";
            throw ValidationError(os.str());
        }
    }
    return CheckerboardCopula(std::move(m));
}

bool CheckerboardCopula::strictly_positive() const {
    return (p_.array() > 0.0).all();
}

double kendall_tau(const CheckerboardCopula& p) {
    // 1 - tr(Xi P Xi P^T); O(n^3), never touches the n^4-entry form of W.
    const Eigen::MatrixXd xi = xi_matrix(p.size());
    return 1.0 - (xi * p.matrix() * xi * p.matrix().transpose()).trace();
}

double spearman_rho(const CheckerboardCopula& p) {
    const Eigen::MatrixXd omega = omega_matrix(p.size());
    return 12.0 * ((omega * p.matrix()).trace() - 0.25);
}

double information(const CheckerboardCopula& p) {
    double sum = 0.0;
    const Eigen::MatrixXd& m = p.matrix();
    for (int i = 0; i < p.size(); ++i) {
        for (int j = 0; j < p.size(); ++j) {
            const double v = m(i, j);
            if (v > kZeroFloor) sum += v * std::log(v);
        }
    }
    return sum;
}

LocalOdds local_odds(const CheckerboardCopula& p, int i, int j) {
    const int n = p.size();
    if (i < 0 || j < 0 || i > n - 2 || j > n - 2) {
        throw ValidationError("window (" + std::to_string(i) + "," + std::to_string(j) +
                              ") out of range for n = " + std::to_string(n));
    }
    const double a = p(i, j), b = p(i + 1, j), c = p(i, j + 1), d = p(i + 1, j + 1);
    LocalOdds out;
    out.eta = a + b + c + d;
    out.defined = a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0;
    if (out.defined) {
        out.log_odds = std::log(a) + std::log(d) - std::log(b) - std::log(c);
        out.pseudo_log_odds = out.log_odds / out.eta;
    } else {
        out.log_odds = std::numeric_limits<double>::quiet_NaN();
        out.pseudo_log_odds = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

CheckerboardCopula mass_transfer(const CheckerboardCopula& p, int i, int j, double eps) {
    const int n = p.size();
    if (i < 0 || j < 0 || i > n - 2 || j > n - 2) {
        throw ValidationError("window (" + std::to_string(i) + "," + std::to_string(j) +
                              ") out of range for n = " + std::to_string(n));
    }
    Eigen::MatrixXd m = p.matrix();
    m(i, j) += eps;
    m(i + 1, j + 1) += eps;
    m(i + 1, j) -= eps;
    m(i, j + 1) -= eps;
    for (const auto& [r, c] : {std::pair{i, j}, {i + 1, j + 1}, {i + 1, j}, {i, j + 1}}) {
        if (m(r, c) < 0.0) {
            std::ostringstream os;
            os << "transfer of " << eps << " at window (" << i << "," << j
               << ") drives entry (" << r << "," << c << ") to " << m(r, c);
            throw ValidationError(os.str());
        }
    }
    return CheckerboardCopula::from_matrix(std::move(m));
}

CheckerboardCopula read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size() && cell.find_first_not_of(" \t\r", pos) != std::string::npos) {
                    throw std::invalid_argument(cell);
                }
            } catch (const std::exception&) {
                throw IoError("unparsable value '" + cell + "' in " + path);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty matrix file " + path);
    const std::size_t n = rows.size();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw IoError("row " + std::to_string(i) + " of " + path + " has " +
                          std::to_string(rows[i].size()) + " columns, expected " +
                          std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return CheckerboardCopula::from_matrix(std::move(m), kFileTol);
}

void write_matrix_csv(const CheckerboardCopula& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << std::setprecision(17);
    for (int i = 0; i < p.size(); ++i) {
        for (int j = 0; j < p.size(); ++j) {
            if (j) out << ',';
            out << p(i, j);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace mic
