#include "mic/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mic/structural.hpp"

namespace mic {

namespace {

void require_positive(const CheckerboardCopula& p, const char* what) {
    for (int i = 0; i < p.size(); ++i) {
        for (int j = 0; j < p.size(); ++j) {
            if (!(p(i, j) > 0.0)) {
                std::ostringstream os;
                os << what << " requires strictly positive entries; cell (" << i << "," << j
                   << ") = " << p(i, j);
                throw ValidationError(os.str());
            }
        }
    }
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

StationarityFit stationarity_fit(const CheckerboardCopula& p) {
    require_positive(p, "stationarity fit");
    const int n = p.size();
    const Eigen::MatrixXd wp = w_apply(p);

    // Unknowns: (lambda, alpha_0..alpha_{n-1}, beta_0..beta_{n-1}).
    // Cell rows: lambda*(Wp)_ij - alpha_j - beta_i = -(1 + log p_ij);
    // one gauge row pins sum(alpha) = 0.
    const int rows = n * n + 1;
    const int cols = 2 * n + 1;
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int r = i * n + j;
            design(r, 0) = wp(i, j);
            design(r, 1 + j) = -1.0;
            design(r, 1 + n + i) = -1.0;
            rhs(r) = -(1.0 + std::log(p(i, j)));
        }
    }
    design.row(n * n).segment(1, n).setOnes();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd x = svd.solve(rhs);

    StationarityFit fit;
    fit.lambda = x(0);
    fit.alpha = x.segment(1, n);
    fit.beta = x.segment(1 + n, n);
    fit.lambda_identifiable =
        svd.singularValues()(cols - 1) > 1e-10 * svd.singularValues()(0);
    const Eigen::VectorXd cell_residuals = (design * x - rhs).head(n * n);
    fit.residual_norm = std::sqrt(cell_residuals.squaredNorm() / (n * n));
    return fit;
}

DefinitenessReport hessian_definiteness(const CheckerboardCopula& p, double lambda) {
    require_positive(p, "Hessian definiteness");
    const int n = p.size();
    if (n > 30) {
        throw ValidationError("dense definiteness check is guarded to n <= 30, got " +
                              std::to_string(n));
    }

    const Eigen::MatrixXd aa = kron(a_matrix(n), a_matrix(n));  // n^2 x (n-1)^2
    Eigen::VectorXd inv_p(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv_p(i * n + j) = 1.0 / p(i, j);
    const Eigen::MatrixXd d1 = aa.transpose() * inv_p.asDiagonal() * aa;
    const Eigen::MatrixXd m = m_matrix(n - 1);
    const Eigen::MatrixXd d2 = -kron(m, m);

    DefinitenessReport rep;
    rep.lambda_used = lambda;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d1 + lambda * d2);
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.positive_definite = rep.min_eigenvalue > 0.0;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(d2, d1);
    rep.max_abs_rayleigh = ges.eigenvalues().cwiseAbs().maxCoeff();

    // Block Gershgorin row sums of Diag(sqrt p)(X (x) X)Diag(sqrt p): the
    // (i,j) block has Frobenius norm |X_ij| sqrt(P_i. S P_j.^T) with
    // S = X elementwise squared.
    const Eigen::MatrixXd x = x_matrix(n);
    const Eigen::MatrixXd s = x.array().square();
    const Eigen::MatrixXd q = p.matrix() * s * p.matrix().transpose();
    double bound = 0.0;
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            row_sum += std::abs(x(i, j)) * std::sqrt(std::max(q(i, j), 0.0));
        }
        bound = std::max(bound, row_sum);
    }
    rep.gershgorin_bound = bound;
    return rep;
}

Tp2Report tp2_check(const CheckerboardCopula& p, Tp2Mode mode, double tolerance) {
    const int n = p.size();
    Tp2Report rep;
    rep.tolerance = tolerance;
    rep.min_minor = std::numeric_limits<double>::infinity();
    auto consider = [&](int i, int j, int i2, int j2) {
        const double minor = p(i, j) * p(i2, j2) - p(i2, j) * p(i, j2);
        ++rep.minors_checked;
        if (minor < rep.min_minor) {
            rep.min_minor = minor;
            rep.i = i;
            rep.j = j;
            rep.i2 = i2;
            rep.j2 = j2;
        }
    };
    if (mode == Tp2Mode::adjacent) {
        for (int i = 0; i + 1 < n; ++i)
            for (int j = 0; j + 1 < n; ++j) consider(i, j, i + 1, j + 1);
    } else {
        for (int i = 0; i < n; ++i)
            for (int i2 = i + 1; i2 < n; ++i2)
                for (int j = 0; j < n; ++j)
                    for (int j2 = j + 1; j2 < n; ++j2) consider(i, j, i2, j2);
    }
    rep.holds = rep.min_minor >= -tolerance;
    return rep;
}

RatioConstancyReport ratio_constancy(const CheckerboardCopula& p, OddsKind kind) {
    require_positive(p, "ratio constancy audit");
    const int n = p.size();
    RatioConstancyReport rep;
    rep.windows.reserve(static_cast<std::size_t>(n - 1) * (n - 1));
    // Extended precision: dividing the log odds by eta amplifies log
    // rounding by 1/eta on near-degenerate windows.
    long double sum = 0.0L;
    std::vector<long double> ratios;
    ratios.reserve(rep.windows.capacity());
    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            const long double a = p(i, j), b = p(i + 1, j), c = p(i, j + 1),
                              d = p(i + 1, j + 1);
            const long double log_odds = logl(a) + logl(d) - logl(b) - logl(c);
            const long double eta = a + b + c + d;
            WindowAudit w;
            w.i = i;
            w.j = j;
            w.log_odds = static_cast<double>(log_odds);
            w.eta = static_cast<double>(eta);
            w.pseudo_log_odds = static_cast<double>(log_odds / eta);
            w.minor = static_cast<double>(a * d - b * c);
            rep.windows.push_back(w);
            const long double r = (kind == OddsKind::pseudo) ? log_odds / eta : log_odds;
            ratios.push_back(r);
            sum += r;
        }
    }
    const long double mean = sum / static_cast<long double>(ratios.size());
    rep.mean_ratio = static_cast<double>(mean);
    long double worst = 0.0L;
    for (const long double r : ratios) worst = std::max(worst, fabsl(r - mean));
    rep.max_deviation = static_cast<double>(worst);
    return rep;
}

void write_window_table_csv(const RatioConstancyReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "i,j,log_odds,eta,pseudo_log_odds,minor\n" << std::setprecision(17);
    for (const WindowAudit& w : report.windows) {
        out << w.i << ',' << w.j << ',' << w.log_odds << ',' << w.eta << ','
            << w.pseudo_log_odds << ',' << w.minor << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace mic
