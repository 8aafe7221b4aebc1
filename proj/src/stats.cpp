#include "mic/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

namespace mic {

namespace {

inline double to_unit_double(std::uint64_t x) {
    // 53-bit mantissa in [0, 1); keeps the stream portable across platforms.
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

long long tie_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    long long pairs = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const long long m = static_cast<long long>(j - i);
        pairs += m * (m - 1) / 2;
        i = j;
    }
    return pairs;
}

// Counts strictly-decreasing pairs by merge sort.
long long count_inversions(std::vector<double>& v, std::vector<double>& tmp, std::size_t lo,
                           std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    long long inv = count_inversions(v, tmp, lo, mid) + count_inversions(v, tmp, mid, hi);
    std::size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            inv += static_cast<long long>(mid - a);
            tmp[out++] = v[b++];
        } else {
            tmp[out++] = v[a++];
        }
    }
    while (a < mid) tmp[out++] = v[a++];
    while (b < hi) tmp[out++] = v[b++];
    std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
    return inv;
}

}  // namespace

std::vector<double> mid_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[idx[j]] == values[idx[i]]) ++j;
        // 1-based ranks i+1 .. j averaged, then shifted to (0,1).
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) {
            ranks[idx[k]] = (avg_rank - 0.5) / static_cast<double>(n);
        }
        i = j;
    }
    return ranks;
}

PseudoObservations rank_transform(const PseudoObservations& obs) {
    return PseudoObservations{mid_ranks(obs.u), mid_ranks(obs.v)};
}

PseudoObservations sample_copula(const CheckerboardCopula& p, std::size_t count,
                                 std::uint64_t seed) {
    const int n = p.size();
    std::vector<double> cdf(static_cast<std::size_t>(n) * n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            acc += p(i, j);
            cdf[static_cast<std::size_t>(i) * n + j] = acc;
        }
    }
    cdf.back() = 1.0;

    std::mt19937_64 rng(seed);
    PseudoObservations out;
    out.u.resize(count);
    out.v.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double r_cell = to_unit_double(rng());
        const double r_u = to_unit_double(rng());
        const double r_v = to_unit_double(rng());
        const std::size_t cell =
            static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), r_cell) -
                                     cdf.begin());
        const int i = static_cast<int>(cell / n);
        const int j = static_cast<int>(cell % n);
        out.u[k] = (i + r_u) / n;
        out.v[k] = (j + r_v) / n;
    }
    return out;
}

double empirical_tau(const PseudoObservations& obs) {
    const std::size_t n = obs.size();
    if (n < 2 || obs.v.size() != n) {
        throw ValidationError("empirical tau needs at least two paired observations");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (obs.u[a] != obs.u[b]) return obs.u[a] < obs.u[b];
        return obs.v[a] < obs.v[b];
    });

    long long tied_u = 0, tied_uv = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && obs.u[idx[j]] == obs.u[idx[i]]) ++j;
            const long long m = static_cast<long long>(j - i);
            tied_u += m * (m - 1) / 2;
            std::size_t a = i;
            while (a < j) {
                std::size_t b = a;
                while (b < j && obs.v[idx[b]] == obs.v[idx[a]]) ++b;
                const long long mm = static_cast<long long>(b - a);
                tied_uv += mm * (mm - 1) / 2;
                a = b;
            }
            i = j;
        }
    }
    const long long tied_v = tie_pairs(obs.v);

    std::vector<double> vseq(n), tmp(n);
    for (std::size_t k = 0; k < n; ++k) vseq[k] = obs.v[idx[k]];
    const long long discordant = count_inversions(vseq, tmp, 0, n);

    const long long total = static_cast<long long>(n) * (n - 1) / 2;
    const long long numer = total - tied_u - tied_v + tied_uv - 2 * discordant;
    return static_cast<double>(numer) / static_cast<double>(total);
}

double empirical_rho(const PseudoObservations& obs) {
    const std::size_t n = obs.size();
    if (n < 2 || obs.v.size() != n) {
        throw ValidationError("empirical rho needs at least two paired observations");
    }
    const std::vector<double> ru = mid_ranks(obs.u);
    const std::vector<double> rv = mid_ranks(obs.v);
    double mu = 0.0, mv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mu += ru[k];
        mv += rv[k];
    }
    mu /= static_cast<double>(n);
    mv /= static_cast<double>(n);
    double suv = 0.0, suu = 0.0, svv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double du = ru[k] - mu;
        const double dv = rv[k] - mv;
        suv += du * dv;
        suu += du * du;
        svv += dv * dv;
    }
    if (suu <= 0.0 || svv <= 0.0) {
        throw ValidationError("rank correlation undefined: a coordinate is constant");
    }
    return suv / std::sqrt(suu * svv);
}

TailDependence tail_dependence(const PseudoObservations& obs, double u_percent) {
    const std::size_t n = obs.size();
    if (!(u_percent > 0.0 && u_percent < 50.0)) {
        throw ValidationError("tail level must lie in (0, 50) percent");
    }
    if (static_cast<double>(n) * u_percent / 100.0 < 1.0) {
        throw ValidationError("sample too small for a " + std::to_string(u_percent) +
                              "% tail estimate");
    }
    const double q = u_percent / 100.0;
    long lower_cond = 0, lower_joint = 0, upper_cond = 0, upper_joint = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (obs.u[k] < q) {
            ++lower_cond;
            if (obs.v[k] < q) ++lower_joint;
        }
        if (obs.u[k] > 1.0 - q) {
            ++upper_cond;
            if (obs.v[k] > 1.0 - q) ++upper_joint;
        }
    }
    if (lower_cond == 0 || upper_cond == 0) {
        throw ValidationError("empty conditioning set at the " + std::to_string(u_percent) +
                              "% level");
    }
    return TailDependence{static_cast<double>(lower_joint) / lower_cond,
                          static_cast<double>(upper_joint) / upper_cond};
}

DependenceSummary summarize_dependence(const PseudoObservations& obs) {
    DependenceSummary s;
    s.tau = empirical_tau(obs);
    s.rho = empirical_rho(obs);
    const TailDependence t5 = tail_dependence(obs, 5.0);
    const TailDependence t1 = tail_dependence(obs, 1.0);
    s.lower_tail_5 = t5.lower;
    s.upper_tail_5 = t5.upper;
    s.lower_tail_1 = t1.lower;
    s.upper_tail_1 = t1.upper;
    return s;
}

Eigen::MatrixXd fit_margins(Eigen::MatrixXd m, double tol, int max_iters) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw ValidationError("margin fitting needs a square matrix");
    if ((m.array() < 0.0).any()) throw ValidationError("margin fitting needs non-negative entries");
    const double target = 1.0 / n;
    for (int it = 0; it < max_iters; ++it) {
        for (int i = 0; i < n; ++i) {
            const double rs = m.row(i).sum();
            if (rs <= 0.0) throw ConvergenceError("row " + std::to_string(i) + " has no mass");
            m.row(i) *= target / rs;
        }
        for (int j = 0; j < n; ++j) {
            const double cs = m.col(j).sum();
            if (cs <= 0.0) throw ConvergenceError("column " + std::to_string(j) + " has no mass");
            m.col(j) *= target / cs;
        }
        double worst = 0.0;
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(m.row(i).sum() - target));
        for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(m.col(j).sum() - target));
        if (worst < tol) return m;
    }
    throw ConvergenceError("margin scaling did not reach tolerance in " +
                           std::to_string(max_iters) + " iterations");
}

CheckerboardCopula empirical_checkerboard(const PseudoObservations& obs, int n,
                                          double tol, int max_iters) {
    if (n < 2) throw ValidationError("grid size must be at least 2");
    const std::size_t count = obs.size();
    if (count < static_cast<std::size_t>(n) * n) {
        throw ValidationError("need at least n^2 observations for an n x n estimate");
    }
    Eigen::MatrixXd cells = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < count; ++k) {
        const int i = std::min(static_cast<int>(obs.u[k] * n), n - 1);
        const int j = std::min(static_cast<int>(obs.v[k] * n), n - 1);
        if (i < 0 || j < 0) throw ValidationError("observations must lie in (0,1)^2");
        cells(i, j) += 1.0;
    }
    cells /= static_cast<double>(count);
    return CheckerboardCopula::from_matrix(fit_margins(std::move(cells), tol, max_iters),
                                           kFileTol);
}

void write_points_csv(const PseudoObservations& obs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "u,v\n" << std::setprecision(17);
    for (std::size_t k = 0; k < obs.size(); ++k) {
        out << obs.u[k] << ',' << obs.v[k] << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

PseudoObservations read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    PseudoObservations obs;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw IoError("malformed point row: " + line);
        try {
            obs.u.push_back(std::stod(line.substr(0, comma)));
            obs.v.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IoError("unparsable point row: " + line);
        }
    }
    return obs;
}

}  // namespace mic
