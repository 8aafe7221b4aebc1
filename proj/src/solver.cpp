#include "mic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "mic/basis.hpp"

namespace mic {

namespace {

// Iterates stay strictly positive; the true optima have corner entries far
// below 1e-15 at strong dependence, so the floor only guards against exact
// zeros from cancellation.
constexpr double kEntryFloor = 1e-300;

// Window arithmetic runs in long double: the pseudo ratio divides the log
// odds by eta, which at strong dependence amplifies rounding by 1/eta
// (~1e8 for the corner windows of a 30x30 solve at ratio 9).
long double window_log_odds(double a, double b, double c, double d) {
    return logl(static_cast<long double>(a)) + logl(static_cast<long double>(d)) -
           logl(static_cast<long double>(b)) - logl(static_cast<long double>(c));
}

// Root of f(delta) = (a+delta)(d+delta) - K (b-delta)(c-delta) inside the
// admissible interval [-min(a,d), min(b,c)], where K = exp(x).  f changes
// sign across the interval, so a root always exists there.  Passing the
// exponent x instead of K keeps 1-K exact via expm1.
long double solve_window_root(long double a, long double b, long double c, long double d,
                              long double x) {
    const long double lo = -std::min(a, d);
    const long double hi = std::min(b, c);
    const long double km1 = expm1l(x);
    const long double k = km1 + 1.0L;
    const long double a2 = -km1;
    const long double a1 = a + d + k * (b + c);
    const long double a0 = (a * d - b * c) - km1 * b * c;

    auto f = [&](long double t) { return (a + t) * (d + t) - k * (b - t) * (c - t); };

    if (a1 <= 0.0L) {
        // All four entries zero; nothing to move.
        return 0.0L;
    }

    long double root = std::numeric_limits<long double>::quiet_NaN();
    if (fabsl(a2) < 1e-22L * a1) {
        root = -a0 / a1;  // K == 1: the equation is linear
    } else {
        const long double disc = a1 * a1 - 4.0L * a2 * a0;
        if (disc >= 0.0L) {
            const long double q = -0.5L * (a1 + copysignl(sqrtl(disc), a1));
            const long double r1 = q / a2;
            const long double r2 = (q != 0.0L) ? a0 / q : std::numeric_limits<long double>::quiet_NaN();
            const long double slack = 1e-15L * (hi - lo) + 1e-300L;
            if (r1 >= lo - slack && r1 <= hi + slack) {
                root = r1;
            } else if (std::isfinite(r2) && r2 >= lo - slack && r2 <= hi + slack) {
                root = r2;
            }
        }
    }

    if (!std::isfinite(root) || root < lo || root > hi) {
        // Fall back to bisection on the guaranteed sign change.
        long double l = lo, h = hi;
        if (f(l) > 0.0L) return lo;  // degenerate: no interior crossing
        for (int it = 0; it < 200 && h - l > 1e-22L + 1e-20L * (fabsl(l) + fabsl(h)); ++it) {
            const long double mid = 0.5L * (l + h);
            if (f(mid) <= 0.0L) l = mid; else h = mid;
        }
        root = 0.5L * (l + h);
    }
    return std::clamp(root, lo, hi);
}

struct SweepState {
    Eigen::MatrixXd m;
    long clamped = 0;
};

// Solves the corner window (i, j) x (i+s, j+s) for the exponent x
// (target log odds) and applies the margin-preserving transfer.
void update_window(SweepState& st, int i, int j, int s, long double x) {
    double& a = st.m(i, j);
    double& b = st.m(i + s, j);
    double& c = st.m(i, j + s);
    double& d = st.m(i + s, j + s);
    long double delta = solve_window_root(a, b, c, d, x);
    const long double dlo = kEntryFloor - static_cast<long double>(std::min(a, d));
    const long double dhi = static_cast<long double>(std::min(b, c)) - kEntryFloor;
    if (delta < dlo || delta > dhi) {
        delta = std::clamp(delta, std::min(dlo, dhi), std::max(dlo, dhi));
        ++st.clamped;
    }
    a = static_cast<double>(a + delta);
    d = static_cast<double>(d + delta);
    b = static_cast<double>(b - delta);
    c = static_cast<double>(c - delta);
}

// Target log odds for a span-s window.  Telescoping the constant-ratio
// condition over the covered contiguous windows gives
//   log odds(i, i+s, j, j+s) = ratio * sum of eta over the block   (pseudo)
//   log odds(i, i+s, j, j+s) = ratio * s^2                         (plain)
// and the block eta-sum is invariant under the window's own transfer, so
// the span-s equation is the same quadratic with exponent x.
long double window_exponent(const Eigen::MatrixXd& m, int i, int j, int s, double ratio,
                            OddsKind kind) {
    if (kind == OddsKind::plain) {
        return static_cast<long double>(ratio) * s * s;
    }
    long double block_eta = 0.0L;
    for (int k = i; k < i + s; ++k)
        for (int l = j; l < j + s; ++l)
            block_eta += static_cast<long double>(m(k, l)) + m(k + 1, l) + m(k, l + 1) +
                         m(k + 1, l + 1);
    return static_cast<long double>(ratio) * block_eta;
}

// One pass: contiguous windows in the given order, then the dyadic
// longer-span windows.  The long spans only accelerate mixing; the fixed
// point is pinned by the contiguous windows alone.
void sweep_once(SweepState& st, const std::vector<std::pair<int, int>>& order,
                const std::vector<int>& strides, double ratio, OddsKind kind) {
    for (const auto& [i, j] : order) {
        update_window(st, i, j, 1, window_exponent(st.m, i, j, 1, ratio, kind));
    }
    const int n = static_cast<int>(st.m.rows());
    for (std::size_t si = 1; si < strides.size(); ++si) {
        const int s = strides[si];
        for (int i = 0; i + s < n; ++i) {
            for (int j = 0; j + s < n; ++j) {
                const long double x = window_exponent(st.m, i, j, s, ratio, kind);
                if (!std::isfinite(expl(x))) continue;  // span unusable at extreme ratios
                update_window(st, i, j, s, x);
            }
        }
    }
}

double max_residual(const Eigen::MatrixXd& m, double ratio, OddsKind kind) {
    const int n = static_cast<int>(m.rows());
    long double worst = 0.0L;
    for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n - 1; ++j) {
            long double got = window_log_odds(m(i, j), m(i + 1, j), m(i, j + 1), m(i + 1, j + 1));
            if (kind == OddsKind::pseudo) {
                const long double eta = static_cast<long double>(m(i, j)) + m(i + 1, j) +
                                        m(i, j + 1) + m(i + 1, j + 1);
                got /= eta;
            }
            worst = std::max(worst, fabsl(got - static_cast<long double>(ratio)));
        }
    }
    return static_cast<double>(worst);
}

SolveReport run_greedy(int n, const SolverConfig& cfg, OddsKind kind) {
    if (n < 2) throw ValidationError("grid size must be at least 2");
    if (cfg.ratio < 0.0) {
        throw ValidationError(
            "ratio must be non-negative; solve the reflected problem for negative dependence");
    }
    if (cfg.tol <= 0.0 || cfg.max_sweeps < 1) {
        throw ValidationError("tol must be positive and max_sweeps at least 1");
    }
    if (!std::isfinite(std::exp(cfg.ratio * (kind == OddsKind::pseudo ? 4.0 / n : 1.0)))) {
        throw ValidationError("ratio too large: window factor overflows");
    }

    SweepState st{Eigen::MatrixXd::Constant(n, n, 1.0 / (static_cast<double>(n) * n)), 0};

    std::vector<std::pair<int, int>> order;
    order.reserve(static_cast<std::size_t>(n - 1) * (n - 1));
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j) order.emplace_back(i, j);
    std::vector<int> strides;
    for (int s = 1; s < n; s *= 2) strides.push_back(s);
    std::mt19937_64 rng(cfg.seed);

    double residual = max_residual(st.m, cfg.ratio, kind);
    bool converged = residual < cfg.tol;
    int sweeps = 0;
    while (!converged && sweeps < cfg.max_sweeps) {
        if (cfg.sweep_order == SweepOrder::random_permutation) {
            std::shuffle(order.begin(), order.end(), rng);
        }
        sweep_once(st, order, strides, cfg.ratio, kind);
        ++sweeps;
        residual = max_residual(st.m, cfg.ratio, kind);
        converged = residual < cfg.tol;
    }

    SolveReport rep{CheckerboardCopula::from_matrix(std::move(st.m)),
                    sweeps,
                    residual,
                    converged,
                    0.0,
                    0.0,
                    0.0,
                    cfg.ratio,
                    st.clamped};
    rep.tau = kendall_tau(rep.copula);
    rep.rho = spearman_rho(rep.copula);
    rep.information = mic::information(rep.copula);
    return rep;
}

}  // namespace

double window_delta(double a, double b, double c, double d, double ratio, OddsKind kind) {
    if (a < 0.0 || b < 0.0 || c < 0.0 || d < 0.0) {
        throw ValidationError("window entries must be non-negative");
    }
    const double eta = a + b + c + d;
    if (kind == OddsKind::pseudo && eta <= 0.0) {
        std::ostringstream os;
        os << "window (" << a << "," << b << "," << c << "," << d
           << ") has zero mass: pseudo ratio undefined";
        throw ValidationError(os.str());
    }
    const long double x =
        kind == OddsKind::pseudo ? static_cast<long double>(ratio) * eta : ratio;
    const long double k = expl(x);
    if (!std::isfinite(k)) {
        throw ValidationError("ratio " + std::to_string(ratio) + " overflows the window factor");
    }
    const long double delta = solve_window_root(a, b, c, d, x);
    // Verify the root actually satisfies the defining equation.
    const long double lhs = (a + delta) * (d + delta);
    const long double rhs = k * (b - delta) * (c - delta);
    if (fabsl(lhs - rhs) > 1e-9L * (fabsl(lhs) + fabsl(rhs) + 1e-30L)) {
        std::ostringstream os;
        os << "no admissible root for window (" << a << "," << b << "," << c << "," << d
           << ") at ratio " << ratio;
        throw ValidationError(os.str());
    }
    return static_cast<double>(delta);
}

SolveReport solve_mick(int n, const SolverConfig& cfg) {
    return run_greedy(n, cfg, OddsKind::pseudo);
}

SolveReport solve_mics(int n, const SolverConfig& cfg) {
    return run_greedy(n, cfg, OddsKind::plain);
}

CheckerboardCopula reflect_columns(const CheckerboardCopula& p) {
    Eigen::MatrixXd m = p.matrix().rowwise().reverse();
    return CheckerboardCopula::from_matrix(std::move(m));
}

std::string SolveReport::to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "ratio: " << ratio << '\n'
       << "converged: " << (converged ? "true" : "false") << '\n'
       << "sweeps_used: " << sweeps_used << '\n'
       << "final_residual: " << final_residual << '\n'
       << "tau: " << tau << '\n'
       << "rho: " << rho << '\n'
       << "information: " << information << '\n'
       << "clamped_updates: " << clamped_updates << '\n';
    return os.str();
}

namespace {

double measure_of(const SolveReport& rep, Measure measure) {
    return measure == Measure::kendall ? rep.tau : rep.rho;
}

SolveReport solve_family(int n, double ratio, Family family, const SolverConfig& base) {
    SolverConfig cfg = base;
    cfg.ratio = ratio;
    return family == Family::mick ? solve_mick(n, cfg) : solve_mics(n, cfg);
}

}  // namespace

CalibrationResult calibrate(int n, double target, Measure measure, Family family,
                            const SolverConfig& base, double calibration_tol) {
    if (n < 2) throw ValidationError("grid size must be at least 2");
    const double bound =
        measure == Measure::kendall ? 1.0 - 1.0 / n : 1.0 - 1.0 / (static_cast<double>(n) * n);
    if (std::abs(target) >= bound) {
        std::ostringstream os;
        os << "target " << target << " outside achievable range (-" << bound << ", " << bound
           << ") for n = " << n;
        throw ValidationError(os.str());
    }

    CalibrationResult result;
    result.target = target;
    const double t = std::abs(target);
    if (t == 0.0) {
        result.achieved_correlation = 0.0;
        return result;
    }

    // Unconverged probes still carry a usable measure (they saturate past
    // realistic targets); only the final answer must come from a converged
    // solve.
    auto probe = [&](double ratio) {
        ++result.iterations;
        return solve_family(n, ratio, family, base);
    };

    double lo = 0.0;
    double hi = 1.0;
    SolveReport rep_hi = probe(hi);
    int doublings = 0;
    while (measure_of(rep_hi, measure) < t) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 40) {
            throw ConvergenceError("bracket expansion failed: measure stuck below target " +
                                   std::to_string(target));
        }
        rep_hi = probe(hi);
    }

    SolveReport best = rep_hi;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(measure_of(best, measure) - t) <= calibration_tol && best.converged) break;
        const double mid = 0.5 * (lo + hi);
        SolveReport rep = probe(mid);
        if (measure_of(rep, measure) < t) {
            lo = mid;
        } else {
            hi = mid;
        }
        best = std::move(rep);
        if (hi - lo < 1e-15 * (1.0 + hi)) break;
    }
    if (!best.converged || std::abs(measure_of(best, measure) - t) > calibration_tol) {
        // The bisection endpoint nearest the target may not be the last probe.
        SolveReport at_hi = solve_family(n, hi, family, base);
        ++result.iterations;
        if (std::abs(measure_of(at_hi, measure) - t) < std::abs(measure_of(best, measure) - t)) {
            best = std::move(at_hi);
        }
    }
    if (!best.converged) {
        throw ConvergenceError("calibrated solve did not converge (residual " +
                               std::to_string(best.final_residual) + ")");
    }
    if (std::abs(measure_of(best, measure) - t) > calibration_tol) {
        throw ConvergenceError("calibration stalled at measure " +
                               std::to_string(measure_of(best, measure)) + " for target " +
                               std::to_string(target));
    }
    result.ratio = best.ratio;
    result.achieved_correlation =
        target < 0.0 ? -measure_of(best, measure) : measure_of(best, measure);
    return result;
}

SolveReport solve_calibrated(int n, double target, Measure measure, Family family,
                             const SolverConfig& base, double calibration_tol) {
    const CalibrationResult cal = calibrate(n, target, measure, family, base, calibration_tol);
    SolveReport rep = solve_family(n, cal.ratio, family, base);
    if (target < 0.0) {
        rep.copula = reflect_columns(rep.copula);
        rep.tau = kendall_tau(rep.copula);
        rep.rho = spearman_rho(rep.copula);
        rep.information = mic::information(rep.copula);
    }
    return rep;
}

namespace {

// tau from the nine entries of a 3x3 copula, via the pairwise-minor form:
// tau = 2 sum_{i<i', j<j'} (p_ij p_i'j' - p_ij' p_i'j).
double tau3(const double* p) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int i2 = i + 1; i2 < 3; ++i2)
            for (int j = 0; j < 3; ++j)
                for (int j2 = j + 1; j2 < 3; ++j2)
                    s += p[3 * i + j] * p[3 * i2 + j2] - p[3 * i + j2] * p[3 * i2 + j];
    return 2.0 * s;
}

double info_of(const double* p, int count) {
    double s = 0.0;
    for (int k = 0; k < count; ++k) {
        if (p[k] > kZeroFloor) s += p[k] * std::log(p[k]);
    }
    return s;
}

void entries3(double c11, double c12, double c21, double c22, double* p) {
    const double u = 1.0 / 9.0;
    p[0] = u + c11;
    p[1] = u - c11 + c12;
    p[2] = u - c12;
    p[3] = u - c11 + c21;
    p[4] = u + c11 - c12 - c21 + c22;
    p[5] = u + c12 - c22;
    p[6] = u - c21;
    p[7] = u + c21 - c22;
    p[8] = u + c22;
}

BruteForceResult brute_force_2(double mu, int resolution, double band) {
    const double lo = -0.25, hi = 0.25;
    const double step = (hi - lo) / resolution;
    double best_info = std::numeric_limits<double>::infinity();
    double best_c = 0.0, best_tau = 0.0;
    long in_band = 0;
    for (int k = 0; k <= resolution; ++k) {
        const double c = lo + k * step;
        const double p[4] = {0.25 + c, 0.25 - c, 0.25 - c, 0.25 + c};
        if (p[0] < 0.0 || p[1] < 0.0) continue;
        const double tau = 2.0 * c;  // the single-coordinate case in closed form
        if (std::abs(tau - mu) > band) continue;
        ++in_band;
        const double info = info_of(p, 4);
        if (info < best_info) {
            best_info = info;
            best_c = c;
            best_tau = tau;
        }
    }
    if (in_band == 0) {
        throw ValidationError("empty feasible band around mu = " + std::to_string(mu));
    }
    Eigen::MatrixXd m(2, 2);
    m << 0.25 + best_c, 0.25 - best_c, 0.25 - best_c, 0.25 + best_c;
    BruteForceResult out{CheckerboardCopula::from_matrix(m), best_tau, best_info, in_band};
    return out;
}

BruteForceResult brute_force_3(double mu, int resolution, double band) {
    // Axis boxes: corner coordinates live in [-1/9, 2/9], edge coordinates
    // in [-2/9, 1/9]; the entry constraints prune the rest.
    const double u = 1.0 / 9.0;
    const double step = (1.0 / 3.0) / resolution;
    const double corner_lo = -u, edge_lo = -2.0 * u;

    double best_info = std::numeric_limits<double>::infinity();
    double best_c[4] = {0, 0, 0, 0};
    double best_tau = 0.0;
    long in_band = 0;

    double p[9];
    for (int k1 = 0; k1 <= resolution; ++k1) {
        const double c11 = corner_lo + k1 * step;
        for (int k2 = 0; k2 <= resolution; ++k2) {
            const double c12 = edge_lo + k2 * step;
            if (u - c11 + c12 < 0.0) continue;  // p12
            if (u - c12 < 0.0) continue;        // p13
            for (int k3 = 0; k3 <= resolution; ++k3) {
                const double c21 = edge_lo + k3 * step;
                if (u - c11 + c21 < 0.0) continue;  // p21
                if (u - c21 < 0.0) continue;        // p31

                // Remaining constraints bound c22 to an interval.
                const double t_lo = std::max(-u, c12 + c21 - c11 - u);
                const double t_hi = std::min({2.0 * u, u + c12, u + c21});
                if (t_hi < t_lo) continue;

                // tau is affine in c22 for fixed other coordinates (no
                // squared term survives in the minor expansion); fit it
                // exactly from two evaluations and intersect with the band.
                entries3(c11, c12, c21, 0.0, p);
                const double tau0 = tau3(p);
                entries3(c11, c12, c21, step, p);
                const double tau1 = tau3(p);
                const double slope = (tau1 - tau0) / step;

                double band_lo = t_lo, band_hi = t_hi;
                if (std::abs(slope) < 1e-15) {
                    if (std::abs(tau0 - mu) > band) continue;
                } else {
                    double e_lo = (mu - band - tau0) / slope;
                    double e_hi = (mu + band - tau0) / slope;
                    if (e_lo > e_hi) std::swap(e_lo, e_hi);
                    band_lo = std::max(band_lo, e_lo);
                    band_hi = std::min(band_hi, e_hi);
                    if (band_hi < band_lo) continue;
                }

                const int g_lo = static_cast<int>(std::ceil((band_lo - corner_lo) / step - 1e-9));
                const int g_hi = static_cast<int>(std::floor((band_hi - corner_lo) / step + 1e-9));
                for (int k4 = std::max(0, g_lo); k4 <= std::min(resolution, g_hi); ++k4) {
                    const double c22 = corner_lo + k4 * step;
                    entries3(c11, c12, c21, c22, p);
                    bool ok = true;
                    for (double& e : p) {
                        if (e < -1e-12) { ok = false; break; }
                        if (e < 0.0) e = 0.0;
                    }
                    if (!ok) continue;
                    const double tau = tau3(p);
                    if (std::abs(tau - mu) > band) continue;
                    ++in_band;
                    const double info = info_of(p, 9);
                    if (info < best_info) {
                        best_info = info;
                        best_tau = tau;
                        best_c[0] = c11;
                        best_c[1] = c12;
                        best_c[2] = c21;
                        best_c[3] = c22;
                    }
                }
            }
        }
    }
    if (in_band == 0) {
        throw ValidationError("empty feasible band around mu = " + std::to_string(mu));
    }
    entries3(best_c[0], best_c[1], best_c[2], best_c[3], p);
    Eigen::MatrixXd m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = std::max(p[3 * i + j], 0.0);
    BruteForceResult out{CheckerboardCopula::from_matrix(m, 1e-9), best_tau, best_info, in_band};
    return out;
}

}  // namespace

BruteForceResult brute_force_mick(int n, double mu, int resolution, double band) {
    if (n != 2 && n != 3) {
        throw ValidationError("brute-force oracle supports n in {2, 3}, got " + std::to_string(n));
    }
    if (resolution < 2) throw ValidationError("resolution must be at least 2");
    if (std::abs(mu) > 1.0 - 1.0 / n) {
        throw ValidationError("mu outside the attainable Kendall range");
    }
    return n == 2 ? brute_force_2(mu, resolution, band) : brute_force_3(mu, resolution, band);
}

}  // namespace mic
