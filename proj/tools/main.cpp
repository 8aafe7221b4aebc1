// Command-line surface for the minimum-information checkerboard copula
// library: solving, calibration, diagnostics, sampling, and the empirical
// fitting pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mic/basis.hpp"
#include "mic/diagnostics.hpp"
#include "mic/ingest.hpp"
#include "mic/solver.hpp"
#include "mic/stats.hpp"

using json = nlohmann::ordered_json;

namespace {

// Exit codes: 0 success, 2 validation failure, 3 convergence failure,
// 4 I/O failure (documented in --help).
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    std::string format = "text";
};

mic::Family parse_family(const std::string& s) {
    if (s == "mick") return mic::Family::mick;
    if (s == "mics") return mic::Family::mics;
    throw mic::ValidationError("unknown family '" + s + "' (expected mick or mics)");
}

json report_to_json(const mic::SolveReport& rep) {
    return json{{"ratio", rep.ratio},
                {"converged", rep.converged},
                {"sweeps_used", rep.sweeps_used},
                {"final_residual", rep.final_residual},
                {"tau", rep.tau},
                {"rho", rep.rho},
                {"information", rep.information},
                {"clamped_updates", rep.clamped_updates}};
}

json summary_to_json(const mic::DependenceSummary& s) {
    return json{{"tau", s.tau},
                {"rho", s.rho},
                {"lower_tail_5", s.lower_tail_5},
                {"upper_tail_5", s.upper_tail_5},
                {"lower_tail_1", s.lower_tail_1},
                {"upper_tail_1", s.upper_tail_1}};
}

void print_summary_block(const std::string& name, const mic::DependenceSummary& s) {
    std::printf("%s: tau=%.3f rho=%.3f lower5=%.3f upper5=%.3f lower1=%.3f upper1=%.3f\n",
                name.c_str(), s.tau, s.rho, s.lower_tail_5, s.upper_tail_5, s.lower_tail_1,
                s.upper_tail_1);
}

int cmd_solve(const std::string& family_name, int n, std::optional<double> ratio,
              std::optional<double> tau, std::optional<double> rho, mic::SolverConfig base,
              const std::string& output, const std::string& report_path,
              const std::string& format) {
    const mic::Family family = parse_family(family_name);
    const int given = int(ratio.has_value()) + int(tau.has_value()) + int(rho.has_value());
    if (given != 1) {
        throw mic::ValidationError("specify exactly one of --ratio, --tau, --rho");
    }

    mic::SolveReport rep = [&] {
        if (ratio) {
            base.ratio = *ratio;
            return family == mic::Family::mick ? mic::solve_mick(n, base)
                                               : mic::solve_mics(n, base);
        }
        const double target = tau ? *tau : *rho;
        const mic::Measure measure = tau ? mic::Measure::kendall : mic::Measure::spearman;
        return mic::solve_calibrated(n, target, measure, family, base);
    }();

    if (!output.empty()) mic::write_matrix_csv(rep.copula, output);
    const std::string text = rep.to_text();
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw mic::IoError("cannot write " + report_path);
        out << text;
    }
    if (format == "json") {
        json j = report_to_json(rep);
        j["family"] = family_name;
        j["n"] = n;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "family: " << family_name << "\nn: " << n << '\n' << text;
    }
    if (!rep.converged) {
        std::cerr << "solve did not converge: residual " << rep.final_residual << " after "
                  << rep.sweeps_used << " sweeps\n";
        return kExitConvergence;
    }
    return 0;
}

int cmd_table(const std::string& family_name, int n, std::vector<double> ratios,
              const mic::SolverConfig& base, const std::string& output,
              const std::string& format) {
    const mic::Family family = parse_family(family_name);
    if (ratios.empty()) {
        // the published 30x30 parameter grids
        if (family == mic::Family::mick) {
            ratios = {0.3, 0.5, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        } else {
            ratios = {0.001, 0.002, 0.003, 0.004, 0.005, 0.006, 0.007, 0.008, 0.009,
                      0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09};
        }
    }
    json rows = json::array();
    std::ostringstream csv;
    csv << "ratio,rho,tau,information\n";
    bool all_converged = true;
    for (const double r : ratios) {
        mic::SolverConfig cfg = base;
        cfg.ratio = r;
        const mic::SolveReport rep =
            family == mic::Family::mick ? mic::solve_mick(n, cfg) : mic::solve_mics(n, cfg);
        all_converged = all_converged && rep.converged;
        char line[160];
        std::snprintf(line, sizeof line, "%.6g,%.6f,%.6f,%.6f", r, rep.rho, rep.tau,
                      rep.information);
        csv << line << '\n';
        rows.push_back(json{{"ratio", r},
                            {"rho", rep.rho},
                            {"tau", rep.tau},
                            {"information", rep.information},
                            {"converged", rep.converged}});
    }
    if (!output.empty()) {
        std::ofstream out(output);
        if (!out) throw mic::IoError("cannot write " + output);
        out << csv.str();
    }
    if (format == "json") {
        std::cout << json{{"family", family_name}, {"n", n}, {"rows", rows}}.dump(2) << '\n';
    } else {
        std::cout << csv.str();
    }
    if (!all_converged) {
        std::cerr << "one or more rows did not converge\n";
        return kExitConvergence;
    }
    return 0;
}

int cmd_check(const std::string& input, const std::string& windows_path,
              const std::string& format) {
    const mic::CheckerboardCopula p = mic::read_matrix_csv(input);
    json j;
    j["n"] = p.size();
    j["tau"] = mic::kendall_tau(p);
    j["rho"] = mic::spearman_rho(p);
    j["information"] = mic::information(p);

    const mic::Tp2Report tp2 = mic::tp2_check(p, mic::Tp2Mode::adjacent);
    j["tp2"] = json{{"holds", tp2.holds},
                    {"min_minor", tp2.min_minor},
                    {"at", {tp2.i, tp2.j, tp2.i2, tp2.j2}}};

    const bool positive = p.strictly_positive();
    j["strictly_positive"] = positive;
    if (positive) {
        const auto pseudo = mic::ratio_constancy(p, mic::OddsKind::pseudo);
        const auto plain = mic::ratio_constancy(p, mic::OddsKind::plain);
        j["pseudo_log_odds"] = json{{"mean", pseudo.mean_ratio},
                                    {"max_deviation", pseudo.max_deviation}};
        j["log_odds"] = json{{"mean", plain.mean_ratio}, {"max_deviation", plain.max_deviation}};
        if (!windows_path.empty()) mic::write_window_table_csv(pseudo, windows_path);

        const mic::StationarityFit fit = mic::stationarity_fit(p);
        j["stationarity"] = json{{"lambda", fit.lambda},
                                 {"residual_norm", fit.residual_norm},
                                 {"lambda_identifiable", fit.lambda_identifiable}};
        if (p.size() <= 30) {
            const mic::DefinitenessReport def = mic::hessian_definiteness(p, fit.lambda);
            j["definiteness"] = json{{"lambda_used", def.lambda_used},
                                     {"min_eigenvalue", def.min_eigenvalue},
                                     {"positive_definite", def.positive_definite},
                                     {"max_abs_rayleigh", def.max_abs_rayleigh},
                                     {"gershgorin_bound", def.gershgorin_bound}};
            // Uniqueness is guaranteed when every admissible multiplier stays
            // below 2; outside that regime the verdict is only advisory.
            j["uniqueness_advisory"] =
                std::abs(fit.lambda) < 2.0 && def.positive_definite
                    ? "certified: |lambda| < 2 and the restricted Hessian is positive definite"
                    : "not certified: |lambda| >= 2 or indefinite Hessian";
        }
    } else {
        j["note"] = "zero entries present: odds-ratio and stationarity checks skipped";
    }

    if (format == "json") {
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "n: " << j["n"] << "\ntau: " << j["tau"] << "\nrho: " << j["rho"]
                  << "\ninformation: " << j["information"] << '\n';
        std::cout << "tp2: " << (tp2.holds ? "holds" : "violated") << " (min minor "
                  << tp2.min_minor << " at " << tp2.i << ',' << tp2.j << " x " << tp2.i2 << ','
                  << tp2.j2 << ")\n";
        if (positive) {
            std::cout << "pseudo log odds: mean " << j["pseudo_log_odds"]["mean"]
                      << ", max deviation " << j["pseudo_log_odds"]["max_deviation"] << '\n';
            std::cout << "log odds: mean " << j["log_odds"]["mean"] << ", max deviation "
                      << j["log_odds"]["max_deviation"] << '\n';
            std::cout << "stationarity: lambda " << j["stationarity"]["lambda"]
                      << ", residual " << j["stationarity"]["residual_norm"]
                      << (j["stationarity"]["lambda_identifiable"].get<bool>()
                              ? ""
                              : " (lambda not identified)")
                      << '\n';
            if (j.contains("definiteness")) {
                std::cout << "definiteness at lambda: "
                          << (j["definiteness"]["positive_definite"].get<bool>()
                                  ? "positive definite"
                                  : "indefinite")
                          << " (min eigenvalue " << j["definiteness"]["min_eigenvalue"]
                          << ", max |Rayleigh| " << j["definiteness"]["max_abs_rayleigh"]
                          << ", Gershgorin bound " << j["definiteness"]["gershgorin_bound"]
                          << ")\n";
                std::cout << "uniqueness: " << j["uniqueness_advisory"].get<std::string>()
                          << '\n';
            }
        } else {
            std::cout << j["note"].get<std::string>() << '\n';
        }
    }
    return 0;
}

int cmd_sample(const std::string& input, std::size_t count, std::uint64_t seed,
               const std::string& output) {
    const mic::CheckerboardCopula p = mic::read_matrix_csv(input);
    const mic::PseudoObservations pts = mic::sample_copula(p, count, seed);
    mic::write_points_csv(pts, output);
    std::cout << "wrote " << count << " samples to " << output << '\n';
    return 0;
}

int cmd_fit(const std::string& input, const std::string& column_x, const std::string& column_y,
            const std::string& input2, int n, std::size_t count, std::uint64_t seed,
            const mic::SolverConfig& base, const std::string& format,
            const std::string& output) {
    const mic::AlignedSeries prices =
        input2.empty() ? mic::load_prices(input, column_x, column_y)
                       : mic::align(mic::load_series(input, column_x),
                                    mic::load_series(input2, column_y));
    const mic::AlignedSeries returns = mic::log_returns(prices);
    const mic::PseudoObservations obs = mic::to_pseudo_observations(returns);
    const mic::DependenceSummary observed = mic::summarize_dependence(obs);

    const mic::SolveReport mick =
        mic::solve_calibrated(n, observed.tau, mic::Measure::kendall, mic::Family::mick, base);
    const mic::SolveReport mics =
        mic::solve_calibrated(n, observed.rho, mic::Measure::spearman, mic::Family::mics, base);

    // Simulated columns: sample, rank-transform, summarize, mirroring the
    // treatment of the observed series.
    const mic::DependenceSummary sim_mick = mic::summarize_dependence(
        mic::rank_transform(mic::sample_copula(mick.copula, count, seed)));
    const mic::DependenceSummary sim_mics = mic::summarize_dependence(
        mic::rank_transform(mic::sample_copula(mics.copula, count, seed + 1)));

    json j;
    j["returns"] = returns.size();
    j["observed"] = summary_to_json(observed);
    j["mick"] = {{"ratio", mick.ratio},
                 {"model_tau", mick.tau},
                 {"model_rho", mick.rho},
                 {"information", mick.information},
                 {"simulated", summary_to_json(sim_mick)}};
    j["mics"] = {{"ratio", mics.ratio},
                 {"model_tau", mics.tau},
                 {"model_rho", mics.rho},
                 {"information", mics.information},
                 {"simulated", summary_to_json(sim_mics)}};
    j["count"] = count;
    j["seed"] = seed;

    if (!output.empty()) {
        std::ofstream out(output);
        if (!out) throw mic::IoError("cannot write " + output);
        out << "statistic,observed,simulated_mick,simulated_mics\n";
        const auto row = [&](const char* name, double a, double b, double c) {
            out << name << ',' << a << ',' << b << ',' << c << '\n';
        };
        row("tau", observed.tau, sim_mick.tau, sim_mics.tau);
        row("rho", observed.rho, sim_mick.rho, sim_mics.rho);
        row("lower_tail_5", observed.lower_tail_5, sim_mick.lower_tail_5, sim_mics.lower_tail_5);
        row("upper_tail_5", observed.upper_tail_5, sim_mick.upper_tail_5, sim_mics.upper_tail_5);
        row("lower_tail_1", observed.lower_tail_1, sim_mick.lower_tail_1, sim_mics.lower_tail_1);
        row("upper_tail_1", observed.upper_tail_1, sim_mick.upper_tail_1, sim_mics.upper_tail_1);
    }

    if (format == "json") {
        std::cout << j.dump(2) << '\n';
    } else {
        std::printf("returns: %zu\n", returns.size());
        print_summary_block("observed", observed);
        std::printf("mick: ratio=%.4f model tau=%.4f rho=%.4f information=%.4f\n", mick.ratio,
                    mick.tau, mick.rho, mick.information);
        print_summary_block("simulated mick", sim_mick);
        std::printf("mics: ratio=%.6f model tau=%.4f rho=%.4f information=%.4f\n", mics.ratio,
                    mics.tau, mics.rho, mics.information);
        print_summary_block("simulated mics", sim_mics);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "minimum-information checkerboard copulas\n"
        "exit codes: 0 success, 2 validation failure, 3 convergence failure, 4 I/O failure"};
    app.require_subcommand(1);

    std::string family = "mick", format = "text";
    int n = 30;
    std::optional<double> ratio, tau, rho;
    mic::SolverConfig base;
    std::string sweep_order = "row-major";
    std::string input, input2, output, report_path, windows_path;
    std::string column_x, column_y;
    std::vector<double> ratios;
    std::size_t count = 150;
    std::uint64_t seed = 1;

    const auto add_solver_opts = [&](CLI::App* cmd) {
        cmd->add_option("--tol", base.tol, "window-residual convergence tolerance");
        cmd->add_option("--max-sweeps", base.max_sweeps, "sweep limit");
        cmd->add_option("--sweep-order", sweep_order, "row-major or random");
        cmd->add_option("--seed", seed, "seed for random sweep order / sampling");
    };

    auto* solve = app.add_subcommand("solve", "solve for a ratio or calibrate to a correlation");
    solve->add_option("--family", family, "mick or mics")->required();
    solve->add_option("--n", n, "grid size")->required();
    solve->add_option("--ratio", ratio, "target (pseudo) log odds ratio");
    solve->add_option("--tau", tau, "target Kendall tau (calibrated)");
    solve->add_option("--rho", rho, "target Spearman rho (calibrated)");
    solve->add_option("--output", output, "matrix CSV path");
    solve->add_option("--report", report_path, "report text path");
    solve->add_option("--format", format, "text or json");
    add_solver_opts(solve);

    auto* table = app.add_subcommand("table", "parameter table over a ratio grid");
    table->add_option("--family", family, "mick or mics")->required();
    table->add_option("--n", n, "grid size");
    table->add_option("--ratios", ratios, "ratio list (default: published grids)");
    table->add_option("--output", output, "CSV path");
    table->add_option("--format", format, "text or json");
    add_solver_opts(table);

    auto* check = app.add_subcommand("check", "diagnostics for a matrix file");
    check->add_option("--input", input, "matrix CSV path")->required();
    check->add_option("--windows", windows_path, "per-window table CSV path");
    check->add_option("--format", format, "text or json");

    auto* sample = app.add_subcommand("sample", "draw points from a matrix file");
    sample->add_option("--input", input, "matrix CSV path")->required();
    sample->add_option("--count", count, "number of points")->required();
    sample->add_option("--seed", seed, "random seed");
    sample->add_option("--output", output, "points CSV path")->required();

    auto* fit = app.add_subcommand("fit", "fit both families to a bivariate price series");
    fit->add_option("--input", input, "price CSV path")->required();
    fit->add_option("--column-x", column_x, "first price column")->required();
    fit->add_option("--column-y", column_y, "second price column")->required();
    fit->add_option("--input2", input2, "optional second file (inner join on timestamps)");
    fit->add_option("--n", n, "grid size");
    fit->add_option("--count", count, "simulated sample count");
    fit->add_option("--output", output, "summary table CSV path");
    fit->add_option("--format", format, "text or json");
    add_solver_opts(fit);

    CLI11_PARSE(app, argc, argv);

    try {
        if (format != "text" && format != "json") {
            throw mic::ValidationError("unknown format '" + format + "'");
        }
        if (sweep_order == "random") {
            base.sweep_order = mic::SweepOrder::random_permutation;
            base.seed = seed;
        } else if (sweep_order != "row-major") {
            throw mic::ValidationError("unknown sweep order '" + sweep_order + "'");
        }
        if (solve->parsed()) {
            return cmd_solve(family, n, ratio, tau, rho, base, output, report_path, format);
        }
        if (table->parsed()) {
            return cmd_table(family, n, ratios, base, output, format);
        }
        if (check->parsed()) {
            return cmd_check(input, windows_path, format);
        }
        if (sample->parsed()) {
            return cmd_sample(input, count, seed, output);
        }
        if (fit->parsed()) {
            return cmd_fit(input, column_x, column_y, input2, n, count, seed, base, format,
                           output);
        }
    } catch (const mic::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const mic::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const mic::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
