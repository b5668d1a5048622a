#include "fracttm/bench.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

// Accepts "0.05" as well as "1/20".
double parse_number(const std::string& s) {
    const auto slash = s.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("bad number '" + s + "'");
        }
        return v;
    }
    const double num = parse_number(s.substr(0, slash));
    const double den = parse_number(s.substr(slash + 1));
    if (den == 0.0) {
        throw std::invalid_argument("zero denominator in '" + s + "'");
    }
    return num / den;
}

std::vector<double> parse_list(const std::vector<std::string>& in) {
    std::vector<double> out;
    for (const auto& s : in) {
        out.push_back(parse_number(s));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-fractional Allen-Cahn benchmarks: standard FE vs TT-M"};
    app.set_help_flag("--help", "print this help and exit");

    std::string example = "example1";
    std::string method = "ttm";
    std::string study = "convergence";
    std::vector<std::string> alphas{"1.5"}, thetas{"0"}, epsilons{"0.01"}, hs, tau_cs, taus;
    std::vector<int> Ms;
    std::string horizon = "1";
    int reference_res = 64;
    int timing_runs = 3;
    std::string out;
    std::string exact_out;
    std::string cache_dir;
    std::string stop = "increment";

    app.add_option("--example", example, "example1 | example2 | example3")
        ->check(CLI::IsMember({"example1", "example2", "example3"}));
    app.add_option("--method", method, "ttm | fe | both")->check(CLI::IsMember({"ttm", "fe", "both"}));
    app.add_option("--study", study, "convergence | m-sweep | surface")
        ->check(CLI::IsMember({"convergence", "m-sweep", "surface"}));
    app.add_option("--alpha", alphas, "fractional orders in (1, 2)");
    app.add_option("--theta", thetas, "theta values in [0, 1/2]");
    app.add_option("--epsilon", epsilons, "interface widths");
    app.add_option("--h", hs, "mesh sizes, e.g. 1/10 1/20");
    app.add_option("--tau-c", tau_cs, "coarse steps");
    app.add_option("--tau", taus, "fine steps (default tau_c / M)");
    app.add_option("--M", Ms, "coarse/fine ratios; 1 is the standard FE method in m-sweep");
    app.add_option("--T", horizon, "final time");
    app.add_option("--reference-res", reference_res, "reference h = tau = 1/N for examples 2 and 3")
        ->check(CLI::PositiveNumber);
    app.add_option("--timing-runs", timing_runs, "timed runs per cell (median); 1 skips the warm-up")
        ->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", cache_dir, "reference cache directory (default $FRACTTM_CACHE_DIR)");
    app.add_option("--newton-stop", stop, "increment | residual")->check(CLI::IsMember({"increment", "residual"}));
    app.add_option("--out", out, "output CSV or surface file (default stdout for CSV)");
    app.add_option("--exact-out", exact_out, "surface study: also write the exact solution here");

    CLI11_PARSE(app, argc, argv);

    try {
        fracttm::StudyConfig cfg;
        cfg.problem = example;
        cfg.method = method == "ttm" ? fracttm::Method::ttm
                     : method == "fe" ? fracttm::Method::fe
                                      : fracttm::Method::both;
        cfg.alphas = parse_list(alphas);
        cfg.thetas = parse_list(thetas);
        cfg.epsilons = parse_list(epsilons);
        cfg.hs = parse_list(hs);
        cfg.tau_cs = parse_list(tau_cs);
        cfg.taus = parse_list(taus);
        cfg.Ms = Ms;
        cfg.horizon = parse_number(horizon);
        cfg.reference_res = reference_res;
        cfg.timing_runs = timing_runs;
        cfg.cache_dir = cache_dir;
        cfg.newton.stop = stop == "residual" ? fracttm::NewtonStop::residual : fracttm::NewtonStop::increment;

        if (study == "surface") {
            if (out.empty()) {
                throw std::invalid_argument("surface study needs --out");
            }
            if (cfg.Ms.empty()) {
                cfg.Ms = {cfg.method == fracttm::Method::fe ? 1 : 2};
            }
            const auto ladder = fracttm::study_ladder(cfg);
            if (ladder.empty()) {
                throw std::invalid_argument("surface study needs --h");
            }
            const auto& row = ladder.front();
            fracttm::ProblemSpec problem = fracttm::make_problem(example, cfg.alphas.at(0), cfg.epsilons.at(0));
            problem.horizon = cfg.horizon;
            fracttm::DiscretizationConfig disc;
            disc.n_cells = row.n_cells;
            disc.tau = row.tau;
            disc.M = row.M;
            disc.theta = cfg.thetas.at(0);
            disc.newton = cfg.newton;
            disc.keep_trajectory = false;
            const auto ops =
                fracttm::build_operator_set(fracttm::TensorMesh2D::unit_square(row.n_cells), problem.order,
                                            problem.epsilon);
            const fracttm::StateVector final_state =
                cfg.method == fracttm::Method::fe || row.M < 2
                    ? fracttm::run_standard_fe(problem, disc, ops).states.back()
                    : fracttm::run_ttm(problem, disc, ops).fine_states.back();
            fracttm::emit_surface(final_state, ops.mesh, out);
            if (!exact_out.empty()) {
                if (!problem.exact) {
                    throw std::invalid_argument(example + " has no exact solution");
                }
                const double t = problem.horizon;
                const auto u = problem.exact->u;
                fracttm::emit_surface([&](double x, double y) { return u(x, y, t); }, ops.mesh, exact_out);
            }
            return 0;
        }

        const fracttm::ConvergenceReport report =
            study == "m-sweep" ? fracttm::run_m_study(cfg) : fracttm::run_convergence_study(cfg);
        if (out.empty()) {
            fracttm::write_csv(std::cout, report);
        } else {
            fracttm::write_csv(out, report);
        }
        for (const auto& r : report.rows) {
            if (r.status != "ok") {
                return 2;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "fracttm_bench: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
