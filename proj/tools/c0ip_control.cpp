// Command-line front end: uniform convergence studies and adaptive runs.
//
//   c0ip-control <uniform|adaptive> [--case NAME] [--levels N | --max-ndof N] [--sigma S]
//                [--alpha A] [--theta T] [--out DIR] [--emit-mesh] [--dump-matrices]
//
// Exit status: 0 success, 1 solver failure, 2 usage or validation error.

#include "c0ip/report.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int exit_usage = 2;
constexpr int exit_solver = 1;

void apply_thread_cap()
{
    if (const char* env = std::getenv("C0IP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) Eigen::setNbThreads(n);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quadratic C0 interior penalty solver for the biharmonic Dirichlet boundary control problem"};
    app.require_subcommand(1);

    c0ip::RunConfig cfg;
    std::optional<double> alpha;
    std::string out = "c0ip-out";

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--case", cfg.case_name, "Benchmark case: example1 | constant");
        sub->add_option("--sigma", cfg.sigma, "Penalty parameter (>= 1)")->capture_default_str();
        sub->add_option("--alpha", alpha, "Regularisation weight (default: the case's value)");
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        sub->add_flag("--emit-mesh", cfg.emit_mesh, "Write the mesh of every level");
        sub->add_flag("--dump-matrices", cfg.dump_matrices, "Write a_h and mass matrices in coordinate format");
    };

    auto* uniform = app.add_subcommand("uniform", "Convergence study under uniform refinement");
    common(uniform);
    uniform->add_option("--levels", cfg.levels, "Number of meshes in the hierarchy")->capture_default_str();
    uniform->add_option("--start-level", cfg.start_level, "First mesh has 2^L cells per side")->capture_default_str();

    auto* adaptive = app.add_subcommand("adaptive", "Adaptive loop with bulk marking and newest vertex bisection");
    common(adaptive);
    adaptive->add_option("--max-ndof", cfg.max_ndof, "Stop once the KKT dimension reaches this size")->capture_default_str();
    adaptive->add_option("--max-levels", cfg.max_levels, "Maximum number of adaptive levels")->capture_default_str();
    adaptive->add_option("--theta", cfg.theta, "Bulk marking parameter in (0,1)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    cfg.alpha = alpha;
    cfg.out_dir = out;
    cfg.mode = adaptive->parsed() ? c0ip::Mode::Adaptive : c0ip::Mode::Uniform;
    apply_thread_cap();

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help();
        return exit_usage;
    }

    try {
        if (cfg.mode == c0ip::Mode::Uniform) {
            const auto res = c0ip::run_uniform(cfg, &std::cerr);
            c0ip::print_uniform_tables(std::cout, res);
        } else {
            const auto res = c0ip::run_adaptive(cfg, &std::cerr);
            if (res.trace.converged)
                std::cout << "converged at level " << res.trace.levels.back().level << " (estimator vanishes)\n";
            else
                std::cout << "stopped (" << res.trace.stop_reason << ") after " << res.trace.levels.size()
                          << " levels; slope(eta) = " << (res.eta_slope ? c0ip::sig6(*res.eta_slope) : "n/a")
                          << ", slope(error) = " << (res.error_slope ? c0ip::sig6(*res.error_slope) : "n/a") << '\n';
        }
        std::cout << "artifacts written to " << cfg.out_dir.string() << '\n';
    } catch (const c0ip::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return exit_solver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_solver;
    }
    return 0;
}
