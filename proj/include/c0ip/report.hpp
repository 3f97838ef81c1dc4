#pragma once

/**
 * @file report.hpp
 * @brief Uniform convergence studies and adaptive runs with CSV / JSON artifacts.
 *
 * Artifacts written to RunConfig::out_dir:
 *   uniform:  convergence.csv  level,h,ndof,var,norm,error,order
 *             estimator.csv    level,ndof,eta1..eta8,eta_total,total_error,efficiency_index
 *             solution.csv     dof,x,y,u,phi,q   (finest level)
 *   adaptive: trace.csv        estimator columns + marked,triangles
 *   both:     summary.json     {mode, case, levels, slope, efficiency_min, efficiency_max, ...}
 *             mesh_level_<k>.txt with emit_mesh, ah_level_<k>.txt / mass_level_<k>.txt with dump_matrices
 */

#include "c0ip/afem.hpp"
#include "c0ip/assembly.hpp"
#include "c0ip/error_metrics.hpp"
#include "c0ip/estimator.hpp"
#include "c0ip/kkt.hpp"
#include "c0ip/manufactured.hpp"
#include "c0ip/mesh.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace c0ip {

enum class Mode { Uniform, Adaptive };

struct RunConfig
{
    Mode mode = Mode::Uniform;
    std::string case_name;
    int levels = 5;      // uniform: number of meshes
    int start_level = 2; // uniform: first mesh has n = 2^start_level cells per side
    Index max_ndof = 100000;
    int max_levels = 50;
    double sigma = 20.0;
    std::optional<double> alpha;
    double theta = 0.4;
    std::filesystem::path out_dir = "c0ip-out";
    bool emit_mesh = false;
    bool dump_matrices = false;
    bool write_json = true;
    bool write_csv = true;

    void validate() const
    {
        if (case_name.empty()) throw std::invalid_argument("a case name is required (--case example1|constant)");
        (void)case_by_name(case_name);
        PenaltyConfig{sigma}.validate();
        if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
        if (mode == Mode::Uniform) {
            if (levels < 2) throw std::invalid_argument("uniform mode needs --levels >= 2");
            if (start_level < 0 || start_level + levels > 12) throw std::invalid_argument("start level out of range");
        } else {
            if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
            if (max_ndof < 1) throw std::invalid_argument("max-ndof must be positive");
        }
    }
};

/// printf-style "%.6g".
inline std::string sig6(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct UniformLevel
{
    ConvergenceRow row;
    EstimatorBreakdown estimator;
    double total_error = 0.0;
    std::optional<double> efficiency;
    std::array<double, 3> kkt_residuals{};
    double oscillation = 0.0; // data oscillation of f and u_d, summed
};

struct UniformResult
{
    std::vector<UniformLevel> levels;
};

/// Exact-solution errors below this are treated as round-off; the order column then reads "exact".
inline constexpr double exact_error_tol = 1e-8;

inline std::string order_text(double prev, double cur, double order, bool first)
{
    if (first) return "-";
    if (prev < exact_error_tol && cur < exact_error_tol) return "exact";
    if (std::isnan(order)) return "nan";
    return sig6(order);
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p)
{
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return os;
}

inline void write_estimator_row(std::ostream& os, int level, Index ndof, const EstimatorBreakdown& est, double err,
                                const std::optional<double>& eff)
{
    os << level << ',' << ndof;
    for (double e : est.eta) os << ',' << sig6(e);
    os << ',' << sig6(est.total) << ',' << sig6(err) << ',' << (eff ? sig6(*eff) : std::string("undefined"));
}

inline const char* estimator_header() { return "level,ndof,eta1,eta2,eta3,eta4,eta5,eta6,eta7,eta8,eta_total,total_error,efficiency_index"; }

inline void dump_level(const RunConfig& cfg, int level, const Mesh& mesh, const DofMap& dofs)
{
    if (cfg.emit_mesh) {
        auto os = open_out(cfg.out_dir / ("mesh_level_" + std::to_string(level) + ".txt"));
        mesh.write_text(os);
    }
    if (cfg.dump_matrices) {
        auto a = open_out(cfg.out_dir / ("ah_level_" + std::to_string(level) + ".txt"));
        write_coordinate(a, assemble_ah(mesh, dofs, PenaltyConfig{cfg.sigma}));
        auto m = open_out(cfg.out_dir / ("mass_level_" + std::to_string(level) + ".txt"));
        write_coordinate(m, assemble_mass(mesh, dofs));
    }
}

} // namespace detail

/// Solves the uniform hierarchy n = 2^start_level, ..., 2^(start_level+levels-1).
inline UniformResult run_uniform(const RunConfig& cfg, std::ostream* log = nullptr)
{
    cfg.validate();
    ManufacturedCase mc = case_by_name(cfg.case_name);
    if (cfg.alpha) mc.alpha = *cfg.alpha;
    const PenaltyConfig pen{cfg.sigma};
    if (cfg.emit_mesh || cfg.dump_matrices || cfg.write_csv || cfg.write_json) std::filesystem::create_directories(cfg.out_dir);

    UniformResult res;
    std::vector<ConvergenceRow> rows;
    Mesh mesh = build_unit_square(1 << cfg.start_level);
    KktSolution last;
    DofMap last_dofs;
    Mesh last_mesh;
    for (int k = 0; k < cfg.levels; ++k) {
        if (k > 0) mesh = uniform_refine(mesh);
        const int level = cfg.start_level + k;
        const DofMap dofs(mesh);
        const KktSystem sys = build_kkt(mesh, dofs, pen, mc);
        const KktSolution sol = solve_kkt(sys, dofs);

        UniformLevel lv;
        lv.row.level = level;
        lv.row.h = 1.0 / static_cast<double>(1 << level);
        lv.row.ndof = sys.size();
        lv.row.errors["u"] = error_norms(mc.exact_u, sol.u, mesh, dofs, pen);
        lv.row.errors["phi"] = error_norms(mc.exact_phi, sol.phi, mesh, dofs, pen);
        lv.row.errors["q"] = error_norms(mc.exact_q, sol.q, mesh, dofs, pen);
        lv.kkt_residuals = variational_residuals(sys, dofs, sol);
        lv.estimator = compute_estimator(sol, mc, mesh, dofs);
        lv.total_error = total_error(lv.row.errors["q"], lv.row.errors["u"], lv.row.errors["phi"]);
        lv.efficiency = efficiency_index(lv.estimator, lv.total_error);
        lv.oscillation = data_oscillation(mesh, mc.f) + data_oscillation(mesh, mc.u_d);
        detail::dump_level(cfg, level, mesh, dofs);
        if (log)
            *log << "level " << level << ": h = 1/" << (1 << level) << ", ndof = " << lv.row.ndof
                 << ", KKT residual = " << sig6(sol.residual_norm) << '\n';
        res.levels.push_back(std::move(lv));
        rows.push_back(res.levels.back().row);
        if (k + 1 == cfg.levels) {
            last = sol;
            last_dofs = dofs;
            last_mesh = mesh;
        }
    }
    eoc(rows, EocAxis::MeshSize);
    for (std::size_t k = 0; k < rows.size(); ++k) res.levels[k].row.orders = rows[k].orders;

    if (cfg.write_csv) {
        auto os = detail::open_out(cfg.out_dir / "convergence.csv");
        os << "level,h,ndof,var,norm,error,order\n";
        for (std::size_t k = 0; k < rows.size(); ++k) {
            for (const char* var : {"u", "phi", "q"}) {
                const auto& e = rows[k].errors.at(var);
                const auto& o = rows[k].orders.at(var);
                const auto emit = [&](const char* norm, double err, double prev, double order) {
                    os << rows[k].level << ',' << sig6(rows[k].h) << ',' << rows[k].ndof << ',' << var << ',' << norm
                       << ',' << sig6(err) << ',' << order_text(prev, err, order, k == 0) << '\n';
                };
                const ErrorReport* p = k > 0 ? &rows[k - 1].errors.at(var) : nullptr;
                emit("energy", e.energy, p ? p->energy : 0.0, o.energy);
                emit("l2", e.l2, p ? p->l2 : 0.0, o.l2);
                emit("full", e.full_energy, p ? p->full_energy : 0.0, o.full_energy);
            }
        }
        auto es = detail::open_out(cfg.out_dir / "estimator.csv");
        es << detail::estimator_header() << '\n';
        for (const auto& lv : res.levels) {
            detail::write_estimator_row(es, lv.row.level, lv.row.ndof, lv.estimator, lv.total_error, lv.efficiency);
            es << '\n';
        }
        auto ss = detail::open_out(cfg.out_dir / "solution.csv");
        write_solution_csv(ss, last_mesh, last_dofs, last);
    }

    if (cfg.write_json) {
        std::vector<double> nd, err;
        double eff_min = std::numeric_limits<double>::infinity();
        double eff_max = -std::numeric_limits<double>::infinity();
        for (const auto& lv : res.levels) {
            nd.push_back(static_cast<double>(lv.row.ndof));
            err.push_back(lv.total_error);
            if (lv.efficiency) {
                eff_min = std::min(eff_min, *lv.efficiency);
                eff_max = std::max(eff_max, *lv.efficiency);
            }
        }
        nlohmann::ordered_json j;
        j["mode"] = "uniform";
        j["case"] = cfg.case_name;
        j["levels"] = cfg.levels;
        const bool exact = std::all_of(err.begin(), err.end(), [](double e) { return e < exact_error_tol; });
        j["slope"] = exact ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(loglog_slope(nd, err));
        j["efficiency_min"] = std::isfinite(eff_min) ? nlohmann::ordered_json(eff_min) : nlohmann::ordered_json(nullptr);
        j["efficiency_max"] = std::isfinite(eff_max) ? nlohmann::ordered_json(eff_max) : nlohmann::ordered_json(nullptr);
        j["sigma"] = cfg.sigma;
        j["alpha"] = mc.alpha;
        auto os = detail::open_out(cfg.out_dir / "summary.json");
        os << j.dump(2) << '\n';
    }
    return res;
}

/// Error/order tables (energy and L2) with 6 significant digits.
inline void print_uniform_tables(std::ostream& os, const UniformResult& res)
{
    const auto table = [&](const char* title, auto pick) {
        os << title << '\n';
        os << "h        ||u-u_h||   order    ||phi-phi_h|| order    ||q-q_h||   order\n";
        for (std::size_t k = 0; k < res.levels.size(); ++k) {
            const auto& row = res.levels[k].row;
            char hbuf[32];
            std::snprintf(hbuf, sizeof hbuf, "1/%-6d", 1 << row.level);
            os << hbuf;
            for (const char* var : {"u", "phi", "q"}) {
                const double e = pick(row.errors.at(var));
                const double prev = k > 0 ? pick(res.levels[k - 1].row.errors.at(var)) : 0.0;
                const double o = k > 0 ? std::log2(prev / e) : 0.0;
                char buf[64];
                std::snprintf(buf, sizeof buf, " %-11s %-8s", sig6(e).c_str(), order_text(prev, e, o, k == 0).c_str());
                os << buf;
            }
            os << '\n';
        }
    };
    table("Errors and orders of convergence in the energy norm ||.||_h", [](const ErrorReport& e) { return e.energy; });
    os << '\n';
    table("Errors and orders of convergence in the L2 norm", [](const ErrorReport& e) { return e.l2; });
}

struct AdaptiveResult
{
    AfemTrace trace;
    std::optional<double> eta_slope;
    std::optional<double> error_slope;
};

inline AdaptiveResult run_adaptive(const RunConfig& cfg, std::ostream* log = nullptr)
{
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    AfemConfig acfg;
    acfg.theta = cfg.theta;
    acfg.max_ndof = cfg.max_ndof;
    acfg.max_levels = cfg.max_levels;
    acfg.sigma = cfg.sigma;
    acfg.alpha = cfg.alpha;
    acfg.case_name = cfg.case_name;

    AdaptiveResult res;
    res.trace = run_afem(acfg, [&](const AfemLevel& lv, const Mesh& mesh) {
        if (cfg.emit_mesh || cfg.dump_matrices) detail::dump_level(cfg, lv.level, mesh, DofMap(mesh));
        if (log)
            *log << "level " << lv.level << ": ndof = " << lv.ndof << ", eta = " << sig6(lv.estimator.total)
                 << ", error = " << sig6(lv.total_error) << ", marked " << lv.marked << " of " << lv.triangles << '\n';
    });

    const auto& levels = res.trace.levels;
    if (levels.size() >= 2) {
        const std::size_t first = levels.size() > 5 ? levels.size() - 5 : 0;
        std::vector<double> nd, eta, err;
        for (std::size_t k = first; k < levels.size(); ++k) {
            nd.push_back(static_cast<double>(levels[k].ndof));
            eta.push_back(levels[k].estimator.total);
            err.push_back(levels[k].total_error);
        }
        if (!res.trace.converged) {
            res.eta_slope = loglog_slope(nd, eta);
            res.error_slope = loglog_slope(nd, err);
        }
    }

    if (cfg.write_csv) {
        auto os = detail::open_out(cfg.out_dir / "trace.csv");
        os << detail::estimator_header() << ",marked,triangles\n";
        for (const auto& lv : levels) {
            detail::write_estimator_row(os, lv.level, lv.ndof, lv.estimator, lv.total_error, lv.efficiency);
            os << ',' << lv.marked << ',' << lv.triangles << '\n';
        }
    }
    if (cfg.write_json) {
        double eff_min = std::numeric_limits<double>::infinity();
        double eff_max = -std::numeric_limits<double>::infinity();
        for (const auto& lv : levels)
            if (lv.efficiency) {
                eff_min = std::min(eff_min, *lv.efficiency);
                eff_max = std::max(eff_max, *lv.efficiency);
            }
        const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
        nlohmann::ordered_json j;
        j["mode"] = "adaptive";
        j["case"] = cfg.case_name;
        j["levels"] = levels.size();
        j["slope"] = opt(res.eta_slope);
        j["efficiency_min"] = std::isfinite(eff_min) ? nlohmann::ordered_json(eff_min) : nlohmann::ordered_json(nullptr);
        j["efficiency_max"] = std::isfinite(eff_max) ? nlohmann::ordered_json(eff_max) : nlohmann::ordered_json(nullptr);
        j["error_slope"] = opt(res.error_slope);
        j["converged"] = res.trace.converged;
        j["stop_reason"] = res.trace.stop_reason;
        j["theta"] = cfg.theta;
        j["sigma"] = cfg.sigma;
        auto os = detail::open_out(cfg.out_dir / "summary.json");
        os << j.dump(2) << '\n';
    }
    if (!res.trace.failure.empty()) throw SolverError(res.trace.failure, std::numeric_limits<double>::quiet_NaN());
    return res;
}

} // namespace c0ip
