#pragma once

/**
 * @file afem.hpp
 * @brief SOLVE -> ESTIMATE -> MARK -> REFINE with bulk (Doerfler) marking and newest-vertex
 *        bisection.
 */

#include "c0ip/assembly.hpp"
#include "c0ip/error_metrics.hpp"
#include "c0ip/estimator.hpp"
#include "c0ip/fe_space.hpp"
#include "c0ip/kkt.hpp"
#include "c0ip/manufactured.hpp"
#include "c0ip/mesh.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace c0ip {

struct MarkResult
{
    std::vector<Index> marked; // in descending indicator order
    bool converged = false;    // all indicators zero
};

/// Smallest prefix of the indicators sorted descending (ties by index) whose sum reaches
/// theta * (sum of all indicators). Indicators are squared local estimator contributions.
inline MarkResult dorfler_mark(const std::vector<double>& indicators_sq, double theta)
{
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("dorfler_mark: theta must lie in (0, 1]");
    for (double v : indicators_sq)
        if (!(v >= 0.0)) throw std::invalid_argument("dorfler_mark: indicators must be non-negative");

    std::vector<Index> order(indicators_sq.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return indicators_sq[a] > indicators_sq[b]; });

    // summing in sorted order makes the full nonzero prefix reproduce the total bit for bit
    double total = 0.0;
    for (Index i : order) total += indicators_sq[i];

    MarkResult res;
    if (!(total > 0.0)) {
        res.converged = true;
        return res;
    }
    const double target = theta * total;
    double acc = 0.0;
    for (Index i : order) {
        if (acc >= target || indicators_sq[i] == 0.0) break;
        acc += indicators_sq[i];
        res.marked.push_back(i);
    }
    return res;
}

struct AfemConfig
{
    double theta = 0.4;
    int max_levels = 50;
    Index max_ndof = 100000;
    double sigma = 20.0;
    std::optional<double> alpha; // overrides the case's alpha when set
    std::string case_name = "example1";
    int initial_n = 2;

    void validate() const
    {
        if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
        if (max_levels < 1) throw std::invalid_argument("max_levels must be >= 1");
        if (max_ndof < 1) throw std::invalid_argument("max_ndof must be >= 1");
        if (initial_n < 1) throw std::invalid_argument("initial mesh size must be >= 1");
        if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
        PenaltyConfig{sigma}.validate();
    }
};

struct AfemLevel
{
    int level = 0;
    Index ndof = 0; // KKT unknowns: 2 |interior DOFs| + |all DOFs|
    Index triangles = 0;
    Index marked = 0;
    EstimatorBreakdown estimator;
    ErrorReport err_q, err_u, err_phi;
    double total_error = 0.0;
    std::optional<double> efficiency;
    double kkt_residual = 0.0;
    std::string mesh_conformity; // empty when conforming
};

struct AfemTrace
{
    std::vector<AfemLevel> levels;
    bool converged = false; // zero estimator
    std::string stop_reason;
    std::string failure; // solver failure message, empty on success
};

/// Runs the adaptive loop. on_level, when set, sees every level together with its mesh.
inline AfemTrace run_afem(const AfemConfig& cfg,
                          const std::function<void(const AfemLevel&, const Mesh&)>& on_level = {})
{
    cfg.validate();
    ManufacturedCase mc = case_by_name(cfg.case_name);
    if (cfg.alpha) mc.alpha = *cfg.alpha;
    const PenaltyConfig pen{cfg.sigma};

    AfemTrace trace;
    Mesh mesh = build_unit_square(cfg.initial_n);
    for (int level = 0; level < cfg.max_levels; ++level) {
        const DofMap dofs(mesh);
        AfemLevel rec;
        rec.level = level + 1;
        rec.triangles = mesh.num_triangles();
        rec.ndof = 2 * dofs.n_interior() + dofs.n_dofs();
        rec.mesh_conformity = mesh.check_unit_square_conformity();

        KktSolution sol;
        try {
            const KktSystem sys = build_kkt(mesh, dofs, pen, mc);
            sol = solve_kkt(sys, dofs);
        } catch (const SolverError& ex) {
            trace.failure = ex.what();
            trace.stop_reason = "solver failure";
            return trace;
        }
        rec.kkt_residual = sol.residual_norm;
        rec.estimator = compute_estimator(sol, mc, mesh, dofs);
        rec.err_q = error_norms(mc.exact_q, sol.q, mesh, dofs, pen);
        rec.err_u = error_norms(mc.exact_u, sol.u, mesh, dofs, pen);
        rec.err_phi = error_norms(mc.exact_phi, sol.phi, mesh, dofs, pen);
        rec.total_error = total_error(rec.err_q, rec.err_u, rec.err_phi);
        rec.efficiency = efficiency_index(rec.estimator, rec.total_error);

        const MarkResult mark = dorfler_mark(rec.estimator.per_element, cfg.theta);
        rec.marked = static_cast<Index>(mark.marked.size());
        trace.levels.push_back(rec);
        if (on_level) on_level(trace.levels.back(), mesh);

        // indicators at round-off level of the data count as converged
        if (mark.converged || rec.estimator.total < 1e-9) {
            trace.converged = true;
            trace.stop_reason = "converged";
            return trace;
        }
        if (rec.ndof >= cfg.max_ndof) {
            trace.stop_reason = "max_ndof";
            return trace;
        }
        mesh = nvb_refine(mesh, mark.marked);
    }
    trace.stop_reason = "max_levels";
    return trace;
}

} // namespace c0ip
