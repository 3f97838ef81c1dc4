#pragma once

/**
 * @file error_metrics.hpp
 * @brief L2 and mesh-dependent energy errors against exact fields, and empirical orders.
 *
 *   ||v||_h^2   = sum_T ||lap v||_T^2 + sum_{e in E_h} sigma/|e| ||[[dv/dn]]||_e^2
 *   |||v|||_h^2 = ||v||_h^2 + ||v||^2
 *
 * The jump sum runs over all edges. For a smooth exact field only boundary edges carry a
 * non-zero jump of the exact part (grad u . n_e), which vanishes for admissible fields.
 */

#include "c0ip/assembly.hpp"
#include "c0ip/fe_space.hpp"
#include "c0ip/fields.hpp"
#include "c0ip/mesh.hpp"
#include "c0ip/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace c0ip {

struct ErrorReport
{
    double l2 = 0.0;
    double energy = 0.0;      // ||.||_h
    double full_energy = 0.0; // |||.|||_h
    double volume_sq = 0.0;   // sum_T ||lap(.)||_T^2
    double jump_sq = 0.0;     // sum_e sigma/|e| ||[[d(.)/dn]]||_e^2
    std::vector<double> per_element; // ||lap(.)||_T^2 + ||.||_T^2
};

struct ErrorRules
{
    TriQuadRule tri = tri_rule(10);
    EdgeQuadRule edge = edge_rule(5);
};

inline ErrorReport error_norms(const SmoothField& exact, const FeFunction& fn, const Mesh& mesh, const DofMap& dofs,
                               const PenaltyConfig& cfg, const ErrorRules& rules = {})
{
    cfg.validate();
    if (fn.coeffs.size() != dofs.n_dofs() || dofs.n_triangles() != mesh.num_triangles())
        throw std::invalid_argument("error_norms: function, DofMap and mesh sizes differ");

    ErrorReport rep;
    rep.per_element.assign(mesh.num_triangles(), 0.0);
    double l2_sq = 0.0;
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = mesh.geometry(t);
        const auto c = fn.local(dofs, t);
        const auto lap = p2::laplacians(g);
        double lap_h = 0.0;
        for (int i = 0; i < 6; ++i) lap_h += c[i] * lap[i];
        double vol = 0.0;
        double l2 = 0.0;
        for (std::size_t q = 0; q < rules.tri.size(); ++q) {
            const Jet j = exact(g.point(rules.tri.points[q]));
            const auto phi = p2::values(rules.tri.points[q]);
            double v_h = 0.0;
            for (int i = 0; i < 6; ++i) v_h += c[i] * phi[i];
            const double w = g.area * rules.tri.weights[q];
            vol += w * (j.laplacian() - lap_h) * (j.laplacian() - lap_h);
            l2 += w * (j.value - v_h) * (j.value - v_h);
        }
        rep.volume_sq += vol;
        l2_sq += l2;
        rep.per_element[t] = vol + l2;
    }

    for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto tr = edge_traces(mesh, dofs, e, rules.edge);
        const bool boundary = mesh.edges()[e].boundary;
        double s = 0.0;
        for (std::size_t q = 0; q < rules.edge.size(); ++q) {
            double jump = 0.0;
            for (int i = 0; i < tr.slots(); ++i) jump += tr.jump[q][i] * fn.coeffs[tr.dofs[i]];
            if (boundary) jump -= exact(mesh.edge_point(e, rules.edge.points[q])).gradient.dot(tr.normal);
            s += tr.length * rules.edge.weights[q] * jump * jump;
        }
        rep.jump_sq += cfg.sigma / tr.length * s;
    }

    rep.l2 = std::sqrt(l2_sq);
    rep.energy = std::sqrt(rep.volume_sq + rep.jump_sq);
    rep.full_energy = std::sqrt(rep.volume_sq + rep.jump_sq + l2_sq);
    return rep;
}

struct NormOrders
{
    double l2 = std::numeric_limits<double>::quiet_NaN();
    double energy = std::numeric_limits<double>::quiet_NaN();
    double full_energy = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceRow
{
    int level = 0;
    double h = 0.0;
    Index ndof = 0;
    std::map<std::string, ErrorReport> errors;
    std::map<std::string, NormOrders> orders; // NaN on the first row
};

enum class EocAxis { MeshSize, Dofs };

/// Fills the order columns. MeshSize: order = log2(e_{k-1}/e_k), requires h to halve between
/// rows. Dofs: order = log(e_{k-1}/e_k) / log(sqrt(N_k/N_{k-1})).
inline void eoc(std::vector<ConvergenceRow>& rows, EocAxis axis = EocAxis::MeshSize)
{
    const auto rate = [](double prev, double cur, double log_ratio) {
        if (!(prev > 0.0) || !(cur > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return std::log(prev / cur) / log_ratio;
    };
    for (std::size_t k = 0; k < rows.size(); ++k) {
        rows[k].orders.clear();
        for (const auto& [var, err] : rows[k].errors) {
            NormOrders o;
            if (k > 0) {
                double log_ratio = 0.0;
                if (axis == EocAxis::MeshSize) {
                    if (std::abs(rows[k - 1].h / rows[k].h - 2.0) > 1e-9)
                        throw std::invalid_argument("eoc: mesh size does not halve between rows " + std::to_string(k - 1) +
                                                    " and " + std::to_string(k));
                    log_ratio = std::log(2.0);
                } else {
                    log_ratio = 0.5 * std::log(static_cast<double>(rows[k].ndof) / rows[k - 1].ndof);
                }
                const auto& prev = rows[k - 1].errors.at(var);
                o.l2 = rate(prev.l2, err.l2, log_ratio);
                o.energy = rate(prev.energy, err.energy, log_ratio);
                o.full_energy = rate(prev.full_energy, err.full_energy, log_ratio);
            }
            rows[k].orders[var] = o;
        }
    }
}

/// Order sequence from plain error values on halving meshes.
inline std::vector<double> eoc(const std::vector<double>& errors)
{
    std::vector<double> out(errors.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 1; k < errors.size(); ++k) out[k] = std::log2(errors[k - 1] / errors[k]);
    return out;
}

} // namespace c0ip
