#pragma once

/**
 * @file estimator.hpp
 * @brief Residual a posteriori estimator for the discrete optimality system.
 *
 * Volume residuals (per triangle):
 *   eta_1,T = h_T^2 ||f||_T,   eta_2,T = h_T^2 ||u_h - u_d||_T
 * Laplacian jumps (interior edges):
 *   eta_3,e / eta_4,e / eta_5,e = |e|^{1/2} ||[[lap q_h]]||_e, ... u_h, ... phi_h
 * Normal-derivative jumps (all edges):
 *   eta_6,e / eta_7,e / eta_8,e = |e|^{-1/2} ||[[dq_h/dn]]||_e, ... u_h, ... phi_h
 *
 * The marking indicator of a triangle collects its volume terms, half of each interior-edge
 * term and the full boundary-edge terms.
 *
 * Volume integrals use a composite rule whose leaves have a fixed absolute size: a triangle
 * of diameter d is split k times, k the least integer with d / 2^k <= leaf_diameter. After a
 * uniform refinement the children therefore integrate over the same leaves as their parent,
 * and sums of ||f||_T^2 are preserved to rounding.
 */

#include "c0ip/assembly.hpp"
#include "c0ip/error_metrics.hpp"
#include "c0ip/fe_space.hpp"
#include "c0ip/kkt.hpp"
#include "c0ip/manufactured.hpp"
#include "c0ip/mesh.hpp"
#include "c0ip/quadrature.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace c0ip {

struct EstimatorBreakdown
{
    std::array<double, 8> eta{};     // eta_1 .. eta_8 (index 0 .. 7)
    std::vector<double> per_element; // squared local indicators
    double total = 0.0;

    [[nodiscard]] double eta_k(int k) const { return eta.at(k - 1); }
};

struct EstimatorRules
{
    TriQuadRule tri = tri_rule(10);
    EdgeQuadRule edge = edge_rule(3);
    double leaf_diameter = std::sqrt(2.0) / 128.0;
};

namespace detail {

inline int subdivision_depth(double diameter, double leaf_diameter)
{
    int k = 0;
    // the tolerance keeps exact power-of-two ratios from rounding up a level
    while (diameter > leaf_diameter * (1.0 + 1e-9) && k < 12) {
        diameter *= 0.5;
        ++k;
    }
    return k;
}

} // namespace detail

inline EstimatorBreakdown compute_estimator(const KktSolution& sol, const ManufacturedCase& mc, const Mesh& mesh,
                                            const DofMap& dofs, const EstimatorRules& rules = {})
{
    EstimatorBreakdown est;
    est.per_element.assign(mesh.num_triangles(), 0.0);
    std::array<double, 8> sq{};

    struct VolumeRule
    {
        TriQuadRule rule;
        std::vector<std::array<double, 6>> shape;
    };
    std::vector<std::optional<VolumeRule>> by_depth;
    const auto volume_rule = [&](int depth) -> const VolumeRule& {
        if (static_cast<int>(by_depth.size()) <= depth) by_depth.resize(depth + 1);
        auto& slot = by_depth[depth];
        if (!slot) {
            VolumeRule vr{subdivided(rules.tri, depth), {}};
            vr.shape.reserve(vr.rule.size());
            for (const auto& p : vr.rule.points) vr.shape.push_back(p2::values(p));
            slot = std::move(vr);
        }
        return *slot;
    };

    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = mesh.geometry(t);
        const auto c = sol.u.local(dofs, t);
        const VolumeRule& vr = volume_rule(detail::subdivision_depth(g.diameter, rules.leaf_diameter));
        double f2 = 0.0;
        double r2 = 0.0;
        for (std::size_t q = 0; q < vr.rule.size(); ++q) {
            const Point2 x = g.point(vr.rule.points[q]);
            const auto& phi = vr.shape[q];
            double u_h = 0.0;
            for (int i = 0; i < 6; ++i) u_h += c[i] * phi[i];
            const double w = g.area * vr.rule.weights[q];
            const double fx = mc.f(x);
            const double rx = u_h - mc.u_d(x);
            f2 += w * fx * fx;
            r2 += w * rx * rx;
        }
        const double h4 = std::pow(g.diameter, 4);
        const double e1 = h4 * f2;
        const double e2 = h4 * r2;
        sq[0] += e1;
        sq[1] += e2;
        est.per_element[t] += e1 + e2;
    }

    const std::array<const FeFunction*, 3> fields{&sol.q, &sol.u, &sol.phi};
    for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto& ed = mesh.edges()[e];
        const auto tr = edge_traces(mesh, dofs, e, rules.edge);
        double local = 0.0;
        for (int k = 0; k < 3; ++k) {
            const Vector& v = fields[k]->coeffs;
            if (!ed.boundary) {
                double lap_jump = 0.0;
                for (int i = 0; i < tr.slots(); ++i) lap_jump += tr.lap[i] * v[tr.dofs[i]];
                // |e| * ||[[lap v]]||_e^2 with a constant jump
                const double e35 = tr.length * tr.length * lap_jump * lap_jump;
                sq[2 + k] += e35;
                local += e35;
            }
            double jn = 0.0;
            for (std::size_t q = 0; q < rules.edge.size(); ++q) {
                double jump = 0.0;
                for (int i = 0; i < tr.slots(); ++i) jump += tr.jump[q][i] * v[tr.dofs[i]];
                jn += tr.length * rules.edge.weights[q] * jump * jump;
            }
            const double e68 = jn / tr.length;
            sq[5 + k] += e68;
            local += e68;
        }
        if (ed.boundary) {
            est.per_element[ed.tris[0]] += local;
        } else {
            est.per_element[ed.tris[0]] += 0.5 * local;
            est.per_element[ed.tris[1]] += 0.5 * local;
        }
    }

    double total_sq = 0.0;
    for (int k = 0; k < 8; ++k) {
        est.eta[k] = std::sqrt(sq[k]);
        total_sq += sq[k];
    }
    est.total = std::sqrt(total_sq);
    return est;
}

/// Sum of |||.|||_h errors of q, u and phi.
inline double total_error(const ErrorReport& q, const ErrorReport& u, const ErrorReport& phi)
{
    return q.full_energy + u.full_energy + phi.full_energy;
}

/// eta / (|||q-q_h|||_h + |||u-u_h|||_h + |||phi-phi_h|||_h); empty when the error vanishes.
/// Errors below zero_tol are treated as zero: for exactly representable solutions the computed
/// error is solver round-off (about 1e-9 on fine meshes) and the ratio carries no information.
inline std::optional<double> efficiency_index(const EstimatorBreakdown& est, double total_err, double zero_tol = 1e-7)
{
    if (!(total_err > zero_tol)) return std::nullopt;
    return est.total / total_err;
}

/// Data oscillation ( sum_T h_T^4 (||g - gbar||_T^2) )^{1/2} with gbar the elementwise mean.
inline double data_oscillation(const Mesh& mesh, const ScalarField& g, const TriQuadRule& rule = tri_rule(10))
{
    double s = 0.0;
    std::vector<double> vals(rule.size());
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto geo = mesh.geometry(t);
        double mean = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            vals[q] = g(geo.point(rule.points[q]));
            mean += rule.weights[q] * vals[q];
        }
        double dev = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) dev += geo.area * rule.weights[q] * (vals[q] - mean) * (vals[q] - mean);
        s += std::pow(geo.diameter, 4) * dev;
    }
    return std::sqrt(s);
}

} // namespace c0ip
