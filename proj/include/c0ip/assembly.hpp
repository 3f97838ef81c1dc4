#pragma once

/**
 * @file assembly.hpp
 * @brief Global matrices and load vectors of the quadratic C0 interior penalty method.
 *
 * The bilinear form on Q_h x Q_h is
 *
 *   a_h(p, r) = sum_T int_T lap p lap r
 *             - sum_e int_e {{lap p}} [[dr/dn]] - sum_e int_e {{lap r}} [[dp/dn]]
 *             + sum_e sigma/|e| int_e [[dp/dn]] [[dr/dn]],
 *
 * with all edge sums running over interior AND boundary edges. The jump is the sum of the
 * outward normal derivatives of both sides, [[dv/dn]] = (grad v_0 - grad v_1) . n_e with n_e
 * outward from the lower-indexed neighbour; on a boundary edge [[dv/dn]] = grad v . n_e and
 * {{lap v}} = lap v. With this jump the consistency terms carry a minus sign.
 */

#include "c0ip/fe_space.hpp"
#include "c0ip/fields.hpp"
#include "c0ip/mesh.hpp"
#include "c0ip/quadrature.hpp"

#include <Eigen/Sparse>

#include <array>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace c0ip {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct PenaltyConfig
{
    double sigma = 20.0;

    void validate() const
    {
        if (!(sigma >= 1.0)) throw std::invalid_argument("penalty parameter sigma must be >= 1");
    }
};

struct EdgeGeometry
{
    Vec2 normal = Vec2::Zero(); // outward from tris[0]
    double length = 0.0;
};

inline std::vector<EdgeGeometry> edge_geometry(const Mesh& mesh)
{
    std::vector<EdgeGeometry> g(mesh.num_edges());
    for (Index e = 0; e < mesh.num_edges(); ++e) g[e] = {mesh.edge_normal(e), mesh.edge_length(e)};
    return g;
}

/// Traces of the local basis functions of the one or two triangles adjacent to an edge:
/// slot 6*s + i is local function i of side s. avg holds the weighted Laplacian entering
/// {{lap v}}; jump[q] the contribution to [[dv/dn]] at edge quadrature point q.
struct EdgeTraces
{
    int sides = 1;
    std::array<Index, 12> dofs{};
    std::array<double, 12> avg{};
    std::array<double, 12> lap{};
    std::vector<std::array<double, 12>> jump;
    Vec2 normal = Vec2::Zero();
    double length = 0.0;

    [[nodiscard]] int slots() const { return 6 * sides; }
};

inline EdgeTraces edge_traces(const Mesh& mesh, const DofMap& dofs, Index e, const EdgeQuadRule& rule)
{
    const auto& ed = mesh.edges()[e];
    EdgeTraces tr;
    tr.sides = ed.boundary ? 1 : 2;
    tr.normal = mesh.edge_normal(e);
    tr.length = mesh.edge_length(e);
    tr.jump.assign(rule.size(), {});
    const double avg_weight = ed.boundary ? 1.0 : 0.5;
    for (int s = 0; s < tr.sides; ++s) {
        const Index t = ed.tris[s];
        const auto g = mesh.geometry(t);
        if (!(g.area > 0.0)) throw std::domain_error("degenerate triangle");
        const auto& ld = dofs.local_dofs(t);
        const auto lap = p2::laplacians(g);
        const double sign = (s == 0) ? 1.0 : -1.0;
        for (int i = 0; i < 6; ++i) {
            tr.dofs[6 * s + i] = ld[i];
            tr.lap[6 * s + i] = sign * lap[i];
            tr.avg[6 * s + i] = avg_weight * lap[i];
        }
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point2 x = mesh.edge_point(e, rule.points[q]);
            const auto grads = p2::gradients(g, g.barycentric(x));
            for (int i = 0; i < 6; ++i) tr.jump[q][6 * s + i] = sign * grads[i].dot(tr.normal);
        }
    }
    return tr;
}

namespace detail {

// Normal-derivative jumps are linear along an edge and Laplacians constant, so 3 Gauss points
// integrate every edge term exactly.
inline const EdgeQuadRule& assembly_edge_rule()
{
    static const EdgeQuadRule rule = edge_rule(3);
    return rule;
}

inline const TriQuadRule& assembly_tri_rule()
{
    static const TriQuadRule rule = tri_rule(4);
    return rule;
}

inline const TriQuadRule& data_tri_rule()
{
    static const TriQuadRule rule = tri_rule(10);
    return rule;
}

} // namespace detail

/// The three parts of a_h(v, v) for one coefficient vector.
struct FormParts
{
    double volume = 0.0;      // sum_T ||lap v||_T^2
    double consistency = 0.0; // -2 sum_e int {{lap v}} [[dv/dn]]
    double penalty = 0.0;     // sum_e sigma/|e| ||[[dv/dn]]||_e^2

    [[nodiscard]] double total() const { return volume + consistency + penalty; }
};

inline FormParts form_parts(const Mesh& mesh, const DofMap& dofs, const PenaltyConfig& cfg, const Vector& v)
{
    cfg.validate();
    FormParts parts;
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = mesh.geometry(t);
        const auto lap = p2::laplacians(g);
        const auto& ld = dofs.local_dofs(t);
        double l = 0.0;
        for (int i = 0; i < 6; ++i) l += v[ld[i]] * lap[i];
        parts.volume += g.area * l * l;
    }
    const auto& rule = detail::assembly_edge_rule();
    for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto tr = edge_traces(mesh, dofs, e, rule);
        double avg = 0.0;
        for (int i = 0; i < tr.slots(); ++i) avg += tr.avg[i] * v[tr.dofs[i]];
        for (std::size_t q = 0; q < rule.size(); ++q) {
            double jump = 0.0;
            for (int i = 0; i < tr.slots(); ++i) jump += tr.jump[q][i] * v[tr.dofs[i]];
            const double w = tr.length * rule.weights[q];
            parts.consistency -= 2.0 * w * avg * jump;
            parts.penalty += w * cfg.sigma / tr.length * jump * jump;
        }
    }
    return parts;
}

/// a_h on Q_h x Q_h over the full DOF set.
inline SparseMatrix assemble_ah(const Mesh& mesh, const DofMap& dofs, const PenaltyConfig& cfg)
{
    cfg.validate();
    std::vector<Triplet> coo;
    coo.reserve(36 * mesh.triangles().size() + 144 * mesh.edges().size());

    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = mesh.geometry(t);
        if (!(g.area > 0.0)) throw std::domain_error("degenerate triangle");
        const auto lap = p2::laplacians(g);
        const auto& ld = dofs.local_dofs(t);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) coo.emplace_back(ld[i], ld[j], g.area * lap[i] * lap[j]);
    }

    const auto& rule = detail::assembly_edge_rule();
    for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto tr = edge_traces(mesh, dofs, e, rule);
        const int n = tr.slots();
        std::array<std::array<double, 12>, 12> k{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = tr.length * rule.weights[q];
            const auto& jump = tr.jump[q];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    k[i][j] += w * (-tr.avg[i] * jump[j] - jump[i] * tr.avg[j] +
                                    cfg.sigma / tr.length * jump[i] * jump[j]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) coo.emplace_back(tr.dofs[i], tr.dofs[j], k[i][j]);
    }

    SparseMatrix a(dofs.n_dofs(), dofs.n_dofs());
    a.setFromTriplets(coo.begin(), coo.end());
    a.makeCompressed();
    return a;
}

/// L2 mass matrix of Q_h.
inline SparseMatrix assemble_mass(const Mesh& mesh, const DofMap& dofs)
{
    const auto& rule = detail::assembly_tri_rule();
    std::vector<Triplet> coo;
    coo.reserve(36 * mesh.triangles().size());
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = mesh.geometry(t);
        if (!(g.area > 0.0)) throw std::domain_error("degenerate triangle");
        const auto& ld = dofs.local_dofs(t);
        std::array<std::array<double, 6>, 6> m{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto phi = p2::values(rule.points[q]);
            const double w = g.area * rule.weights[q];
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) m[i][j] += w * phi[i] * phi[j];
        }
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) coo.emplace_back(ld[i], ld[j], m[i][j]);
    }
    SparseMatrix m(dofs.n_dofs(), dofs.n_dofs());
    m.setFromTriplets(coo.begin(), coo.end());
    m.makeCompressed();
    return m;
}

/// Entries int_Omega g phi_i dx over the full DOF set.
inline Vector assemble_load(const Mesh& mesh, const DofMap& dofs, const ScalarField& g,
                            const TriQuadRule& rule = detail::data_tri_rule())
{
    Vector b = Vector::Zero(dofs.n_dofs());
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto geo = mesh.geometry(t);
        const auto& ld = dofs.local_dofs(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto phi = p2::values(rule.points[q]);
            const double w = geo.area * rule.weights[q] * g(geo.point(rule.points[q]));
            for (int i = 0; i < 6; ++i) b[ld[i]] += w * phi[i];
        }
    }
    return b;
}

enum class Space { V, Q };

/// a_h(I_h g, phi_i) for every basis function of the selected space, computed element by
/// element and edge by edge from the local nodal values of the interpolant.
inline Vector apply_ah_to_function(const Mesh& mesh, const DofMap& dofs, const PenaltyConfig& cfg,
                                   const SmoothField& g, Space target)
{
    cfg.validate();
    const Vector c = interpolate(mesh, dofs, value_of(g)).coeffs;
    Vector out = Vector::Zero(dofs.n_dofs());
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto geo = mesh.geometry(t);
        const auto lap = p2::laplacians(geo);
        const auto& ld = dofs.local_dofs(t);
        double l = 0.0;
        for (int i = 0; i < 6; ++i) l += c[ld[i]] * lap[i];
        for (int i = 0; i < 6; ++i) out[ld[i]] += geo.area * l * lap[i];
    }
    const auto& rule = detail::assembly_edge_rule();
    for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto tr = edge_traces(mesh, dofs, e, rule);
        const int n = tr.slots();
        double avg = 0.0;
        for (int i = 0; i < n; ++i) avg += tr.avg[i] * c[tr.dofs[i]];
        for (std::size_t q = 0; q < rule.size(); ++q) {
            double jump = 0.0;
            for (int i = 0; i < n; ++i) jump += tr.jump[q][i] * c[tr.dofs[i]];
            const double w = tr.length * rule.weights[q];
            for (int i = 0; i < n; ++i)
                out[tr.dofs[i]] += w * (-avg * tr.jump[q][i] - jump * tr.avg[i] +
                                        cfg.sigma / tr.length * jump * tr.jump[q][i]);
        }
    }
    return target == Space::Q ? out : dofs.restrict_to_interior(out);
}

/// Coordinate text dump, one "row col value" line per stored entry.
inline void write_coordinate(std::ostream& os, const SparseMatrix& a)
{
    const auto old = os.precision(17);
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    os.precision(old);
}

} // namespace c0ip
