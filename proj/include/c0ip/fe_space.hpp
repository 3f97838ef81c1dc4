#pragma once

/**
 * @file fe_space.hpp
 * @brief Quadratic Lagrange elements: DOF numbering, local shape functions and evaluation of
 *        piecewise-quadratic functions.
 *
 * DOFs are numbered vertices first (mesh order), then edge midpoints (mesh edge order). The
 * space Q_h uses every DOF; V_h is the span of the interior DOFs, i.e. the functions whose
 * coefficients vanish on boundary_dofs.
 *
 * Local DOF order on a triangle: vertices 0,1,2 then the midpoints of local edges 0,1,2
 * (edge k opposite vertex k). Shape functions: lambda_i (2 lambda_i - 1) and
 * 4 lambda_{k+1} lambda_{k+2}.
 */

#include "c0ip/geometry.hpp"
#include "c0ip/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace c0ip {

using Vector = Eigen::VectorXd;

class DofMap
{
public:
    DofMap() = default;

    explicit DofMap(const Mesh& mesh) : n_vertices_(mesh.num_vertices()), n_edges_(mesh.num_edges())
    {
        boundary_.assign(n_dofs(), 0);
        for (Index e = 0; e < n_edges_; ++e) {
            const auto& ed = mesh.edges()[e];
            if (!ed.boundary) continue;
            boundary_[ed.v[0]] = 1;
            boundary_[ed.v[1]] = 1;
            boundary_[dof_of_edge(e)] = 1;
        }
        interior_position_.assign(n_dofs(), -1);
        for (Index d = 0; d < n_dofs(); ++d) {
            if (boundary_[d]) {
                boundary_dofs_.push_back(d);
            } else {
                interior_position_[d] = static_cast<Index>(interior_dofs_.size());
                interior_dofs_.push_back(d);
            }
        }
        local_.reserve(mesh.triangles().size());
        for (Index t = 0; t < mesh.num_triangles(); ++t) {
            const auto& v = mesh.triangles()[t].v;
            const auto& te = mesh.edges_of(t);
            local_.push_back({v[0], v[1], v[2], dof_of_edge(te[0]), dof_of_edge(te[1]), dof_of_edge(te[2])});
        }
    }

    [[nodiscard]] Index n_dofs() const { return n_vertices_ + n_edges_; }
    [[nodiscard]] Index dof_of_vertex(Index v) const { return v; }
    [[nodiscard]] Index dof_of_edge(Index e) const { return n_vertices_ + e; }
    [[nodiscard]] bool is_boundary(Index dof) const { return boundary_[dof] != 0; }
    [[nodiscard]] const std::vector<Index>& boundary_dofs() const { return boundary_dofs_; }
    [[nodiscard]] const std::vector<Index>& interior_dofs() const { return interior_dofs_; }
    [[nodiscard]] Index n_interior() const { return static_cast<Index>(interior_dofs_.size()); }
    /// Position of dof in interior_dofs, or -1 for a boundary DOF.
    [[nodiscard]] Index interior_position(Index dof) const { return interior_position_[dof]; }
    [[nodiscard]] const std::array<Index, 6>& local_dofs(Index t) const { return local_[t]; }
    [[nodiscard]] Index n_triangles() const { return static_cast<Index>(local_.size()); }

    /// Coordinates of the node carrying each DOF.
    [[nodiscard]] std::vector<Point2> node_coordinates(const Mesh& mesh) const
    {
        std::vector<Point2> x(mesh.vertices());
        for (const auto& e : mesh.edges()) x.push_back(0.5 * (mesh.vertices()[e.v[0]] + mesh.vertices()[e.v[1]]));
        return x;
    }

    /// Restricts a full coefficient vector to the interior DOFs.
    [[nodiscard]] Vector restrict_to_interior(const Vector& full) const
    {
        Vector r(n_interior());
        for (Index i = 0; i < n_interior(); ++i) r[i] = full[interior_dofs_[i]];
        return r;
    }

    /// Extends interior coefficients by zero on the boundary.
    [[nodiscard]] Vector extend_from_interior(const Vector& interior) const
    {
        Vector f = Vector::Zero(n_dofs());
        for (Index i = 0; i < n_interior(); ++i) f[interior_dofs_[i]] = interior[i];
        return f;
    }

private:
    Index n_vertices_ = 0;
    Index n_edges_ = 0;
    std::vector<char> boundary_;
    std::vector<Index> boundary_dofs_;
    std::vector<Index> interior_dofs_;
    std::vector<Index> interior_position_;
    std::vector<std::array<Index, 6>> local_;
};

using Bary = std::array<double, 3>;

/// Local P2 shape functions on one triangle.
namespace p2 {

inline std::array<double, 6> values(const Bary& l)
{
    return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
            4 * l[1] * l[2],       4 * l[2] * l[0],       4 * l[0] * l[1]};
}

inline std::array<Vec2, 6> gradients(const TriangleGeometry& g, const Bary& l)
{
    const auto& G = g.grad_lambda;
    return {(4 * l[0] - 1) * G[0],           (4 * l[1] - 1) * G[1],           (4 * l[2] - 1) * G[2],
            4 * (l[1] * G[2] + l[2] * G[1]), 4 * (l[2] * G[0] + l[0] * G[2]), 4 * (l[0] * G[1] + l[1] * G[0])};
}

inline std::array<Mat2, 6> hessians(const TriangleGeometry& g)
{
    const auto& G = g.grad_lambda;
    const auto sym = [](const Vec2& a, const Vec2& b) -> Mat2 { return 4.0 * (a * b.transpose() + b * a.transpose()); };
    return {Mat2(4.0 * G[0] * G[0].transpose()), Mat2(4.0 * G[1] * G[1].transpose()),
            Mat2(4.0 * G[2] * G[2].transpose()), sym(G[1], G[2]),
            sym(G[2], G[0]),                     sym(G[0], G[1])};
}

inline std::array<double, 6> laplacians(const TriangleGeometry& g)
{
    const auto& G = g.grad_lambda;
    return {4 * G[0].squaredNorm(), 4 * G[1].squaredNorm(), 4 * G[2].squaredNorm(),
            8 * G[1].dot(G[2]),     8 * G[2].dot(G[0]),     8 * G[0].dot(G[1])};
}

} // namespace p2

/// Piecewise-quadratic function given by its nodal values.
struct FeFunction
{
    Vector coeffs;

    FeFunction() = default;
    explicit FeFunction(const DofMap& dofs) : coeffs(Vector::Zero(dofs.n_dofs())) {}
    explicit FeFunction(Vector c) : coeffs(std::move(c)) {}

    [[nodiscard]] std::array<double, 6> local(const DofMap& dofs, Index t) const
    {
        const auto& ld = dofs.local_dofs(t);
        std::array<double, 6> c{};
        for (int i = 0; i < 6; ++i) c[i] = coeffs[ld[i]];
        return c;
    }
};

namespace detail {

inline void check_triangle(const Mesh& mesh, Index t)
{
    if (t < 0 || t >= mesh.num_triangles()) throw std::out_of_range("triangle index out of range");
}

inline TriangleGeometry checked_geometry(const Mesh& mesh, Index t)
{
    check_triangle(mesh, t);
    auto g = mesh.geometry(t);
    if (!(g.area > 0.0)) throw std::domain_error("degenerate triangle");
    return g;
}

} // namespace detail

inline double eval(const FeFunction& fn, const Mesh& mesh, const DofMap& dofs, Index t, const Bary& bary)
{
    detail::check_triangle(mesh, t);
    const auto c = fn.local(dofs, t);
    const auto phi = p2::values(bary);
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += c[i] * phi[i];
    return s;
}

inline Vec2 eval_gradient(const FeFunction& fn, const Mesh& mesh, const DofMap& dofs, Index t, const Bary& bary)
{
    const auto g = detail::checked_geometry(mesh, t);
    const auto c = fn.local(dofs, t);
    const auto dphi = p2::gradients(g, bary);
    Vec2 s = Vec2::Zero();
    for (int i = 0; i < 6; ++i) s += c[i] * dphi[i];
    return s;
}

/// Laplacian of the (quadratic) restriction to triangle t; constant on t.
inline double eval_laplacian(const FeFunction& fn, const Mesh& mesh, const DofMap& dofs, Index t)
{
    const auto g = detail::checked_geometry(mesh, t);
    const auto c = fn.local(dofs, t);
    const auto lap = p2::laplacians(g);
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += c[i] * lap[i];
    return s;
}

/// Nodal interpolation into Q_h.
inline FeFunction interpolate(const Mesh& mesh, const DofMap& dofs, const std::function<double(const Point2&)>& g)
{
    const auto x = dofs.node_coordinates(mesh);
    FeFunction fn(dofs);
    for (Index d = 0; d < dofs.n_dofs(); ++d) fn.coeffs[d] = g(x[d]);
    return fn;
}

} // namespace c0ip
