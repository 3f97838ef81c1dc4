#pragma once

/**
 * @file mesh.hpp
 * @brief Conforming triangulations of the unit square with edge topology, red (uniform)
 *        refinement and newest-vertex bisection with conforming closure.
 *
 * Local conventions: triangle vertices are counterclockwise; local edge k is opposite local
 * vertex k, i.e. it joins v[(k+1)%3] and v[(k+2)%3]. The refinement edge is stored as a local
 * edge index, so the newest vertex of a triangle is v[refinement_edge].
 */

#include "c0ip/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace c0ip {

struct Triangle
{
    std::array<Index, 3> v{};
    int refinement_edge = 0;
    int generation = 0;
};

struct Edge
{
    std::array<Index, 2> v{};   // sorted
    std::array<Index, 2> tris{-1, -1}; // tris[0] < tris[1]; tris[1] == -1 on the boundary
    std::array<int, 2> local{-1, -1};  // local edge index within tris[0], tris[1]
    bool boundary = false;
};

class Mesh
{
public:
    Mesh() = default;

    /// Builds the edge topology. Throws if a triangle is degenerate, clockwise or an edge is
    /// shared by more than two triangles.
    Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles)
        : vertices_(std::move(vertices)), triangles_(std::move(triangles))
    {
        build_topology();
    }

    [[nodiscard]] const std::vector<Point2>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Triangle>& triangles() const { return triangles_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const std::array<Index, 3>& edges_of(Index t) const { return edge_of_triangle_[t]; }

    [[nodiscard]] Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
    [[nodiscard]] Index num_triangles() const { return static_cast<Index>(triangles_.size()); }
    [[nodiscard]] Index num_edges() const { return static_cast<Index>(edges_.size()); }

    [[nodiscard]] TriangleGeometry geometry(Index t) const
    {
        const auto& v = triangles_.at(t).v;
        return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
    }

    [[nodiscard]] double edge_length(Index e) const
    {
        const auto& ed = edges_[e];
        return (vertices_[ed.v[1]] - vertices_[ed.v[0]]).norm();
    }

    /// Unit normal of edge e: outward from tris[0] (for boundary edges: outward from the domain).
    [[nodiscard]] Vec2 edge_normal(Index e) const
    {
        const auto& ed = edges_[e];
        const auto& tri = triangles_[ed.tris[0]];
        const int k = ed.local[0];
        const Point2& a = vertices_[tri.v[(k + 1) % 3]];
        const Point2& b = vertices_[tri.v[(k + 2) % 3]];
        const Vec2 t = (b - a).normalized();
        // counterclockwise triangle: outward normal is the tangent rotated clockwise
        return {t.y(), -t.x()};
    }

    [[nodiscard]] Point2 edge_point(Index e, double s) const
    {
        const auto& ed = edges_[e];
        return (1.0 - s) * vertices_[ed.v[0]] + s * vertices_[ed.v[1]];
    }

    /// Largest triangle diameter.
    [[nodiscard]] double max_diameter() const
    {
        double h = 0.0;
        for (Index t = 0; t < num_triangles(); ++t) h = std::max(h, geometry(t).diameter);
        return h;
    }

    [[nodiscard]] double total_area() const
    {
        double a = 0.0;
        for (Index t = 0; t < num_triangles(); ++t) a += geometry(t).area;
        return a;
    }

    /// Smallest interior angle over all triangles, in radians.
    [[nodiscard]] double min_angle() const
    {
        double m = std::numbers::pi;
        for (Index t = 0; t < num_triangles(); ++t) {
            const auto g = geometry(t);
            for (int i = 0; i < 3; ++i) {
                const Vec2 a = g.vertex[(i + 1) % 3] - g.vertex[i];
                const Vec2 b = g.vertex[(i + 2) % 3] - g.vertex[i];
                m = std::min(m, std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)));
            }
        }
        return m;
    }

    /// Conformity for a triangulation of the unit square: positive areas, one or two triangles per
    /// edge, single-triangle edges exactly on the square boundary, Euler characteristic 1 and
    /// total area 1. Returns an empty string when the mesh passes, a diagnostic otherwise.
    [[nodiscard]] std::string check_unit_square_conformity(double tol = 1e-12) const
    {
        for (Index t = 0; t < num_triangles(); ++t)
            if (!(geometry(t).area > 0.0)) return "triangle " + std::to_string(t) + " has non-positive area";
        const auto on_side = [tol](const Point2& a, const Point2& b) {
            return (std::abs(a.x()) < tol && std::abs(b.x()) < tol) ||
                   (std::abs(a.x() - 1) < tol && std::abs(b.x() - 1) < tol) ||
                   (std::abs(a.y()) < tol && std::abs(b.y()) < tol) ||
                   (std::abs(a.y() - 1) < tol && std::abs(b.y() - 1) < tol);
        };
        for (Index e = 0; e < num_edges(); ++e) {
            const auto& ed = edges_[e];
            if (ed.boundary != (ed.tris[1] < 0)) return "edge " + std::to_string(e) + " boundary flag inconsistent";
            if (ed.boundary && !on_side(vertices_[ed.v[0]], vertices_[ed.v[1]]))
                return "edge " + std::to_string(e) + " has one triangle but is not on the boundary (hanging node)";
        }
        if (num_vertices() - num_edges() + num_triangles() != 1) return "Euler characteristic is not 1";
        if (std::abs(total_area() - 1.0) > tol) return "total area differs from 1";
        return {};
    }

    /// Plain-text export: "vertices n", n lines "x y", "triangles m", m lines "i j k".
    void write_text(std::ostream& os) const
    {
        const auto old = os.precision(17);
        os << "vertices " << num_vertices() << '\n';
        for (const auto& p : vertices_) os << p.x() << ' ' << p.y() << '\n';
        os << "triangles " << num_triangles() << '\n';
        for (const auto& t : triangles_) os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
        os.precision(old);
    }

private:
    void build_topology()
    {
        const Index nv = num_vertices();
        for (Index t = 0; t < num_triangles(); ++t) {
            const auto& v = triangles_[t].v;
            for (int k = 0; k < 3; ++k)
                if (v[k] < 0 || v[k] >= nv) throw std::invalid_argument("triangle vertex index out of range");
            if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
                throw std::invalid_argument("triangle has repeated vertices");
            if (!(geometry(t).area > 0.0))
                throw std::invalid_argument("triangle " + std::to_string(t) + " is degenerate or clockwise");
            if (triangles_[t].refinement_edge < 0 || triangles_[t].refinement_edge > 2)
                throw std::invalid_argument("refinement edge must be 0, 1 or 2");
        }

        // (lo, hi, triangle, local edge), sorted lexicographically
        std::vector<std::tuple<Index, Index, Index, int>> sides;
        sides.reserve(3 * triangles_.size());
        for (Index t = 0; t < num_triangles(); ++t) {
            const auto& v = triangles_[t].v;
            for (int k = 0; k < 3; ++k) {
                const Index a = v[(k + 1) % 3];
                const Index b = v[(k + 2) % 3];
                sides.emplace_back(std::min(a, b), std::max(a, b), t, k);
            }
        }
        std::sort(sides.begin(), sides.end());

        edges_.clear();
        edge_of_triangle_.assign(triangles_.size(), {-1, -1, -1});
        for (std::size_t i = 0; i < sides.size();) {
            std::size_t j = i;
            while (j < sides.size() && std::get<0>(sides[j]) == std::get<0>(sides[i]) &&
                   std::get<1>(sides[j]) == std::get<1>(sides[i]))
                ++j;
            if (j - i > 2) throw std::invalid_argument("edge shared by more than two triangles");
            Edge e;
            e.v = {std::get<0>(sides[i]), std::get<1>(sides[i])};
            e.tris[0] = std::get<2>(sides[i]);
            e.local[0] = std::get<3>(sides[i]);
            if (j - i == 2) {
                e.tris[1] = std::get<2>(sides[i + 1]);
                e.local[1] = std::get<3>(sides[i + 1]);
            }
            e.boundary = (j - i == 1);
            const Index id = static_cast<Index>(edges_.size());
            edge_of_triangle_[e.tris[0]][e.local[0]] = id;
            if (!e.boundary) edge_of_triangle_[e.tris[1]][e.local[1]] = id;
            edges_.push_back(e);
            i = j;
        }
    }

    std::vector<Point2> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<Index, 3>> edge_of_triangle_;
};

/// Structured mesh of (0,1)^2: n x n cells, each split along its lower-left to upper-right
/// diagonal. The diagonal is the refinement edge of both halves.
inline Mesh build_unit_square(int n)
{
    if (n < 1) throw std::invalid_argument("build_unit_square: n must be >= 1");
    std::vector<Point2> vertices;
    vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    const auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };

    std::vector<Triangle> triangles;
    triangles.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            // lower: (p00, p10, p11), hypotenuse opposite p10
            triangles.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, 1, 0});
            // upper: (p00, p11, p01), hypotenuse opposite p01
            triangles.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, 2, 0});
        }
    }
    return {std::move(vertices), std::move(triangles)};
}

/// Red refinement: every triangle split into four through its edge midpoints. Child refinement
/// edges are parallel to the parent's, which keeps an NVB-compatible mesh compatible.
inline Mesh uniform_refine(const Mesh& mesh)
{
    std::vector<Point2> vertices = mesh.vertices();
    const Index nv = mesh.num_vertices();
    for (const auto& e : mesh.edges())
        vertices.push_back(0.5 * (mesh.vertices()[e.v[0]] + mesh.vertices()[e.v[1]]));

    std::vector<Triangle> triangles;
    triangles.reserve(4 * mesh.triangles().size());
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const int r = tri.refinement_edge;
        // rotate so that the newest vertex is local 2: (a, b, c) with refinement edge (a, b)
        const Index a = tri.v[(r + 1) % 3];
        const Index b = tri.v[(r + 2) % 3];
        const Index c = tri.v[r];
        const auto& te = mesh.edges_of(t);
        const Index m_ab = nv + te[r];
        const Index m_bc = nv + te[(r + 1) % 3];
        const Index m_ca = nv + te[(r + 2) % 3];
        const int g = tri.generation + 2;
        // each child lists the side parallel to (a, b) first, so its refinement edge is local 2
        triangles.push_back({{a, m_ab, m_ca}, 2, g});
        triangles.push_back({{m_ab, b, m_bc}, 2, g});
        triangles.push_back({{m_ca, m_bc, c}, 2, g});
        triangles.push_back({{m_bc, m_ca, m_ab}, 2, g});
    }
    return {std::move(vertices), std::move(triangles)};
}

/// Newest-vertex bisection. Every marked triangle is bisected through its refinement edge at
/// least once; closure marks refinement edges until every triangle with a marked edge also has
/// its refinement edge marked, after which each triangle is split into 2, 3 or 4 children.
inline Mesh nvb_refine(const Mesh& mesh, const std::vector<Index>& marked)
{
    const Index ne = mesh.num_edges();
    std::vector<char> edge_marked(ne, 0);
    for (Index t : marked) {
        if (t < 0 || t >= mesh.num_triangles()) throw std::out_of_range("nvb_refine: marked index out of range");
        edge_marked[mesh.edges_of(t)[mesh.triangles()[t].refinement_edge]] = 1;
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (Index t = 0; t < mesh.num_triangles(); ++t) {
            const auto& te = mesh.edges_of(t);
            const Index ref = te[mesh.triangles()[t].refinement_edge];
            if (!edge_marked[ref] && (edge_marked[te[0]] || edge_marked[te[1]] || edge_marked[te[2]])) {
                edge_marked[ref] = 1;
                changed = true;
            }
        }
    }

    std::vector<Point2> vertices = mesh.vertices();
    std::vector<Index> midpoint(ne, -1);
    for (Index e = 0; e < ne; ++e) {
        if (!edge_marked[e]) continue;
        const auto& ed = mesh.edges()[e];
        midpoint[e] = static_cast<Index>(vertices.size());
        vertices.push_back(0.5 * (mesh.vertices()[ed.v[0]] + mesh.vertices()[ed.v[1]]));
    }

    std::vector<Triangle> triangles;
    triangles.reserve(mesh.triangles().size() + 3 * marked.size());
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const auto& te = mesh.edges_of(t);
        const int r = tri.refinement_edge;
        if (!edge_marked[te[r]]) {
            triangles.push_back(tri);
            continue;
        }
        // (a, b, c) with c newest; refinement edge (a, b) gets midpoint m
        const Index a = tri.v[(r + 1) % 3];
        const Index b = tri.v[(r + 2) % 3];
        const Index c = tri.v[r];
        const Index m = midpoint[te[r]];
        const Index e_ca = te[(r + 2) % 3];
        const Index e_bc = te[(r + 1) % 3];
        const int g = tri.generation + 1;
        // left child (c, a, m): refinement edge (c, a) opposite m
        if (edge_marked[e_ca]) {
            const Index mm = midpoint[e_ca];
            triangles.push_back({{m, c, mm}, 2, g + 1});
            triangles.push_back({{a, m, mm}, 2, g + 1});
        } else {
            triangles.push_back({{c, a, m}, 2, g});
        }
        // right child (b, c, m): refinement edge (b, c) opposite m
        if (edge_marked[e_bc]) {
            const Index mm = midpoint[e_bc];
            triangles.push_back({{m, b, mm}, 2, g + 1});
            triangles.push_back({{c, m, mm}, 2, g + 1});
        } else {
            triangles.push_back({{b, c, m}, 2, g});
        }
    }
    return {std::move(vertices), std::move(triangles)};
}

} // namespace c0ip
