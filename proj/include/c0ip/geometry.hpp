#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>

namespace c0ip {

using Index = int;
using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Signed area of (a, b, c); positive for counterclockwise order.
inline double signed_area(const Point2& a, const Point2& b, const Point2& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

/// Affine data of one triangle: area, barycentric gradients, diameter.
struct TriangleGeometry
{
    std::array<Point2, 3> vertex;
    double area = 0.0;
    std::array<Vec2, 3> grad_lambda; // constant gradients of the barycentric coordinates
    double diameter = 0.0;

    TriangleGeometry() = default;

    TriangleGeometry(const Point2& a, const Point2& b, const Point2& c) : vertex{a, b, c}
    {
        area = signed_area(a, b, c);
        // grad(lambda_i) = rot(x_{i+2} - x_{i+1}) / (2 |T|), rot(x,y) = (y,-x)
        for (int i = 0; i < 3; ++i) {
            const Point2& p = vertex[(i + 1) % 3];
            const Point2& q = vertex[(i + 2) % 3];
            grad_lambda[i] = Vec2(p.y() - q.y(), q.x() - p.x()) / (2.0 * area);
        }
        diameter = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    }

    [[nodiscard]] Point2 point(const std::array<double, 3>& bary) const
    {
        return bary[0] * vertex[0] + bary[1] * vertex[1] + bary[2] * vertex[2];
    }

    [[nodiscard]] std::array<double, 3> barycentric(const Point2& x) const
    {
        std::array<double, 3> l{};
        for (int i = 0; i < 3; ++i) l[i] = signed_area(x, vertex[(i + 1) % 3], vertex[(i + 2) % 3]) / area;
        return l;
    }
};

} // namespace c0ip
