#pragma once

/**
 * @file fields.hpp
 * @brief Exact scalar fields with closed-form derivatives up to order four.
 *
 * Every built-in field is a finite sum of separable terms  c * g(x) * h(y)  where g and h are
 * one-dimensional profiles with known derivatives. From the 1D derivative tables the jet
 * (value, gradient, Hessian, bilaplacian) follows by the product rule.
 */

#include "c0ip/geometry.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace c0ip {

struct Jet
{
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
    Mat2 hessian = Mat2::Zero();
    double bilaplacian = 0.0;

    [[nodiscard]] double laplacian() const { return hessian.trace(); }
};

/// A smooth field: evaluates its full jet at a point.
using SmoothField = std::function<Jet(const Point2&)>;
/// A plain scalar field (data that is only ever integrated or sampled).
using ScalarField = std::function<double(const Point2&)>;

inline ScalarField value_of(SmoothField f)
{
    return [f = std::move(f)](const Point2& x) { return f(x).value; };
}

inline ScalarField laplacian_of(SmoothField f)
{
    return [f = std::move(f)](const Point2& x) { return f(x).laplacian(); };
}

/// 1D profile: derivatives 0..4 at a point.
using Profile = std::function<std::array<double, 5>(double)>;

namespace profile {

inline Profile constant(double c)
{
    return [c](double) { return std::array<double, 5>{c, 0, 0, 0, 0}; };
}

/// cos(k pi t)
inline Profile cos_k(int k)
{
    const double w = k * std::numbers::pi;
    return [w](double t) {
        const double c = std::cos(w * t);
        const double s = std::sin(w * t);
        return std::array<double, 5>{c, -w * s, -w * w * c, w * w * w * s, w * w * w * w * c};
    };
}

/// sin^2(pi t) = (1 - cos 2 pi t) / 2
inline Profile sin2()
{
    constexpr double pi = std::numbers::pi;
    return [](double t) {
        const double s = std::sin(2 * pi * t);
        const double c = std::cos(2 * pi * t);
        const double st = std::sin(pi * t);
        return std::array<double, 5>{st * st, pi * s, 2 * pi * pi * c, -4 * pi * pi * pi * s,
                                     -8 * pi * pi * pi * pi * c};
    };
}

/// sin^4(pi t) = 3/8 - cos(2 pi t)/2 + cos(4 pi t)/8
inline Profile sin4()
{
    constexpr double pi = std::numbers::pi;
    return [](double t) {
        const double s2 = std::sin(2 * pi * t);
        const double c2 = std::cos(2 * pi * t);
        const double s4 = std::sin(4 * pi * t);
        const double c4 = std::cos(4 * pi * t);
        const double st = std::sin(pi * t);
        const double p2 = pi * pi;
        return std::array<double, 5>{st * st * st * st,
                                     pi * s2 - 0.5 * pi * s4,
                                     2 * p2 * c2 - 2 * p2 * c4,
                                     -4 * p2 * pi * s2 + 8 * p2 * pi * s4,
                                     -8 * p2 * p2 * c2 + 32 * p2 * p2 * c4};
    };
}

} // namespace profile

struct SeparableTerm
{
    double coeff = 1.0;
    Profile gx;
    Profile gy;
};

/// Sum of separable terms as a SmoothField.
inline SmoothField separable_sum(std::vector<SeparableTerm> terms)
{
    return [terms = std::move(terms)](const Point2& p) {
        Jet j;
        for (const auto& term : terms) {
            const auto a = term.gx(p.x());
            const auto b = term.gy(p.y());
            const double c = term.coeff;
            j.value += c * a[0] * b[0];
            j.gradient += c * Vec2(a[1] * b[0], a[0] * b[1]);
            Mat2 h;
            h << a[2] * b[0], a[1] * b[1], a[1] * b[1], a[0] * b[2];
            j.hessian += c * h;
            j.bilaplacian += c * (a[4] * b[0] + 2 * a[2] * b[2] + a[0] * b[4]);
        }
        return j;
    };
}

inline SmoothField constant_field(double c)
{
    return [c](const Point2&) { Jet j; j.value = c; return j; };
}

} // namespace c0ip
