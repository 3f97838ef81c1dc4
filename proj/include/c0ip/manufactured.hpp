#pragma once

/**
 * @file manufactured.hpp
 * @brief Benchmark cases with exact solutions for the Dirichlet boundary control problem on the
 *        unit square, and the quadrature check of  int lap p lap r = int D^2 p : D^2 r  over Q.
 */

#include "c0ip/fields.hpp"
#include "c0ip/mesh.hpp"
#include "c0ip/quadrature.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace c0ip {

/// Exact optimal state u, adjoint phi and control q together with the data that makes them
/// solve the optimality system: f = bilap u, u_d = u - bilap phi, a priori control p_d.
struct ManufacturedCase
{
    std::string name;
    double alpha = 1.0;
    SmoothField exact_u;
    SmoothField exact_phi;
    SmoothField exact_q;
    ScalarField f;
    ScalarField u_d;
    SmoothField p_d;
};

/// u = sin^2(pi x) sin^2(pi y) + cos(pi x) cos(pi y), phi = sin^4(pi x) sin^4(pi y),
/// q = p_d = cos(pi x) cos(pi y), alpha = 1.
inline ManufacturedCase example1()
{
    ManufacturedCase c;
    c.name = "example1";
    c.alpha = 1.0;
    c.exact_u = separable_sum({{1.0, profile::sin2(), profile::sin2()}, {1.0, profile::cos_k(1), profile::cos_k(1)}});
    c.exact_phi = separable_sum({{1.0, profile::sin4(), profile::sin4()}});
    c.exact_q = separable_sum({{1.0, profile::cos_k(1), profile::cos_k(1)}});
    c.p_d = c.exact_q;
    c.f = [u = c.exact_u](const Point2& x) { return u(x).bilaplacian; };
    c.u_d = [u = c.exact_u, phi = c.exact_phi](const Point2& x) { return u(x).value - phi(x).bilaplacian; };
    return c;
}

/// u = q = p_d = u_d = value, phi = 0, f = 0, alpha = 1.
inline ManufacturedCase constant_case(double value)
{
    ManufacturedCase c;
    c.name = "constant";
    c.alpha = 1.0;
    c.exact_u = constant_field(value);
    c.exact_phi = constant_field(0.0);
    c.exact_q = constant_field(value);
    c.p_d = constant_field(value);
    c.f = [](const Point2&) { return 0.0; };
    c.u_d = [value](const Point2&) { return value; };
    return c;
}

inline ManufacturedCase case_by_name(const std::string& name)
{
    if (name == "example1") return example1();
    if (name == "constant") return constant_case(1.0);
    throw std::invalid_argument("unknown case '" + name + "' (expected example1 or constant)");
}

struct HessianIdentity
{
    double laplacian_product = 0.0; // int lap p lap r
    double hessian_product = 0.0;   // int D^2 p : D^2 r
};

inline HessianIdentity hessian_identity_check(const SmoothField& p, const SmoothField& r, const Mesh& mesh,
                                              const TriQuadRule& rule)
{
    HessianIdentity out;
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = mesh.geometry(t);
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const Point2 x = g.point(rule.points[k]);
            const Jet jp = p(x);
            const Jet jr = r(x);
            const double w = g.area * rule.weights[k];
            out.laplacian_product += w * jp.laplacian() * jr.laplacian();
            out.hessian_product += w * jp.hessian.cwiseProduct(jr.hessian).sum();
        }
    }
    return out;
}

} // namespace c0ip
