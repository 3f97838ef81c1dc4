#pragma once

/**
 * @file quadrature.hpp
 * @brief Symmetric triangle rules and Gauss-Legendre edge rules.
 *
 * Triangle rules are stored in barycentric coordinates with weights normalised to sum to one,
 * so that  int_T g dx  ~=  |T| * sum_k w_k g(x_k).  Edge rules live on [0,1] with weights summing
 * to one, so that  int_e g ds  ~=  |e| * sum_k w_k g(x(t_k)).
 */

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace c0ip {

struct TriQuadRule
{
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    [[nodiscard]] std::size_t size() const { return weights.size(); }
};

struct EdgeQuadRule
{
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0;

    [[nodiscard]] std::size_t size() const { return weights.size(); }
};

namespace detail {

inline void add_centroid(TriQuadRule& rule, double w)
{
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(w);
}

// orbit (a, a, 1-2a)
inline void add_orbit3(TriQuadRule& rule, double a, double w)
{
    const double b = 1.0 - 2.0 * a;
    rule.points.push_back({a, a, b});
    rule.points.push_back({a, b, a});
    rule.points.push_back({b, a, a});
    for (int k = 0; k < 3; ++k) rule.weights.push_back(w);
}

// orbit of all permutations of (a, b, 1-a-b)
inline void add_orbit6(TriQuadRule& rule, double a, double b, double w)
{
    const double c = 1.0 - a - b;
    rule.points.push_back({a, b, c});
    rule.points.push_back({a, c, b});
    rule.points.push_back({b, a, c});
    rule.points.push_back({b, c, a});
    rule.points.push_back({c, a, b});
    rule.points.push_back({c, b, a});
    for (int k = 0; k < 6; ++k) rule.weights.push_back(w);
}

} // namespace detail

/// Symmetric rule exact for total degree <= degree. Supported degrees: 2, 4, 6, 10.
/// Coefficients are Dunavant's, re-solved from the moment equations to 20 digits
/// (tests/oracles/polish_tri_rules.py).
inline TriQuadRule tri_rule(int degree)
{
    TriQuadRule rule;
    rule.degree = degree;
    switch (degree) {
    case 2:
        detail::add_orbit3(rule, 1.0 / 6.0, 1.0 / 3.0);
        break;
    case 4:
        detail::add_orbit3(rule, 0.44594849091596488632, 0.22338158967801146570);
        detail::add_orbit3(rule, 0.09157621350977074346, 0.10995174365532186764);
        break;
    case 6:
        detail::add_orbit3(rule, 0.24928674517091042129, 0.11678627572637936603);
        detail::add_orbit3(rule, 0.06308901449150222834, 0.050844906370206816921);
        detail::add_orbit6(rule, 0.31035245103378440542, 0.053145049844816947353, 0.082851075618373575194);
        break;
    case 10:
        detail::add_centroid(rule, 0.090817990382753580095);
        detail::add_orbit3(rule, 0.48557763338365737737, 0.036725957756466704717);
        detail::add_orbit3(rule, 0.10948157548503705480, 0.045321059435527934783);
        detail::add_orbit6(rule, 0.14170721941487995476, 0.30793983876412095017, 0.072757916845420108604);
        detail::add_orbit6(rule, 0.025003534762686386074, 0.24667256063990269392, 0.028327242531057484837);
        detail::add_orbit6(rule, 0.0095408154002994575802, 0.066803251012200265774, 0.0094216669637328234599);
        break;
    default:
        throw std::invalid_argument("tri_rule: unsupported degree " + std::to_string(degree) +
                                    " (expected 2, 4, 6 or 10)");
    }
    return rule;
}

/// Composite rule: the reference triangle is split `levels` times into four midpoint children
/// and `base` is applied on every leaf. Degree is that of `base`; accuracy improves like 2^-levels.
inline TriQuadRule subdivided(const TriQuadRule& base, int levels)
{
    if (levels < 0) throw std::invalid_argument("subdivided: negative level count");
    using Bary = std::array<double, 3>;
    using Leaf = std::array<Bary, 3>;
    std::vector<Leaf> leaves{Leaf{Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}}};
    const auto mid = [](const Bary& a, const Bary& b) {
        return Bary{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
    };
    for (int l = 0; l < levels; ++l) {
        std::vector<Leaf> next;
        next.reserve(4 * leaves.size());
        for (const auto& [a, b, c] : leaves) {
            const Bary ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
            next.push_back({a, ab, ca});
            next.push_back({ab, b, bc});
            next.push_back({ca, bc, c});
            next.push_back({bc, ca, ab});
        }
        leaves = std::move(next);
    }
    TriQuadRule rule;
    rule.degree = base.degree;
    const double scale = 1.0 / static_cast<double>(leaves.size());
    rule.points.reserve(leaves.size() * base.size());
    rule.weights.reserve(leaves.size() * base.size());
    for (const auto& lf : leaves) {
        for (std::size_t q = 0; q < base.size(); ++q) {
            Bary p{0, 0, 0};
            for (int v = 0; v < 3; ++v)
                for (int i = 0; i < 3; ++i) p[i] += base.points[q][v] * lf[v][i];
            rule.points.push_back(p);
            rule.weights.push_back(scale * base.weights[q]);
        }
    }
    return rule;
}

/// Gauss-Legendre rule with npoints nodes on [0,1]; exact for degree 2*npoints-1.
inline EdgeQuadRule edge_rule(int npoints)
{
    if (npoints < 1 || npoints > 6)
        throw std::invalid_argument("edge_rule: unsupported point count " + std::to_string(npoints) +
                                    " (expected 1..6)");
    EdgeQuadRule rule;
    rule.degree = 2 * npoints - 1;
    rule.points.resize(npoints);
    rule.weights.resize(npoints);
    const int n = npoints;
    // Newton iteration on P_n from the Chebyshev-like initial guesses; nodes symmetric about 0
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1,1] -> [0,1]; weights halve, then normalise to sum 1 on [0,1]
        rule.points[i] = 0.5 * (1.0 - z);
        rule.points[n - 1 - i] = 0.5 * (1.0 + z);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.5;
    return rule;
}

} // namespace c0ip
