#include "c0ip/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

using namespace c0ip;

namespace {

// Integral of x^a y^b over the reference triangle (0,0),(1,0),(0,1): a! b! / (a+b+2)!
double monomial_moment(int a, int b)
{
    return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
}

} // namespace

class TriRuleExactness : public ::testing::TestWithParam<int> {};

TEST_P(TriRuleExactness, IntegratesAllMonomialsUpToDegree)
{
    const int degree = GetParam();
    const TriQuadRule rule = tri_rule(degree);
    EXPECT_GE(rule.degree, degree);
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b) {
            double s = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                // barycentric (l0, l1, l2) -> reference point (l1, l2)
                const double x = rule.points[q][1];
                const double y = rule.points[q][2];
                s += 0.5 * rule.weights[q] * std::pow(x, a) * std::pow(y, b);
            }
            EXPECT_NEAR(s, monomial_moment(a, b), 1e-15) << "x^" << a << " y^" << b;
        }
}

TEST_P(TriRuleExactness, WeightsArePositiveAndPointsInside)
{
    const TriQuadRule rule = tri_rule(GetParam());
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        EXPECT_GT(rule.weights[q], 0.0);
        sum += rule.weights[q];
        double bsum = 0.0;
        for (double l : rule.points[q]) {
            EXPECT_GE(l, 0.0);
            bsum += l;
        }
        EXPECT_NEAR(bsum, 1.0, 1e-15);
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
}

INSTANTIATE_TEST_SUITE_P(Degrees, TriRuleExactness, ::testing::Values(2, 4, 6, 10));

TEST(TriRule, FailsOneDegreeAbove)
{
    // the degree-2 rule is not exact for x^3
    const TriQuadRule rule = tri_rule(2);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += 0.5 * rule.weights[q] * std::pow(rule.points[q][1], 3);
    EXPECT_GT(std::abs(s - monomial_moment(3, 0)), 1e-6);
}

TEST(TriRule, UnsupportedDegreeThrows)
{
    EXPECT_THROW(tri_rule(3), std::invalid_argument);
    EXPECT_THROW(tri_rule(0), std::invalid_argument);
    EXPECT_THROW(tri_rule(12), std::invalid_argument);
}

class EdgeRuleExactness : public ::testing::TestWithParam<int> {};

TEST_P(EdgeRuleExactness, GaussLegendreDegree)
{
    const int n = GetParam();
    const EdgeQuadRule rule = edge_rule(n);
    ASSERT_EQ(rule.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(rule.degree, 2 * n - 1);
    for (int k = 0; k <= 2 * n - 1; ++k) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q], k);
        EXPECT_NEAR(s, 1.0 / (k + 1), 1e-15) << "t^" << k;
    }
    for (std::size_t q = 0; q < rule.size(); ++q) {
        EXPECT_GT(rule.weights[q], 0.0);
        EXPECT_GT(rule.points[q], 0.0);
        EXPECT_LT(rule.points[q], 1.0);
    }
}

INSTANTIATE_TEST_SUITE_P(Points, EdgeRuleExactness, ::testing::Range(1, 7));

TEST(EdgeRule, OutOfRangeThrows)
{
    EXPECT_THROW(edge_rule(0), std::invalid_argument);
    EXPECT_THROW(edge_rule(7), std::invalid_argument);
}

namespace {

double integrate_reference(const TriQuadRule& rule, const std::function<double(double, double)>& f)
{
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += 0.5 * rule.weights[q] * f(rule.points[q][1], rule.points[q][2]);
    return s;
}

} // namespace

TEST(TriRule, DocumentedExamples)
{
    EXPECT_NEAR(integrate_reference(tri_rule(2), [](double, double) { return 1.0; }), 0.5, 1e-15);
    EXPECT_NEAR(integrate_reference(tri_rule(4), [](double x, double y) { return x * x * y * y; }), 1.0 / 180.0, 1e-16);
    EXPECT_NEAR(integrate_reference(tri_rule(6), [](double x, double) { return std::pow(x, 6); }), 1.0 / 56.0, 1e-16);
}

TEST(EdgeRule, DocumentedExamples)
{
    const auto integrate = [](const EdgeQuadRule& r, int k) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q], k);
        return s;
    };
    EXPECT_NEAR(integrate(edge_rule(1), 1), 0.5, 1e-16);
    EXPECT_NEAR(integrate(edge_rule(3), 5), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(integrate(edge_rule(2), 3), 0.25, 1e-16);
}

TEST_P(TriRuleExactness, RandomPolynomialOfFullDegree)
{
    const int degree = GetParam();
    const TriQuadRule rule = tri_rule(degree);
    std::mt19937 rng(77 + degree);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::array<double, 3>> terms; // (coefficient, a, b)
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) terms.push_back({coef(rng), double(a), double(b)});
        double exact = 0.0;
        for (const auto& t : terms) exact += t[0] * monomial_moment(int(t[1]), int(t[2]));
        const double got = integrate_reference(rule, [&](double x, double y) {
            double s = 0.0;
            for (const auto& t : terms) s += t[0] * std::pow(x, t[1]) * std::pow(y, t[2]);
            return s;
        });
        EXPECT_NEAR(got, exact, 1e-13 * std::max(1.0, std::abs(exact)));
    }
}

TEST(SubdividedRule, KeepsDegreeAndTotalWeight)
{
    for (int levels : {0, 1, 3}) {
        const TriQuadRule r = subdivided(tri_rule(4), levels);
        EXPECT_EQ(r.degree, 4);
        EXPECT_EQ(r.size(), tri_rule(4).size() << (2 * levels));
        double w = 0.0;
        for (double x : r.weights) w += x;
        EXPECT_NEAR(w, 1.0, 1e-14);
        for (const auto& p : r.points) EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-14);
    }
    EXPECT_THROW(subdivided(tri_rule(2), -1), std::invalid_argument);
}

TEST(SubdividedRule, ConvergesOnNonPolynomialIntegrand)
{
    // integral of exp(s) over the reference triangle {s,t >= 0, s+t <= 1} is e - 2; weights sum to 1
    const double exact = 2.0 * (std::exp(1.0) - 2.0);
    double prev = 1.0;
    for (int levels : {0, 1, 2}) {
        const TriQuadRule r = subdivided(tri_rule(2), levels);
        double v = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) v += r.weights[q] * std::exp(r.points[q][1]);
        const double err = std::abs(v - exact);
        EXPECT_LT(err, prev / 7.0) << levels;
        prev = err;
    }
}
