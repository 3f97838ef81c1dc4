#include "c0ip/estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace c0ip;

namespace {

struct Level
{
    Mesh mesh;
    DofMap dofs;
    KktSolution sol;
    EstimatorBreakdown est;
};

Level run(const Mesh& m, const ManufacturedCase& mc)
{
    Level l{m, DofMap(m), {}, {}};
    l.sol = solve_kkt(build_kkt(l.mesh, l.dofs, PenaltyConfig{}, mc), l.dofs);
    l.est = compute_estimator(l.sol, mc, l.mesh, l.dofs);
    return l;
}

// a solution whose fields are interpolants of given functions, for estimator-only checks
KktSolution fake_solution(const Mesh& m, const DofMap& d, const ScalarField& q, const ScalarField& u,
                          const ScalarField& phi)
{
    KktSolution s;
    s.q = interpolate(m, d, q);
    s.u = interpolate(m, d, u);
    s.phi = interpolate(m, d, phi);
    s.u_f = FeFunction(Vector(s.u.coeffs - s.q.coeffs));
    return s;
}

} // namespace

TEST(Estimator, ConstantCaseVanishes)
{
    const Level l = run(build_unit_square(4), constant_case(1.0));
    for (int k = 1; k <= 8; ++k) EXPECT_NEAR(l.est.eta_k(k), 0.0, 1e-9) << "eta_" << k;
    EXPECT_NEAR(l.est.total, 0.0, 1e-9);
}

TEST(Estimator, VolumeTermQuartersUnderRefinement)
{
    const auto mc = example1();
    for (int n : {2, 8}) {
        const Mesh coarse = build_unit_square(n);
        const Mesh fine = uniform_refine(coarse);
        const DofMap dc(coarse), df(fine);
        const auto zero = [](const Point2&) { return 0.0; };
        const double e1c = compute_estimator(fake_solution(coarse, dc, zero, zero, zero), mc, coarse, dc).eta_k(1);
        const double e1f = compute_estimator(fake_solution(fine, df, zero, zero, zero), mc, fine, df).eta_k(1);
        EXPECT_NEAR(e1f, e1c / 4.0, 1e-12 * e1c) << "n=" << n;
    }
}

TEST(Estimator, NoLaplacianJumpForGlobalQuadratic)
{
    const Mesh m = build_unit_square(1);
    const DofMap d(m);
    const auto x2 = [](const Point2& p) { return p.x() * p.x(); };
    const auto est = compute_estimator(fake_solution(m, d, x2, x2, x2), example1(), m, d);
    EXPECT_NEAR(est.eta_k(3), 0.0, 1e-13);
    EXPECT_NEAR(est.eta_k(4), 0.0, 1e-13);
    EXPECT_NEAR(est.eta_k(5), 0.0, 1e-13);
    // the boundary normal derivative of x^2 is non-zero on x = 1
    EXPECT_GT(est.eta_k(6), 1.0);
}

TEST(Estimator, DecompositionIdentities)
{
    const Level l = run(nvb_refine(build_unit_square(4), {0, 3, 11}), example1());
    double sq = 0.0;
    for (int k = 1; k <= 8; ++k) sq += l.est.eta_k(k) * l.est.eta_k(k);
    EXPECT_NEAR(l.est.total * l.est.total, sq, 1e-12 * sq);
    double per = 0.0;
    for (double v : l.est.per_element) {
        EXPECT_GE(v, 0.0);
        per += v;
    }
    EXPECT_NEAR(per, sq, 1e-12 * sq);
    EXPECT_EQ(l.est.per_element.size(), static_cast<std::size_t>(l.mesh.num_triangles()));
}

TEST(Estimator, NormalJumpTermMatchesPenaltyPartOfError)
{
    const auto mc = example1();
    for (double sigma : {1.0, 20.0}) {
        const Level l = run(build_unit_square(4), mc);
        const ErrorReport e = error_norms(mc.exact_q, l.sol.q, l.mesh, l.dofs, PenaltyConfig{sigma});
        const double eta6 = l.est.eta_k(6);
        EXPECT_NEAR(eta6 * eta6, e.jump_sq / sigma, 1e-12 * eta6 * eta6) << "sigma " << sigma;
    }
}

TEST(EfficiencyIndex, RatioAndUndefined)
{
    EstimatorBreakdown est;
    est.total = 2.0;
    ASSERT_TRUE(efficiency_index(est, 1.0).has_value());
    EXPECT_DOUBLE_EQ(*efficiency_index(est, 1.0), 2.0);
    EXPECT_FALSE(efficiency_index(est, 0.0).has_value());

    const auto mc = constant_case(1.0);
    const Level l = run(build_unit_square(3), mc);
    const double err = total_error(error_norms(mc.exact_q, l.sol.q, l.mesh, l.dofs, PenaltyConfig{}),
                                   error_norms(mc.exact_u, l.sol.u, l.mesh, l.dofs, PenaltyConfig{}),
                                   error_norms(mc.exact_phi, l.sol.phi, l.mesh, l.dofs, PenaltyConfig{}));
    EXPECT_FALSE(efficiency_index(l.est, err).has_value());
}

TEST(Estimator, ReliableAndEfficientOnCoarseLevels)
{
    // error <= eta and eta bounded by a modest multiple of error plus oscillation
    const auto mc = example1();
    for (int n : {4, 8, 16}) {
        const Level l = run(build_unit_square(n), mc);
        const PenaltyConfig pen{};
        const double err = total_error(error_norms(mc.exact_q, l.sol.q, l.mesh, l.dofs, pen),
                                       error_norms(mc.exact_u, l.sol.u, l.mesh, l.dofs, pen),
                                       error_norms(mc.exact_phi, l.sol.phi, l.mesh, l.dofs, pen));
        const double osc = data_oscillation(l.mesh, mc.f) + data_oscillation(l.mesh, mc.u_d);
        EXPECT_LE(err, l.est.total) << "n=" << n;
        EXPECT_LE(l.est.total, 5.0 * (err + osc)) << "n=" << n;
    }
}

TEST(DataOscillation, VanishesForConstantsAndQuartersForLinears)
{
    const Mesh m = build_unit_square(4);
    EXPECT_NEAR(data_oscillation(m, [](const Point2&) { return 3.0; }), 0.0, 1e-14);
    const ScalarField lin = [](const Point2& p) { return p.x() + 2.0 * p.y(); };
    // h^2 * ||g - gbar|| scales like h^3 for a linear g
    EXPECT_NEAR(data_oscillation(uniform_refine(m), lin), data_oscillation(m, lin) / 8.0,
                1e-12 * data_oscillation(m, lin));
}
