#pragma once

/**
 * @file kkt.hpp
 * @brief The coupled discrete optimality system for state, adjoint and control.
 *
 * Unknowns are ordered [u_f (interior DOFs), phi (interior DOFs), q (all DOFs)] and the rows read
 *
 *   A_VV u_f + A_VQ q                          = F_V
 *  -M_VV u_f + A_VV phi - M_VQ q               = -U_d,V
 *   M_QV u_f - A_QV phi + (alpha A_QQ + M_QQ) q = U_d,Q + alpha a_h(I_h p_d, .)
 *
 * where A = a_h, M = L2 mass, F = (f, .), U_d = (u_d, .). The discrete state is u = u_f + q.
 */

#include "c0ip/assembly.hpp"
#include "c0ip/fe_space.hpp"
#include "c0ip/manufactured.hpp"
#include "c0ip/mesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace c0ip {

class SolverError : public std::runtime_error
{
public:
    SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    [[nodiscard]] double residual() const { return residual_; }

private:
    double residual_;
};

struct KktBlocks
{
    SparseMatrix a_vv, a_vq, a_qv, a_qq;
    SparseMatrix m_vv, m_vq, m_qv, m_qq;
};

struct KktSystem
{
    Index n_interior = 0;
    Index n_all = 0;
    double alpha = 1.0;
    KktBlocks blocks;
    SparseMatrix matrix;
    Vector rhs;
    // right-hand side blocks
    Vector f_v;
    Vector ud_v;
    Vector ud_q;
    Vector apd_q; // a_h(I_h p_d, phi_i), all DOFs

    [[nodiscard]] Index size() const { return 2 * n_interior + n_all; }
};

struct KktSolution
{
    FeFunction u_f;
    FeFunction phi;
    FeFunction q;
    FeFunction u;
    double alpha = 1.0;
    double residual_norm = 0.0; // ||b - Ax|| / ||b|| of the extended iterate (absolute when b = 0)
    int refinement_steps = 0;
    Eigen::Matrix<long double, Eigen::Dynamic, 1> extended; // [u_f, phi, q] before rounding
};

namespace detail {

/// Extracts the submatrix rows x cols of a full-DOF matrix; pos maps a DOF to its block index or -1.
inline SparseMatrix extract(const SparseMatrix& a, const std::vector<Index>& row_pos, Index nrows,
                            const std::vector<Index>& col_pos, Index ncols)
{
    std::vector<Triplet> coo;
    coo.reserve(a.nonZeros());
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            const Index r = row_pos[it.row()];
            const Index c = col_pos[it.col()];
            if (r >= 0 && c >= 0) coo.emplace_back(r, c, it.value());
        }
    SparseMatrix s(nrows, ncols);
    s.setFromTriplets(coo.begin(), coo.end());
    s.makeCompressed();
    return s;
}

inline void append_block(std::vector<Triplet>& coo, const SparseMatrix& b, Index row0, Index col0, double scale)
{
    for (int k = 0; k < b.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(b, k); it; ++it)
            coo.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

} // namespace detail

/// Assembles the block system for a case on a mesh.
inline KktSystem build_kkt(const Mesh& mesh, const DofMap& dofs, const PenaltyConfig& cfg, const ManufacturedCase& mc)
{
    cfg.validate();
    if (!(mc.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (dofs.n_dofs() != mesh.num_vertices() + mesh.num_edges() || dofs.n_triangles() != mesh.num_triangles())
        throw std::invalid_argument("build_kkt: DofMap does not match mesh");

    const SparseMatrix a = assemble_ah(mesh, dofs, cfg);
    const SparseMatrix m = assemble_mass(mesh, dofs);

    KktSystem sys;
    sys.n_interior = dofs.n_interior();
    sys.n_all = dofs.n_dofs();
    sys.alpha = mc.alpha;

    std::vector<Index> v_pos(dofs.n_dofs());
    std::vector<Index> q_pos(dofs.n_dofs());
    for (Index d = 0; d < dofs.n_dofs(); ++d) {
        v_pos[d] = dofs.interior_position(d);
        q_pos[d] = d;
    }
    const Index nv = sys.n_interior;
    const Index nq = sys.n_all;
    auto& b = sys.blocks;
    b.a_vv = detail::extract(a, v_pos, nv, v_pos, nv);
    b.a_vq = detail::extract(a, v_pos, nv, q_pos, nq);
    b.a_qv = detail::extract(a, q_pos, nq, v_pos, nv);
    b.a_qq = a;
    b.m_vv = detail::extract(m, v_pos, nv, v_pos, nv);
    b.m_vq = detail::extract(m, v_pos, nv, q_pos, nq);
    b.m_qv = detail::extract(m, q_pos, nq, v_pos, nv);
    b.m_qq = m;

    const Index r1 = 0;
    const Index r2 = nv;
    const Index r3 = 2 * nv;
    std::vector<Triplet> coo;
    coo.reserve(2 * a.nonZeros() + 2 * m.nonZeros() + 4 * b.a_vv.nonZeros());
    detail::append_block(coo, b.a_vv, r1, 0, 1.0);
    detail::append_block(coo, b.a_vq, r1, r3, 1.0);
    detail::append_block(coo, b.m_vv, r2, 0, -1.0);
    detail::append_block(coo, b.a_vv, r2, nv, 1.0);
    detail::append_block(coo, b.m_vq, r2, r3, -1.0);
    detail::append_block(coo, b.m_qv, r3, 0, 1.0);
    detail::append_block(coo, b.a_qv, r3, nv, -1.0);
    detail::append_block(coo, b.a_qq, r3, r3, mc.alpha);
    detail::append_block(coo, b.m_qq, r3, r3, 1.0);
    sys.matrix.resize(sys.size(), sys.size());
    sys.matrix.setFromTriplets(coo.begin(), coo.end());
    sys.matrix.makeCompressed();

    const Vector f_all = assemble_load(mesh, dofs, mc.f);
    const Vector ud_all = assemble_load(mesh, dofs, mc.u_d);
    sys.f_v = dofs.restrict_to_interior(f_all);
    sys.ud_v = dofs.restrict_to_interior(ud_all);
    sys.ud_q = ud_all;
    sys.apd_q = apply_ah_to_function(mesh, dofs, cfg, mc.p_d, Space::Q);

    sys.rhs.resize(sys.size());
    sys.rhs.segment(r1, nv) = sys.f_v;
    sys.rhs.segment(r2, nv) = -sys.ud_v;
    sys.rhs.segment(r3, nq) = sys.ud_q + mc.alpha * sys.apd_q;
    return sys;
}

using ExtendedVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

namespace detail {

/// b - A x accumulated in extended precision.
inline ExtendedVector extended_residual(const SparseMatrix& a, const ExtendedVector& x, const Vector& b)
{
    ExtendedVector r = b.cast<long double>();
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            r[it.row()] -= static_cast<long double>(it.value()) * x[it.col()];
    return r;
}

inline double relative_norm(const ExtendedVector& r, long double nb)
{
    return static_cast<double>(nb > 0.0L ? r.norm() / nb : r.norm());
}

} // namespace detail

/// Sparse LU in double precision followed by iterative refinement whose residuals and iterates
/// live in long double. Rounding the iterate to double costs about eps |A| |x|, which for this
/// fourth-order operator grows like h^-4 relative to ||b||; the extended iterate is kept in the
/// solution so that its residual stays checkable. Throws SolverError when the factorisation
/// fails or the relative residual stays above tol.
inline KktSolution solve_kkt(const KktSystem& sys, const DofMap& dofs, double tol = 1e-10)
{
    if (sys.n_interior != dofs.n_interior() || sys.n_all != dofs.n_dofs())
        throw std::invalid_argument("solve_kkt: system does not match DofMap");

    ExtendedVector x = ExtendedVector::Zero(sys.size());
    int steps = 0;
    double res = 0.0;
    const long double nb = sys.rhs.cast<long double>().norm();
    if (nb > 0.0L) {
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(sys.matrix);
        if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorisation failed: " + lu.lastErrorMessage(), 1.0);
        x = lu.solve(sys.rhs).cast<long double>();
        ExtendedVector r = detail::extended_residual(sys.matrix, x, sys.rhs);
        res = detail::relative_norm(r, nb);
        while (res > 0.01 * tol && steps < 8) {
            const Vector dx = lu.solve(Vector(r.cast<double>()));
            const ExtendedVector trial = x + dx.cast<long double>();
            const ExtendedVector trial_r = detail::extended_residual(sys.matrix, trial, sys.rhs);
            const double trial_res = detail::relative_norm(trial_r, nb);
            ++steps;
            if (!(trial_res < 0.5 * res)) {
                if (trial_res < res) {
                    x = trial;
                    res = trial_res;
                }
                break;
            }
            x = trial;
            r = trial_r;
            res = trial_res;
        }
        if (!std::isfinite(res) || !(res <= tol)) throw SolverError("KKT solve did not reach the residual tolerance", res);
    }

    const Index nv = sys.n_interior;
    const Vector xd = x.cast<double>();
    KktSolution sol;
    sol.alpha = sys.alpha;
    sol.residual_norm = res;
    sol.refinement_steps = steps;
    sol.extended = x;
    sol.u_f = FeFunction(dofs.extend_from_interior(xd.segment(0, nv)));
    sol.phi = FeFunction(dofs.extend_from_interior(xd.segment(nv, nv)));
    sol.q = FeFunction(Vector(xd.segment(2 * nv, sys.n_all)));
    sol.u = FeFunction(Vector(sol.u_f.coeffs + sol.q.coeffs));
    return sol;
}

/// Residuals of the three variational equations for a coefficient vector x = [u_f, phi, q]
/// (interior, interior, all), each tested against every basis function of its test space and
/// accumulated in long double. Each is ||residual_k|| / ||data_k||; when the data functional
/// vanishes the largest term norm is used instead, and the absolute value when everything vanishes.
inline std::array<double, 3> variational_residuals(const KktSystem& sys, const ExtendedVector& x)
{
    if (x.size() != sys.size()) throw std::invalid_argument("variational_residuals: vector does not match system");
    const auto& b = sys.blocks;
    const Index nv = sys.n_interior;
    const ExtendedVector uf = x.segment(0, nv);
    const ExtendedVector ph = x.segment(nv, nv);
    const ExtendedVector q = x.segment(2 * nv, sys.n_all);

    const auto mul = [](const SparseMatrix& m, const ExtendedVector& v) {
        ExtendedVector out = ExtendedVector::Zero(m.rows());
        for (int k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it)
                out[it.row()] += static_cast<long double>(it.value()) * v[it.col()];
        return out;
    };
    const auto rel = [](const ExtendedVector& r, const ExtendedVector& data, std::initializer_list<long double> terms) {
        long double s = data.norm();
        if (!(s > 0.0L))
            for (long double t : terms) s = std::max(s, t);
        return static_cast<double>(s > 0.0L ? r.norm() / s : r.norm());
    };
    const long double alpha = sys.alpha;

    const ExtendedVector t11 = mul(b.a_vv, uf);
    const ExtendedVector t12 = mul(b.a_vq, q);
    const ExtendedVector rhs1 = sys.f_v.cast<long double>();
    const ExtendedVector r1 = t11 + t12 - rhs1;

    const ExtendedVector t21 = mul(b.a_vv, ph);
    const ExtendedVector t22 = mul(b.m_vv, uf) + mul(b.m_vq, q);
    const ExtendedVector rhs2 = -sys.ud_v.cast<long double>();
    const ExtendedVector r2 = t21 - t22 - rhs2;

    const ExtendedVector t31 = alpha * mul(b.a_qq, q);
    const ExtendedVector t32 = mul(b.a_qv, ph);
    const ExtendedVector t33 = mul(b.m_qv, uf) + mul(b.m_qq, q);
    const ExtendedVector rhs3 = sys.ud_q.cast<long double>() + alpha * sys.apd_q.cast<long double>();
    const ExtendedVector r3 = t31 - t32 + t33 - rhs3;

    return {rel(r1, rhs1, {t11.norm(), t12.norm()}), rel(r2, rhs2, {t21.norm(), t22.norm()}),
            rel(r3, rhs3, {t31.norm(), t32.norm(), t33.norm()})};
}

/// Coefficients of a solution as one vector [u_f, phi, q]. rounded = true uses the stored double
/// FE coefficients; otherwise the solver's extended iterate when it has one.
inline ExtendedVector stacked_coefficients(const KktSystem& sys, const DofMap& dofs, const KktSolution& sol,
                                           bool rounded = false)
{
    if (!rounded && sol.extended.size() == sys.size()) return sol.extended;
    ExtendedVector x(sys.size());
    const Index nv = sys.n_interior;
    x.segment(0, nv) = dofs.restrict_to_interior(sol.u_f.coeffs).cast<long double>();
    x.segment(nv, nv) = dofs.restrict_to_interior(sol.phi.coeffs).cast<long double>();
    x.segment(2 * nv, sys.n_all) = sol.q.coeffs.cast<long double>();
    return x;
}

/// Variational residuals of a solution, using the solver's extended iterate when present.
inline std::array<double, 3> variational_residuals(const KktSystem& sys, const DofMap& dofs, const KktSolution& sol)
{
    return variational_residuals(sys, stacked_coefficients(sys, dofs, sol));
}

/// CSV "dof,x,y,u,phi,q".
inline void write_solution_csv(std::ostream& os, const Mesh& mesh, const DofMap& dofs, const KktSolution& sol)
{
    const auto x = dofs.node_coordinates(mesh);
    const auto old = os.precision(10);
    os << "dof,x,y,u,phi,q\n";
    for (Index d = 0; d < dofs.n_dofs(); ++d)
        os << d << ',' << x[d].x() << ',' << x[d].y() << ',' << sol.u.coeffs[d] << ',' << sol.phi.coeffs[d] << ','
           << sol.q.coeffs[d] << '\n';
    os.precision(old);
}

} // namespace c0ip
