#include "c0ip/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <utility>

using namespace c0ip;

namespace {

int count_boundary(const Mesh& m)
{
    return static_cast<int>(std::count_if(m.edges().begin(), m.edges().end(), [](const Edge& e) { return e.boundary; }));
}

std::set<std::pair<long long, long long>> vertex_set(const Mesh& m)
{
    // coordinates on a dyadic grid, compared exactly after scaling
    std::set<std::pair<long long, long long>> s;
    for (const auto& p : m.vertices()) s.emplace(std::llround(p.x() * 1024), std::llround(p.y() * 1024));
    return s;
}

void expect_valid(const Mesh& m)
{
    EXPECT_EQ(m.check_unit_square_conformity(), "");
    EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
    for (Index t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.geometry(t).area, 0.0);
}

std::vector<Index> all_triangles(const Mesh& m)
{
    std::vector<Index> v(m.num_triangles());
    for (Index t = 0; t < m.num_triangles(); ++t) v[t] = t;
    return v;
}

} // namespace

TEST(BuildUnitSquare, CountsForOneCell)
{
    const Mesh m = build_unit_square(1);
    EXPECT_EQ(m.num_vertices(), 4);
    EXPECT_EQ(m.num_triangles(), 2);
    EXPECT_EQ(m.num_edges(), 5);
    EXPECT_EQ(count_boundary(m), 4);
}

TEST(BuildUnitSquare, CountsForTwoCells)
{
    const Mesh m = build_unit_square(2);
    EXPECT_EQ(m.num_vertices(), 9);
    EXPECT_EQ(m.num_triangles(), 8);
    EXPECT_EQ(m.num_edges(), 16);
    EXPECT_EQ(count_boundary(m), 8);
}

TEST(BuildUnitSquare, DiameterAndValidity)
{
    const Mesh m = build_unit_square(4);
    EXPECT_NEAR(m.max_diameter(), std::sqrt(2.0) / 4.0, 1e-15);
    expect_valid(m);
    EXPECT_THROW(build_unit_square(0), std::invalid_argument);
}

TEST(BuildUnitSquare, RefinementEdgeIsHypotenuse)
{
    const Mesh m = build_unit_square(3);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles()[t];
        const Index e = m.edges_of(t)[tri.refinement_edge];
        EXPECT_NEAR(m.edge_length(e), std::sqrt(2.0) / 3.0, 1e-14);
    }
}

TEST(MeshTopology, EdgesAreSortedAndConsistent)
{
    const Mesh m = build_unit_square(3);
    for (std::size_t i = 0; i + 1 < m.edges().size(); ++i)
        EXPECT_LT(std::make_pair(m.edges()[i].v[0], m.edges()[i].v[1]),
                  std::make_pair(m.edges()[i + 1].v[0], m.edges()[i + 1].v[1]));
    for (Index t = 0; t < m.num_triangles(); ++t)
        for (int k = 0; k < 3; ++k) {
            const Edge& e = m.edges()[m.edges_of(t)[k]];
            // local edge k is opposite vertex k
            const Index a = m.triangles()[t].v[(k + 1) % 3];
            const Index b = m.triangles()[t].v[(k + 2) % 3];
            EXPECT_EQ(e.v[0], std::min(a, b));
            EXPECT_EQ(e.v[1], std::max(a, b));
            EXPECT_TRUE(e.tris[0] == t || e.tris[1] == t);
        }
}

TEST(MeshTopology, OutwardNormalFromFirstTriangle)
{
    const Mesh m = build_unit_square(2);
    for (Index e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        const auto g = m.geometry(ed.tris[0]);
        const Point2 c = (g.vertex[0] + g.vertex[1] + g.vertex[2]) / 3.0;
        const Point2 mid = m.edge_point(e, 0.5);
        EXPECT_GT((mid - c).dot(m.edge_normal(e)), 0.0);
        EXPECT_NEAR(m.edge_normal(e).norm(), 1.0, 1e-15);
    }
}

TEST(MeshConstruction, RejectsInvalidInput)
{
    const std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 1}};
    EXPECT_THROW(Mesh(pts, {{{0, 2, 1}, 0, 0}}), std::invalid_argument); // clockwise
    EXPECT_THROW(Mesh(pts, {{{0, 1, 3}, 0, 0}}), std::invalid_argument); // bad index
    const std::vector<Point2> line{{0, 0}, {1, 0}, {2, 0}};
    EXPECT_THROW(Mesh(line, {{{0, 1, 2}, 0, 0}}), std::invalid_argument); // degenerate
}

TEST(UniformRefine, QuadruplesAndHalves)
{
    const Mesh m = build_unit_square(1);
    const Mesh r = uniform_refine(m);
    EXPECT_EQ(r.num_triangles(), 8);
    EXPECT_NEAR(r.max_diameter(), 0.5 * m.max_diameter(), 1e-15);
    expect_valid(r);
}

TEST(UniformRefine, ContainsMidpointTriangle)
{
    const Mesh m({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}, 0, 0}});
    const Mesh r = uniform_refine(m);
    ASSERT_EQ(r.num_triangles(), 4);
    const std::set<std::pair<double, double>> want{{0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}};
    bool found = false;
    for (const auto& tri : r.triangles()) {
        std::set<std::pair<double, double>> got;
        for (Index v : tri.v) got.emplace(r.vertices()[v].x(), r.vertices()[v].y());
        found = found || got == want;
    }
    EXPECT_TRUE(found);
}

TEST(UniformRefine, TwiceMatchesStructuredMesh)
{
    const Mesh r = uniform_refine(uniform_refine(build_unit_square(1)));
    const Mesh s = build_unit_square(4);
    EXPECT_EQ(vertex_set(r), vertex_set(s));
    EXPECT_EQ(r.num_triangles(), s.num_triangles());
    EXPECT_EQ(r.num_edges(), s.num_edges());
}

TEST(UniformRefine, KeepsRefinementEdgeOnLongestSide)
{
    const Mesh r = uniform_refine(uniform_refine(build_unit_square(2)));
    for (Index t = 0; t < r.num_triangles(); ++t) {
        double longest = 0.0;
        for (Index e : r.edges_of(t)) longest = std::max(longest, r.edge_length(e));
        EXPECT_NEAR(r.edge_length(r.edges_of(t)[r.triangles()[t].refinement_edge]), longest, 1e-14);
    }
}

TEST(NvbRefine, EmptyMarkingLeavesMeshUnchanged)
{
    const Mesh m = build_unit_square(2);
    const Mesh r = nvb_refine(m, {});
    EXPECT_EQ(r.num_triangles(), m.num_triangles());
    EXPECT_EQ(r.num_vertices(), m.num_vertices());
}

TEST(NvbRefine, SingleTriangleRefinesNeighbourAcrossHypotenuse)
{
    const Mesh r = nvb_refine(build_unit_square(1), {0});
    EXPECT_EQ(r.num_triangles(), 4);
    EXPECT_EQ(r.num_vertices(), 5);
    expect_valid(r);
}

TEST(NvbRefine, RepeatedFullMarkingDoubles)
{
    Mesh m = build_unit_square(1);
    const Index initial = m.num_triangles();
    for (int k = 1; k <= 6; ++k) {
        m = nvb_refine(m, all_triangles(m));
        EXPECT_EQ(m.num_triangles(), (Index{1} << k) * initial);
        expect_valid(m);
    }
}

TEST(NvbRefine, OutOfRangeMarkThrows)
{
    const Mesh m = build_unit_square(1);
    EXPECT_THROW(nvb_refine(m, {2}), std::out_of_range);
    EXPECT_THROW(nvb_refine(m, {-1}), std::out_of_range);
}

TEST(NvbRefine, RandomMarkingKeepsConformityAndShape)
{
    std::mt19937 rng(1234);
    Mesh m = build_unit_square(2);
    const double initial_angle = m.min_angle();
    for (int round = 0; round < 12; ++round) {
        std::vector<Index> marked;
        std::bernoulli_distribution pick(0.2);
        for (Index t = 0; t < m.num_triangles(); ++t)
            if (pick(rng)) marked.push_back(t);
        if (marked.empty()) marked.push_back(0);
        const Index before = m.num_triangles();
        m = nvb_refine(m, marked);
        EXPECT_GT(m.num_triangles(), before);
        expect_valid(m);
        EXPECT_GE(m.min_angle(), initial_angle / 2.0 - 1e-12);
    }
}

TEST(NvbRefine, LocalRefinementStaysLocal)
{
    // repeatedly refining the corner triangle should not refine the whole mesh
    Mesh m = build_unit_square(4);
    for (int k = 0; k < 10; ++k) {
        Index corner = 0;
        double best = 1e9;
        for (Index t = 0; t < m.num_triangles(); ++t) {
            const auto g = m.geometry(t);
            const double d = ((g.vertex[0] + g.vertex[1] + g.vertex[2]) / 3.0).norm();
            if (d < best) {
                best = d;
                corner = t;
            }
        }
        m = nvb_refine(m, {corner});
        expect_valid(m);
    }
    EXPECT_LT(m.num_triangles(), 200);
    EXPECT_LT(m.min_angle(), 1.0); // sanity: angles stay in the NVB family
    EXPECT_GE(m.min_angle(), build_unit_square(4).min_angle() / 2.0 - 1e-12);
}

TEST(MeshExport, TextFormat)
{
    std::ostringstream os;
    build_unit_square(1).write_text(os);
    std::istringstream is(os.str());
    std::string tag;
    int n = 0;
    is >> tag >> n;
    EXPECT_EQ(tag, "vertices");
    EXPECT_EQ(n, 4);
    double x = 0, y = 0;
    for (int i = 0; i < n; ++i) is >> x >> y;
    is >> tag >> n;
    EXPECT_EQ(tag, "triangles");
    EXPECT_EQ(n, 2);
    int a = 0, b = 0, c = 0;
    is >> a >> b >> c;
    EXPECT_EQ(a, 0);
    EXPECT_EQ(b, 1);
    EXPECT_EQ(c, 3);
}
