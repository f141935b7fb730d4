#include <gtest/gtest.h>

#include <set>

#include "ipd/generators.hpp"

using namespace ipd;

TEST(Blobs, K30Shape) {
    const Dataset d = generate_gaussian_blobs(30, 25, 100.0, 10.0, 1);
    EXPECT_EQ(d.size(), 750u);
    EXPECT_EQ(d.dim(), 2u);
    const std::set<Label> labels(d.labels().begin(), d.labels().end());
    EXPECT_EQ(labels.size(), 30u);
}

TEST(Blobs, SingleCluster) {
    const Dataset d = generate_gaussian_blobs(1, 50, 10.0, 0.0, 2);
    for (Label l : d.labels()) {
        EXPECT_EQ(l, 0);
    }
}

TEST(Blobs, Deterministic) {
    const Dataset a = generate_gaussian_blobs(4, 20, 50.0, 10.0, 9);
    const Dataset b = generate_gaussian_blobs(4, 20, 50.0, 10.0, 9);
    const Dataset c = generate_gaussian_blobs(4, 20, 50.0, 10.0, 10);
    EXPECT_EQ(a.coords(), b.coords());
    EXPECT_NE(a.coords(), c.coords());
}

TEST(Blobs, MeansRespectSeparation) {
    const Dataset d = generate_gaussian_blobs(6, 400, 60.0, 15.0, 3);
    std::vector<std::array<double, 2>> mean(6, {0.0, 0.0});
    for (std::size_t i = 0; i < d.size(); ++i) {
        mean[d.labels()[i]][0] += d.point(i)[0] / 400.0;
        mean[d.labels()[i]][1] += d.point(i)[1] / 400.0;
    }
    for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b) {
            // Sample means are within ~0.2 of the true means at this size.
            EXPECT_GT(std::hypot(mean[a][0] - mean[b][0], mean[a][1] - mean[b][1]), 14.0);
        }
    }
}

TEST(Blobs, ImpossibleSeparationThrows) {
    EXPECT_THROW(generate_gaussian_blobs(50, 1, 1.0, 10.0, 1), GenerationError);
    EXPECT_THROW(generate_gaussian_blobs(0, 1, 1.0, 0.0, 1), InputError);
}

TEST(Shapes, UnitSquareContainment) {
    const Polygon square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Dataset d = generate_shapes({square}, 100, 4);
    EXPECT_EQ(d.size(), 100u);
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_GE(d.point(i)[0], 0.0);
        EXPECT_LE(d.point(i)[0], 1.0);
        EXPECT_GE(d.point(i)[1], 0.0);
        EXPECT_LE(d.point(i)[1], 1.0);
    }
}

TEST(Shapes, TriangleContainment) {
    const Polygon tri{{0, 0}, {4, 0}, {0, 3}};
    const Dataset d = generate_shapes({tri}, 500, 5);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double x = d.point(i)[0], y = d.point(i)[1];
        EXPECT_TRUE(point_in_polygon(tri, x, y));
        EXPECT_LE(3.0 * x + 4.0 * y, 12.0 + 1e-9);
    }
}

TEST(Shapes, ZeroAreaThrows) {
    const Polygon line{{0, 0}, {1, 1}, {2, 2}};
    EXPECT_THROW(generate_shapes({line}, 10, 1), InputError);
    EXPECT_THROW(generate_shapes({Polygon{{0, 0}, {1, 1}}}, 10, 1), InputError);
}

TEST(Shapes, NineShapeLayout) {
    const auto polys = shapes::aquanimal_like();
    ASSERT_EQ(polys.size(), 9u);
    for (const auto& p : polys) {
        EXPECT_GT(std::abs(signed_area(p)), 100.0);
    }
    const Dataset d = generate_shapes(polys, 200, 6);
    EXPECT_EQ(d.size(), 1800u);
    const std::set<Label> labels(d.labels().begin(), d.labels().end());
    EXPECT_EQ(labels.size(), 9u);
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_TRUE(point_in_polygon(polys[d.labels()[i]], d.point(i)[0], d.point(i)[1]));
    }
}

TEST(Geometry, SignedAreaOrientation) {
    const Polygon ccw{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    const Polygon cw{{0, 0}, {0, 2}, {2, 2}, {2, 0}};
    EXPECT_DOUBLE_EQ(signed_area(ccw), 4.0);
    EXPECT_DOUBLE_EQ(signed_area(cw), -4.0);
}
