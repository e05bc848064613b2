#include <doctest.h>

#include <vector>

#include "facloc/geometry.hpp"
#include "facloc/rng.hpp"

using namespace facloc;

TEST_CASE("angle normalization") {
    CHECK(normalize_deg(370.0) == doctest::Approx(10.0));
    CHECK(normalize_deg(-10.0) == doctest::Approx(350.0));
    CHECK(normalize_deg(360.0) == 0.0);
    CHECK(normalize_deg_180(190.0) == doctest::Approx(10.0));
    CHECK(normalize_deg_180(-30.0) == doctest::Approx(150.0));
    CHECK(normalize_deg_180(180.0) == 0.0);
}

TEST_CASE("signed area and orientation") {
    std::vector<Vec2> ccw{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(signed_area(ccw) == doctest::Approx(100.0));
    std::vector<Vec2> cw(ccw.rbegin(), ccw.rend());
    CHECK(signed_area(cw) == doctest::Approx(-100.0));
}

TEST_CASE("simple polygon detection") {
    std::vector<Vec2> square{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(polygon_is_simple(square));
    std::vector<Vec2> bowtie{{0, 0}, {10, 10}, {10, 0}, {0, 10}};
    CHECK_FALSE(polygon_is_simple(bowtie));
    std::vector<Vec2> spike{{0, 0}, {10, 0}, {5, 0}, {5, 5}};
    CHECK_FALSE(polygon_is_simple(spike));
}

TEST_CASE("strict interior excludes the boundary") {
    std::vector<Vec2> square{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(point_strictly_inside(square, {5, 5}));
    CHECK_FALSE(point_strictly_inside(square, {0, 5}));
    CHECK_FALSE(point_strictly_inside(square, {10, 10}));
    CHECK_FALSE(point_strictly_inside(square, {-1, 5}));
}

TEST_CASE("segment distances") {
    CHECK(point_segment_distance({0, 5}, {-10, 0}, {10, 0}) == doctest::Approx(5.0));
    CHECK(segment_segment_distance({0, 0}, {10, 0}, {0, 3}, {10, 3}) ==
          doctest::Approx(3.0));
    CHECK(segment_segment_distance({0, 0}, {10, 10}, {10, 0}, {0, 10}) == 0.0);
}

TEST_CASE("polygon distance of separated squares") {
    std::vector<Vec2> a{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    std::vector<Vec2> b{{15, 0}, {25, 0}, {25, 10}, {15, 10}};
    CHECK(polygon_distance(a, b) == doctest::Approx(5.0));
    std::vector<Vec2> c{{5, 5}, {12, 5}, {12, 8}, {5, 8}};
    CHECK(polygon_distance(a, c) == 0.0);
}

TEST_CASE("circular mean wraps at 180") {
    std::vector<double> a{30.0, 40.0};
    CHECK(circular_mean_180(a) == doctest::Approx(35.0));
    std::vector<double> b{10.0, 170.0};
    CHECK(circular_mean_180(b) == doctest::Approx(0.0).epsilon(1e-9));
    std::vector<double> c{90.0};
    CHECK(circular_mean_180(c) == doctest::Approx(90.0));
}

TEST_CASE("circular diff is symmetric and bounded") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        double a = rng.uniform(-720.0, 720.0);
        double b = rng.uniform(-720.0, 720.0);
        double d = circular_diff_180(a, b);
        CHECK(d >= 0.0);
        CHECK(d <= 90.0 + 1e-12);
        CHECK(d == doctest::Approx(circular_diff_180(b, a)));
    }
}
