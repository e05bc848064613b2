#include <doctest.h>

#include <cmath>
#include <vector>

#include "facloc/error.hpp"
#include "facloc/rng.hpp"
#include "facloc/scene_model.hpp"

using namespace facloc;

namespace {

// All-building label map.
SemanticLabelMap building_map(int w, int h) {
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h,
                                     static_cast<std::uint8_t>(SemanticCategory::kBuilding));
    return SemanticLabelMap(w, h, labels);
}

SemanticLabelMap sky_map(int w, int h) {
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h,
                                     static_cast<std::uint8_t>(SemanticCategory::kSky));
    return SemanticLabelMap(w, h, labels);
}

}  // namespace

TEST_CASE("intrinsics invert columns and bearings") {
    auto intr = CameraIntrinsics::create(100, 90.0);
    CHECK(intr.focal_cols == doctest::Approx(50.0));
    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        double bearing = rng.uniform(-44.99, 44.99);
        double col = intr.width_cols / 2.0 + intr.focal_cols * std::tan(deg2rad(bearing));
        double back = rad2deg(std::atan((col - intr.width_cols / 2.0) / intr.focal_cols));
        CHECK(std::fabs(back - bearing) < 1e-9);
    }
    CHECK_THROWS_AS(CameraIntrinsics::create(0, 90.0), ValidationError);
    CHECK_THROWS_AS(CameraIntrinsics::create(100, 180.0), ValidationError);
}

TEST_CASE("label map components partition building pixels") {
    // Two building blobs separated by sky.
    int w = 10, h = 4;
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h, 0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < 3; ++c) labels[r * w + c] = 1;
        for (int c = 6; c < 10; ++c) labels[r * w + c] = 1;
    }
    SemanticLabelMap seg(w, h, labels);
    CHECK(seg.component_count() == 2);
    CHECK(seg.component(0, 0) == 1);
    CHECK(seg.component(7, 2) == 2);
    CHECK(seg.component(4, 0) == 0);
    CHECK(seg.column_has_building(1));
    CHECK_FALSE(seg.column_has_building(4));
    CHECK(seg.component_in_column(1, 2));
    CHECK_FALSE(seg.component_in_column(1, 7));
}

TEST_CASE("filter_lines keeps only building-overlapping lines") {
    int w = 20, h = 10;
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h,
                                     static_cast<std::uint8_t>(SemanticCategory::kSky));
    // Building block on columns [0, 10), rows [0, 10); tree elsewhere.
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < 10; ++c) labels[r * w + c] = 1;
        for (int c = 10; c < 20; ++c) labels[r * w + c] = 2;
    }
    SemanticLabelMap seg(w, h, labels);

    std::vector<LabeledLineSegment> lines{
        {{1, 1}, {8, 1}, 0},    // fully inside the building
        {{12, 2}, {18, 2}, 1},  // fully inside the tree region
        {{8, 5}, {14, 5}, 2},   // crosses the building/tree boundary
    };
    auto kept = filter_lines(lines, seg);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].vp_index == 0);
    CHECK(kept[1].vp_index == 2);

    std::vector<LabeledLineSegment> outside{{{-3, 1}, {5, 1}, 0}};
    CHECK_THROWS_AS(filter_lines(outside, seg), ValidationError);
}

TEST_CASE("filter_lines agrees with dense sampling on random lines") {
    int w = 40, h = 30;
    Rng rng(23);
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h, 0);
    for (auto& v : labels) v = rng.bernoulli(0.3) ? 1 : 0;
    SemanticLabelMap seg(w, h, labels);

    for (int i = 0; i < 400; ++i) {
        Vec2 p0{rng.uniform(0, w - 1), rng.uniform(0, h - 1)};
        Vec2 p1{rng.uniform(0, w - 1), rng.uniform(0, h - 1)};
        std::vector<LabeledLineSegment> one{{p0, p1, 0}};
        bool kept = !filter_lines(one, seg).empty();

        // Distance-based oracle on the rounded-endpoint segment. Any
        // rasterization visits only pixels near the segment, and must visit
        // pixels when everything near the segment is building.
        Vec2 a{std::round(p0.x), std::round(p0.y)};
        Vec2 b{std::round(p1.x), std::round(p1.y)};
        bool building_near = false;   // within the rasterization corridor
        bool non_building_near = false;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double d = point_segment_distance({double(c), double(r)}, a, b);
                if (d <= 0.71 && seg.label(c, r) != SemanticCategory::kBuilding) {
                    non_building_near = true;
                }
                if (d <= 1.0 && seg.label(c, r) == SemanticCategory::kBuilding) {
                    building_near = true;
                }
            }
        }
        if (kept) CHECK(building_near);
        if (!non_building_near) CHECK(kept);  // corridor is solid building
    }
}

TEST_CASE("column_vp_vote counts intersecting lines per column") {
    std::vector<LabeledLineSegment> one{{{10, 0}, {20, 0}, 1}};
    auto v = column_vp_vote(one, 30);
    CHECK(v[9] == kNoVote);
    CHECK(v[10] == 1);
    CHECK(v[20] == 1);
    CHECK(v[21] == kNoVote);

    // Two vp-1 lines against one vp-2 line on the same columns.
    std::vector<LabeledLineSegment> mixed{
        {{0, 0}, {10, 0}, 1}, {{0, 1}, {10, 1}, 1}, {{0, 2}, {10, 2}, 2}};
    auto v2 = column_vp_vote(mixed, 12);
    CHECK(v2[5] == 1);

    // A tie between vp 2 and vp 3 goes to vp 2.
    std::vector<LabeledLineSegment> tie{{{0, 0}, {10, 0}, 3}, {{0, 1}, {10, 1}, 2}};
    auto v3 = column_vp_vote(tie, 12);
    CHECK(v3[5] == 2);

    // Vertical lines never vote.
    std::vector<LabeledLineSegment> vert{{{5, 0}, {5, 9}, kVpVertical}};
    auto v4 = column_vp_vote(vert, 12);
    CHECK(v4[5] == kNoVote);
}

TEST_CASE("cutting_lines brackets and detects switches") {
    CHECK(cutting_lines({1, 1, 1, 2, 2}) == std::vector<int>{0, 3, 5});
    CHECK(cutting_lines({kNoVote, kNoVote, kNoVote}) == std::vector<int>{0, 3});
    CHECK(cutting_lines({1, kNoVote, 1}) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("cutting_lines output is strictly increasing and bracketed") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        int w = 1 + static_cast<int>(rng.uniform_index(50));
        std::vector<int> votes(w);
        for (auto& v : votes) {
            v = rng.bernoulli(0.3) ? kNoVote : static_cast<int>(rng.uniform_index(4));
        }
        auto cuts = cutting_lines(votes);
        REQUIRE(cuts.size() >= 2);
        CHECK(cuts.front() == 0);
        CHECK(cuts.back() == w);
        for (std::size_t i = 1; i < cuts.size(); ++i) CHECK(cuts[i] > cuts[i - 1]);
    }
}

TEST_CASE("decompose_facades assigns intervals to vp angles") {
    std::vector<int> votes{1, 1, 1, 2, 2};
    auto cuts = cutting_lines(votes);
    std::map<int, double> vp_theta{{1, 30.0}, {2, 120.0}};
    auto seg = building_map(5, 4);
    auto facades = decompose_facades(votes, cuts, vp_theta, seg, 1);
    REQUIRE(facades.size() == 2);
    CHECK(facades[0].start_col == 0);
    CHECK(facades[0].end_col == 3);
    CHECK(facades[0].theta_deg == doctest::Approx(30.0));
    CHECK(facades[1].start_col == 3);
    CHECK(facades[1].end_col == 5);
    CHECK(facades[1].theta_deg == doctest::Approx(120.0));
}

TEST_CASE("decompose_facades drops empty and non-building intervals") {
    std::vector<int> all_empty(8, kNoVote);
    auto seg = building_map(8, 4);
    CHECK(decompose_facades(all_empty, cutting_lines(all_empty), {}, seg, 1).empty());

    std::vector<int> votes(8, 1);
    auto sky = sky_map(8, 4);
    CHECK(decompose_facades(votes, cutting_lines(votes), {{1, 30.0}}, sky, 1).empty());

    // Default threshold: a 4-column building interval is too small.
    std::vector<int> narrow(4, 1);
    auto seg4 = building_map(4, 4);
    CHECK(decompose_facades(narrow, cutting_lines(narrow), {{1, 30.0}}, seg4).empty());
}

TEST_CASE("decompose_facades intervals are disjoint and ordered") {
    Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        int w = 10 + static_cast<int>(rng.uniform_index(60));
        std::vector<int> votes(w);
        for (auto& v : votes) {
            v = rng.bernoulli(0.25) ? kNoVote : static_cast<int>(rng.uniform_index(3));
        }
        std::map<int, double> vp_theta{{0, 10.0}, {1, 60.0}, {2, 140.0}};
        auto seg = building_map(w, 4);
        auto facades =
            decompose_facades(votes, cutting_lines(votes), vp_theta, seg, 1);
        for (std::size_t i = 0; i < facades.size(); ++i) {
            CHECK(facades[i].start_col < facades[i].end_col);
            if (i > 0) CHECK(facades[i].start_col >= facades[i - 1].end_col);
        }
    }
}

TEST_CASE("decompose_facades requires an angle for every voted vp") {
    std::vector<int> votes(8, 3);
    auto seg = building_map(8, 4);
    CHECK_THROWS_AS(decompose_facades(votes, cutting_lines(votes), {{1, 30.0}}, seg, 1),
                    ValidationError);
}

TEST_CASE("facade_angle_from_vp anchor points") {
    auto intr = CameraIntrinsics::create(100, 90.0);
    CHECK(facade_angle_from_vp(50.0, intr) == doctest::Approx(90.0));
    CHECK(facade_angle_from_vp(50.0 + intr.focal_cols, intr) == doctest::Approx(135.0));
    CHECK(facade_angle_from_vp(std::numeric_limits<double>::infinity(), intr) == 0.0);
}

TEST_CASE("facade_angle_from_vp is monotone over finite columns") {
    auto intr = CameraIntrinsics::create(640, 70.0);
    double prev = -1.0;
    for (double col = -5000.0; col <= 5000.0; col += 37.0) {
        // Unwrapped: atan is increasing, the +90 shift cancels in differences.
        double bearing = rad2deg(std::atan((col - 320.0) / intr.focal_cols));
        double theta = facade_angle_from_vp(col, intr);
        CHECK(theta == doctest::Approx(normalize_deg_180(bearing + 90.0)));
        if (prev >= 0.0) CHECK(bearing > prev);
        prev = bearing;
    }
}

TEST_CASE("per_column_estimates averages within a component") {
    std::vector<ObservedFacade> one{{0, 10, 30.0, {}}};
    auto theta = per_column_estimates(one, 20, nullptr);
    CHECK(theta[0] == doctest::Approx(30.0));
    CHECK(theta[9] == doctest::Approx(30.0));
    CHECK(std::isnan(theta[10]));

    std::vector<ObservedFacade> overlap{{0, 10, 30.0, {}}, {5, 15, 40.0, {}}};
    auto theta2 = per_column_estimates(overlap, 20, nullptr);
    CHECK(theta2[7] == doctest::Approx(35.0));
    CHECK(theta2[2] == doctest::Approx(30.0));
    CHECK(theta2[12] == doctest::Approx(40.0));

    std::vector<ObservedFacade> wrap{{0, 10, 10.0, {}}, {0, 10, 170.0, {}}};
    auto theta3 = per_column_estimates(wrap, 10, nullptr);
    CHECK(theta3[5] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("per_column_estimates is empty exactly off-facade") {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        int w = 30;
        int n = static_cast<int>(rng.uniform_index(4));
        std::vector<ObservedFacade> facades;
        for (int i = 0; i < n; ++i) {
            int s = static_cast<int>(rng.uniform_index(w - 1));
            int e = s + 1 + static_cast<int>(rng.uniform_index(w - s));
            facades.push_back({s, std::min(e, w), rng.uniform(0.0, 180.0), {}});
        }
        auto theta = per_column_estimates(facades, w, nullptr);
        for (int c = 0; c < w; ++c) {
            bool covered = false;
            for (const auto& f : facades) covered = covered || f.covers(c);
            CHECK(std::isnan(theta[c]) == !covered);
        }
    }
}
