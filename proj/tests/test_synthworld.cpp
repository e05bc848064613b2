#include <doctest.h>

#include <cmath>

#include "facloc/error.hpp"
#include "facloc/likelihood.hpp"
#include "facloc/synthworld.hpp"

using namespace facloc;

TEST_CASE("map generation is deterministic per seed") {
    SynthConfig cfg;
    cfg.seed = 1;
    cfg.n_buildings = 5;
    BuildingMap a = generate_map(cfg);
    BuildingMap b = generate_map(cfg);
    CHECK(map_to_json(a) == map_to_json(b));
    CHECK(a.buildings.size() == 5);

    cfg.seed = 2;
    BuildingMap c = generate_map(cfg);
    CHECK(map_to_json(a) != map_to_json(c));
}

TEST_CASE("empty world") {
    SynthConfig cfg;
    cfg.n_buildings = 0;
    BuildingMap map = generate_map(cfg);
    CHECK(map.buildings.empty());
}

TEST_CASE("buildings respect the pairwise separation") {
    SynthConfig cfg;
    cfg.seed = 7;
    cfg.n_buildings = 9;
    cfg.map_extent_m = 420.0;
    cfg.min_separation_m = 18.0;
    BuildingMap map = generate_map(cfg);
    REQUIRE(map.buildings.size() == 9);
    for (std::size_t i = 0; i < map.buildings.size(); ++i) {
        for (std::size_t j = i + 1; j < map.buildings.size(); ++j) {
            CHECK(polygon_distance(map.buildings[i].polygon,
                                   map.buildings[j].polygon) >= 18.0);
        }
    }
}

TEST_CASE("infeasible packings are reported") {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.n_buildings = 60;
    cfg.map_extent_m = 150.0;
    cfg.min_size_m = 30.0;
    cfg.max_size_m = 40.0;
    cfg.min_separation_m = 30.0;
    CHECK_THROWS_AS(generate_map(cfg), ValidationError);
}

TEST_CASE("noiseless render reproduces the projection exactly") {
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.n_buildings = 7;
    cfg.map_extent_m = 300.0;
    BuildingMap map = generate_map(cfg);
    auto intr = CameraIntrinsics::create(200, 85.0);
    Rng rng(4);
    Pose pose = sample_viewpoint(map, intr, rng);

    Rng render_rng(5);
    auto rendered = render_scene(map, pose, intr, {}, render_rng);
    auto projected = project_map(map, pose, intr, true);
    REQUIRE(rendered.scene.facades.size() == projected.size());
    for (std::size_t i = 0; i < projected.size(); ++i) {
        CHECK(rendered.scene.facades[i].start_col == projected[i].start_col);
        CHECK(rendered.scene.facades[i].end_col == projected[i].end_col);
        CHECK(rendered.scene.facades[i].theta_deg ==
              doctest::Approx(projected[i].theta_deg));
        REQUIRE(rendered.scene.facades[i].has_identity());
        CHECK(rendered.scene.facades[i].identity_dist.count(projected[i].building) == 1);
    }
}

TEST_CASE("full dropout renders an empty scene") {
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.n_buildings = 7;
    cfg.map_extent_m = 300.0;
    BuildingMap map = generate_map(cfg);
    auto intr = CameraIntrinsics::create(200, 85.0);
    Rng rng(4);
    Pose pose = sample_viewpoint(map, intr, rng);
    NoiseParams noise;
    noise.dropout_prob = 1.0;
    Rng render_rng(6);
    auto rendered = render_scene(map, pose, intr, noise, render_rng);
    CHECK(rendered.scene.facades.empty());
    CHECK(!rendered.truth.empty());  // ground truth ignores observation noise
}

TEST_CASE("noiseless likelihood at the true pose is near one for tiny distances") {
    SynthConfig cfg;
    cfg.seed = 21;
    cfg.n_buildings = 6;
    cfg.map_extent_m = 260.0;
    BuildingMap map = generate_map(cfg);
    auto intr = CameraIntrinsics::create(200, 90.0);
    Rng rng(8);
    Pose pose = sample_viewpoint(map, intr, rng);
    Rng render_rng(9);
    auto rendered = render_scene(map, pose, intr, {}, render_rng);

    LikelihoodParams params;
    params.sigma_m = 1e4;  // distances are negligible against sigma
    double p = pose_likelihood(rendered.scene, pose, map, params);
    CHECK(p >= 0.95);
}

TEST_CASE("rendered scenes are deterministic per seed") {
    SynthConfig cfg;
    cfg.seed = 31;
    cfg.n_buildings = 8;
    cfg.map_extent_m = 320.0;
    BuildingMap map = generate_map(cfg);
    auto intr = CameraIntrinsics::create(160, 80.0);
    NoiseParams noise = noise_profile("low");

    Rng rng_a(77);
    Pose pose_a = sample_viewpoint(map, intr, rng_a);
    auto a = render_scene(map, pose_a, intr, noise, rng_a);
    Rng rng_b(77);
    Pose pose_b = sample_viewpoint(map, intr, rng_b);
    auto b = render_scene(map, pose_b, intr, noise, rng_b);

    CHECK(pose_a.x == pose_b.x);
    CHECK(pose_a.gamma_deg == pose_b.gamma_deg);
    REQUIRE(a.scene.facades.size() == b.scene.facades.size());
    for (std::size_t i = 0; i < a.scene.facades.size(); ++i) {
        CHECK(a.scene.facades[i].start_col == b.scene.facades[i].start_col);
        CHECK(a.scene.facades[i].theta_deg == b.scene.facades[i].theta_deg);
        CHECK(a.scene.facades[i].identity_dist == b.scene.facades[i].identity_dist);
    }
    CHECK(a.truth == b.truth);
}

TEST_CASE("rendered extents never overlap") {
    auto intr = CameraIntrinsics::create(240, 100.0);
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        SynthConfig cfg;
        cfg.seed = seed;
        cfg.n_buildings = 9;
        cfg.map_extent_m = 360.0;
        BuildingMap map = generate_map(cfg);
        Rng rng(seed * 13 + 1);
        Pose pose = sample_viewpoint(map, intr, rng);
        auto rendered = render_scene(map, pose, intr, {}, rng);
        std::vector<int> cover(intr.width_cols, 0);
        for (const auto& f : rendered.scene.facades) {
            for (int c = f.start_col; c < f.end_col; ++c) {
                ++cover[c];
                CHECK(cover[c] <= 1);
            }
        }
    }
}

TEST_CASE("noise profiles") {
    CHECK(noise_profile("none").dropout_prob == 0.0);
    CHECK(noise_profile("low").theta_sigma_deg > 0.0);
    CHECK(noise_profile("high").dropout_prob > noise_profile("low").dropout_prob);
    CHECK_THROWS_AS(noise_profile("extreme"), ValidationError);
}

TEST_CASE("truth field covers exactly the masked building columns") {
    SynthConfig cfg;
    cfg.seed = 41;
    cfg.n_buildings = 6;
    cfg.map_extent_m = 300.0;
    BuildingMap map = generate_map(cfg);
    auto intr = CameraIntrinsics::create(180, 90.0);
    Rng rng(10);
    Pose pose = sample_viewpoint(map, intr, rng);
    auto rendered = render_scene(map, pose, intr, {}, rng);
    REQUIRE(rendered.scene.segmentation.has_value());
    const auto& seg = *rendered.scene.segmentation;
    for (int row = 0; row < seg.height(); ++row) {
        for (int col = 0; col < seg.width(); ++col) {
            bool building = seg.label(col, row) == SemanticCategory::kBuilding;
            bool labeled = rendered.truth.at(col, row) != nullptr;
            CHECK(building == labeled);
        }
    }
}
