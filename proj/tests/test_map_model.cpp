#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "facloc/error.hpp"
#include "facloc/map_model.hpp"
#include "facloc/rng.hpp"

using namespace facloc;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto dir = std::filesystem::temp_directory_path() / "facloc_test_map";
    std::filesystem::create_directories(dir);
    auto path = (dir / name).string();
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

const char* kSquareMap = R"({
  "origin": {"lat": 38.83, "lon": -77.31},
  "buildings": [
    {"id": "A", "polygon": [[0,0],[10,0],[10,10],[0,10]]}
  ]
})";

}  // namespace

TEST_CASE("load_map parses a single square building") {
    BuildingMap map = load_map(write_temp("square.json", kSquareMap));
    REQUIRE(map.buildings.size() == 1);
    CHECK(map.buildings[0].id == "A");
    CHECK(map.buildings[0].polygon.size() == 4);
    CHECK(map.bounds.min == Vec2{0, 0});
    CHECK(map.bounds.max == Vec2{10, 10});
    CHECK(facade_edges(map).size() == 4);
}

TEST_CASE("duplicate building ids are rejected") {
    const char* text = R"({
      "origin": {"lat": 0, "lon": 0},
      "buildings": [
        {"id": "A", "polygon": [[0,0],[10,0],[10,10]]},
        {"id": "A", "polygon": [[20,0],[30,0],[30,10]]}
      ]
    })";
    CHECK_THROWS_AS(load_map(write_temp("dup.json", text)), ValidationError);
}

TEST_CASE("degenerate polygons are rejected") {
    CHECK_THROWS_AS(load_map(write_temp("two.json", R"({
      "origin": {"lat": 0, "lon": 0},
      "buildings": [{"id": "A", "polygon": [[0,0],[10,0]]}]
    })")),
                    ValidationError);
    CHECK_THROWS_AS(load_map(write_temp("dupvert.json", R"({
      "origin": {"lat": 0, "lon": 0},
      "buildings": [{"id": "A", "polygon": [[0,0],[0,0],[10,0],[10,10]]}]
    })")),
                    ValidationError);
    CHECK_THROWS_AS(load_map(write_temp("bowtie.json", R"({
      "origin": {"lat": 0, "lon": 0},
      "buildings": [{"id": "A", "polygon": [[0,0],[10,10],[10,0],[0,10]]}]
    })")),
                    ValidationError);
}

TEST_CASE("malformed json raises ParseError") {
    CHECK_THROWS_AS(load_map(write_temp("broken.json", "{ not json")), ParseError);
    CHECK_THROWS_AS(load_map("/nonexistent/path/to/map.json"), ParseError);
}

TEST_CASE("square edges carry direction angles {0, 90, 0, 90}") {
    BuildingMap map = load_map(write_temp("square.json", kSquareMap));
    auto edges = facade_edges(map);
    REQUIRE(edges.size() == 4);
    CHECK(edges[0].direction_angle == doctest::Approx(0.0));
    CHECK(edges[1].direction_angle == doctest::Approx(90.0));
    CHECK(edges[2].direction_angle == doctest::Approx(0.0));
    CHECK(edges[3].direction_angle == doctest::Approx(90.0));
}

TEST_CASE("edge (0,0)-(3,3) has direction angle 45") {
    CHECK(edge_direction_angle({0, 0}, {3, 3}) == doctest::Approx(45.0));
}

TEST_CASE("direction angle is symmetric under endpoint swap") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        Vec2 p0{rng.uniform(-100, 100), rng.uniform(-100, 100)};
        Vec2 p1{rng.uniform(-100, 100), rng.uniform(-100, 100)};
        if (p0 == p1) continue;
        double a = edge_direction_angle(p0, p1);
        double b = edge_direction_angle(p1, p0);
        CHECK(circular_diff_180(a, b) < 1e-9);
        CHECK(a >= 0.0);
        CHECK(a < 180.0);
    }
}

TEST_CASE("facade edge count equals total vertex count") {
    const char* text = R"({
      "origin": {"lat": 0, "lon": 0},
      "buildings": [
        {"id": "T1", "polygon": [[0,0],[10,0],[5,10]]},
        {"id": "T2", "polygon": [[20,0],[30,0],[25,10]]}
      ]
    })";
    BuildingMap map = load_map(write_temp("tri.json", text));
    CHECK(facade_edges(map).size() == 6);
}

TEST_CASE("clockwise input polygons are normalized to CCW") {
    const char* text = R"({
      "origin": {"lat": 0, "lon": 0},
      "buildings": [{"id": "A", "polygon": [[0,10],[10,10],[10,0],[0,0]]}]
    })";
    BuildingMap map = load_map(write_temp("cw.json", text));
    CHECK(signed_area(map.buildings[0].polygon) > 0.0);
}

TEST_CASE("save/load round-trips the canonical form") {
    BuildingMap map = load_map(write_temp("square.json", kSquareMap));
    auto path = write_temp("saved.json", map_to_json(map));
    BuildingMap again = load_map(path);
    CHECK(map_to_json(again) == map_to_json(map));
}

TEST_CASE("geojson conversion produces a metric map") {
    const char* geojson = R"({
      "type": "FeatureCollection",
      "features": [{
        "type": "Feature",
        "properties": {"id": "H1", "name": "Hall"},
        "geometry": {
          "type": "Polygon",
          "coordinates": [[[ -77.0000, 38.0000 ],
                           [ -76.9990, 38.0000 ],
                           [ -76.9990, 38.0008 ],
                           [ -77.0000, 38.0008 ],
                           [ -77.0000, 38.0000 ]]]
        }
      }]
    })";
    BuildingMap map = map_from_geojson(geojson, GeoOrigin{38.0, -77.0});
    REQUIRE(map.buildings.size() == 1);
    CHECK(map.buildings[0].id == "H1");
    CHECK(map.buildings[0].name == "Hall");
    REQUIRE(map.buildings[0].polygon.size() == 4);
    // 0.001 deg lon at lat 38 is about 87.7 m; 0.0008 deg lat about 89 m.
    CHECK(map.bounds.width() == doctest::Approx(87.7).epsilon(0.02));
    CHECK(map.bounds.height() == doctest::Approx(89.0).epsilon(0.02));
    CHECK(std::fabs(map.bounds.min.x) < 1e-9);
}

TEST_CASE("geojson rejects multipolygons and missing ids") {
    const char* multi = R"({
      "type": "FeatureCollection",
      "features": [{
        "type": "Feature",
        "properties": {"id": "X"},
        "geometry": {"type": "MultiPolygon", "coordinates": []}
      }]
    })";
    CHECK_THROWS_AS(map_from_geojson(multi), ValidationError);
    const char* noid = R"({
      "type": "FeatureCollection",
      "features": [{
        "type": "Feature",
        "properties": {},
        "geometry": {"type": "Polygon",
                     "coordinates": [[[0,0],[0.001,0],[0.001,0.001],[0,0]]]}
      }]
    })";
    CHECK_THROWS_AS(map_from_geojson(noid), ValidationError);
}
