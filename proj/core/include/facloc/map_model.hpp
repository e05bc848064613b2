#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facloc/geometry.hpp"

namespace facloc {

/// Geodetic anchor of the local east-north metric frame.
struct GeoOrigin {
    double lat = 0.0;
    double lon = 0.0;
};

/// One building footprint. The polygon is stored counter-clockwise,
/// without a repeated closing vertex; coordinates are meters east/north
/// of the map origin.
struct Building {
    std::string id;
    std::string name;  // optional, may be empty
    std::vector<Vec2> polygon;
};

struct BuildingMap {
    GeoOrigin origin;
    std::vector<Building> buildings;
    Aabb bounds;

    const Building* find(std::string_view id) const;
};

/// One polygon edge, the unit the projection model works on.
/// direction_angle is the edge line's angle against the map east axis,
/// reduced mod 180 (facade lines are undirected).
struct FacadeEdge {
    std::string building;
    Vec2 p0;
    Vec2 p1;
    double direction_angle = 0.0;
};

double edge_direction_angle(Vec2 p0, Vec2 p1);

/// Validates and normalizes: unique ids, simple polygons with >= 3
/// vertices, no consecutive duplicates, CCW orientation, derived bounds.
/// Throws ValidationError on violations.
BuildingMap make_map(GeoOrigin origin, std::vector<Building> buildings);

BuildingMap load_map(const std::string& path);
void save_map(const BuildingMap& map, const std::string& path);
std::string map_to_json(const BuildingMap& map);
BuildingMap map_from_json(const std::string& text, const std::string& context);

/// Edges in deterministic order: buildings as stored, vertices in polygon
/// order.
std::vector<FacadeEdge> facade_edges(const BuildingMap& map);

/// Converts a GeoJSON FeatureCollection of Polygon features (an "id"
/// property per feature) into a map. Vertices become meters relative to
/// `origin` under an equirectangular approximation; when no origin is
/// given, the bounding-box center of all coordinates is used.
BuildingMap map_from_geojson(const std::string& text,
                             std::optional<GeoOrigin> origin = std::nullopt);

}  // namespace facloc
