#include "facloc/map_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "facloc/error.hpp"

namespace facloc {

using nlohmann::json;

namespace {

constexpr double kEarthRadiusM = 6378137.0;  // WGS84 equatorial

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void validate_polygon(const Building& b) {
    const auto& poly = b.polygon;
    if (poly.size() < 3) {
        throw ValidationError("building '" + b.id + "': polygon needs at least 3 vertices");
    }
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (poly[i] == poly[(i + 1) % poly.size()]) {
            throw ValidationError("building '" + b.id + "': consecutive duplicate vertex");
        }
    }
    if (signed_area(poly) == 0.0 || !polygon_is_simple(poly)) {
        throw ValidationError("building '" + b.id + "': polygon is degenerate or self-intersecting");
    }
}

}  // namespace

const Building* BuildingMap::find(std::string_view id) const {
    for (const auto& b : buildings) {
        if (b.id == id) return &b;
    }
    return nullptr;
}

double edge_direction_angle(Vec2 p0, Vec2 p1) {
    Vec2 d = p1 - p0;
    return normalize_deg_180(rad2deg(std::atan2(d.y, d.x)));
}

BuildingMap make_map(GeoOrigin origin, std::vector<Building> buildings) {
    std::unordered_set<std::string> ids;
    for (auto& b : buildings) {
        if (b.id.empty()) throw ValidationError("building with empty id");
        if (!ids.insert(b.id).second) {
            throw ValidationError("duplicate building id '" + b.id + "'");
        }
        // A repeated closing vertex would create a zero-length closing edge.
        if (b.polygon.size() >= 2 && b.polygon.front() == b.polygon.back()) {
            b.polygon.pop_back();
        }
        validate_polygon(b);
        if (signed_area(b.polygon) < 0.0) {
            std::reverse(b.polygon.begin(), b.polygon.end());
        }
    }
    BuildingMap map;
    map.origin = origin;
    map.buildings = std::move(buildings);
    bool first = true;
    for (const auto& b : map.buildings) {
        for (Vec2 v : b.polygon) {
            if (first) {
                map.bounds.min = map.bounds.max = v;
                first = false;
            } else {
                map.bounds.expand(v);
            }
        }
    }
    return map;
}

BuildingMap map_from_json(const std::string& text, const std::string& context) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(context + ": " + e.what());
    }
    try {
        GeoOrigin origin{j.at("origin").at("lat").get<double>(),
                         j.at("origin").at("lon").get<double>()};
        std::vector<Building> buildings;
        for (const auto& jb : j.at("buildings")) {
            Building b;
            b.id = jb.at("id").get<std::string>();
            if (jb.contains("name")) b.name = jb.at("name").get<std::string>();
            for (const auto& jv : jb.at("polygon")) {
                if (!jv.is_array() || jv.size() != 2) {
                    throw ParseError(context + ": polygon vertex must be [x, y]");
                }
                b.polygon.push_back({jv[0].get<double>(), jv[1].get<double>()});
            }
            buildings.push_back(std::move(b));
        }
        return make_map(origin, std::move(buildings));
    } catch (const json::exception& e) {
        throw ParseError(context + ": " + e.what());
    }
}

BuildingMap load_map(const std::string& path) {
    return map_from_json(read_text_file(path), path);
}

std::string map_to_json(const BuildingMap& map) {
    json jb = json::array();
    for (const auto& b : map.buildings) {
        json poly = json::array();
        for (Vec2 v : b.polygon) poly.push_back(json::array({v.x, v.y}));
        json entry{{"id", b.id}, {"polygon", std::move(poly)}};
        if (!b.name.empty()) entry["name"] = b.name;
        jb.push_back(std::move(entry));
    }
    json j{{"origin", {{"lat", map.origin.lat}, {"lon", map.origin.lon}}},
           {"buildings", std::move(jb)}};
    return j.dump(2) + "\n";
}

void save_map(const BuildingMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << map_to_json(map);
}

std::vector<FacadeEdge> facade_edges(const BuildingMap& map) {
    std::vector<FacadeEdge> edges;
    for (const auto& b : map.buildings) {
        const std::size_t n = b.polygon.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 p0 = b.polygon[i];
            Vec2 p1 = b.polygon[(i + 1) % n];
            edges.push_back({b.id, p0, p1, edge_direction_angle(p0, p1)});
        }
    }
    return edges;
}

BuildingMap map_from_geojson(const std::string& text, std::optional<GeoOrigin> origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("geojson: ") + e.what());
    }
    if (j.value("type", "") != "FeatureCollection") {
        throw ValidationError("geojson: expected a FeatureCollection");
    }

    struct RawBuilding {
        std::string id;
        std::string name;
        std::vector<Vec2> lonlat;
    };
    std::vector<RawBuilding> raw;
    double lon_min = 0, lon_max = 0, lat_min = 0, lat_max = 0;
    bool first = true;

    for (const auto& feature : j.value("features", json::array())) {
        const auto& geom = feature.at("geometry");
        std::string type = geom.value("type", "");
        if (type != "Polygon") {
            throw ValidationError("geojson: unsupported geometry '" + type +
                                  "' (only single Polygons)");
        }
        const auto& rings = geom.at("coordinates");
        if (rings.size() != 1) {
            throw ValidationError("geojson: polygons with holes are unsupported");
        }
        RawBuilding rb;
        if (feature.contains("properties") && feature["properties"].is_object()) {
            const auto& props = feature["properties"];
            if (props.contains("id")) {
                rb.id = props["id"].is_string() ? props["id"].get<std::string>()
                                                : props["id"].dump();
            }
            if (props.contains("name") && props["name"].is_string()) {
                rb.name = props["name"].get<std::string>();
            }
        }
        if (rb.id.empty() && feature.contains("id")) {
            rb.id = feature["id"].is_string() ? feature["id"].get<std::string>()
                                              : feature["id"].dump();
        }
        if (rb.id.empty()) {
            throw ValidationError("geojson: feature without an 'id' property");
        }
        for (const auto& coord : rings[0]) {
            double lon = coord.at(0).get<double>();
            double lat = coord.at(1).get<double>();
            rb.lonlat.push_back({lon, lat});
            if (first) {
                lon_min = lon_max = lon;
                lat_min = lat_max = lat;
                first = false;
            } else {
                lon_min = std::min(lon_min, lon);
                lon_max = std::max(lon_max, lon);
                lat_min = std::min(lat_min, lat);
                lat_max = std::max(lat_max, lat);
            }
        }
        if (rb.lonlat.size() >= 2 && rb.lonlat.front() == rb.lonlat.back()) {
            rb.lonlat.pop_back();  // GeoJSON rings repeat the first vertex
        }
        raw.push_back(std::move(rb));
    }

    GeoOrigin o = origin.value_or(
        GeoOrigin{0.5 * (lat_min + lat_max), 0.5 * (lon_min + lon_max)});
    const double cos_lat0 = std::cos(deg2rad(o.lat));

    std::vector<Building> buildings;
    for (auto& rb : raw) {
        Building b;
        b.id = std::move(rb.id);
        b.name = std::move(rb.name);
        for (Vec2 ll : rb.lonlat) {
            b.polygon.push_back({kEarthRadiusM * deg2rad(ll.x - o.lon) * cos_lat0,
                                 kEarthRadiusM * deg2rad(ll.y - o.lat)});
        }
        buildings.push_back(std::move(b));
    }
    return make_map(o, std::move(buildings));
}

}  // namespace facloc
