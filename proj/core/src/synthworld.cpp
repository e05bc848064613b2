#include "facloc/synthworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "facloc/error.hpp"

namespace facloc {

NoiseParams noise_profile(const std::string& name) {
    if (name == "none") return {};
    if (name == "low") return {2.0, 4.0, 0.15, 0.02};
    if (name == "high") return {6.0, 9.0, 0.30, 0.10};
    throw ValidationError("unknown noise profile '" + name + "'");
}

namespace {

std::vector<Vec2> rectangle(Vec2 center, double half_w, double half_h, double rot_deg) {
    const double cr = std::cos(deg2rad(rot_deg));
    const double sr = std::sin(deg2rad(rot_deg));
    auto corner = [&](double sx, double sy) {
        Vec2 local{sx * half_w, sy * half_h};
        return center + Vec2{local.x * cr - local.y * sr, local.x * sr + local.y * cr};
    };
    return {corner(-1, -1), corner(1, -1), corner(1, 1), corner(-1, 1)};
}

}  // namespace

BuildingMap generate_map(const SynthConfig& cfg) {
    if (cfg.n_buildings < 0 || cfg.min_size_m <= 0.0 ||
        cfg.max_size_m < cfg.min_size_m || cfg.map_extent_m <= 0.0 ||
        cfg.min_separation_m < 0.0) {
        throw ValidationError("synth config: invalid geometry parameters");
    }

    Rng rng(cfg.seed);
    std::vector<Building> buildings;
    const double margin = cfg.max_size_m * 0.75 + 1.0;
    if (cfg.n_buildings > 0 && cfg.map_extent_m <= 2.0 * margin) {
        throw ValidationError("synth config: map extent too small for building sizes");
    }

    for (int i = 0; i < cfg.n_buildings; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            Vec2 center{rng.uniform(margin, cfg.map_extent_m - margin),
                        rng.uniform(margin, cfg.map_extent_m - margin)};
            double w = rng.uniform(cfg.min_size_m, cfg.max_size_m);
            double h = rng.uniform(cfg.min_size_m, cfg.max_size_m);
            double rot = rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.0, 90.0);
            auto poly = rectangle(center, w / 2.0, h / 2.0, rot);

            bool ok = true;
            for (const auto& other : buildings) {
                if (polygon_distance(poly, other.polygon) < cfg.min_separation_m) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;

            char id[16];
            std::snprintf(id, sizeof id, "B%02d", i);
            buildings.push_back({id, "", std::move(poly)});
            placed = true;
        }
        if (!placed) {
            throw ValidationError("synth map packing infeasible: building " +
                                  std::to_string(i) + " does not fit");
        }
    }
    return make_map(GeoOrigin{0.0, 0.0}, std::move(buildings));
}

RenderedScene render_scene(const BuildingMap& map, const Pose& pose,
                           const CameraIntrinsics& intr, const NoiseParams& noise,
                           Rng& rng, int image_rows) {
    RenderedScene out;
    out.visible = project_map(map, pose, intr, /*occlusion=*/true);

    const int width = intr.width_cols;
    const int rows = image_rows;
    const int band_top = rows / 4;
    const int band_bottom = (3 * rows) / 4;

    // Building mask: a horizontal band across every column some visible
    // facade covers; everything else stays sky.
    GrayImage labels(width, rows, static_cast<std::uint8_t>(SemanticCategory::kSky));
    for (const auto& f : out.visible) {
        for (int c = f.start_col; c < f.end_col; ++c) {
            for (int r = band_top; r < band_bottom; ++r) {
                labels.set(c, r, static_cast<std::uint8_t>(SemanticCategory::kBuilding));
            }
        }
    }

    out.truth = PixelIdentityField(width, rows);
    for (const auto& f : out.visible) {
        for (int c = f.start_col; c < f.end_col; ++c) {
            for (int r = band_top; r < band_bottom; ++r) {
                out.truth.set(c, r, {{f.building, 1.0}});
            }
        }
    }

    out.scene.intrinsics = intr;
    for (const auto& f : out.visible) {
        double theta = normalize_deg_180(f.theta_deg +
                                         rng.gaussian(0.0, 1.0) * noise.theta_sigma_deg);
        int start = f.start_col + static_cast<int>(std::llround(
                                      rng.gaussian(0.0, 1.0) * noise.extent_sigma_cols));
        int end = f.end_col + static_cast<int>(std::llround(
                                  rng.gaussian(0.0, 1.0) * noise.extent_sigma_cols));
        start = std::clamp(start, 0, width);
        end = std::clamp(end, 0, width);

        std::string id = f.building;
        if (rng.bernoulli(noise.identity_flip_prob) && map.buildings.size() > 1) {
            std::size_t pick = rng.uniform_index(map.buildings.size() - 1);
            for (std::size_t k = 0, seen = 0; k < map.buildings.size(); ++k) {
                if (map.buildings[k].id == f.building) continue;
                if (seen++ == pick) {
                    id = map.buildings[k].id;
                    break;
                }
            }
        }
        bool dropped = rng.bernoulli(noise.dropout_prob);
        if (dropped || end - start < 1) continue;

        ObservedFacade obs;
        obs.start_col = start;
        obs.end_col = end;
        obs.theta_deg = theta;
        obs.identity_dist = {{id, 1.0}};
        out.scene.facades.push_back(std::move(obs));
    }

    out.scene.segmentation = SemanticLabelMap::from_image(labels);
    out.scene.per_column_theta = per_column_estimates(
        out.scene.facades, width, &*out.scene.segmentation);
    return out;
}

Pose sample_viewpoint(const BuildingMap& map, const CameraIntrinsics& intr, Rng& rng,
                      const ViewpointOptions& opts) {
    const Aabb& b = map.bounds;
    for (int attempt = 0; attempt < opts.max_tries; ++attempt) {
        Pose pose{rng.uniform(b.min.x + opts.margin_m, b.max.x - opts.margin_m),
                  rng.uniform(b.min.y + opts.margin_m, b.max.y - opts.margin_m),
                  rng.uniform(0.0, 360.0)};
        bool interior = false;
        for (const auto& bld : map.buildings) {
            if (point_strictly_inside(bld.polygon, {pose.x, pose.y})) {
                interior = true;
                break;
            }
        }
        if (interior) continue;

        auto visible = project_map(map, pose, intr, /*occlusion=*/true);
        if (static_cast<int>(visible.size()) < opts.min_facades) continue;

        if (opts.min_theta_spread_deg > 0.0) {
            double spread = 0.0;
            for (std::size_t i = 0; i < visible.size(); ++i) {
                for (std::size_t j = i + 1; j < visible.size(); ++j) {
                    spread = std::max(spread, circular_diff_180(visible[i].theta_deg,
                                                                visible[j].theta_deg));
                }
            }
            if (spread < opts.min_theta_spread_deg) continue;
        }
        if (opts.min_buildings > 1) {
            std::set<std::string> ids;
            for (const auto& f : visible) ids.insert(f.building);
            if (static_cast<int>(ids.size()) < opts.min_buildings) continue;
        }
        return pose;
    }
    throw ValidationError("sample_viewpoint: no pose satisfied the constraints");
}

}  // namespace facloc
