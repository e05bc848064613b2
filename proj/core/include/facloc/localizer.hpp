#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "facloc/image.hpp"
#include "facloc/likelihood.hpp"

namespace facloc {

/// Discrete pose search space: the cross product of locations and yaw
/// orientations.
struct PoseSampling {
    std::vector<Vec2> locations;
    std::vector<double> orientations_deg;

    std::size_t pose_count() const { return locations.size() * orientations_deg.size(); }
    Pose pose(std::size_t loc_idx, std::size_t ori_idx) const {
        return {locations[loc_idx].x, locations[loc_idx].y, orientations_deg[ori_idx]};
    }
};

/// How a location's score aggregates over its orientations.
enum class ScoreMode { kMax, kSum };

/// p(image | pose) over a PoseSampling, location-major.
struct LikelihoodGrid {
    PoseSampling sampling;
    std::vector<double> values;

    double value(std::size_t loc_idx, std::size_t ori_idx) const {
        return values[loc_idx * sampling.orientations_deg.size() + ori_idx];
    }
    std::vector<double> location_scores(ScoreMode mode = ScoreMode::kMax) const;
};

/// The 3x3 grid of locations 10 m apart centered on a geotag, with 120
/// orientations at 3 degree spacing: 1080 poses.
PoseSampling reference_sampling(Vec2 geotag, double orientation_step_deg = 3.0);

/// Locations on a `spacing_m` lattice covering the dilated bounding boxes
/// of the identified buildings (the whole map when none are identified),
/// excluding points strictly inside any building polygon.
PoseSampling query_sampling(const BuildingMap& map,
                            const std::set<std::string>& identified_buildings,
                            double spacing_m = 10.0, double dilation_m = 60.0,
                            double orientation_step_deg = 3.0);

/// Evaluates pose_likelihood at every sample. Deterministic regardless of
/// `threads`; locations are partitioned across workers.
LikelihoodGrid evaluate_grid(const SceneModel& scene, const PoseSampling& sampling,
                             const BuildingMap& map, const LikelihoodParams& params,
                             int threads = 1);

/// Minimum distance from `truth` to the N best-scoring locations. Ties
/// break toward the earlier location; N is clamped to the location count.
double top_n_error(const LikelihoodGrid& grid, Vec2 truth, int n,
                   ScoreMode mode = ScoreMode::kMax);

struct ErrorCurvePoint {
    int n = 0;
    double mean = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

/// Mean top-N localization error with a 95% normal-approximation CI, for
/// N = 1..n_max, across per-image grids and ground-truth locations.
std::vector<ErrorCurvePoint> error_curve(const std::vector<LikelihoodGrid>& grids,
                                         const std::vector<Vec2>& truths, int n_max,
                                         ScoreMode mode = ScoreMode::kMax);

/// Same curve from precomputed per-location scores (as read back from
/// probability-map CSVs).
std::vector<ErrorCurvePoint> error_curve_from_scores(
    const std::vector<std::vector<Vec2>>& locations,
    const std::vector<std::vector<double>>& scores, const std::vector<Vec2>& truths,
    int n_max);

/// "x,y,score" rows, one per location.
void write_probability_csv(const LikelihoodGrid& grid, const std::string& path,
                           ScoreMode mode = ScoreMode::kMax);
void read_probability_csv(const std::string& path, std::vector<Vec2>& locations,
                          std::vector<double>& scores);

/// 8-bit PGM raster of location scores over the grid's bounding box plus a
/// JSON sidecar with the georeferencing header.
void write_probability_pgm(const LikelihoodGrid& grid, const std::string& pgm_path,
                           const std::string& sidecar_path,
                           ScoreMode mode = ScoreMode::kMax);

/// Upscaled grayscale rendering with an optional marker cross at a
/// ground-truth location.
RgbImage render_probability_map(const LikelihoodGrid& grid,
                                std::optional<Vec2> truth_marker,
                                ScoreMode mode = ScoreMode::kMax);

}  // namespace facloc
