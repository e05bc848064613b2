#pragma once

#include <string>
#include <vector>

#include "facloc/geometry.hpp"
#include "facloc/map_model.hpp"
#include "facloc/scene_model.hpp"

namespace facloc {

/// Planar camera pose in the map frame. gamma_deg is yaw in [0, 360):
/// 0 faces map north (+y), increasing clockwise (90 faces east).
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double gamma_deg = 0.0;

    Pose normalized() const { return {x, y, normalize_deg(gamma_deg)}; }
};

/// A map facade projected into the virtual view.
///
/// theta_deg uses the same camera-frame convention as ObservedFacade:
/// the facade line's angle in the image plane, mod 180, where 0 is
/// fronto-parallel and 90 recedes along the optical axis. For a map edge
/// with direction angle phi seen at yaw gamma this is (-(phi + gamma))
/// mod 180, which matches what facade_angle_from_vp yields for the same
/// physical plane.
struct PredictedFacade {
    int start_col = 0;
    int end_col = 0;
    double theta_deg = 0.0;
    std::string building;
    double distance_m = 0.0;

    bool covers(int col) const { return col >= start_col && col < end_col; }
};

/// Bearing (degrees, positive right of the optical axis) of a column.
double pixel_to_bearing(double col, const CameraIntrinsics& intr);

/// Column of a bearing; throws ValidationError when |bearing| >= hfov/2.
double bearing_to_pixel(double bearing_deg, const CameraIntrinsics& intr);

/// The inverse sensor model: facades of `map` visible from `pose` within
/// the horizontal FOV. Edges are back-face culled, clipped to the view
/// frustum, and dropped when they span less than one column. distance_m
/// is the smaller camera distance of the two clipped endpoints. With
/// `occlusion`, a per-column z-buffer trims extents so no two facades
/// overlap on any column.
std::vector<PredictedFacade> project_map(const BuildingMap& map, const Pose& pose,
                                         const CameraIntrinsics& intr,
                                         bool occlusion = false);

/// Allocation-reusing variant for hot loops; clears and fills `out`.
void project_map(const BuildingMap& map, const Pose& pose, const CameraIntrinsics& intr,
                 bool occlusion, std::vector<PredictedFacade>& out);

}  // namespace facloc
