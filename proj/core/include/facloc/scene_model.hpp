#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "facloc/geometry.hpp"
#include "facloc/image.hpp"

namespace facloc {

/// Horizontal pinhole model. Columns and bearings relate through
/// col = width_cols/2 + focal_cols * tan(bearing), bearing positive to
/// the right of the optical axis.
struct CameraIntrinsics {
    int width_cols = 0;
    double hfov_deg = 0.0;
    double focal_cols = 0.0;

    static CameraIntrinsics create(int width_cols, double hfov_deg);
};

enum class SemanticCategory : std::uint8_t {
    kSky = 0,
    kBuilding = 1,
    kTree = 2,
    kRoad = 3,
    kCar = 4,
};

/// Per-pixel category raster plus connected building components
/// (8-connectivity, indexed 1..n in raster scan order).
class SemanticLabelMap {
public:
    SemanticLabelMap(int width, int height, std::vector<std::uint8_t> labels);

    /// Pixel values of `img` are category indices 0..4.
    static SemanticLabelMap from_image(const GrayImage& img);

    int width() const { return width_; }
    int height() const { return height_; }
    int component_count() const { return component_count_; }

    SemanticCategory label(int col, int row) const {
        return static_cast<SemanticCategory>(labels_[index(col, row)]);
    }
    /// 0 for non-building pixels, 1..n otherwise.
    int component(int col, int row) const { return components_[index(col, row)]; }

    bool column_has_building(int col) const { return col_has_building_[col] != 0; }
    /// True when component `comp` (1-based) owns a building pixel in `col`.
    bool component_in_column(int comp, int col) const {
        return component_columns_[static_cast<std::size_t>(comp - 1) * width_ + col] != 0;
    }

    GrayImage to_image() const;

private:
    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * width_ + col;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> labels_;
    std::vector<std::int32_t> components_;
    std::vector<std::uint8_t> col_has_building_;
    std::vector<std::uint8_t> component_columns_;  // comp-major presence by column
    int component_count_ = 0;
};

/// Vanishing-point label for vertical lines; vertical lines never vote.
inline constexpr int kVpVertical = -1;
/// Column with no vanishing-point support.
inline constexpr int kNoVote = -1;

struct LabeledLineSegment {
    Vec2 p0;  // (col, row) pixels
    Vec2 p1;
    int vp_index = kVpVertical;
};

/// One planar facade hypothesis in the image: a half-open column extent
/// and the facade orientation in the camera frame (mod 180). Queries may
/// carry a building-identity distribution.
struct ObservedFacade {
    int start_col = 0;
    int end_col = 0;
    double theta_deg = 0.0;
    std::map<std::string, double> identity_dist;

    bool has_identity() const { return !identity_dist.empty(); }
    bool covers(int col) const { return col >= start_col && col < end_col; }
};

/// Column with no facade estimate in per_column_theta.
inline constexpr double kNoTheta = std::numeric_limits<double>::quiet_NaN();

struct SceneModel {
    CameraIntrinsics intrinsics;
    std::vector<ObservedFacade> facades;
    std::optional<SemanticLabelMap> segmentation;
    std::vector<double> per_column_theta;  // NaN where uncovered; may be empty
};

/// Keeps lines whose rasterized pixels touch at least one building pixel.
/// Throws ValidationError when an endpoint lies outside the label map.
std::vector<LabeledLineSegment> filter_lines(const std::vector<LabeledLineSegment>& lines,
                                             const SemanticLabelMap& seg);

/// Per column, the vanishing-point index with the most intersecting lines;
/// kNoVote where none intersect. Ties break toward the lower index;
/// vertical-labeled lines are ignored.
std::vector<int> column_vp_vote(const std::vector<LabeledLineSegment>& lines,
                                int width_cols);

/// Columns where the dominant label switches, bracketed by 0 and width.
/// Strictly increasing.
std::vector<int> cutting_lines(const std::vector<int>& votes);

/// One facade per interval between cutting lines whose dominant label is a
/// real vanishing point and which overlaps at least `min_building_cols`
/// building-labeled columns. `vp_theta` maps vp index -> facade angle.
std::vector<ObservedFacade> decompose_facades(const std::vector<int>& votes,
                                              const std::vector<int>& cuts,
                                              const std::map<int, double>& vp_theta,
                                              const SemanticLabelMap& seg,
                                              int min_building_cols = 5);

/// Facade orientation implied by a horizontal vanishing point at `vp_col`:
/// theta = atan((vp_col - cx)/focal) + 90, mod 180. Non-finite vp_col
/// (point at infinity) maps to 0, the fronto-parallel direction.
double facade_angle_from_vp(double vp_col, const CameraIntrinsics& intr);

/// Per-column circular mean (mod 180) of facade angles, averaged within the
/// building component covering each column; NaN where no facade covers.
/// `seg` may be null, in which case all facades share one group.
std::vector<double> per_column_estimates(const std::vector<ObservedFacade>& facades,
                                         int width_cols,
                                         const SemanticLabelMap* seg);

/// On-disk scene description. Either explicit facades, or the raw inputs
/// (lines with vp labels, vp columns, segmentation) to run decomposition.
struct SceneFile {
    int width_cols = 0;
    double hfov_deg = 0.0;

    struct VanishingPoint {
        int index = 0;
        double col = 0.0;  // infinity encodes a point at infinity
    };

    std::vector<LabeledLineSegment> lines;
    std::vector<VanishingPoint> vps;
    std::string segmentation_path;  // relative to the scene file; empty = none
    std::optional<std::vector<ObservedFacade>> facades;
};

SceneFile load_scene_file(const std::string& path);
void save_scene_file(const SceneFile& sf, const std::string& path);
std::string scene_file_to_json(const SceneFile& sf);

/// Materializes a SceneModel: explicit facades are validated and used
/// directly, otherwise the decomposition pipeline runs on lines + vps +
/// segmentation.
SceneModel build_scene(const SceneFile& sf, const std::filesystem::path& base_dir,
                       int min_building_cols = 5);

/// Convenience: load_scene_file + build_scene with the file's directory.
SceneModel load_scene(const std::string& path, int min_building_cols = 5);

}  // namespace facloc
