#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "facloc/image.hpp"
#include "facloc/localizer.hpp"

namespace facloc {

/// Sparse per-pixel building-identity distributions. Pixels without an
/// entry carry no identity (non-building or unexplained).
class PixelIdentityField {
public:
    using Dist = std::map<std::string, double>;

    PixelIdentityField() = default;
    PixelIdentityField(int width, int height) : width_(width), height_(height) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t labeled_count() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const Dist* at(int col, int row) const;
    void set(int col, int row, Dist dist);

    /// Identity with the highest probability; lexicographically smallest on
    /// ties. Null when the pixel carries no identity.
    const std::string* argmax_at(int col, int row) const;

    /// Entries as (col, row, dist), sorted by row then column.
    std::vector<std::tuple<int, int, Dist>> sorted_entries() const;

    bool operator==(const PixelIdentityField& other) const;

private:
    std::uint64_t key(int col, int row) const {
        return (static_cast<std::uint64_t>(row) << 32) | static_cast<std::uint32_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    std::unordered_map<std::uint64_t, Dist> entries_;
};

/// SIFT-style inlier matches from one query image into labeled reference
/// images; consumed from files, never computed here.
struct CorrespondenceSet {
    struct Match {
        int query_col = 0;
        int query_row = 0;
        int ref_col = 0;
        int ref_row = 0;
    };
    struct RefEntry {
        std::string ref;
        std::vector<Match> matches;
    };

    std::string query;
    std::vector<RefEntry> refs;
};

/// Hard per-pixel assignment under one pose: each building pixel takes the
/// identity of the nearest predicted facade covering its column. Requires
/// the scene's segmentation.
PixelIdentityField identity_at_pose(const SceneModel& scene, const Pose& pose,
                                    const BuildingMap& map,
                                    const LikelihoodParams& params);

/// Maximum-likelihood labeling: identity_at_pose at the best pose of the
/// sampling set (first in scan order on ties). Empty when every pose has
/// zero likelihood. When `grid_out` is given, the evaluated grid is stored
/// there.
PixelIdentityField label_reference_greedy(const SceneModel& scene,
                                          const BuildingMap& map,
                                          const PoseSampling& sampling,
                                          const LikelihoodParams& params,
                                          LikelihoodGrid* grid_out = nullptr);

/// Pose-marginalized labeling: per pixel, assignments are accumulated with
/// weight p(image | pose) over all sampled poses, then normalized per
/// pixel over buildings.
PixelIdentityField label_reference_marginalized(const SceneModel& scene,
                                                const BuildingMap& map,
                                                const PoseSampling& sampling,
                                                const LikelihoodParams& params,
                                                LikelihoodGrid* grid_out = nullptr);

/// Per-facade identity distributions for the query: the normalized sum of
/// reference-pixel distributions over all inlier matches landing in each
/// facade's column extent, across every entry of the correspondence set.
/// Facades receiving no identity mass get an empty distribution.
std::vector<PixelIdentityField::Dist> transfer_identity(
    const SceneModel& query, const CorrespondenceSet& correspondences,
    const std::map<std::string, PixelIdentityField>& ref_fields);

/// Paints each facade's identity distribution onto the building pixels of
/// its columns (first covering facade wins); requires the segmentation.
PixelIdentityField field_from_facades(const SceneModel& scene);

/// Fraction of ground-truth-labeled pixels whose predicted argmax identity
/// matches the truth argmax; unlabeled predictions count as wrong. Truth
/// pixels are exactly the labeled pixels of `truth`.
double pixel_accuracy(const PixelIdentityField& predicted,
                      const PixelIdentityField& truth);

PixelIdentityField load_field(const std::string& path);
void save_field(const PixelIdentityField& field, const std::string& path);
std::string field_to_json(const PixelIdentityField& field);

/// Color-coded visualization; colors are a deterministic hash of the id.
RgbImage field_visualization(const PixelIdentityField& field);

CorrespondenceSet load_correspondences(const std::string& path);
void save_correspondences(const CorrespondenceSet& corr, const std::string& path);
std::string correspondences_to_json(const CorrespondenceSet& corr);

struct RetrievalList {
    std::string query;
    std::vector<std::string> ranked_refs;
};

RetrievalList load_retrieval_list(const std::string& path);
void save_retrieval_list(const RetrievalList& list, const std::string& path);

}  // namespace facloc
