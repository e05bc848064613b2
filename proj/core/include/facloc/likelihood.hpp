#pragma once

#include <span>

#include "facloc/map_model.hpp"
#include "facloc/projection.hpp"
#include "facloc/scene_model.hpp"

namespace facloc {

struct LikelihoodParams {
    /// Scale of the Gaussian distance weight; farther facades count less.
    double sigma_m = 50.0;
    /// Restrict matches to pairs with compatible building identities.
    bool identity_aware = false;
    /// Score each column by the best matching pair instead of the pair sum;
    /// keeps S <= S_max and therefore p in [0, 1]. The raw sum double-counts
    /// overlapping planes and is retained for comparison runs only.
    bool cap_per_column = true;
    /// Trim predicted facades with a per-column z-buffer before scoring.
    bool occlusion = false;
};

/// Unnormalized Gaussian kernel exp(-d^2 / (2 sigma^2)); 1 at d = 0.
double distance_weight(double distance_m, double sigma_m);

/// Per-column match evidence between predicted and observed facades:
/// every column where a pair (z_i, zhat_j) intersects contributes
/// |cos(theta_i - thetahat_j)| * w_i, optionally weighted by the observed
/// facade's probability of z_i's building identity. With cap_per_column
/// the best pair per column counts; otherwise all pairs sum.
double similarity(std::span<const PredictedFacade> predicted,
                  std::span<const ObservedFacade> observed,
                  const LikelihoodParams& params);

/// Best attainable similarity: one per column covered by an observed
/// facade, plus max_i w_i per column where only the map predicts one.
double similarity_max(std::span<const PredictedFacade> predicted,
                      std::span<const ObservedFacade> observed,
                      const LikelihoodParams& params);

/// S / S_max, or 0 when S_max = 0. Both sums are accumulated in one sweep
/// so the cap_per_column bound p <= 1 holds exactly.
double likelihood_from_sets(std::span<const PredictedFacade> predicted,
                            std::span<const ObservedFacade> observed,
                            const LikelihoodParams& params);

/// Projects the map at `pose` and scores it against the scene's facades.
double pose_likelihood(const SceneModel& scene, const Pose& pose,
                       const BuildingMap& map, const LikelihoodParams& params);

}  // namespace facloc
