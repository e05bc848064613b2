#pragma once

#include <string>

#include "facloc/identity.hpp"
#include "facloc/map_model.hpp"
#include "facloc/projection.hpp"
#include "facloc/rng.hpp"
#include "facloc/scene_model.hpp"

namespace facloc {

/// Observation-space noise applied by the renderer: angles in degrees,
/// extents in columns, probabilities per facade.
struct NoiseParams {
    double theta_sigma_deg = 0.0;
    double extent_sigma_cols = 0.0;
    double dropout_prob = 0.0;
    double identity_flip_prob = 0.0;
};

/// Named profiles used by the CLI: "none", "low", "high".
NoiseParams noise_profile(const std::string& name);

struct SynthConfig {
    std::uint64_t seed = 1;
    int n_buildings = 10;
    double min_size_m = 15.0;
    double max_size_m = 50.0;
    double map_extent_m = 400.0;
    double min_separation_m = 15.0;
    int image_rows = 64;
    NoiseParams noise;
};

/// Deterministic random world: axis-aligned and rotated rectangles with
/// unique ids and pairwise boundary separation >= min_separation_m.
/// Throws ValidationError when the packing does not fit after bounded
/// retries.
BuildingMap generate_map(const SynthConfig& cfg);

struct RenderedScene {
    SceneModel scene;
    PixelIdentityField truth;
    /// The occlusion-trimmed projection the observations derive from.
    std::vector<PredictedFacade> visible;
};

/// Renders the ground-truth observation at `pose`: the occlusion-on
/// projection becomes the observed facades (identities as point masses),
/// a synthetic building mask becomes the segmentation, and the truth field
/// paints each visible facade's columns with its building. Noise jitters
/// angles and extents, drops facades, and flips identities; the truth
/// field and mask stay noiseless.
RenderedScene render_scene(const BuildingMap& map, const Pose& pose,
                           const CameraIntrinsics& intr, const NoiseParams& noise,
                           Rng& rng, int image_rows = 64);

struct ViewpointOptions {
    int min_facades = 2;
    /// Smallest pairwise orientation difference (mod 180) that must appear
    /// among the visible facades; 0 disables the check.
    double min_theta_spread_deg = 0.0;
    int min_buildings = 1;
    int max_tries = 20000;
    double margin_m = 2.0;
};

/// Samples a free-space pose whose occlusion-on projection satisfies the
/// options. Throws ValidationError when no pose is found.
Pose sample_viewpoint(const BuildingMap& map, const CameraIntrinsics& intr, Rng& rng,
                      const ViewpointOptions& opts = {});

}  // namespace facloc
