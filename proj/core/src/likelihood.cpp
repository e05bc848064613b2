#include "facloc/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "facloc/error.hpp"

namespace facloc {

double distance_weight(double distance_m, double sigma_m) {
    return std::exp(-(distance_m * distance_m) / (2.0 * sigma_m * sigma_m));
}

namespace {

struct SweepSums {
    double s = 0.0;
    double s_max = 0.0;
};

// One pass over the elementary column intervals induced by all facade
// boundaries. Within such an interval the covering sets are constant, so
// the per-column contribution is constant and scales by the interval
// length. Accumulating S and S_max in the same pass keeps S <= S_max
// exact in cap mode (each interval term is bounded by its S_max term).
SweepSums sweep(std::span<const PredictedFacade> predicted,
                std::span<const ObservedFacade> observed,
                const LikelihoodParams& params) {
    if (params.sigma_m <= 0.0) {
        throw ValidationError("likelihood: sigma_m must be positive");
    }

    thread_local std::vector<int> bounds;
    thread_local std::vector<double> weights;
    thread_local std::vector<std::size_t> z_cover;
    thread_local std::vector<std::size_t> zh_cover;

    bounds.clear();
    for (const auto& z : predicted) {
        bounds.push_back(z.start_col);
        bounds.push_back(z.end_col);
    }
    for (const auto& zh : observed) {
        bounds.push_back(zh.start_col);
        bounds.push_back(zh.end_col);
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    weights.clear();
    for (const auto& z : predicted) {
        weights.push_back(distance_weight(z.distance_m, params.sigma_m));
    }

    SweepSums sums;
    for (std::size_t bi = 0; bi + 1 < bounds.size(); ++bi) {
        const int a = bounds[bi];
        const int b = bounds[bi + 1];
        const double len = b - a;

        z_cover.clear();
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            if (predicted[i].covers(a)) z_cover.push_back(i);
        }
        zh_cover.clear();
        for (std::size_t j = 0; j < observed.size(); ++j) {
            if (observed[j].covers(a)) zh_cover.push_back(j);
        }

        if (!z_cover.empty() && !zh_cover.empty()) {
            double best = 0.0;
            double total = 0.0;
            for (std::size_t i : z_cover) {
                const auto& z = predicted[i];
                for (std::size_t j : zh_cover) {
                    const auto& zh = observed[j];
                    double id_w = 1.0;
                    if (params.identity_aware && zh.has_identity()) {
                        auto it = zh.identity_dist.find(z.building);
                        id_w = it == zh.identity_dist.end() ? 0.0 : it->second;
                    }
                    double term =
                        std::fabs(std::cos(deg2rad(z.theta_deg - zh.theta_deg))) *
                        weights[i] * id_w;
                    best = std::max(best, term);
                    total += term;
                }
            }
            sums.s += len * (params.cap_per_column ? best : total);
        }

        if (!zh_cover.empty()) {
            sums.s_max += len;
        } else if (!z_cover.empty()) {
            double max_w = 0.0;
            for (std::size_t i : z_cover) max_w = std::max(max_w, weights[i]);
            sums.s_max += len * max_w;
        }
    }
    return sums;
}

}  // namespace

double similarity(std::span<const PredictedFacade> predicted,
                  std::span<const ObservedFacade> observed,
                  const LikelihoodParams& params) {
    return sweep(predicted, observed, params).s;
}

double similarity_max(std::span<const PredictedFacade> predicted,
                      std::span<const ObservedFacade> observed,
                      const LikelihoodParams& params) {
    return sweep(predicted, observed, params).s_max;
}

double likelihood_from_sets(std::span<const PredictedFacade> predicted,
                            std::span<const ObservedFacade> observed,
                            const LikelihoodParams& params) {
    SweepSums sums = sweep(predicted, observed, params);
    if (sums.s_max <= 0.0) return 0.0;  // a pose that explains nothing
    return sums.s / sums.s_max;
}

double pose_likelihood(const SceneModel& scene, const Pose& pose,
                       const BuildingMap& map, const LikelihoodParams& params) {
    thread_local std::vector<PredictedFacade> predicted;
    project_map(map, pose, scene.intrinsics, params.occlusion, predicted);
    return likelihood_from_sets(predicted, scene.facades, params);
}

}  // namespace facloc
