#include "facloc/localizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "facloc/error.hpp"

namespace facloc {

using nlohmann::json;

std::vector<double> LikelihoodGrid::location_scores(ScoreMode mode) const {
    const std::size_t n_loc = sampling.locations.size();
    const std::size_t n_ori = sampling.orientations_deg.size();
    std::vector<double> scores(n_loc, 0.0);
    for (std::size_t li = 0; li < n_loc; ++li) {
        double acc = 0.0;
        for (std::size_t oi = 0; oi < n_ori; ++oi) {
            double v = values[li * n_ori + oi];
            acc = mode == ScoreMode::kMax ? std::max(acc, v) : acc + v;
        }
        scores[li] = acc;
    }
    return scores;
}

namespace {

std::vector<double> orientation_set(double step_deg) {
    if (step_deg <= 0.0) throw ValidationError("orientation step must be positive");
    std::vector<double> orientations;
    for (double g = 0.0; g < 360.0 - 1e-9; g += step_deg) orientations.push_back(g);
    return orientations;
}

}  // namespace

PoseSampling reference_sampling(Vec2 geotag, double orientation_step_deg) {
    PoseSampling sampling;
    for (double dx : {-10.0, 0.0, 10.0}) {
        for (double dy : {-10.0, 0.0, 10.0}) {
            sampling.locations.push_back({geotag.x + dx, geotag.y + dy});
        }
    }
    sampling.orientations_deg = orientation_set(orientation_step_deg);
    return sampling;
}

PoseSampling query_sampling(const BuildingMap& map,
                            const std::set<std::string>& identified_buildings,
                            double spacing_m, double dilation_m,
                            double orientation_step_deg) {
    if (spacing_m <= 0.0) throw ValidationError("grid spacing must be positive");

    std::vector<Aabb> boxes;
    if (identified_buildings.empty()) {
        boxes.push_back(map.bounds);
    } else {
        for (const auto& id : identified_buildings) {
            const Building* b = map.find(id);
            if (!b) throw ValidationError("identified building '" + id + "' not in map");
            Aabb box = Aabb::of(b->polygon);
            box.min = box.min - Vec2{dilation_m, dilation_m};
            box.max = box.max + Vec2{dilation_m, dilation_m};
            boxes.push_back(box);
        }
    }

    Aabb total = boxes.front();
    for (const auto& box : boxes) {
        total.expand(box.min);
        total.expand(box.max);
    }

    PoseSampling sampling;
    const double eps = 1e-9;
    for (double y = total.min.y; y <= total.max.y + eps; y += spacing_m) {
        for (double x = total.min.x; x <= total.max.x + eps; x += spacing_m) {
            Vec2 p{x, y};
            bool in_any = false;
            for (const auto& box : boxes) {
                if (box.contains(p)) {
                    in_any = true;
                    break;
                }
            }
            if (!in_any) continue;
            bool interior = false;
            for (const auto& b : map.buildings) {
                if (point_strictly_inside(b.polygon, p)) {
                    interior = true;
                    break;
                }
            }
            if (!interior) sampling.locations.push_back(p);
        }
    }
    sampling.orientations_deg = orientation_set(orientation_step_deg);
    return sampling;
}

LikelihoodGrid evaluate_grid(const SceneModel& scene, const PoseSampling& sampling,
                             const BuildingMap& map, const LikelihoodParams& params,
                             int threads) {
    LikelihoodGrid grid;
    grid.sampling = sampling;
    const std::size_t n_loc = sampling.locations.size();
    const std::size_t n_ori = sampling.orientations_deg.size();
    grid.values.assign(n_loc * n_ori, 0.0);

    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t li = lo; li < hi; ++li) {
            for (std::size_t oi = 0; oi < n_ori; ++oi) {
                grid.values[li * n_ori + oi] =
                    pose_likelihood(scene, sampling.pose(li, oi), map, params);
            }
        }
    };

    const int n_threads = std::max(1, threads);
    if (n_threads == 1 || n_loc < 2) {
        worker(0, n_loc);
        return grid;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_loc + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        std::size_t lo = std::min(n_loc, static_cast<std::size_t>(t) * chunk);
        std::size_t hi = std::min(n_loc, lo + chunk);
        if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
    return grid;
}

namespace {

std::vector<std::size_t> top_locations(const std::vector<double>& scores, int n) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(n)));
    return order;
}

double min_distance_to(const std::vector<Vec2>& locations,
                       const std::vector<std::size_t>& picks, Vec2 truth) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : picks) best = std::min(best, distance(locations[i], truth));
    return best;
}

}  // namespace

double top_n_error(const LikelihoodGrid& grid, Vec2 truth, int n, ScoreMode mode) {
    if (n < 1) throw ValidationError("top_n_error: n must be >= 1");
    if (grid.sampling.locations.empty()) {
        throw ValidationError("top_n_error: empty grid");
    }
    auto scores = grid.location_scores(mode);
    return min_distance_to(grid.sampling.locations, top_locations(scores, n), truth);
}

namespace {

std::vector<ErrorCurvePoint> curve_from_errors(
    const std::vector<std::vector<double>>& per_image_errors, int n_max) {
    const std::size_t n_img = per_image_errors.size();
    std::vector<ErrorCurvePoint> curve;
    for (int n = 1; n <= n_max; ++n) {
        double mean = 0.0;
        for (const auto& errs : per_image_errors) mean += errs[n - 1];
        mean /= static_cast<double>(n_img);
        double var = 0.0;
        if (n_img > 1) {
            for (const auto& errs : per_image_errors) {
                double d = errs[n - 1] - mean;
                var += d * d;
            }
            var /= static_cast<double>(n_img - 1);
        }
        double ci = 1.96 * std::sqrt(var / static_cast<double>(n_img));
        curve.push_back({n, mean, mean - ci, mean + ci});
    }
    return curve;
}

}  // namespace

std::vector<ErrorCurvePoint> error_curve(const std::vector<LikelihoodGrid>& grids,
                                         const std::vector<Vec2>& truths, int n_max,
                                         ScoreMode mode) {
    if (grids.empty() || grids.size() != truths.size()) {
        throw ValidationError("error_curve: grids and truths must be non-empty and equal");
    }
    std::vector<std::vector<double>> per_image;
    for (std::size_t i = 0; i < grids.size(); ++i) {
        auto scores = grids[i].location_scores(mode);
        std::vector<double> errs;
        for (int n = 1; n <= n_max; ++n) {
            errs.push_back(min_distance_to(grids[i].sampling.locations,
                                           top_locations(scores, n), truths[i]));
        }
        per_image.push_back(std::move(errs));
    }
    return curve_from_errors(per_image, n_max);
}

std::vector<ErrorCurvePoint> error_curve_from_scores(
    const std::vector<std::vector<Vec2>>& locations,
    const std::vector<std::vector<double>>& scores, const std::vector<Vec2>& truths,
    int n_max) {
    if (locations.empty() || locations.size() != scores.size() ||
        locations.size() != truths.size()) {
        throw ValidationError("error_curve: input lists must be non-empty and equal");
    }
    std::vector<std::vector<double>> per_image;
    for (std::size_t i = 0; i < locations.size(); ++i) {
        std::vector<double> errs;
        for (int n = 1; n <= n_max; ++n) {
            errs.push_back(
                min_distance_to(locations[i], top_locations(scores[i], n), truths[i]));
        }
        per_image.push_back(std::move(errs));
    }
    return curve_from_errors(per_image, n_max);
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Maps the irregular location set onto a regular raster; cells without a
// sample stay at score 0.
struct RasterLayout {
    std::vector<double> xs;  // ascending
    std::vector<double> ys;  // ascending
    int col_of(double x) const {
        return static_cast<int>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
    }
    int row_of(double y) const {  // row 0 = largest y (north up)
        int iy = static_cast<int>(std::lower_bound(ys.begin(), ys.end(), y) - ys.begin());
        return static_cast<int>(ys.size()) - 1 - iy;
    }
};

RasterLayout raster_layout(const std::vector<Vec2>& locations) {
    RasterLayout layout;
    for (Vec2 p : locations) {
        layout.xs.push_back(p.x);
        layout.ys.push_back(p.y);
    }
    std::sort(layout.xs.begin(), layout.xs.end());
    layout.xs.erase(std::unique(layout.xs.begin(), layout.xs.end()), layout.xs.end());
    std::sort(layout.ys.begin(), layout.ys.end());
    layout.ys.erase(std::unique(layout.ys.begin(), layout.ys.end()), layout.ys.end());
    return layout;
}

}  // namespace

void write_probability_csv(const LikelihoodGrid& grid, const std::string& path,
                           ScoreMode mode) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << "x,y,score\n";
    auto scores = grid.location_scores(mode);
    for (std::size_t i = 0; i < grid.sampling.locations.size(); ++i) {
        out << fmt_double(grid.sampling.locations[i].x) << ","
            << fmt_double(grid.sampling.locations[i].y) << "," << fmt_double(scores[i])
            << "\n";
    }
}

void read_probability_csv(const std::string& path, std::vector<Vec2>& locations,
                          std::vector<double>& scores) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    locations.clear();
    scores.clear();
    std::string line;
    if (!std::getline(in, line) || line != "x,y,score") {
        throw ParseError(path + ": missing x,y,score header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double x, y, s;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &s) != 3) {
            throw ParseError(path + ": malformed row '" + line + "'");
        }
        locations.push_back({x, y});
        scores.push_back(s);
    }
}

void write_probability_pgm(const LikelihoodGrid& grid, const std::string& pgm_path,
                           const std::string& sidecar_path, ScoreMode mode) {
    auto layout = raster_layout(grid.sampling.locations);
    auto scores = grid.location_scores(mode);
    double max_score = 0.0;
    for (double s : scores) max_score = std::max(max_score, s);

    GrayImage img(static_cast<int>(layout.xs.size()), static_cast<int>(layout.ys.size()));
    for (std::size_t i = 0; i < grid.sampling.locations.size(); ++i) {
        Vec2 p = grid.sampling.locations[i];
        double v = max_score > 0.0 ? scores[i] / max_score : 0.0;
        img.set(layout.col_of(p.x), layout.row_of(p.y),
                static_cast<std::uint8_t>(std::llround(255.0 * v)));
    }
    save_pgm(img, pgm_path);

    double cell = layout.xs.size() > 1 ? layout.xs[1] - layout.xs[0] : 0.0;
    json sidecar{{"cols", img.width},
                 {"rows", img.height},
                 {"x_min", layout.xs.front()},
                 {"y_max", layout.ys.back()},
                 {"cell_size_m", cell},
                 {"row0_is_north", true},
                 {"score_max", max_score}};
    std::ofstream out(sidecar_path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + sidecar_path);
    out << sidecar.dump(2) << "\n";
}

RgbImage render_probability_map(const LikelihoodGrid& grid,
                                std::optional<Vec2> truth_marker, ScoreMode mode) {
    constexpr int kScale = 7;
    auto layout = raster_layout(grid.sampling.locations);
    auto scores = grid.location_scores(mode);
    double max_score = 0.0;
    for (double s : scores) max_score = std::max(max_score, s);

    RgbImage img(static_cast<int>(layout.xs.size()) * kScale,
                 static_cast<int>(layout.ys.size()) * kScale);
    for (std::size_t i = 0; i < grid.sampling.locations.size(); ++i) {
        Vec2 p = grid.sampling.locations[i];
        double v = max_score > 0.0 ? scores[i] / max_score : 0.0;
        auto g = static_cast<std::uint8_t>(std::llround(220.0 * v));
        int c0 = layout.col_of(p.x) * kScale;
        int r0 = layout.row_of(p.y) * kScale;
        for (int dr = 0; dr < kScale; ++dr) {
            for (int dc = 0; dc < kScale; ++dc) {
                img.set(c0 + dc, r0 + dr, g, g, static_cast<std::uint8_t>(g / 2 + 16));
            }
        }
    }

    if (truth_marker && !layout.xs.empty()) {
        // Nearest cell center hosts the cross.
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.sampling.locations.size(); ++i) {
            double d = distance(grid.sampling.locations[i], *truth_marker);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        Vec2 p = grid.sampling.locations[best];
        int cc = layout.col_of(p.x) * kScale + kScale / 2;
        int cr = layout.row_of(p.y) * kScale + kScale / 2;
        for (int d = -kScale; d <= kScale; ++d) {
            if (cc + d >= 0 && cc + d < img.width) img.set(cc + d, cr, 255, 255, 255);
            if (cr + d >= 0 && cr + d < img.height) img.set(cc, cr + d, 255, 255, 255);
        }
    }
    return img;
}

}  // namespace facloc
