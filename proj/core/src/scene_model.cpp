#include "facloc/scene_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "facloc/error.hpp"

namespace facloc {

using nlohmann::json;

CameraIntrinsics CameraIntrinsics::create(int width_cols, double hfov_deg) {
    if (width_cols <= 0) throw ValidationError("intrinsics: width_cols must be positive");
    if (hfov_deg <= 0.0 || hfov_deg >= 180.0) {
        throw ValidationError("intrinsics: hfov_deg must lie in (0, 180)");
    }
    CameraIntrinsics intr;
    intr.width_cols = width_cols;
    intr.hfov_deg = hfov_deg;
    intr.focal_cols = (width_cols / 2.0) / std::tan(deg2rad(hfov_deg / 2.0));
    return intr;
}

SemanticLabelMap::SemanticLabelMap(int width, int height, std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
    if (width_ <= 0 || height_ <= 0 ||
        labels_.size() != static_cast<std::size_t>(width_) * height_) {
        throw ValidationError("label map: dimensions do not match pixel count");
    }
    for (std::uint8_t v : labels_) {
        if (v > 4) throw ValidationError("label map: category index out of range");
    }

    components_.assign(labels_.size(), 0);
    col_has_building_.assign(width_, 0);

    // Flood fill building pixels, 8-connected, raster scan order.
    std::deque<std::pair<int, int>> queue;
    for (int row = 0; row < height_; ++row) {
        for (int col = 0; col < width_; ++col) {
            std::size_t i = index(col, row);
            if (labels_[i] != static_cast<std::uint8_t>(SemanticCategory::kBuilding) ||
                components_[i] != 0) {
                continue;
            }
            ++component_count_;
            components_[i] = component_count_;
            queue.emplace_back(col, row);
            while (!queue.empty()) {
                auto [c, r] = queue.front();
                queue.pop_front();
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        int nc = c + dc;
                        int nr = r + dr;
                        if (nc < 0 || nc >= width_ || nr < 0 || nr >= height_) continue;
                        std::size_t ni = index(nc, nr);
                        if (labels_[ni] ==
                                static_cast<std::uint8_t>(SemanticCategory::kBuilding) &&
                            components_[ni] == 0) {
                            components_[ni] = component_count_;
                            queue.emplace_back(nc, nr);
                        }
                    }
                }
            }
        }
    }

    component_columns_.assign(static_cast<std::size_t>(component_count_) * width_, 0);
    for (int row = 0; row < height_; ++row) {
        for (int col = 0; col < width_; ++col) {
            int comp = components_[index(col, row)];
            if (comp > 0) {
                col_has_building_[col] = 1;
                component_columns_[static_cast<std::size_t>(comp - 1) * width_ + col] = 1;
            }
        }
    }
}

SemanticLabelMap SemanticLabelMap::from_image(const GrayImage& img) {
    return SemanticLabelMap(img.width, img.height, img.pixels);
}

GrayImage SemanticLabelMap::to_image() const {
    GrayImage img(width_, height_);
    img.pixels = labels_;
    return img;
}

namespace {

// Integer Bresenham visiting every pixel of the segment.
template <typename Fn>
void rasterize_line(int c0, int r0, int c1, int r1, Fn&& visit) {
    int dc = std::abs(c1 - c0);
    int dr = -std::abs(r1 - r0);
    int sc = c0 < c1 ? 1 : -1;
    int sr = r0 < r1 ? 1 : -1;
    int err = dc + dr;
    while (true) {
        visit(c0, r0);
        if (c0 == c1 && r0 == r1) break;
        int e2 = 2 * err;
        if (e2 >= dr) {
            err += dr;
            c0 += sc;
        }
        if (e2 <= dc) {
            err += dc;
            r0 += sr;
        }
    }
}

}  // namespace

std::vector<LabeledLineSegment> filter_lines(const std::vector<LabeledLineSegment>& lines,
                                             const SemanticLabelMap& seg) {
    std::vector<LabeledLineSegment> kept;
    kept.reserve(lines.size());
    for (const auto& line : lines) {
        int c0 = static_cast<int>(std::llround(line.p0.x));
        int r0 = static_cast<int>(std::llround(line.p0.y));
        int c1 = static_cast<int>(std::llround(line.p1.x));
        int r1 = static_cast<int>(std::llround(line.p1.y));
        auto inside = [&](int c, int r) {
            return c >= 0 && c < seg.width() && r >= 0 && r < seg.height();
        };
        if (!inside(c0, r0) || !inside(c1, r1)) {
            throw ValidationError("line endpoint outside the label map");
        }
        bool touches = false;
        rasterize_line(c0, r0, c1, r1, [&](int c, int r) {
            if (seg.label(c, r) == SemanticCategory::kBuilding) touches = true;
        });
        if (touches) kept.push_back(line);
    }
    return kept;
}

std::vector<int> column_vp_vote(const std::vector<LabeledLineSegment>& lines,
                                int width_cols) {
    int max_vp = -1;
    for (const auto& line : lines) max_vp = std::max(max_vp, line.vp_index);
    std::vector<int> votes(width_cols, kNoVote);
    if (max_vp < 0) return votes;

    // counts[vp * width + col]
    std::vector<int> counts(static_cast<std::size_t>(max_vp + 1) * width_cols, 0);
    for (const auto& line : lines) {
        if (line.vp_index < 0) continue;  // vertical lines carry no direction vote
        double lo = std::min(line.p0.x, line.p1.x);
        double hi = std::max(line.p0.x, line.p1.x);
        int first = std::max(0, static_cast<int>(std::ceil(lo)));
        int last = std::min(width_cols - 1, static_cast<int>(std::floor(hi)));
        for (int c = first; c <= last; ++c) {
            ++counts[static_cast<std::size_t>(line.vp_index) * width_cols + c];
        }
    }
    for (int c = 0; c < width_cols; ++c) {
        int best_vp = kNoVote;
        int best_count = 0;
        for (int vp = 0; vp <= max_vp; ++vp) {
            int n = counts[static_cast<std::size_t>(vp) * width_cols + c];
            if (n > best_count) {  // strict: ties keep the lower vp index
                best_count = n;
                best_vp = vp;
            }
        }
        votes[c] = best_vp;
    }
    return votes;
}

std::vector<int> cutting_lines(const std::vector<int>& votes) {
    const int width = static_cast<int>(votes.size());
    std::vector<int> cuts{0};
    for (int x = 1; x < width; ++x) {
        if (votes[x] != votes[x - 1]) cuts.push_back(x);
    }
    if (width > 0) cuts.push_back(width);
    return cuts;
}

std::vector<ObservedFacade> decompose_facades(const std::vector<int>& votes,
                                              const std::vector<int>& cuts,
                                              const std::map<int, double>& vp_theta,
                                              const SemanticLabelMap& seg,
                                              int min_building_cols) {
    std::vector<ObservedFacade> facades;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        int a = cuts[i];
        int b = cuts[i + 1];
        if (a >= b) continue;

        // Dominant label over [a, b); ties prefer the lower vp index and a
        // real vp over no-vote.
        std::map<int, int> tally;
        for (int c = a; c < b; ++c) ++tally[votes[c]];
        int dominant = kNoVote;
        int best = 0;
        for (auto [label, count] : tally) {
            bool wins = count > best ||
                        (count == best && label != kNoVote &&
                         (dominant == kNoVote || label < dominant));
            if (wins) {
                best = count;
                dominant = label;
            }
        }
        if (dominant == kNoVote) continue;

        int building_cols = 0;
        for (int c = a; c < b; ++c) {
            if (seg.column_has_building(c)) ++building_cols;
        }
        if (building_cols < min_building_cols) continue;

        auto it = vp_theta.find(dominant);
        if (it == vp_theta.end()) {
            throw ValidationError("no facade angle for vanishing point " +
                                  std::to_string(dominant));
        }
        ObservedFacade f;
        f.start_col = a;
        f.end_col = b;
        f.theta_deg = normalize_deg_180(it->second);
        facades.push_back(std::move(f));
    }
    return facades;
}

double facade_angle_from_vp(double vp_col, const CameraIntrinsics& intr) {
    if (!std::isfinite(vp_col)) return 0.0;
    double bearing = rad2deg(std::atan((vp_col - intr.width_cols / 2.0) / intr.focal_cols));
    return normalize_deg_180(bearing + 90.0);
}

std::vector<double> per_column_estimates(const std::vector<ObservedFacade>& facades,
                                         int width_cols,
                                         const SemanticLabelMap* seg) {
    std::vector<double> theta(width_cols, kNoTheta);

    // Group facades by the building component with the largest column
    // overlap; 0 = unassigned (also used when no segmentation is given).
    std::vector<int> group(facades.size(), 0);
    if (seg) {
        for (std::size_t i = 0; i < facades.size(); ++i) {
            int best_comp = 0;
            int best_overlap = 0;
            for (int comp = 1; comp <= seg->component_count(); ++comp) {
                int overlap = 0;
                int lo = std::max(0, facades[i].start_col);
                int hi = std::min(width_cols, facades[i].end_col);
                for (int c = lo; c < hi; ++c) {
                    if (seg->component_in_column(comp, c)) ++overlap;
                }
                if (overlap > best_overlap) {
                    best_overlap = overlap;
                    best_comp = comp;
                }
            }
            group[i] = best_comp;
        }
    }

    std::vector<double> angles;
    for (int c = 0; c < width_cols; ++c) {
        std::map<int, std::vector<double>> by_group;
        for (std::size_t i = 0; i < facades.size(); ++i) {
            if (facades[i].covers(c)) by_group[group[i]].push_back(facades[i].theta_deg);
        }
        if (by_group.empty()) continue;

        // Prefer the component that actually owns building pixels in this
        // column; otherwise the largest group, ties toward the smaller id.
        const std::vector<double>* chosen = nullptr;
        int chosen_id = -1;
        for (const auto& [gid, thetas] : by_group) {
            bool present = seg && gid > 0 && seg->component_in_column(gid, c);
            bool better;
            if (chosen == nullptr) {
                better = true;
            } else {
                bool chosen_present =
                    seg && chosen_id > 0 && seg->component_in_column(chosen_id, c);
                if (present != chosen_present) {
                    better = present;
                } else {
                    better = thetas.size() > chosen->size();
                }
            }
            if (better) {
                chosen = &thetas;
                chosen_id = gid;
            }
        }
        angles.assign(chosen->begin(), chosen->end());
        theta[c] = circular_mean_180(angles);
    }
    return theta;
}

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void validate_facade(const ObservedFacade& f, int width_cols, const std::string& ctx) {
    if (f.start_col < 0 || f.start_col >= f.end_col || f.end_col > width_cols) {
        throw ValidationError(ctx + ": facade extent outside the image");
    }
    if (!f.identity_dist.empty()) {
        double sum = 0.0;
        for (const auto& [id, p] : f.identity_dist) {
            if (p < 0.0) throw ValidationError(ctx + ": negative identity probability");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-6) {
            throw ValidationError(ctx + ": identity distribution does not sum to 1");
        }
    }
}

}  // namespace

SceneFile load_scene_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        SceneFile sf;
        sf.width_cols = j.at("intrinsics").at("width_cols").get<int>();
        sf.hfov_deg = j.at("intrinsics").at("hfov_deg").get<double>();
        if (j.contains("lines")) {
            for (const auto& jl : j["lines"]) {
                LabeledLineSegment line;
                line.p0 = {jl.at("p0").at(0).get<double>(), jl.at("p0").at(1).get<double>()};
                line.p1 = {jl.at("p1").at(0).get<double>(), jl.at("p1").at(1).get<double>()};
                const auto& vp = jl.at("vp");
                if (vp.is_string()) {
                    if (vp.get<std::string>() != "vertical") {
                        throw ParseError(path + ": line vp must be an index or \"vertical\"");
                    }
                    line.vp_index = kVpVertical;
                } else {
                    line.vp_index = vp.get<int>();
                    if (line.vp_index < 0) {
                        throw ParseError(path + ": vanishing point indices must be >= 0");
                    }
                }
                sf.lines.push_back(line);
            }
        }
        if (j.contains("vps")) {
            for (const auto& jv : j["vps"]) {
                SceneFile::VanishingPoint vp;
                vp.index = jv.at("index").get<int>();
                vp.col = jv.at("col").is_null()
                             ? std::numeric_limits<double>::infinity()
                             : jv.at("col").get<double>();
                sf.vps.push_back(vp);
            }
        }
        if (j.contains("segmentation")) {
            sf.segmentation_path = j["segmentation"].get<std::string>();
        }
        if (j.contains("facades")) {
            std::vector<ObservedFacade> facades;
            for (const auto& jf : j["facades"]) {
                ObservedFacade f;
                f.start_col = jf.at("start_col").get<int>();
                f.end_col = jf.at("end_col").get<int>();
                f.theta_deg = normalize_deg_180(jf.at("theta_deg").get<double>());
                if (jf.contains("identity_dist")) {
                    for (const auto& [id, p] : jf["identity_dist"].items()) {
                        f.identity_dist[id] = p.get<double>();
                    }
                }
                facades.push_back(std::move(f));
            }
            sf.facades = std::move(facades);
        }
        return sf;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string scene_file_to_json(const SceneFile& sf) {
    json j;
    j["intrinsics"] = {{"width_cols", sf.width_cols}, {"hfov_deg", sf.hfov_deg}};
    if (!sf.lines.empty()) {
        json jl = json::array();
        for (const auto& line : sf.lines) {
            json e{{"p0", {line.p0.x, line.p0.y}}, {"p1", {line.p1.x, line.p1.y}}};
            if (line.vp_index == kVpVertical) {
                e["vp"] = "vertical";
            } else {
                e["vp"] = line.vp_index;
            }
            jl.push_back(std::move(e));
        }
        j["lines"] = std::move(jl);
    }
    if (!sf.vps.empty()) {
        json jv = json::array();
        for (const auto& vp : sf.vps) {
            json e{{"index", vp.index}};
            if (std::isfinite(vp.col)) {
                e["col"] = vp.col;
            } else {
                e["col"] = nullptr;
            }
            jv.push_back(std::move(e));
        }
        j["vps"] = std::move(jv);
    }
    if (!sf.segmentation_path.empty()) j["segmentation"] = sf.segmentation_path;
    if (sf.facades) {
        json jf = json::array();
        for (const auto& f : *sf.facades) {
            json e{{"start_col", f.start_col},
                   {"end_col", f.end_col},
                   {"theta_deg", f.theta_deg}};
            if (!f.identity_dist.empty()) {
                json d = json::object();
                for (const auto& [id, p] : f.identity_dist) d[id] = p;
                e["identity_dist"] = std::move(d);
            }
            jf.push_back(std::move(e));
        }
        j["facades"] = std::move(jf);
    }
    return j.dump(2) + "\n";
}

void save_scene_file(const SceneFile& sf, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << scene_file_to_json(sf);
}

SceneModel build_scene(const SceneFile& sf, const std::filesystem::path& base_dir,
                       int min_building_cols) {
    SceneModel scene;
    scene.intrinsics = CameraIntrinsics::create(sf.width_cols, sf.hfov_deg);

    if (!sf.segmentation_path.empty()) {
        GrayImage img = load_pgm((base_dir / sf.segmentation_path).string());
        scene.segmentation = SemanticLabelMap::from_image(img);
    }

    if (sf.facades) {
        for (const auto& f : *sf.facades) validate_facade(f, sf.width_cols, "scene");
        scene.facades = *sf.facades;
    } else {
        if (!scene.segmentation) {
            throw ValidationError("scene: decomposition needs a segmentation");
        }
        if (sf.vps.empty()) {
            throw ValidationError("scene: decomposition needs vanishing points");
        }
        std::map<int, double> vp_theta;
        for (const auto& vp : sf.vps) {
            vp_theta[vp.index] = facade_angle_from_vp(vp.col, scene.intrinsics);
        }
        auto kept = filter_lines(sf.lines, *scene.segmentation);
        auto votes = column_vp_vote(kept, sf.width_cols);
        auto cuts = cutting_lines(votes);
        scene.facades = decompose_facades(votes, cuts, vp_theta, *scene.segmentation,
                                          min_building_cols);
    }

    scene.per_column_theta = per_column_estimates(
        scene.facades, sf.width_cols,
        scene.segmentation ? &*scene.segmentation : nullptr);
    return scene;
}

SceneModel load_scene(const std::string& path, int min_building_cols) {
    SceneFile sf = load_scene_file(path);
    return build_scene(sf, std::filesystem::path(path).parent_path(), min_building_cols);
}

}  // namespace facloc
