#include "facloc/identity.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "facloc/error.hpp"

namespace facloc {

using nlohmann::json;

const PixelIdentityField::Dist* PixelIdentityField::at(int col, int row) const {
    auto it = entries_.find(key(col, row));
    return it == entries_.end() ? nullptr : &it->second;
}

void PixelIdentityField::set(int col, int row, Dist dist) {
    if (col < 0 || col >= width_ || row < 0 || row >= height_) {
        throw ValidationError("identity field: pixel outside the image");
    }
    if (dist.empty()) {
        entries_.erase(key(col, row));
    } else {
        entries_[key(col, row)] = std::move(dist);
    }
}

const std::string* PixelIdentityField::argmax_at(int col, int row) const {
    const Dist* dist = at(col, row);
    if (!dist || dist->empty()) return nullptr;
    const std::string* best = nullptr;
    double best_p = -1.0;
    for (const auto& [id, p] : *dist) {  // sorted ids: ties keep the first
        if (p > best_p) {
            best_p = p;
            best = &id;
        }
    }
    return best;
}

std::vector<std::tuple<int, int, PixelIdentityField::Dist>>
PixelIdentityField::sorted_entries() const {
    std::vector<std::tuple<int, int, Dist>> out;
    out.reserve(entries_.size());
    for (const auto& [k, dist] : entries_) {
        out.emplace_back(static_cast<int>(k & 0xffffffffu), static_cast<int>(k >> 32),
                         dist);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return std::get<0>(a) < std::get<0>(b);
    });
    return out;
}

bool PixelIdentityField::operator==(const PixelIdentityField& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           entries_ == other.entries_;
}

namespace {

// Per column, the index into `predicted` of the nearest facade covering it
// (ties toward the earlier facade), or -1.
std::vector<int> column_winners(const std::vector<PredictedFacade>& predicted,
                                int width_cols) {
    std::vector<int> winner(width_cols, -1);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const auto& z = predicted[i];
        int lo = std::max(0, z.start_col);
        int hi = std::min(width_cols, z.end_col);
        for (int c = lo; c < hi; ++c) {
            if (winner[c] < 0 || z.distance_m < predicted[winner[c]].distance_m) {
                winner[c] = static_cast<int>(i);
            }
        }
    }
    return winner;
}

const SemanticLabelMap& require_segmentation(const SceneModel& scene,
                                             const char* what) {
    if (!scene.segmentation) {
        throw ValidationError(std::string(what) + " requires a scene segmentation");
    }
    return *scene.segmentation;
}

}  // namespace

PixelIdentityField identity_at_pose(const SceneModel& scene, const Pose& pose,
                                    const BuildingMap& map,
                                    const LikelihoodParams& params) {
    const SemanticLabelMap& seg = require_segmentation(scene, "identity_at_pose");
    auto predicted = project_map(map, pose, scene.intrinsics, params.occlusion);
    auto winner = column_winners(predicted, scene.intrinsics.width_cols);

    PixelIdentityField field(seg.width(), seg.height());
    for (int row = 0; row < seg.height(); ++row) {
        for (int col = 0; col < seg.width(); ++col) {
            if (seg.component(col, row) == 0) continue;
            if (col >= scene.intrinsics.width_cols || winner[col] < 0) continue;
            field.set(col, row, {{predicted[winner[col]].building, 1.0}});
        }
    }
    return field;
}

namespace {

LikelihoodGrid ensure_grid(const SceneModel& scene, const BuildingMap& map,
                           const PoseSampling& sampling, const LikelihoodParams& params,
                           LikelihoodGrid* grid_out) {
    LikelihoodGrid grid = evaluate_grid(scene, sampling, map, params);
    if (grid_out) *grid_out = grid;
    return grid;
}

}  // namespace

PixelIdentityField label_reference_greedy(const SceneModel& scene,
                                          const BuildingMap& map,
                                          const PoseSampling& sampling,
                                          const LikelihoodParams& params,
                                          LikelihoodGrid* grid_out) {
    if (sampling.pose_count() == 0) {
        throw ValidationError("label_reference_greedy: empty pose sampling");
    }
    LikelihoodGrid grid = ensure_grid(scene, map, sampling, params, grid_out);

    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.values.size(); ++i) {
        if (grid.values[i] > grid.values[best]) best = i;
    }
    const SemanticLabelMap& seg = require_segmentation(scene, "label_reference_greedy");
    if (grid.values[best] <= 0.0) {
        return PixelIdentityField(seg.width(), seg.height());
    }
    const std::size_t n_ori = sampling.orientations_deg.size();
    return identity_at_pose(scene, sampling.pose(best / n_ori, best % n_ori), map,
                            params);
}

PixelIdentityField label_reference_marginalized(const SceneModel& scene,
                                                const BuildingMap& map,
                                                const PoseSampling& sampling,
                                                const LikelihoodParams& params,
                                                LikelihoodGrid* grid_out) {
    if (sampling.pose_count() == 0) {
        throw ValidationError("label_reference_marginalized: empty pose sampling");
    }
    const SemanticLabelMap& seg =
        require_segmentation(scene, "label_reference_marginalized");
    LikelihoodGrid grid = ensure_grid(scene, map, sampling, params, grid_out);

    // Assignments depend on the column only, so marginalize per column and
    // paint the building mask afterwards.
    const int width = scene.intrinsics.width_cols;
    std::vector<PixelIdentityField::Dist> col_acc(width);
    const std::size_t n_ori = sampling.orientations_deg.size();
    std::vector<PredictedFacade> predicted;
    for (std::size_t li = 0; li < sampling.locations.size(); ++li) {
        for (std::size_t oi = 0; oi < n_ori; ++oi) {
            double p = grid.values[li * n_ori + oi];
            if (p <= 0.0) continue;
            project_map(map, sampling.pose(li, oi), scene.intrinsics, params.occlusion,
                        predicted);
            auto winner = column_winners(predicted, width);
            for (int c = 0; c < width; ++c) {
                if (winner[c] >= 0) col_acc[c][predicted[winner[c]].building] += p;
            }
        }
    }

    for (auto& dist : col_acc) {
        double total = 0.0;
        for (const auto& [id, v] : dist) total += v;
        if (total > 0.0) {
            for (auto& [id, v] : dist) v /= total;
        }
    }

    PixelIdentityField field(seg.width(), seg.height());
    for (int row = 0; row < seg.height(); ++row) {
        for (int col = 0; col < seg.width(); ++col) {
            if (seg.component(col, row) == 0) continue;
            if (col >= width || col_acc[col].empty()) continue;
            field.set(col, row, col_acc[col]);
        }
    }
    return field;
}

std::vector<PixelIdentityField::Dist> transfer_identity(
    const SceneModel& query, const CorrespondenceSet& correspondences,
    const std::map<std::string, PixelIdentityField>& ref_fields) {
    std::vector<PixelIdentityField::Dist> dists(query.facades.size());

    for (const auto& entry : correspondences.refs) {
        auto it = ref_fields.find(entry.ref);
        if (it == ref_fields.end()) {
            throw ValidationError("correspondences reference unknown image '" +
                                  entry.ref + "'");
        }
        const PixelIdentityField& field = it->second;
        for (const auto& m : entry.matches) {
            if (m.ref_col < 0 || m.ref_col >= field.width() || m.ref_row < 0 ||
                m.ref_row >= field.height()) {
                throw ValidationError("correspondence pixel outside reference image");
            }
            const auto* ref_dist = field.at(m.ref_col, m.ref_row);
            if (!ref_dist) continue;  // unlabeled reference pixel
            for (std::size_t f = 0; f < query.facades.size(); ++f) {
                if (!query.facades[f].covers(m.query_col)) continue;
                for (const auto& [id, p] : *ref_dist) dists[f][id] += p;
            }
        }
    }

    for (auto& dist : dists) {
        double total = 0.0;
        for (const auto& [id, p] : dist) total += p;
        if (total > 0.0) {
            for (auto& [id, p] : dist) p /= total;
        } else {
            dist.clear();
        }
    }
    return dists;
}

PixelIdentityField field_from_facades(const SceneModel& scene) {
    const SemanticLabelMap& seg = require_segmentation(scene, "field_from_facades");
    const int width = scene.intrinsics.width_cols;

    std::vector<const PixelIdentityField::Dist*> col_dist(width, nullptr);
    for (int c = 0; c < width; ++c) {
        for (const auto& f : scene.facades) {
            if (f.covers(c) && f.has_identity()) {
                col_dist[c] = &f.identity_dist;
                break;
            }
        }
    }

    PixelIdentityField field(seg.width(), seg.height());
    for (int row = 0; row < seg.height(); ++row) {
        for (int col = 0; col < seg.width(); ++col) {
            if (seg.component(col, row) == 0) continue;
            if (col >= width || !col_dist[col]) continue;
            field.set(col, row, *col_dist[col]);
        }
    }
    return field;
}

double pixel_accuracy(const PixelIdentityField& predicted,
                      const PixelIdentityField& truth) {
    if (predicted.width() != truth.width() || predicted.height() != truth.height()) {
        throw ValidationError("pixel_accuracy: field dimensions differ");
    }
    std::size_t total = 0;
    std::size_t correct = 0;
    for (const auto& [col, row, dist] : truth.sorted_entries()) {
        ++total;
        const std::string* truth_id = truth.argmax_at(col, row);
        const std::string* pred_id = predicted.argmax_at(col, row);
        if (truth_id && pred_id && *truth_id == *pred_id) ++correct;
    }
    if (total == 0) return 1.0;  // vacuously accurate
    return static_cast<double>(correct) / static_cast<double>(total);
}

PixelIdentityField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        PixelIdentityField field(j.at("width").get<int>(), j.at("height").get<int>());
        for (const auto& entry : j.at("entries")) {
            int col = entry.at(0).get<int>();
            int row = entry.at(1).get<int>();
            PixelIdentityField::Dist dist;
            for (const auto& [id, p] : entry.at(2).items()) dist[id] = p.get<double>();
            field.set(col, row, std::move(dist));
        }
        return field;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string field_to_json(const PixelIdentityField& field) {
    json entries = json::array();
    for (const auto& [col, row, dist] : field.sorted_entries()) {
        json d = json::object();
        for (const auto& [id, p] : dist) d[id] = p;
        entries.push_back(json::array({col, row, std::move(d)}));
    }
    json j{{"width", field.width()}, {"height", field.height()},
           {"entries", std::move(entries)}};
    return j.dump(2) + "\n";
}

void save_field(const PixelIdentityField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << field_to_json(field);
}

RgbImage field_visualization(const PixelIdentityField& field) {
    RgbImage img(field.width(), field.height());
    for (const auto& [col, row, dist] : field.sorted_entries()) {
        const std::string* id = field.argmax_at(col, row);
        if (!id) continue;
        // FNV-1a; std::hash is not stable across implementations.
        std::uint64_t h = 1469598103934665603ull;
        for (char ch : *id) {
            h ^= static_cast<std::uint8_t>(ch);
            h *= 1099511628211ull;
        }
        img.set(col, row, static_cast<std::uint8_t>(64 + (h & 0xbf)),
                static_cast<std::uint8_t>(64 + ((h >> 8) & 0xbf)),
                static_cast<std::uint8_t>(64 + ((h >> 16) & 0xbf)));
    }
    return img;
}

CorrespondenceSet load_correspondences(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        CorrespondenceSet corr;
        corr.query = j.at("query").get<std::string>();
        for (const auto& jr : j.at("refs")) {
            CorrespondenceSet::RefEntry entry;
            entry.ref = jr.at("ref").get<std::string>();
            for (const auto& jm : jr.at("matches")) {
                entry.matches.push_back({jm.at(0).get<int>(), jm.at(1).get<int>(),
                                         jm.at(2).get<int>(), jm.at(3).get<int>()});
            }
            corr.refs.push_back(std::move(entry));
        }
        return corr;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string correspondences_to_json(const CorrespondenceSet& corr) {
    json refs = json::array();
    for (const auto& entry : corr.refs) {
        json matches = json::array();
        for (const auto& m : entry.matches) {
            matches.push_back(json::array({m.query_col, m.query_row, m.ref_col, m.ref_row}));
        }
        refs.push_back(json{{"ref", entry.ref}, {"matches", std::move(matches)}});
    }
    json j{{"query", corr.query}, {"refs", std::move(refs)}};
    return j.dump(2) + "\n";
}

void save_correspondences(const CorrespondenceSet& corr, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << correspondences_to_json(corr);
}

RetrievalList load_retrieval_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        json j = json::parse(ss.str());
        RetrievalList list;
        list.query = j.at("query").get<std::string>();
        for (const auto& r : j.at("ranked_refs")) {
            list.ranked_refs.push_back(r.get<std::string>());
        }
        return list;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_retrieval_list(const RetrievalList& list, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    json j{{"query", list.query}, {"ranked_refs", list.ranked_refs}};
    out << j.dump(2) << "\n";
}

}  // namespace facloc
