#include "facloc/projection.hpp"

#include <algorithm>
#include <cmath>

#include "facloc/error.hpp"

namespace facloc {

double pixel_to_bearing(double col, const CameraIntrinsics& intr) {
    return rad2deg(std::atan((col - intr.width_cols / 2.0) / intr.focal_cols));
}

double bearing_to_pixel(double bearing_deg, const CameraIntrinsics& intr) {
    if (std::fabs(bearing_deg) >= intr.hfov_deg / 2.0) {
        throw ValidationError("bearing outside the horizontal field of view");
    }
    return intr.width_cols / 2.0 + intr.focal_cols * std::tan(deg2rad(bearing_deg));
}

namespace {

constexpr double kNearPlaneM = 1e-6;

struct Candidate {
    Vec2 q0;  // clipped endpoints, map frame
    Vec2 q1;
    int start_col;
    int end_col;
    double theta_deg;
    const std::string* building;
    double distance_m;
};

// Liang-Barsky style clip of p(t) = p0 + t*d against n.(p(t) - cam) >= off.
bool clip_halfplane(Vec2 p0, Vec2 d, Vec2 cam, Vec2 n, double off, double& t0,
                    double& t1) {
    double a = dot(n, p0 - cam) - off;
    double b = dot(n, d);
    if (b == 0.0) return a >= 0.0;
    double t = -a / b;
    if (b > 0.0) {
        t0 = std::max(t0, t);
    } else {
        t1 = std::min(t1, t);
    }
    return t0 < t1;
}

// Distance from cam along the ray with direction u (unit) to the segment
// [q0, q1]; the intersection parameter is clamped onto the segment.
double ray_segment_depth(Vec2 cam, Vec2 u, Vec2 q0, Vec2 q1) {
    Vec2 e = q1 - q0;
    double denom = cross(u, e);
    if (std::fabs(denom) < 1e-12) {
        return std::min(distance(cam, q0), distance(cam, q1));
    }
    double tau = cross(q0 - cam, u) / denom;
    tau = std::clamp(tau, 0.0, 1.0);
    return distance(cam, q0 + e * tau);
}

void emit_occluded(const std::vector<Candidate>& candidates,
                   const CameraIntrinsics& intr, Vec2 cam, Vec2 fwd, Vec2 right,
                   std::vector<PredictedFacade>& out) {
    int lo = intr.width_cols;
    int hi = 0;
    for (const auto& c : candidates) {
        lo = std::min(lo, c.start_col);
        hi = std::max(hi, c.end_col);
    }

    thread_local std::vector<int> winner;
    thread_local std::vector<double> depth;
    winner.assign(intr.width_cols, -1);
    depth.assign(intr.width_cols, 0.0);

    for (int col = lo; col < hi; ++col) {
        double t = (col + 0.5 - intr.width_cols / 2.0) / intr.focal_cols;
        double inv_len = 1.0 / std::sqrt(1.0 + t * t);
        Vec2 u = (fwd + right * t) * inv_len;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const auto& c = candidates[i];
            if (col < c.start_col || col >= c.end_col) continue;
            double d = ray_segment_depth(cam, u, c.q0, c.q1);
            if (winner[col] < 0 || d < depth[col]) {
                winner[col] = static_cast<int>(i);
                depth[col] = d;
            }
        }
    }

    // Maximal per-candidate runs of won columns become the trimmed facades.
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        int col = c.start_col;
        while (col < c.end_col) {
            if (winner[col] != static_cast<int>(i)) {
                ++col;
                continue;
            }
            int run_start = col;
            while (col < c.end_col && winner[col] == static_cast<int>(i)) ++col;
            PredictedFacade f;
            f.start_col = run_start;
            f.end_col = col;
            f.theta_deg = c.theta_deg;
            f.building = *c.building;
            f.distance_m = std::min(depth[run_start], depth[col - 1]);
            out.push_back(std::move(f));
        }
    }
}

}  // namespace

void project_map(const BuildingMap& map, const Pose& pose, const CameraIntrinsics& intr,
                 bool occlusion, std::vector<PredictedFacade>& out) {
    out.clear();
    const Pose g = pose.normalized();
    const double gr = deg2rad(g.gamma_deg);
    const Vec2 cam{g.x, g.y};
    const Vec2 fwd{std::sin(gr), std::cos(gr)};
    const Vec2 right{std::cos(gr), -std::sin(gr)};

    const double h2 = deg2rad(intr.hfov_deg / 2.0);
    const Vec2 n_left = right * std::cos(h2) + fwd * std::sin(h2);
    const Vec2 n_right = right * -std::cos(h2) + fwd * std::sin(h2);
    const double cx = intr.width_cols / 2.0;

    thread_local std::vector<Candidate> candidates;
    candidates.clear();

    for (const auto& building : map.buildings) {
        const std::size_t n = building.polygon.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 p0 = building.polygon[i];
            Vec2 p1 = building.polygon[(i + 1) % n];
            Vec2 d = p1 - p0;

            // CCW polygons put the outward normal to the right of the edge;
            // interior faces are never observable.
            Vec2 outward{d.y, -d.x};
            if (dot(outward, cam - p0) <= 0.0) continue;

            double t0 = 0.0;
            double t1 = 1.0;
            if (!clip_halfplane(p0, d, cam, fwd, kNearPlaneM, t0, t1)) continue;
            if (!clip_halfplane(p0, d, cam, n_left, 0.0, t0, t1)) continue;
            if (!clip_halfplane(p0, d, cam, n_right, 0.0, t0, t1)) continue;

            Vec2 q0 = p0 + d * t0;
            Vec2 q1 = p0 + d * t1;
            Vec2 v0 = q0 - cam;
            Vec2 v1 = q1 - cam;
            double c0 = cx + intr.focal_cols * (dot(v0, right) / dot(v0, fwd));
            double c1 = cx + intr.focal_cols * (dot(v1, right) / dot(v1, fwd));
            if (c0 > c1) {
                std::swap(c0, c1);
                std::swap(q0, q1);
            }
            int start = static_cast<int>(std::llround(std::clamp(c0, 0.0, double(intr.width_cols))));
            int end = static_cast<int>(std::llround(std::clamp(c1, 0.0, double(intr.width_cols))));
            if (end - start < 1) continue;

            Candidate c;
            c.q0 = q0;
            c.q1 = q1;
            c.start_col = start;
            c.end_col = end;
            c.theta_deg = normalize_deg_180(-(edge_direction_angle(p0, p1) + g.gamma_deg));
            c.building = &building.id;
            c.distance_m = std::min(norm(v0), norm(v1));
            candidates.push_back(c);
        }
    }

    if (!occlusion || candidates.size() <= 1) {
        for (const auto& c : candidates) {
            out.push_back({c.start_col, c.end_col, c.theta_deg, *c.building, c.distance_m});
        }
        return;
    }
    emit_occluded(candidates, intr, cam, fwd, right, out);
}

std::vector<PredictedFacade> project_map(const BuildingMap& map, const Pose& pose,
                                         const CameraIntrinsics& intr, bool occlusion) {
    std::vector<PredictedFacade> out;
    project_map(map, pose, intr, occlusion, out);
    return out;
}

}  // namespace facloc
