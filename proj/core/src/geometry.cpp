#include "facloc/geometry.hpp"

#include <algorithm>
#include <limits>

namespace facloc {

double normalize_deg(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r >= 360.0) r = 0.0;
    return r;
}

double normalize_deg_180(double deg) {
    double r = std::fmod(deg, 180.0);
    if (r < 0.0) r += 180.0;
    if (r >= 180.0) r = 0.0;
    return r;
}

double circular_diff_180(double a_deg, double b_deg) {
    double d = std::fabs(normalize_deg_180(a_deg) - normalize_deg_180(b_deg));
    return std::min(d, 180.0 - d);
}

void Aabb::expand(Vec2 p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
}

bool Aabb::contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
}

Aabb Aabb::of(std::span<const Vec2> points) {
    Aabb box;
    if (points.empty()) return box;
    box.min = box.max = points[0];
    for (Vec2 p : points) box.expand(p);
    return box;
}

double signed_area(std::span<const Vec2> polygon) {
    double twice = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        twice += cross(polygon[i], polygon[(i + 1) % n]);
    }
    return 0.5 * twice;
}

namespace {

int orientation_sign(Vec2 a, Vec2 b, Vec2 c) {
    double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

// p assumed collinear with [a, b].
bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    int o1 = orientation_sign(p1, p2, q1);
    int o2 = orientation_sign(p1, p2, q2);
    int o3 = orientation_sign(q1, q2, p1);
    int o4 = orientation_sign(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

bool polygon_is_simple(std::span<const Vec2> polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a0 = polygon[i];
        Vec2 a1 = polygon[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            Vec2 b0 = polygon[j];
            Vec2 b1 = polygon[(j + 1) % n];
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                // Shared vertex is fine; collinear overlap beyond it is not.
                Vec2 shared = (j == i + 1) ? a1 : a0;
                Vec2 pa = (j == i + 1) ? a0 : a1;
                Vec2 pb = (j == i + 1) ? b1 : b0;
                if (orientation_sign(shared, pa, pb) == 0 &&
                    dot(pa - shared, pb - shared) > 0.0) {
                    return false;
                }
                continue;
            }
            if (segments_intersect(a0, a1, b0, b1)) return false;
        }
    }
    return true;
}

bool point_strictly_inside(std::span<const Vec2> polygon, Vec2 p) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    constexpr double kBoundaryEps = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, polygon[i], polygon[(i + 1) % n]) <= kBoundaryEps) {
            return false;
        }
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        Vec2 a = polygon[i];
        Vec2 b = polygon[j];
        if ((a.y > p.y) != (b.y > p.y) &&
            p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
            inside = !inside;
        }
    }
    return inside;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = squared_norm(ab);
    if (len2 == 0.0) return distance(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    if (segments_intersect(a0, a1, b0, b1)) return 0.0;
    return std::min(std::min(point_segment_distance(a0, b0, b1),
                             point_segment_distance(a1, b0, b1)),
                    std::min(point_segment_distance(b0, a0, a1),
                             point_segment_distance(b1, a0, a1)));
}

double polygon_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    if (!a.empty() && point_strictly_inside(b, a[0])) return 0.0;
    if (!b.empty() && point_strictly_inside(a, b[0])) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    for (std::size_t i = 0; i < na; ++i) {
        Vec2 a0 = a[i];
        Vec2 a1 = a[(i + 1) % na];
        for (std::size_t j = 0; j < nb; ++j) {
            best = std::min(best, segment_segment_distance(a0, a1, b[j], b[(j + 1) % nb]));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

double circular_mean_180(std::span<const double> angles_deg) {
    // Double the angles so the undirected wrap at 180 becomes a full circle.
    double s = 0.0;
    double c = 0.0;
    for (double a : angles_deg) {
        double phi = deg2rad(2.0 * a);
        s += std::sin(phi);
        c += std::cos(phi);
    }
    double mean = 0.5 * rad2deg(std::atan2(s, c));
    return normalize_deg_180(mean);
}

}  // namespace facloc
