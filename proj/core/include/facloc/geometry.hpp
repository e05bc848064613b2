#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace facloc {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Reduce an angle to [0, 360).
double normalize_deg(double deg);

/// Reduce an undirected line angle to [0, 180).
double normalize_deg_180(double deg);

/// Absolute angular difference of two undirected line angles, in [0, 90].
double circular_diff_180(double a_deg, double b_deg);

struct Vec2 {
    double x{0.0};
    double y{0.0};
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline Vec2 operator*(double s, Vec2 a) { return a * s; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(squared_norm(a)); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Axis-aligned bounding rectangle.
struct Aabb {
    Vec2 min{0.0, 0.0};
    Vec2 max{0.0, 0.0};

    void expand(Vec2 p);
    bool contains(Vec2 p) const;
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }

    static Aabb of(std::span<const Vec2> points);
};

/// Shoelace area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Vec2> polygon);

/// True when no two non-adjacent edges intersect and adjacent edges meet
/// only at their shared vertex.
bool polygon_is_simple(std::span<const Vec2> polygon);

/// Strict interior test; boundary points are outside.
bool point_strictly_inside(std::span<const Vec2> polygon, Vec2 p);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

/// Minimum boundary distance of two polygons; 0 when they touch or overlap.
double polygon_distance(std::span<const Vec2> a, std::span<const Vec2> b);

/// Mean of undirected line angles (degrees), wrapping at 180.
double circular_mean_180(std::span<const double> angles_deg);

}  // namespace facloc
