#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace eis {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kVacuumPermittivity = 8.85e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double px, double py) : x(px), y(py) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }
inline Vec2 normalized(const Vec2& a) {
    const double n = norm(a);
    return {a.x / n, a.y / n};
}
// 90 degree counterclockwise rotation; left normal of a direction vector.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }
inline Complex to_complex(const Vec2& a) { return {a.x, a.y}; }

// Squared distance from p to segment [a,b], clamped to the segment span.
double point_segment_dist2(const Vec2& p, const Vec2& a, const Vec2& b);
inline double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    return std::sqrt(point_segment_dist2(p, a, b));
}

// Minimal distance between segments [a,b] and [c,d]; zero if they intersect.
double segment_segment_dist(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

double polyline_length(const std::vector<Vec2>& pts);
double point_polyline_dist(const Vec2& p, const std::vector<Vec2>& pts);
double polyline_polyline_dist(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

}  // namespace eis
