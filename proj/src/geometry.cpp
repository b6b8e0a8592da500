#include "eis/geometry.hpp"

#include <algorithm>
#include <limits>

namespace eis {

double point_segment_dist2(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    if (len2 == 0.0) return norm2(p - a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return norm2(p - (a + t * ab));
}

namespace {

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0));
}

}  // namespace

double segment_segment_dist(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    const double s1 = point_segment_dist2(a, c, d);
    const double s2 = point_segment_dist2(b, c, d);
    const double s3 = point_segment_dist2(c, a, b);
    const double s4 = point_segment_dist2(d, a, b);
    return std::sqrt(std::min({s1, s2, s3, s4}));
}

double polyline_length(const std::vector<Vec2>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += norm(pts[i] - pts[i - 1]);
    return len;
}

double point_polyline_dist(const Vec2& p, const std::vector<Vec2>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pts.size(); ++i)
        best = std::min(best, point_segment_dist2(p, pts[i - 1], pts[i]));
    return std::sqrt(best);
}

double polyline_polyline_dist(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < a.size(); ++i)
        for (std::size_t j = 1; j < b.size(); ++j)
            best = std::min(best, segment_segment_dist(a[i - 1], a[i], b[j - 1], b[j]));
    return best;
}

}  // namespace eis
