#pragma once

#include <cmath>
#include <algorithm>

namespace patrol {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    double norm() const { return std::sqrt(x * x + y * y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

inline double cross(Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

struct Segment {
    Vec2 a;
    Vec2 b;

    double length() const { return distance(a, b); }
};

// Axis-aligned rectangle, closed on all edges.
struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    bool contains(Vec2 p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    Vec2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
};

inline bool on_segment(Vec2 p, const Segment& s) {
    if (cross(s.a, s.b, p) != 0.0) return false;
    return std::min(s.a.x, s.b.x) <= p.x && p.x <= std::max(s.a.x, s.b.x) &&
           std::min(s.a.y, s.b.y) <= p.y && p.y <= std::max(s.a.y, s.b.y);
}

// Closed segment-segment intersection (shared endpoints and collinear
// overlap count as intersecting).
inline bool segments_intersect(const Segment& s, const Segment& t) {
    const double d1 = cross(t.a, t.b, s.a);
    const double d2 = cross(t.a, t.b, s.b);
    const double d3 = cross(s.a, s.b, t.a);
    const double d4 = cross(s.a, s.b, t.b);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0.0 && on_segment(s.a, t)) return true;
    if (d2 == 0.0 && on_segment(s.b, t)) return true;
    if (d3 == 0.0 && on_segment(t.a, s)) return true;
    if (d4 == 0.0 && on_segment(t.b, s)) return true;
    return false;
}

inline double point_segment_distance(Vec2 p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double len2 = d.x * d.x + d.y * d.y;
    if (len2 == 0.0) return distance(p, s.a);
    double t = ((p.x - s.a.x) * d.x + (p.y - s.a.y) * d.y) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, {s.a.x + t * d.x, s.a.y + t * d.y});
}

}  // namespace patrol
