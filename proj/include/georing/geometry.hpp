#pragma once

#include <cmath>
#include <stdexcept>

namespace georing {

/// Planar position in density-normalized units (one node per unit area).
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
    constexpr Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
    constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Point2 operator/(double s) const { return {x / s, y / s}; }
    constexpr bool operator==(const Point2&) const = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double dot(Point2 o) const { return x * o.x + y * o.y; }
    constexpr double cross(Point2 o) const { return x * o.y - y * o.x; }
};

/// Update ring: closed annulus around `center`.
struct Annulus {
    Point2 center;
    double inner_radius = 1.0;
    double thickness = 1.0;

    Annulus() = default;
    Annulus(Point2 c, double inner, double thick);

    double outer_radius() const { return inner_radius + thickness; }
    double area() const;
};

/// Square deployment region [0, side]^2.
struct BoxRegion {
    double side = 1.0;

    BoxRegion() = default;
    explicit BoxRegion(double s);

    bool contains(Point2 p) const { return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side; }
    double diameter() const { return side * std::sqrt(2.0); }
    Point2 center() const { return {side / 2, side / 2}; }
};

enum class Axis { x, y };

double distance(Point2 a, Point2 b);

bool in_annulus(Point2 p, const Annulus& ring);

/// Shortest distance from p to any point of the closed annulus (0 inside it).
double distance_to_annulus(Point2 p, const Annulus& ring);

/// Mirror-folds each coordinate into [0, side]. Displacements of several box
/// widths are folded repeatedly, which is exactly the reflected-diffusion map.
Point2 reflect_into_box(Point2 p, const BoxRegion& box);

/// Specular reflection of a unit direction off a wall perpendicular to `hit_axis`.
Point2 reflect_direction(Point2 dir, Axis hit_axis);

/// Angle in [0, pi] between two nonzero vectors.
double angle_between(Point2 u, Point2 v);

/// Intersection of segments [a,b] and [c,d]; false when they do not cross.
bool segment_intersection(Point2 a, Point2 b, Point2 c, Point2 d, Point2& out);

}  // namespace georing
