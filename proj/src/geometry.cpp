#include "georing/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace georing {

Annulus::Annulus(Point2 c, double inner, double thick) : center(c), inner_radius(inner), thickness(thick)
{
    if (!(inner > 0.0) || !(thick > 0.0))
        throw std::invalid_argument("annulus needs positive inner radius and thickness");
}

double Annulus::area() const
{
    return std::numbers::pi * (2.0 * inner_radius * thickness + thickness * thickness);
}

BoxRegion::BoxRegion(double s) : side(s)
{
    if (!(s > 0.0))
        throw std::invalid_argument("box side must be positive");
}

double distance(Point2 a, Point2 b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

bool in_annulus(Point2 p, const Annulus& ring)
{
    double l = distance(p, ring.center);
    return l >= ring.inner_radius && l <= ring.outer_radius();
}

double distance_to_annulus(Point2 p, const Annulus& ring)
{
    double l = distance(p, ring.center);
    if (l < ring.inner_radius)
        return ring.inner_radius - l;
    if (l > ring.outer_radius())
        return l - ring.outer_radius();
    return 0.0;
}

namespace {

double fold(double v, double side)
{
    if (v >= 0.0 && v <= side)
        return v;
    double period = 2.0 * side;
    double m = std::fmod(v, period);
    if (m < 0.0)
        m += period;
    return m <= side ? m : period - m;
}

}  // namespace

Point2 reflect_into_box(Point2 p, const BoxRegion& box)
{
    return {fold(p.x, box.side), fold(p.y, box.side)};
}

Point2 reflect_direction(Point2 dir, Axis hit_axis)
{
    if (dir.x == 0.0 && dir.y == 0.0)
        throw std::invalid_argument("cannot reflect a zero direction");
    return hit_axis == Axis::x ? Point2{-dir.x, dir.y} : Point2{dir.x, -dir.y};
}

double angle_between(Point2 u, Point2 v)
{
    double c = u.dot(v) / (u.norm() * v.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

bool segment_intersection(Point2 a, Point2 b, Point2 c, Point2 d, Point2& out)
{
    Point2 r = b - a;
    Point2 s = d - c;
    double denom = r.cross(s);
    if (denom == 0.0)
        return false;
    Point2 ac = c - a;
    double t = ac.cross(s) / denom;
    double u = ac.cross(r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0)
        return false;
    out = a + r * t;
    return true;
}

}  // namespace georing
