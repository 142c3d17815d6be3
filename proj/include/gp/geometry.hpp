#pragma once

#include <cmath>
#include <stdexcept>

namespace geoprune {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double euclidean(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Axis-aligned minimum bounding rectangle. Closed on all edges.
struct Mbr {
    Point lo;
    Point hi;

    bool contains(const Point& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    bool intersects(const Mbr& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
    }
    Mbr merged(const Mbr& o) const {
        return {{std::min(lo.x, o.lo.x), std::min(lo.y, o.lo.y)},
                {std::max(hi.x, o.hi.x), std::max(hi.y, o.hi.y)}};
    }
    double area() const { return (hi.x - lo.x) * (hi.y - lo.y); }
    double min_dist(const Point& p) const {
        double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
        double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
        return std::hypot(dx, dy);
    }
};

/// Ellipse given by its two foci and the sum-of-focal-distances bound
/// (major axis length). A point belongs to the ellipse iff the sum of
/// its distances to the foci does not exceed the bound.
class DetourEllipse {
public:
    DetourEllipse(Point f1, Point f2, double major)
        : f1_(f1), f2_(f2), major_(major) {
        if (major < euclidean(f1, f2)) {
            throw std::invalid_argument("detour ellipse: major axis shorter than focal distance");
        }
    }

    const Point& f1() const { return f1_; }
    const Point& f2() const { return f2_; }
    double major() const { return major_; }

    bool contains(const Point& p) const {
        return euclidean(f1_, p) + euclidean(p, f2_) <= major_;
    }

    /// Tight axis-aligned box of the (possibly rotated) ellipse.
    Mbr mbr() const {
        double a = major_ / 2.0;
        double c = euclidean(f1_, f2_) / 2.0;
        double b2 = a * a - c * c;  // >= 0 by construction
        Point center{(f1_.x + f2_.x) / 2.0, (f1_.y + f2_.y) / 2.0};
        double dx = f2_.x - f1_.x;
        double dy = f2_.y - f1_.y;
        double d = std::hypot(dx, dy);
        double cos_t = d > 0.0 ? dx / d : 1.0;
        double sin_t = d > 0.0 ? dy / d : 0.0;
        double hx = std::sqrt(a * a * cos_t * cos_t + b2 * sin_t * sin_t);
        double hy = std::sqrt(a * a * sin_t * sin_t + b2 * cos_t * cos_t);
        return {{center.x - hx, center.y - hy}, {center.x + hx, center.y + hy}};
    }

private:
    Point f1_;
    Point f2_;
    double major_;
};

class WaitingCircle {
public:
    WaitingCircle(Point center, double radius) : center_(center), radius_(radius) {
        if (radius < 0.0) {
            throw std::invalid_argument("waiting circle: negative radius");
        }
    }

    const Point& center() const { return center_; }
    double radius() const { return radius_; }

    bool contains(const Point& p) const { return euclidean(center_, p) <= radius_; }

    Mbr mbr() const {
        return {{center_.x - radius_, center_.y - radius_},
                {center_.x + radius_, center_.y + radius_}};
    }

private:
    Point center_;
    double radius_;
};

}  // namespace geoprune
