#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace morphkit {

struct Point2 {
    double x{};
    double y{};

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double k, Point2 a) { return {k * a.x, k * a.y}; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

using Polyline = std::vector<Point2>;

// Shoelace area in image coordinates (y down). Negative for the
// orientation every contour in this library uses.
double signed_area(std::span<const Point2> polygon);

// Perimeter of the closed polyline (last vertex joins the first).
double closed_length(std::span<const Point2> polygon);

}  // namespace morphkit
