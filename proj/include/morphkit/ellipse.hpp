#pragma once

#include <optional>
#include <span>

#include "morphkit/geometry.hpp"

namespace morphkit {

// Rotated ellipse: the major axis points along (cos angle, sin angle) in
// image coordinates.
struct Ellipse {
    Point2 center;
    double semi_major{};
    double semi_minor{};
    double angle{};  // radians

    bool contains(Point2 p) const;
    Point2 point_at(double t) const;  // parametric boundary point
};

// Direct least-squares conic fit constrained to ellipses (Halir-Flusser
// formulation). Returns nullopt for fewer than 6 points or a non-elliptic fit.
std::optional<Ellipse> fit_ellipse(std::span<const Point2> points);

// Euclidean distance from p to the ellipse boundary.
double distance_to_ellipse(const Ellipse& e, Point2 p);

// Negative inside, positive outside.
double signed_distance_to_ellipse(const Ellipse& e, Point2 p);

}  // namespace morphkit
