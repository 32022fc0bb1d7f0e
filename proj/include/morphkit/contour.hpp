#pragma once

#include <cstdint>
#include <vector>

#include "morphkit/geometry.hpp"
#include "morphkit/imaging.hpp"

namespace morphkit {

// n points at equal arc-length spacing along a closed curve, starting at the
// curve's topmost-then-leftmost vertex. Orientation has negative signed area.
struct SampledContour {
    std::vector<Point2> points;
    double perimeter{};

    int size() const { return static_cast<int>(points.size()); }
};

// For every contour sample, m candidate points on a segment of length
// 2*half_len along the outward normal. Index 0 is the innermost point and
// (m-1)/2 is the contour sample itself. Stored row-major by contour index.
struct NormalFan {
    int n{};
    int m{};
    double half_len{};
    int width{};
    int height{};
    std::vector<Point2> points;
    std::vector<std::uint8_t> clamped;  // point was moved onto the image border
    std::vector<Point2> normals;        // unit outward normal per contour sample

    const Point2& point(int j, int i) const { return points[static_cast<std::size_t>(j) * m + i]; }
    bool was_clamped(int j, int i) const { return clamped[static_cast<std::size_t>(j) * m + i] != 0; }
    int center_index() const { return (m - 1) / 2; }
};

// Moore-neighbour trace of the single foreground component, as pixel
// coordinates with negative signed area, starting at its topmost-leftmost pixel.
Polyline extract_contour(const BinaryMask& mask);

SampledContour resample_uniform(const Polyline& polyline, int n);

NormalFan build_normal_fan(const SampledContour& contour, int m, double half_len, int width, int height);

}  // namespace morphkit
