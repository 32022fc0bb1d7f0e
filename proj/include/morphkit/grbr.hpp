#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphkit/contour.hpp"
#include "morphkit/imaging.hpp"
#include "morphkit/mask_gen.hpp"

namespace morphkit {

struct RefinementParams {
    int n{100};              // contour samples (graph columns)
    int m{15};               // candidates per normal line, odd
    int s{2};                // max index jump between adjacent columns
    double c{1.0};           // concavity penalty per radian of turning
    double half_len{4.0};    // normal segment half length, pixels
    bool exact_closure{false};

    void validate() const;
};

// Column-major candidate grid over the normal fan plus one duplicated
// closure column (index n) that copies column 0.
struct RefinementGraph {
    int n{};
    int m{};
    int s{};
    double c{};
    std::vector<double> vertex_cost;  // (n+1) x m, negated gradient magnitude
    std::vector<Point2> geometry;     // (n+1) x m
    std::vector<std::uint8_t> clamped;

    double cost(int j, int i) const { return vertex_cost[static_cast<std::size_t>(j) * m + i]; }
    const Point2& point(int j, int i) const { return geometry[static_cast<std::size_t>(j) * m + i]; }
};

struct RefinedContour {
    std::vector<int> indices;   // chosen candidate per column, length n
    std::vector<Point2> points; // chosen geometry, length n
    int closure_index{};        // candidate chosen on the duplicated column
    double total_cost{};
    bool exact{};
};

// c * (turning angle) when the turn at `mid` is concave for the contour
// orientation used here (cross product of the two edges > 0), else 0.
// Zero-length edges carry no penalty.
double concavity_penalty(Point2 prev, Point2 mid, Point2 next, double c);

// Sum of concave turning angles over a closed polygon.
double convex_violation(std::span<const Point2> closed_polygon);

// Objective of a closed index sequence: vertex costs plus cyclic concavity
// penalties. Does not check the smoothness band.
double closed_path_cost(const RefinementGraph& graph, std::span<const int> indices);

bool satisfies_band(std::span<const int> indices, int s);

RefinementGraph build_graph(const GradientField& field, const NormalFan& fan, const RefinementParams& params);

// Minimum-cost closed path through one candidate per column under the
// smoothness band. Exact closure runs one DP per admissible (first, second)
// index pair in parallel; the approximate mode runs a single DP from every
// start at once and closes the best band-compatible path.
RefinedContour shortest_closed_path(const RefinementGraph& graph, const RefinementParams& params);

// Exhaustive search for tiny instances (n <= 8, m <= 5); ties go to the
// lexicographically smallest index sequence.
RefinedContour enumerate_optimal(const RefinementGraph& graph, const RefinementParams& params);

struct RefinementOutcome {
    BinaryMask mask;
    SampledContour contour;
    RefinedContour path;
    std::vector<Point2> polygon;  // refined curve in raster coordinates
};

RefinementOutcome refine(const RasterImage& image, const BinaryMask& mask, const RefinementParams& params);

BinaryMask refine_mask(const HeadCrop& crop, const RefinementParams& params);

struct BatchResult {
    std::optional<RefinementOutcome> outcome;
    std::string error;
    double elapsed_ms{};
};

// One result per crop, in input order. Crops are refined concurrently.
std::vector<BatchResult> refine_batch(std::span<const HeadCrop> crops, const RefinementParams& params,
                                      int workers = 0);

namespace serial {

RefinedContour shortest_closed_path(const RefinementGraph& graph, const RefinementParams& params);
std::vector<BatchResult> refine_batch(std::span<const HeadCrop> crops, const RefinementParams& params);

}  // namespace serial

}  // namespace morphkit
