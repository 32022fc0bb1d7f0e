#pragma once

// Reference computations written independently of the library code paths
// they check. Keep them naive.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "morphkit/geometry.hpp"
#include "morphkit/grbr.hpp"
#include "morphkit/imaging.hpp"

namespace oracle {

using morphkit::Point2;

// Sobel magnitude at one pixel, reading neighbours through clamped indices.
double sobel_at(const morphkit::RasterImage& image, int x, int y);

// W. R. Franklin's point-in-polygon crossing test.
bool pnpoly(std::span<const Point2> polygon, double px, double py);

// Mask of pixels whose centers pass pnpoly.
morphkit::BinaryMask brute_rasterize(std::span<const Point2> polygon, int width, int height);

// Four-term bilinear expansion.
double bilinear(const morphkit::GradientField& field, double x, double y);

// -ln(max(p, 1e-12))
double cross_entropy(std::span<const double> probs, int label);

double soft_loss(std::span<const double> probs, int y_a, int y_b, double gamma);

struct Metrics {
    double accuracy{}, macro_precision{}, macro_recall{}, f1{};
};

Metrics hand_metrics(std::span<const int> preds, std::span<const int> truths, int num_classes);

// Turning angle at `mid` when it turns concave (cross > 0), computed from
// the acos of the normalized dot product.
double concave_turn(Point2 prev, Point2 mid, Point2 next);

struct BruteResult {
    double cost{};
    std::vector<int> indices;
    std::size_t optimal_count{};  // sequences tying the optimum within 1e-12
};

// Full product over m^n index sequences, filtering the band afterwards.
BruteResult brute_force_closed_path(const morphkit::RefinementGraph& graph);

// Random graph with fan-like geometry: column j sits on a ray at angle
// -2*pi*j/n (negative signed area orientation) with radial positions spread
// around radius 5, and uniform costs in [-1, 0].
morphkit::RefinementGraph random_graph(std::mt19937_64& rng, int n, int m, int s, double c);

}  // namespace oracle
