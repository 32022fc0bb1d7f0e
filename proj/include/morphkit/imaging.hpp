#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "morphkit/geometry.hpp"

namespace morphkit {

// Row-major intensities in [0,1]; channels is 1 (gray) or 3 (RGB, interleaved).
struct RasterImage {
    int width{};
    int height{};
    int channels{1};
    std::vector<double> data;

    RasterImage() = default;
    RasterImage(int w, int h, int c = 1, double fill = 0.0);

    double& at(int x, int y, int c = 0) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    double at(int x, int y, int c = 0) const { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    bool empty() const { return width == 0 || height == 0; }
};

// Foreground flags stored as 0/1 bytes.
struct BinaryMask {
    int width{};
    int height{};
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false);

    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;
    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// Real-valued single-channel plane. Used for gradient magnitudes and for
// blended (soft) masks.
struct GradientField {
    int width{};
    int height{};
    std::vector<double> magnitude;

    GradientField() = default;
    GradientField(int w, int h, double fill = 0.0)
        : width(w), height(h), magnitude(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return magnitude[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return magnitude[static_cast<std::size_t>(y) * width + x]; }
};

// ITU-R 601 luma for RGB; gray images are returned unchanged.
RasterImage to_luma(const RasterImage& image);

// Unnormalized 3x3 Sobel magnitude with edge replication. Rows are
// processed in parallel; results are identical to serial::gradient_magnitude.
GradientField gradient_magnitude(const RasterImage& image);

// Bilinear lookup on the pixel-index lattice (pixel (x,y) sits at (x,y)).
// Throws OutOfBounds outside [0,w-1]x[0,h-1].
double sample_bilinear(const GradientField& field, double x, double y);

// Clamps (x,y) into the field domain first.
double sample_bilinear_clamped(const GradientField& field, double x, double y);

// Even-odd scanline fill. Pixel (x,y) covers [x,x+1)x[y,y+1) and is
// foreground iff its center (x+0.5, y+0.5) is inside the polygon.
BinaryMask rasterize_polygon(std::span<const Point2> vertices, int width, int height);

// Separable Gaussian with edge replication; operates per channel.
RasterImage gaussian_blur(const RasterImage& image, double sigma);

double iou(const BinaryMask& a, const BinaryMask& b);

// 8-connected component labels; 0 is background, components numbered from 1
// in raster order of their first pixel.
struct ComponentLabels {
    int width{};
    int height{};
    int count{};
    std::vector<int> labels;
    std::vector<std::size_t> areas;  // areas[k-1] is the area of component k
};

ComponentLabels label_components(const BinaryMask& mask);

// Mask holding only the component with the given label.
BinaryMask component_mask(const ComponentLabels& labels, int label);

// Largest 8-connected component (ties toward the lower label); empty input
// gives an empty mask.
BinaryMask largest_component(const BinaryMask& mask);

// Maps an output pixel to a source coordinate (pixel-index lattice):
// src = linear * dst + offset.
struct AffineMap {
    double a00{1}, a01{0}, a10{0}, a11{1};
    double tx{0}, ty{0};

    Point2 apply(Point2 p) const { return {a00 * p.x + a01 * p.y + tx, a10 * p.x + a11 * p.y + ty}; }
};

enum class Border { Constant, Replicate };

// Outside the source, Constant reads `fill` and Replicate clamps to the edge.
RasterImage warp_bilinear(const RasterImage& src, const AffineMap& dst_to_src, int out_w, int out_h,
                          Border border = Border::Constant, double fill = 0.0);
BinaryMask warp_nearest(const BinaryMask& src, const AffineMap& dst_to_src, int out_w, int out_h);
GradientField mask_to_field(const BinaryMask& mask);

namespace serial {

GradientField gradient_magnitude(const RasterImage& image);

}  // namespace serial

}  // namespace morphkit
