#pragma once

#include <span>

#include "morphkit/imaging.hpp"

namespace morphkit {

// Priors that pick the head among thresholded blobs. Area fractions are
// relative to the whole input image.
struct PriorConfig {
    double min_area_frac{0.02};
    double max_area_frac{0.40};
    double max_ellipse_residual{0.25};
    double centrality_weight{0.3};
    double area_weight{0.3};
    double shape_weight{0.4};
    double blur_sigma{1.0};
    double crop_margin_frac{0.2};

    // Throws BadParams when the invariants do not hold.
    void validate() const;
};

struct BoundingBox {
    int x{}, y{}, w{}, h{};
};

struct HeadCrop {
    RasterImage image;
    BinaryMask pseudo_mask;
    BoundingBox source_bbox;
    double rotation_deg{};
    bool flipped{false};
    double score{};  // prior score of the selected component
};

// Otsu's threshold over 256 equal bins spanning [min, max] of the values.
// Returns the upper edge of the winning bin.
double otsu_threshold(std::span<const double> values);

// Prior terms for one connected component, each in [0,1].
struct ComponentScore {
    int label{};
    std::size_t area{};
    Point2 centroid;
    double area_prior{};
    double shape_prior{};      // 1 - ellipse residual, clipped to [0,1]
    double centrality_prior{};
    double total{};
};

// Scores every component whose area passes the min/max fraction window.
std::vector<ComponentScore> score_components(const ComponentLabels& labels, const PriorConfig& cfg);

// Mean boundary-to-fitted-ellipse distance over the semi-major axis;
// 1.0 when no ellipse can be fitted.
double ellipse_residual(const BinaryMask& component);

HeadCrop generate_pseudo_mask(const RasterImage& image, const PriorConfig& cfg = {});

// Rotates the crop about the mask centroid so the principal axis is
// horizontal, then mirrors it so the mass sits right of the canvas center.
// Rotation and flip accumulate onto the input's recorded values.
HeadCrop right_align(const HeadCrop& crop);

// Foreground centroid and principal-axis angle (radians, image coordinates).
struct MaskMoments {
    Point2 centroid;
    double sxx{}, syy{}, sxy{};
    double principal_angle{};
};

MaskMoments mask_moments(const BinaryMask& mask);

}  // namespace morphkit
