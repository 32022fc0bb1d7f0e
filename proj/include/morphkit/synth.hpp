#pragma once

#include <cstdint>
#include <functional>

#include "morphkit/ellipse.hpp"
#include "morphkit/imaging.hpp"
#include "morphkit/softmixup.hpp"

namespace morphkit::synth {

// Signed distance to the shape boundary, negative inside.
using SignedDistance = std::function<double(Point2)>;

struct RenderOptions {
    int width{64};
    int height{64};
    double foreground{0.8};
    double background{0.2};
    double edge_width{1.0};  // erfc scale; the gradient ring spans about 2 px
    double noise_sigma{0.02};
    std::uint64_t seed{0};
};

// Intensity = background + (foreground - background) * erfc(d / edge_width) / 2
// sampled at pixel (x,y), plus clamped Gaussian noise.
RasterImage render(const SignedDistance& sdf, const RenderOptions& opts);

// Pixels whose signed distance is below `offset` (offset > 0 dilates).
BinaryMask threshold_mask(const SignedDistance& sdf, double offset, int width, int height);

SignedDistance ellipse_sdf(const Ellipse& e);

// Ellipse with a circular bite of radius `bite_radius` centered on its
// boundary at parameter `bite_t`.
SignedDistance dented_ellipse_sdf(const Ellipse& e, double bite_t, double bite_radius);

struct EllipseCase {
    Ellipse ellipse;
    RasterImage image;
    BinaryMask truth;
    BinaryMask pseudo_mask;
    double offset{};
};

// Head-like ellipse near the center of the canvas with a pseudo-mask
// dilated or eroded by |offset| in [min_offset, max_offset] pixels.
EllipseCase random_ellipse_case(Rng& rng, const RenderOptions& opts, double min_offset, double max_offset);

}  // namespace morphkit::synth
