#include "morphkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace morphkit::synth {

RasterImage render(const SignedDistance& sdf, const RenderOptions& opts) {
    RasterImage img(opts.width, opts.height);
    Rng rng(opts.seed);
    std::normal_distribution<double> noise(0.0, opts.noise_sigma > 0.0 ? opts.noise_sigma : 1.0);
    for (int y = 0; y < opts.height; ++y) {
        for (int x = 0; x < opts.width; ++x) {
            const double d = sdf({static_cast<double>(x), static_cast<double>(y)});
            double v = opts.background + (opts.foreground - opts.background) * 0.5 * std::erfc(d / opts.edge_width);
            if (opts.noise_sigma > 0.0) v += noise(rng);
            img.at(x, y) = std::clamp(v, 0.0, 1.0);
        }
    }
    return img;
}

BinaryMask threshold_mask(const SignedDistance& sdf, double offset, int width, int height) {
    BinaryMask mask(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) mask.set(x, y, sdf({static_cast<double>(x), static_cast<double>(y)}) < offset);
    }
    return mask;
}

SignedDistance ellipse_sdf(const Ellipse& e) {
    return [e](Point2 p) { return signed_distance_to_ellipse(e, p); };
}

SignedDistance dented_ellipse_sdf(const Ellipse& e, double bite_t, double bite_radius) {
    const Point2 bite = e.point_at(bite_t);
    return [e, bite, bite_radius](Point2 p) {
        const double d_ellipse = signed_distance_to_ellipse(e, p);
        const double d_bite = norm(p - bite) - bite_radius;
        return std::max(d_ellipse, -d_bite);
    };
}

EllipseCase random_ellipse_case(Rng& rng, const RenderOptions& opts, double min_offset, double max_offset) {
    std::uniform_real_distribution<double> jitter(-3.0, 3.0);
    std::uniform_real_distribution<double> major(14.0, 20.0);
    std::uniform_real_distribution<double> aspect(0.55, 0.75);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> magnitude(min_offset, max_offset);
    std::bernoulli_distribution dilate(0.5);

    EllipseCase out;
    out.ellipse.center = {(opts.width - 1) / 2.0 + jitter(rng), (opts.height - 1) / 2.0 + jitter(rng)};
    out.ellipse.semi_major = major(rng);
    out.ellipse.semi_minor = out.ellipse.semi_major * aspect(rng);
    out.ellipse.angle = angle(rng);
    out.offset = magnitude(rng) * (dilate(rng) ? 1.0 : -1.0);

    RenderOptions local = opts;
    local.seed = rng();
    const SignedDistance sdf = ellipse_sdf(out.ellipse);
    out.image = render(sdf, local);
    out.truth = threshold_mask(sdf, 0.0, opts.width, opts.height);
    out.pseudo_mask = threshold_mask(sdf, out.offset, opts.width, opts.height);
    return out;
}

}  // namespace morphkit::synth
