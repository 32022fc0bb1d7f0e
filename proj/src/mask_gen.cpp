#include "morphkit/mask_gen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "morphkit/ellipse.hpp"
#include "morphkit/error.hpp"

namespace morphkit {

namespace {

constexpr int kOtsuBins = 256;
// canvas margin around the rotated mask: fraction of its extent plus a fixed pad
constexpr double kAlignMarginFrac = 0.2;
constexpr double kAlignMarginPx = 2.0;
// centroid must sit this far left of the canvas center before mirroring
constexpr double kFlipTolerancePx = 0.5;

std::vector<Point2> boundary_pixels(const BinaryMask& mask) {
    std::vector<Point2> pts;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            const bool edge = x == 0 || y == 0 || x == mask.width - 1 || y == mask.height - 1 || !mask.at(x - 1, y) ||
                              !mask.at(x + 1, y) || !mask.at(x, y - 1) || !mask.at(x, y + 1);
            if (edge) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
        }
    }
    return pts;
}

}  // namespace

void PriorConfig::validate() const {
    if (!(0.0 < min_area_frac && min_area_frac < max_area_frac && max_area_frac < 1.0)) {
        throw Error(ErrorCode::BadParams, "need 0 < min_area_frac < max_area_frac < 1");
    }
    if (centrality_weight < 0.0 || area_weight < 0.0 || shape_weight < 0.0) {
        throw Error(ErrorCode::BadParams, "prior weights must be non-negative");
    }
    if (std::abs(centrality_weight + area_weight + shape_weight - 1.0) > 1e-9) {
        throw Error(ErrorCode::BadParams, "prior weights must sum to 1");
    }
    if (max_ellipse_residual <= 0.0) throw Error(ErrorCode::BadParams, "max_ellipse_residual must be positive");
    if (blur_sigma < 0.0 || crop_margin_frac < 0.0) throw Error(ErrorCode::BadParams, "negative blur or margin");
}

double otsu_threshold(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "otsu on empty input");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi - lo <= 1e-12) return hi;
    const double bin_width = (hi - lo) / kOtsuBins;

    std::array<double, kOtsuBins> hist{};
    for (double v : values) {
        const int b = std::min(kOtsuBins - 1, static_cast<int>((v - lo) / bin_width));
        hist[b] += 1.0;
    }
    const double total = static_cast<double>(values.size());
    double sum_all = 0.0;
    for (int b = 0; b < kOtsuBins; ++b) sum_all += b * hist[b];

    double w0 = 0.0;
    double sum0 = 0.0;
    double best_var = -1.0;
    int best_bin = 0;
    for (int b = 0; b < kOtsuBins - 1; ++b) {
        w0 += hist[b];
        sum0 += b * hist[b];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best_var) {
            best_var = between;
            best_bin = b;
        }
    }
    return lo + (best_bin + 1) * bin_width;
}

double ellipse_residual(const BinaryMask& component) {
    const std::vector<Point2> pts = boundary_pixels(component);
    const auto fit = fit_ellipse(pts);
    if (!fit || fit->semi_major <= 0.0) return 1.0;
    double sum = 0.0;
    for (const Point2& p : pts) sum += distance_to_ellipse(*fit, p);
    return sum / static_cast<double>(pts.size()) / fit->semi_major;
}

MaskMoments mask_moments(const BinaryMask& mask) {
    MaskMoments m;
    double count = 0.0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            m.centroid.x += x;
            m.centroid.y += y;
            count += 1.0;
        }
    }
    if (count == 0.0) throw Error(ErrorCode::EmptyMask, "mask has no foreground");
    m.centroid = (1.0 / count) * m.centroid;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            const double dx = x - m.centroid.x;
            const double dy = y - m.centroid.y;
            m.sxx += dx * dx;
            m.syy += dy * dy;
            m.sxy += dx * dy;
        }
    }
    m.sxx /= count;
    m.syy /= count;
    m.sxy /= count;
    m.principal_angle = 0.5 * std::atan2(2.0 * m.sxy, m.sxx - m.syy);
    return m;
}

std::vector<ComponentScore> score_components(const ComponentLabels& labels, const PriorConfig& cfg) {
    const double image_area = static_cast<double>(labels.width) * labels.height;
    const Point2 center{(labels.width - 1) / 2.0, (labels.height - 1) / 2.0};
    const double half_diag = std::max(norm(center), 1e-12);

    std::vector<ComponentScore> scores;
    std::size_t largest = 0;
    for (int k = 1; k <= labels.count; ++k) {
        const std::size_t area = labels.areas[k - 1];
        const double frac = static_cast<double>(area) / image_area;
        if (frac < cfg.min_area_frac || frac > cfg.max_area_frac) continue;
        const BinaryMask comp = component_mask(labels, k);
        const double residual = ellipse_residual(comp);
        if (residual > cfg.max_ellipse_residual) {
            spdlog::debug("component {} rejected: ellipse residual {:.3f}", k, residual);
            continue;
        }
        ComponentScore s;
        s.label = k;
        s.area = area;
        s.centroid = mask_moments(comp).centroid;
        s.shape_prior = std::clamp(1.0 - residual, 0.0, 1.0);
        s.centrality_prior = std::clamp(1.0 - norm(s.centroid - center) / half_diag, 0.0, 1.0);
        largest = std::max(largest, area);
        scores.push_back(s);
    }
    for (ComponentScore& s : scores) {
        s.area_prior = static_cast<double>(s.area) / static_cast<double>(largest);
        s.total = cfg.area_weight * s.area_prior + cfg.shape_weight * s.shape_prior +
                  cfg.centrality_weight * s.centrality_prior;
    }
    return scores;
}

HeadCrop generate_pseudo_mask(const RasterImage& image, const PriorConfig& cfg) {
    cfg.validate();
    if (image.empty()) throw Error(ErrorCode::EmptyInput, "empty image");

    const RasterImage blurred = gaussian_blur(to_luma(image), cfg.blur_sigma);
    const auto [lo, hi] = std::minmax_element(blurred.data.begin(), blurred.data.end());
    if (*hi - *lo <= 1e-9) throw Error(ErrorCode::NoComponentFound, "image has no contrast");
    const double t = otsu_threshold(blurred.data);

    BinaryMask bright(image.width, image.height);
    for (std::size_t i = 0; i < blurred.data.size(); ++i) bright.data[i] = blurred.data[i] >= t ? 1 : 0;
    BinaryMask dark = bright;
    for (auto& v : dark.data) v = 1 - v;

    const double total = static_cast<double>(bright.data.size());
    const double bright_frac = static_cast<double>(bright.count()) / total;
    auto in_range = [&](double f) { return f >= cfg.min_area_frac && f <= cfg.max_area_frac; };
    // in-range polarity first, otherwise the sparser one first
    std::array<const BinaryMask*, 2> order{&bright, &dark};
    const bool bright_ok = in_range(bright_frac);
    const bool dark_ok = in_range(1.0 - bright_frac);
    if ((dark_ok && !bright_ok) || (bright_ok == dark_ok && bright_frac > 0.5)) std::swap(order[0], order[1]);

    for (const BinaryMask* polarity : order) {
        const ComponentLabels labels = label_components(*polarity);
        const std::vector<ComponentScore> scores = score_components(labels, cfg);
        if (scores.empty()) continue;

        const auto better = [](const ComponentScore& a, const ComponentScore& b) {
            if (a.total != b.total) return a.total > b.total;
            if (a.area != b.area) return a.area > b.area;
            if (a.centroid.y != b.centroid.y) return a.centroid.y < b.centroid.y;
            return a.centroid.x < b.centroid.x;
        };
        const ComponentScore best = *std::min_element(scores.begin(), scores.end(), better);

        int x0 = image.width, y0 = image.height, x1 = -1, y1 = -1;
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                if (labels.labels[static_cast<std::size_t>(y) * image.width + x] != best.label) continue;
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        }
        const int mx = static_cast<int>(std::lround(cfg.crop_margin_frac * (x1 - x0 + 1)));
        const int my = static_cast<int>(std::lround(cfg.crop_margin_frac * (y1 - y0 + 1)));
        x0 = std::max(0, x0 - mx);
        y0 = std::max(0, y0 - my);
        x1 = std::min(image.width - 1, x1 + mx);
        y1 = std::min(image.height - 1, y1 + my);

        HeadCrop crop;
        crop.source_bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
        crop.image = RasterImage(crop.source_bbox.w, crop.source_bbox.h, image.channels);
        crop.pseudo_mask = BinaryMask(crop.source_bbox.w, crop.source_bbox.h);
        for (int y = 0; y < crop.source_bbox.h; ++y) {
            for (int x = 0; x < crop.source_bbox.w; ++x) {
                for (int c = 0; c < image.channels; ++c) crop.image.at(x, y, c) = image.at(x0 + x, y0 + y, c);
                crop.pseudo_mask.set(
                    x, y, labels.labels[static_cast<std::size_t>(y0 + y) * image.width + (x0 + x)] == best.label);
            }
        }
        crop.score = best.total;
        if (label_components(crop.pseudo_mask).count != 1) {
            throw Error(ErrorCode::MultipleComponents, "selected component is not 8-connected");
        }
        return crop;
    }
    throw Error(ErrorCode::NoComponentFound, "no component within the area window");
}

HeadCrop right_align(const HeadCrop& crop) {
    const MaskMoments moments = mask_moments(crop.pseudo_mask);
    const double phi = moments.principal_angle;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const Point2 g = moments.centroid;

    // forward rotation by -phi about the centroid, applied to the pixel corners
    double min_u = 0.0, max_u = 0.0, min_v = 0.0, max_v = 0.0;
    for (int y = 0; y < crop.pseudo_mask.height; ++y) {
        for (int x = 0; x < crop.pseudo_mask.width; ++x) {
            if (!crop.pseudo_mask.at(x, y)) continue;
            for (const Point2 corner : {Point2{-0.5, -0.5}, Point2{0.5, -0.5}, Point2{-0.5, 0.5}, Point2{0.5, 0.5}}) {
                const Point2 d = Point2{static_cast<double>(x), static_cast<double>(y)} + corner - g;
                const double u = c * d.x + s * d.y;
                const double v = -s * d.x + c * d.y;
                min_u = std::min(min_u, u);
                max_u = std::max(max_u, u);
                min_v = std::min(min_v, v);
                max_v = std::max(max_v, v);
            }
        }
    }
    const double ext_u = max_u - min_u;
    const double ext_v = max_v - min_v;
    const int out_w = static_cast<int>(std::ceil(ext_u * (1.0 + 2.0 * kAlignMarginFrac) + 2.0 * kAlignMarginPx));
    const int out_h = static_cast<int>(std::ceil(ext_v * (1.0 + 2.0 * kAlignMarginFrac) + 2.0 * kAlignMarginPx));

    // centroid lands at an integer offset from its source position, so a zero
    // rotation is a pure pixel shift
    const double gx_out = g.x + std::round((out_w - 1) / 2.0 - 0.5 * (min_u + max_u) - g.x);
    const double gy_out = g.y + std::round((out_h - 1) / 2.0 - 0.5 * (min_v + max_v) - g.y);
    const bool flip = gx_out < (out_w - 1) / 2.0 - kFlipTolerancePx;

    // dst -> src: undo the optional mirror, then rotate by +phi around the centroid
    AffineMap map;
    const double mirror = flip ? -1.0 : 1.0;
    const double ux0 = flip ? (out_w - 1) - gx_out : -gx_out;
    // u = mirror * x + ux0 ; v = y - gy_out
    map.a00 = c * mirror;
    map.a01 = -s;
    map.a10 = s * mirror;
    map.a11 = c;
    map.tx = g.x + c * ux0 + s * gy_out;
    map.ty = g.y + s * ux0 - c * gy_out;

    HeadCrop out;
    out.source_bbox = crop.source_bbox;
    out.score = crop.score;
    out.image = warp_bilinear(crop.image, map, out_w, out_h, Border::Replicate);

    RasterImage soft(crop.pseudo_mask.width, crop.pseudo_mask.height);
    for (std::size_t i = 0; i < soft.data.size(); ++i) soft.data[i] = crop.pseudo_mask.data[i];
    const RasterImage warped = warp_bilinear(soft, map, out_w, out_h);
    BinaryMask mask(out_w, out_h);
    for (std::size_t i = 0; i < mask.data.size(); ++i) mask.data[i] = warped.data[i] >= 0.5 ? 1 : 0;
    out.pseudo_mask = largest_component(mask);
    if (out.pseudo_mask.count() == 0) throw Error(ErrorCode::EmptyMask, "alignment lost the mask");

    out.rotation_deg = crop.rotation_deg - phi * 180.0 / std::numbers::pi;
    out.flipped = crop.flipped != flip;
    return out;
}

}  // namespace morphkit
