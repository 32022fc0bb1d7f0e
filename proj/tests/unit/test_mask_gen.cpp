#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "morphkit/ellipse.hpp"
#include "morphkit/error.hpp"
#include "morphkit/mask_gen.hpp"
#include "morphkit/synth.hpp"

using namespace morphkit;

namespace {

BinaryMask crop_of(const BinaryMask& m, const BoundingBox& b) {
    BinaryMask out(b.w, b.h);
    for (int y = 0; y < b.h; ++y)
        for (int x = 0; x < b.w; ++x) out.set(x, y, m.at(b.x + x, b.y + y));
    return out;
}

RasterImage image_from_mask(const BinaryMask& m, double fg, double bg) {
    RasterImage img(m.width, m.height, 1, bg);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) img.at(x, y) = fg;
    return img;
}

HeadCrop crop_from_mask(const BinaryMask& m) {
    HeadCrop c;
    c.image = image_from_mask(m, 0.8, 0.2);
    c.pseudo_mask = m;
    c.source_bbox = {0, 0, m.width, m.height};
    return c;
}

BinaryMask ellipse_mask(const Ellipse& e, int w, int h) {
    return synth::threshold_mask(synth::ellipse_sdf(e), 0.0, w, h);
}

}  // namespace

TEST_CASE("prior config validation") {
    PriorConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.min_area_frac = 0.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.shape_weight = 0.5;  // weights no longer sum to one
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("otsu separates a bimodal sample") {
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(0.1 + 0.001 * (i % 10));
    for (int i = 0; i < 50; ++i) v.push_back(0.9 - 0.001 * (i % 10));
    const double t = otsu_threshold(v);
    // foreground is v >= t, so the cut must sit above every low sample
    CHECK(t > 0.109);
    CHECK(t <= 0.891);
}

TEST_CASE("bright ellipse on a noisy background") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        synth::RenderOptions opts;
        opts.width = 96;
        opts.height = 80;
        opts.seed = rng();
        const synth::EllipseCase sc = synth::random_ellipse_case(rng, opts, 0.0, 0.0);
        const HeadCrop crop = generate_pseudo_mask(sc.image);
        CHECK(crop.image.width == crop.pseudo_mask.width);
        CHECK(label_components(crop.pseudo_mask).count == 1);
        CHECK(iou(crop.pseudo_mask, crop_of(sc.truth, crop.source_bbox)) >= 0.9);
        CHECK(std::isfinite(crop.score));
    }
}

TEST_CASE("blank image has no component") {
    try {
        generate_pseudo_mask(RasterImage(32, 32, 1, 0.4));
        FAIL("expected NoComponentFound");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoComponentFound);
    }
}

TEST_CASE("central blob beats a small corner blob") {
    BinaryMask m(80, 80);
    const BinaryMask head = ellipse_mask({{40, 40}, 12, 8, 0.2}, 80, 80);
    const BinaryMask corner = ellipse_mask({{11, 11}, 9, 8, 0.0}, 80, 80);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = head.data[i] | corner.data[i];

    // hand scores: the centered blob wins on area and centrality, ties on shape
    const ComponentLabels labels = label_components(m);
    const auto scores = score_components(labels, PriorConfig{});
    REQUIRE(scores.size() == 2);
    const auto& a = scores[0].area > scores[1].area ? scores[0] : scores[1];
    const auto& b = scores[0].area > scores[1].area ? scores[1] : scores[0];
    CHECK(a.area_prior == 1.0);
    CHECK(b.area_prior == doctest::Approx(static_cast<double>(b.area) / a.area));
    CHECK(a.centrality_prior > b.centrality_prior);
    CHECK(a.total > b.total);

    const HeadCrop crop = generate_pseudo_mask(image_from_mask(m, 0.9, 0.1));
    CHECK(crop.source_bbox.x > 16);
    CHECK(crop.pseudo_mask.count() == head.count());
}

TEST_CASE("ellipse residual") {
    CHECK(ellipse_residual(ellipse_mask({{30, 30}, 15, 9, 0.4}, 60, 60)) < 0.1);
    BinaryMask cross(40, 40);
    for (int k = 5; k < 35; ++k) {
        cross.set(k, 20, true);
        cross.set(20, k, true);
    }
    CHECK(ellipse_residual(cross) > ellipse_residual(ellipse_mask({{20, 20}, 12, 8, 0.0}, 40, 40)));
}

TEST_CASE("moments of a rotated ellipse") {
    const double angle = 30.0 * std::numbers::pi / 180.0;
    const MaskMoments mm = mask_moments(ellipse_mask({{32.3, 30.6}, 18, 9, angle}, 64, 64));
    CHECK(mm.centroid.x == doctest::Approx(32.3).epsilon(0.01));
    CHECK(mm.centroid.y == doctest::Approx(30.6).epsilon(0.01));
    CHECK(mm.principal_angle == doctest::Approx(angle).epsilon(0.02));
    CHECK_THROWS_AS(mask_moments(BinaryMask(5, 5)), Error);
}

TEST_CASE("right_align of a horizontal symmetric ellipse is a fixed point") {
    const HeadCrop out = right_align(crop_from_mask(ellipse_mask({{32, 24}, 18, 10, 0.0}, 64, 48)));
    CHECK(std::abs(out.rotation_deg) < 1.0);
    CHECK_FALSE(out.flipped);
    CHECK(out.pseudo_mask.count() == ellipse_mask({{32, 24}, 18, 10, 0.0}, 64, 48).count());
}

TEST_CASE("right_align undoes a 30 degree rotation") {
    const double angle = 30.0 * std::numbers::pi / 180.0;
    const HeadCrop out = right_align(crop_from_mask(ellipse_mask({{32, 32}, 18, 9, angle}, 64, 64)));
    CHECK(out.rotation_deg == doctest::Approx(-30.0).epsilon(1.0 / 30.0));
    const MaskMoments mm = mask_moments(out.pseudo_mask);
    CHECK(std::abs(mm.principal_angle) < 1.0 * std::numbers::pi / 180.0);
    CHECK(out.image.width > out.image.height);
}

TEST_CASE("mass left of center is mirrored to the right") {
    // big disc on the left, thin tail on the right
    BinaryMask m(80, 60);
    const BinaryMask body = ellipse_mask({{30, 30}, 12, 12, 0.0}, 80, 60);
    const BinaryMask tail = ellipse_mask({{46, 30}, 18, 4, 0.0}, 80, 60);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = body.data[i] | tail.data[i];
    const HeadCrop out = right_align(crop_from_mask(m));
    CHECK(out.flipped);
    const MaskMoments mm = mask_moments(out.pseudo_mask);
    CHECK(mm.centroid.x >= (out.pseudo_mask.width - 1) / 2.0 - 0.5);

    // the mirrored crop is already aligned: aligning again keeps it
    const HeadCrop again = right_align(out);
    CHECK(again.flipped);  // accumulated: flipped once, not twice
}

TEST_CASE("right_align rejects an empty mask") {
    CHECK_THROWS_AS(right_align(crop_from_mask(BinaryMask(10, 10))), Error);
}

TEST_CASE("ellipse fit recovers parameters") {
    const Ellipse e{{10, -4}, 7, 3, 0.6};
    std::vector<Point2> pts;
    for (int k = 0; k < 40; ++k) pts.push_back(e.point_at(2 * std::numbers::pi * k / 40));
    const auto fit = fit_ellipse(pts);
    REQUIRE(fit.has_value());
    CHECK(fit->center.x == doctest::Approx(10));
    CHECK(fit->center.y == doctest::Approx(-4));
    CHECK(fit->semi_major == doctest::Approx(7));
    CHECK(fit->semi_minor == doctest::Approx(3));
    CHECK(std::abs(std::sin(fit->angle - 0.6)) < 1e-6);  // angle is only defined modulo pi
    CHECK_FALSE(fit_ellipse(std::span(pts).first(5)).has_value());
}

TEST_CASE("point to ellipse distance") {
    const Ellipse e{{0, 0}, 5, 3, 0.0};
    CHECK(distance_to_ellipse(e, {8, 0}) == doctest::Approx(3));
    CHECK(distance_to_ellipse(e, {0, -7}) == doctest::Approx(4));
    CHECK(signed_distance_to_ellipse(e, {0, 0}) == doctest::Approx(-3));
    CHECK(distance_to_ellipse(e, e.point_at(1.1)) == doctest::Approx(0).epsilon(1e-9));
}
