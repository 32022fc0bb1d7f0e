#include <doctest.h>

#include <cmath>
#include <random>

#include "morphkit/error.hpp"
#include "morphkit/imaging.hpp"
#include "oracles.hpp"

using namespace morphkit;

namespace {

RasterImage random_image(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RasterImage img(w, h);
    for (double& v : img.data) v = u(rng);
    return img;
}

}  // namespace

TEST_CASE("gradient of a constant image is zero") {
    const GradientField g = gradient_magnitude(RasterImage(9, 7, 1, 0.5));
    for (double v : g.magnitude) CHECK(v == 0.0);
}

TEST_CASE("unit vertical step gives magnitude 4 on the step") {
    RasterImage img(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 4; x < 8; ++x) img.at(x, y) = 1.0;
    const GradientField g = gradient_magnitude(img);
    CHECK(g.at(3, 4) == doctest::Approx(4.0));
    CHECK(g.at(4, 4) == doctest::Approx(4.0));
    CHECK(g.at(1, 4) == 0.0);
    // border rows replicate, so the top row still sees a pure horizontal step
    CHECK(g.at(3, 0) == doctest::Approx(4.0));
}

TEST_CASE("gradient matches the per-pixel Sobel oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const RasterImage img = random_image(rng, 5 + trial * 3, 4 + trial * 2);
        const GradientField g = gradient_magnitude(img);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) CHECK(g.at(x, y) == doctest::Approx(oracle::sobel_at(img, x, y)).epsilon(1e-12));
    }
}

TEST_CASE("checkerboard gradient is symmetric under 180 degree rotation") {
    RasterImage img(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) img.at(x, y) = ((x / 2 + y / 2) % 2) ? 1.0 : 0.0;
    const GradientField g = gradient_magnitude(img);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) CHECK(g.at(x, y) == doctest::Approx(g.at(7 - x, 7 - y)));
}

TEST_CASE("rgb input goes through luma") {
    RasterImage rgb(3, 3, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) {
            rgb.at(x, y, 0) = 1.0;
            rgb.at(x, y, 1) = 0.5;
        }
    const RasterImage luma = to_luma(rgb);
    CHECK(luma.channels == 1);
    CHECK(luma.at(1, 1) == doctest::Approx(0.299 + 0.587 * 0.5));
}

TEST_CASE("bilinear sampling") {
    GradientField f(2, 2);
    f.at(1, 0) = 1.0;
    f.at(1, 1) = 1.0;
    CHECK(sample_bilinear(f, 1.0, 0.0) == 1.0);
    CHECK(sample_bilinear(f, 0.5, 0.0) == doctest::Approx(0.5));
    CHECK(sample_bilinear(f, 0.25, 0.75) == doctest::Approx(0.25));
    CHECK(sample_bilinear(f, 1.0, 1.0) == 1.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GradientField r(6, 5);
    for (double& v : r.magnitude) v = u(rng);
    for (int k = 0; k < 200; ++k) {
        const double x = 5.0 * u(rng), y = 4.0 * u(rng);
        CHECK(sample_bilinear(r, x, y) == doctest::Approx(oracle::bilinear(r, x, y)).epsilon(1e-12));
    }
}

TEST_CASE("bilinear sampling outside the lattice") {
    GradientField f(4, 4, 2.0);
    CHECK_THROWS_AS(sample_bilinear(f, -0.01, 1.0), Error);
    CHECK_THROWS_AS(sample_bilinear(f, 1.0, 3.01), Error);
    CHECK(sample_bilinear_clamped(f, -5.0, 10.0) == 2.0);
    try {
        sample_bilinear(f, 4.0, 0.0);
        FAIL("expected OutOfBounds");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfBounds);
    }
}

TEST_CASE("square rasterizes to the pixels whose centers it covers") {
    const std::vector<Point2> square{{1, 1}, {4, 1}, {4, 4}, {1, 4}};
    const BinaryMask m = rasterize_polygon(square, 6, 6);
    CHECK(m == oracle::brute_rasterize(square, 6, 6));
    CHECK(m.count() == 9);
    CHECK(m.at(1, 1));
    CHECK(m.at(3, 3));
    CHECK_FALSE(m.at(4, 4));
}

TEST_CASE("degenerate polygons are rejected") {
    const std::vector<Point2> flat{{0, 0}, {2, 2}, {4, 4}};
    CHECK_THROWS_AS(rasterize_polygon(flat, 6, 6), Error);
    const std::vector<Point2> two{{0, 0}, {2, 2}};
    CHECK_THROWS_AS(rasterize_polygon(two, 6, 6), Error);
}

TEST_CASE("random polygons match the point-in-polygon oracle in either orientation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 3 + trial % 9;
        std::vector<Point2> poly;
        for (int i = 0; i < k; ++i) {
            // star-shaped around the center, sometimes non-convex
            const double th = 2 * M_PI * (i + 0.8 * u(rng)) / k;
            const double r = 3 + 9 * u(rng);
            poly.push_back({12 + r * std::cos(th), 11 + r * std::sin(th)});
        }
        const BinaryMask m = rasterize_polygon(poly, 24, 22);
        CHECK(m == oracle::brute_rasterize(poly, 24, 22));
        std::vector<Point2> rev(poly.rbegin(), poly.rend());
        CHECK(rasterize_polygon(rev, 24, 22) == m);
    }
}

TEST_CASE("components and iou") {
    BinaryMask m(10, 10);
    for (int y = 1; y < 4; ++y)
        for (int x = 1; x < 4; ++x) m.set(x, y, true);
    m.set(7, 7, true);
    m.set(8, 8, true);  // diagonal neighbours join under 8-connectivity
    const ComponentLabels labels = label_components(m);
    CHECK(labels.count == 2);
    CHECK(labels.areas[0] == 9);
    CHECK(labels.areas[1] == 2);
    CHECK(largest_component(m).count() == 9);
    CHECK(iou(m, m) == 1.0);
    CHECK(iou(m, largest_component(m)) == doctest::Approx(9.0 / 11.0));
    CHECK(largest_component(BinaryMask(4, 4)).count() == 0);
}

TEST_CASE("identity warp reproduces the image") {
    std::mt19937_64 rng(5);
    const RasterImage img = random_image(rng, 7, 6);
    const RasterImage out = warp_bilinear(img, AffineMap{}, 7, 6);
    for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(out.data[i] == doctest::Approx(img.data[i]));

    BinaryMask m(7, 6);
    m.set(2, 3, true);
    CHECK(warp_nearest(m, AffineMap{}, 7, 6) == m);
}

TEST_CASE("warp borders") {
    RasterImage img(3, 3, 1, 0.7);
    AffineMap shift;
    shift.tx = 10.0;
    CHECK(warp_bilinear(img, shift, 3, 3, Border::Constant, 0.0).at(0, 0) == 0.0);
    CHECK(warp_bilinear(img, shift, 3, 3, Border::Replicate).at(0, 0) == doctest::Approx(0.7));
}

TEST_CASE("gaussian blur keeps constants and mass") {
    const RasterImage flat = gaussian_blur(RasterImage(9, 9, 1, 0.3), 1.5);
    for (double v : flat.data) CHECK(v == doctest::Approx(0.3));
    RasterImage spot(21, 21);
    spot.at(10, 10) = 1.0;
    const RasterImage b = gaussian_blur(spot, 1.0);
    double sum = 0;
    for (double v : b.data) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(b.at(10, 10) < 1.0);
}
