#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "morphkit/contour.hpp"
#include "morphkit/ellipse.hpp"
#include "morphkit/error.hpp"
#include "morphkit/grbr.hpp"
#include "morphkit/synth.hpp"
#include "oracles.hpp"

using namespace morphkit;

namespace {

RefinementParams params_for(const RefinementGraph& g, bool exact) {
    RefinementParams p;
    p.n = g.n;
    p.m = g.m;
    p.s = g.s;
    p.c = g.c;
    p.exact_closure = exact;
    return p;
}

NormalFan circle_fan(int n, int m, double half_len, int size) {
    const double c = size / 2.0, r = size / 4.0;
    SampledContour s;
    for (int k = 0; k < n; ++k) {
        const double th = -2 * std::numbers::pi * k / n - std::numbers::pi / 2;
        s.points.push_back({c + r * std::cos(th), c + r * std::sin(th)});
    }
    return build_normal_fan(s, m, half_len, size, size);
}

}  // namespace

TEST_CASE("concavity penalty") {
    // left turn in image coordinates (cross > 0) is concave for these contours
    CHECK(concavity_penalty({0, 0}, {1, 0}, {1, 1}, 2.0) == doctest::Approx(std::numbers::pi));
    CHECK(concavity_penalty({0, 0}, {1, 0}, {1, -1}, 2.0) == 0.0);
    CHECK(concavity_penalty({0, 0}, {1, 0}, {2, 0}, 2.0) == 0.0);
    CHECK(concavity_penalty({0, 0}, {0, 0}, {1, 1}, 2.0) == 0.0);
    CHECK(concavity_penalty({0, 0}, {1, 0}, {1, 1}, 0.0) == 0.0);
    for (double a : {0.1, 0.7, 1.3, 2.9}) {
        const Point2 next{1 + std::cos(a), std::sin(a)};
        CHECK(concavity_penalty({0, 0}, {1, 0}, next, 1.0) == doctest::Approx(oracle::concave_turn({0, 0}, {1, 0}, next)));
    }
}

TEST_CASE("parameter validation") {
    RefinementParams p;
    CHECK_NOTHROW(p.validate());
    p.m = 14;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.n = 3;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.s = p.m;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.c = -0.1;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("graph over a constant field") {
    const NormalFan fan = circle_fan(12, 5, 2.0, 40);
    RefinementParams p;
    p.n = 12;
    p.m = 5;
    const RefinementGraph g = build_graph(GradientField(40, 40, 0.75), fan, p);
    for (double v : g.vertex_cost) CHECK(v == -0.75);
    for (int i = 0; i < g.m; ++i) {
        CHECK(g.point(g.n, i) == g.point(0, i));
        CHECK(g.cost(g.n, i) == g.cost(0, i));
    }
    p.n = 13;
    CHECK_THROWS_AS(build_graph(GradientField(40, 40, 0.75), fan, p), Error);
    p.n = 12;
    CHECK_THROWS_AS(build_graph(GradientField(30, 40, 0.75), fan, p), Error);
}

TEST_CASE("clamped fan points sample the border") {
    SampledContour s;
    for (int k = 0; k < 8; ++k) {
        const double th = -2 * std::numbers::pi * k / 8;
        s.points.push_back({2 + 2 * std::cos(th), 10 + 2 * std::sin(th)});
    }
    const NormalFan fan = build_normal_fan(s, 5, 4.0, 20, 20);
    GradientField f(20, 20);
    for (int y = 0; y < 20; ++y) f.at(0, y) = 3.0;
    RefinementParams p;
    p.n = 8;
    p.m = 5;
    const RefinementGraph g = build_graph(f, fan, p);
    bool seen = false;
    for (int i = 0; i < 5; ++i) {
        if (g.clamped[4 * 5 + i] && g.point(4, i).x == 0.0) {
            CHECK(g.cost(4, i) == -3.0);
            seen = true;
        }
    }
    CHECK(seen);
}

TEST_CASE("field peaking on the middle candidate") {
    const int size = 60;
    const NormalFan fan = circle_fan(16, 5, 3.0, size);
    // gradient ring exactly at the contour radius
    GradientField f(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) f.at(x, y) = std::exp(-std::pow(std::hypot(x - 30.0, y - 30.0) - 15.0, 2));
    RefinementParams p;
    p.n = 16;
    p.m = 5;
    const RefinementGraph g = build_graph(f, fan, p);
    for (int j = 0; j < g.n; ++j) {
        int best = 0;
        for (int i = 1; i < g.m; ++i)
            if (g.cost(j, i) < g.cost(j, best)) best = i;
        CHECK(best == 2);
    }
    const RefinedContour path = shortest_closed_path(g, p);
    for (int idx : path.indices) CHECK(idx == 2);
}

TEST_CASE("with c=0 and s=m-1 the path is the column-wise argmin") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const RefinementGraph g = oracle::random_graph(rng, 10, 5, 4, 0.0);
        for (bool exact : {false, true}) {
            const RefinedContour r = shortest_closed_path(g, params_for(g, exact));
            for (int j = 0; j < g.n; ++j) {
                int best = 0;
                for (int i = 1; i < g.m; ++i)
                    if (g.cost(j, i) < g.cost(j, best)) best = i;
                CHECK(r.indices[j] == best);
            }
        }
    }
}

TEST_CASE("n=6 m=4 s=1 c=0.7 matches brute force") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const RefinementGraph g = oracle::random_graph(rng, 6, 4, 1, 0.7);
        const auto brute = oracle::brute_force_closed_path(g);
        const RefinedContour dp = shortest_closed_path(g, params_for(g, true));
        const RefinedContour en = enumerate_optimal(g, params_for(g, true));
        CHECK(dp.total_cost == doctest::Approx(brute.cost).epsilon(1e-12));
        CHECK(en.total_cost == doctest::Approx(brute.cost).epsilon(1e-12));
        CHECK(closed_path_cost(g, dp.indices) == doctest::Approx(dp.total_cost).epsilon(1e-12));
        if (brute.optimal_count == 1) {
            CHECK(dp.indices == brute.indices);
            CHECK(en.indices == brute.indices);
        }
    }
}

TEST_CASE("s=0 keeps one index everywhere") {
    std::mt19937_64 rng(5);
    const RefinementGraph g = oracle::random_graph(rng, 8, 5, 0, 0.0);
    const RefinedContour r = shortest_closed_path(g, params_for(g, true));
    double best = 1e300;
    int best_i = -1;
    for (int i = 0; i < g.m; ++i) {
        double sum = 0;
        for (int j = 0; j < g.n; ++j) sum += g.cost(j, i);
        if (sum < best) best = sum, best_i = i;
    }
    for (int idx : r.indices) CHECK(idx == best_i);
    CHECK(r.total_cost == doctest::Approx(best));

    const RefinementGraph gp = oracle::random_graph(rng, 8, 5, 0, 1.0);
    const RefinedContour rp = shortest_closed_path(gp, params_for(gp, false));
    for (int idx : rp.indices) CHECK(idx == rp.indices[0]);
    CHECK(rp.total_cost == doctest::Approx(oracle::brute_force_closed_path(gp).cost));
}

TEST_CASE("enumeration refuses large instances") {
    std::mt19937_64 rng(5);
    const RefinementGraph g = oracle::random_graph(rng, 9, 3, 1, 1.0);
    try {
        enumerate_optimal(g, params_for(g, true));
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooLarge);
    }
}

TEST_CASE("graph and params must agree") {
    std::mt19937_64 rng(5);
    const RefinementGraph g = oracle::random_graph(rng, 6, 3, 1, 1.0);
    RefinementParams p = params_for(g, true);
    p.c = 2.0;
    CHECK_THROWS_AS(shortest_closed_path(g, p), Error);
}

TEST_CASE("approximate closure is never better than exact and stays feasible") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const RefinementGraph g = oracle::random_graph(rng, 7, 5, 1, 1.5);
        const RefinedContour a = shortest_closed_path(g, params_for(g, false));
        const RefinedContour e = shortest_closed_path(g, params_for(g, true));
        CHECK_FALSE(a.exact);
        CHECK(e.exact);
        CHECK(satisfies_band(a.indices, g.s));
        CHECK(a.total_cost >= e.total_cost - 1e-12);
        CHECK(closed_path_cost(g, a.indices) == doctest::Approx(a.total_cost).epsilon(1e-12));
    }
}

TEST_CASE("refined contour follows a strong ellipse ring") {
    const Ellipse e{{32, 32}, 18, 11, 0.3};
    synth::RenderOptions opts;
    opts.noise_sigma = 0.0;
    const RasterImage img = synth::render(synth::ellipse_sdf(e), opts);
    const BinaryMask dilated = synth::threshold_mask(synth::ellipse_sdf(e), 2.5, 64, 64);
    const RefinementOutcome out = refine(img, dilated, {});
    double sum = 0;
    // polygon is in raster coordinates; the ellipse lives on the pixel-index lattice
    for (const Point2& p : out.polygon) sum += distance_to_ellipse(e, p - Point2{0.5, 0.5});
    CHECK(sum / out.polygon.size() < 1.0);
    CHECK(out.path.indices.size() == 100);
}

TEST_CASE("refine fixed point and dilation recovery") {
    const Ellipse e{{31.7, 32.2}, 17, 11, -0.4};
    synth::RenderOptions opts;
    opts.seed = 4;
    const RasterImage img = synth::render(synth::ellipse_sdf(e), opts);
    const BinaryMask truth = synth::threshold_mask(synth::ellipse_sdf(e), 0.0, 64, 64);

    // 15 candidates over +-4 px are 0.57 px apart; snapping every sample to its
    // nearest candidate already caps IoU near 0.968 on this ellipse
    CHECK(iou(refine(img, truth, {}).mask, truth) >= 0.94);

    const BinaryMask dilated = synth::threshold_mask(synth::ellipse_sdf(e), 3.0, 64, 64);
    const BinaryMask refined = refine(img, dilated, {}).mask;
    CHECK(iou(refined, truth) >= 0.95);
    CHECK(iou(refined, truth) > iou(dilated, truth));
}

TEST_CASE("refine rejects an empty mask") {
    try {
        refine(RasterImage(32, 32), BinaryMask(32, 32), {});
        FAIL("expected EmptyMask");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyMask);
    }
}

TEST_CASE("batch reports per-item errors in order") {
    const Ellipse e{{32, 32}, 16, 10, 0.0};
    HeadCrop good;
    good.image = synth::render(synth::ellipse_sdf(e), {});
    good.pseudo_mask = synth::threshold_mask(synth::ellipse_sdf(e), 1.0, 64, 64);
    HeadCrop bad;
    bad.image = RasterImage(64, 64);
    bad.pseudo_mask = BinaryMask(64, 64);
    const std::vector<HeadCrop> crops{good, bad, good};
    const auto results = refine_batch(crops, {}, 2);
    REQUIRE(results.size() == 3);
    CHECK(results[0].outcome.has_value());
    CHECK_FALSE(results[1].outcome.has_value());
    CHECK(results[1].error.find("EmptyMask") != std::string::npos);
    CHECK(results[2].outcome->mask == results[0].outcome->mask);
}
