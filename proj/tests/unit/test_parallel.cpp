#include <doctest.h>

#include <random>

#include <omp.h>

#include "morphkit/grbr.hpp"
#include "morphkit/imaging.hpp"
#include "morphkit/synth.hpp"
#include "oracles.hpp"

using namespace morphkit;

TEST_CASE("parallel gradient equals the serial reference bit for bit") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int threads : {1, 2, 4}) {
        omp_set_num_threads(threads);
        RasterImage img(97, 61);
        for (double& v : img.data) v = u(rng);
        CHECK(gradient_magnitude(img).magnitude == serial::gradient_magnitude(img).magnitude);
    }
}

TEST_CASE("exact closure DP is identical with any thread count") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const RefinementGraph g = oracle::random_graph(rng, 30, 7, 2, 1.0);
        RefinementParams p;
        p.n = g.n;
        p.m = g.m;
        p.s = g.s;
        p.c = g.c;
        p.exact_closure = true;
        const RefinedContour ref = serial::shortest_closed_path(g, p);
        for (int threads : {1, 3, 8}) {
            omp_set_num_threads(threads);
            const RefinedContour par = shortest_closed_path(g, p);
            CHECK(par.indices == ref.indices);
            CHECK(par.total_cost == ref.total_cost);
        }
    }
}

TEST_CASE("batch refinement matches the serial batch") {
    Rng rng(3);
    std::vector<HeadCrop> crops;
    for (int k = 0; k < 12; ++k) {
        synth::RenderOptions opts;
        opts.seed = rng();
        const synth::EllipseCase c = synth::random_ellipse_case(rng, opts, 1.0, 3.0);
        HeadCrop crop;
        crop.image = c.image;
        crop.pseudo_mask = c.pseudo_mask;
        crops.push_back(std::move(crop));
    }
    RefinementParams p;
    const auto ref = serial::refine_batch(crops, p);
    for (int workers : {1, 4}) {
        const auto par = refine_batch(crops, p, workers);
        REQUIRE(par.size() == ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k) {
            REQUIRE(par[k].outcome.has_value() == ref[k].outcome.has_value());
            if (!ref[k].outcome) continue;
            CHECK(par[k].outcome->mask == ref[k].outcome->mask);
            CHECK(par[k].outcome->path.indices == ref[k].outcome->path.indices);
        }
    }
}
