// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "morphkit/grbr.hpp"
#include "morphkit/synth.hpp"

using namespace morphkit;

namespace {

RasterImage noise_image(int size) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RasterImage img(size, size);
    for (double& v : img.data) v = u(rng);
    return img;
}

RefinementGraph graph_for_bench(int n, int m, int s, double c) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 0.0);
    RefinementGraph g;
    g.n = n;
    g.m = m;
    g.s = s;
    g.c = c;
    g.vertex_cost.resize(static_cast<std::size_t>(n + 1) * m);
    g.geometry.resize(g.vertex_cost.size());
    g.clamped.assign(g.vertex_cost.size(), 0);
    for (int j = 0; j <= n; ++j) {
        const double th = -2 * 3.141592653589793 * (j % n) / n;
        for (int i = 0; i < m; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * m + i;
            const double r = 20 + 0.7 * (i - m / 2);
            g.geometry[idx] = {32 + r * std::cos(th), 32 + r * std::sin(th)};
            g.vertex_cost[idx] = j == n ? g.vertex_cost[i] : u(rng);
        }
    }
    return g;
}

std::vector<HeadCrop> crops_for_bench(int count) {
    Rng rng(3);
    std::vector<HeadCrop> crops;
    for (int k = 0; k < count; ++k) {
        synth::RenderOptions opts;
        const synth::EllipseCase c = synth::random_ellipse_case(rng, opts, 1.0, 3.0);
        HeadCrop crop;
        crop.image = c.image;
        crop.pseudo_mask = c.pseudo_mask;
        crops.push_back(std::move(crop));
    }
    return crops;
}

void BM_GradientSerial(benchmark::State& state) {
    const RasterImage img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(serial::gradient_magnitude(img));
}

void BM_GradientParallel(benchmark::State& state) {
    const RasterImage img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gradient_magnitude(img));
}

RefinementParams exact_params(const RefinementGraph& g) {
    RefinementParams p;
    p.n = g.n;
    p.m = g.m;
    p.s = g.s;
    p.c = g.c;
    p.exact_closure = true;
    return p;
}

void BM_ExactClosureSerial(benchmark::State& state) {
    const RefinementGraph g = graph_for_bench(100, static_cast<int>(state.range(0)), 2, 1.0);
    const RefinementParams p = exact_params(g);
    for (auto _ : state) benchmark::DoNotOptimize(serial::shortest_closed_path(g, p));
}

void BM_ExactClosureParallel(benchmark::State& state) {
    const RefinementGraph g = graph_for_bench(100, static_cast<int>(state.range(0)), 2, 1.0);
    const RefinementParams p = exact_params(g);
    for (auto _ : state) benchmark::DoNotOptimize(shortest_closed_path(g, p));
}

void BM_RefineBatchSerial(benchmark::State& state) {
    const auto crops = crops_for_bench(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(serial::refine_batch(crops, {}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RefineBatchParallel(benchmark::State& state) {
    const auto crops = crops_for_bench(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(refine_batch(crops, {}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_GradientSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GradientParallel)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_ExactClosureSerial)->Arg(7)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactClosureParallel)->Arg(7)->Arg(15)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RefineBatchSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RefineBatchParallel)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
