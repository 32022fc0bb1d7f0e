#include "morphkit/grbr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <omp.h>

#include "morphkit/error.hpp"

namespace morphkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// pen(j, b, a, c): penalty at candidate b of column j when the path arrives
// from candidate a of column j-1 and leaves to candidate c of column j+1
// (columns cyclic). Only band-admissible a and c are stored.
class PenaltyTable {
public:
    PenaltyTable(const RefinementGraph& g) : n_(g.n), m_(g.m), s_(g.s), w_(2 * g.s + 1) {
        values_.assign(static_cast<std::size_t>(n_) * m_ * w_ * w_, 0.0);
        if (g.c == 0.0) return;
        for (int j = 0; j < n_; ++j) {
            const int jp = (j + n_ - 1) % n_;
            const int jn = j + 1;  // column n is the duplicate of column 0
            for (int b = 0; b < m_; ++b) {
                for (int ka = 0; ka < w_; ++ka) {
                    const int a = b + ka - s_;
                    if (a < 0 || a >= m_) continue;
                    for (int kc = 0; kc < w_; ++kc) {
                        const int c = b + kc - s_;
                        if (c < 0 || c >= m_) continue;
                        values_[slot(j, b, ka, kc)] = concavity_penalty(g.point(jp, a), g.point(j, b), g.point(jn, c), g.c);
                    }
                }
            }
        }
    }

    double at(int j, int b, int a, int c) const { return values_[slot(j, b, a - b + s_, c - b + s_)]; }

private:
    std::size_t slot(int j, int b, int ka, int kc) const {
        return ((static_cast<std::size_t>(j) * m_ + b) * w_ + ka) * w_ + kc;
    }

    int n_, m_, s_, w_;
    std::vector<double> values_;
};

struct PathResult {
    double cost{kInf};
    std::vector<int> indices;
};

// DP over states (column j, current index b, previous index a) with
// |a-b| <= s. A fixed start pins columns 0 and 1 to (i0, i1); otherwise
// every admissible start is seeded and the origin is carried along.
class ClosedPathSolver {
public:
    ClosedPathSolver(const RefinementGraph& g, const PenaltyTable& pen)
        : g_(g), pen_(pen), w_(2 * g.s + 1),
          dist_(static_cast<std::size_t>(g.n) * g.m * w_, kInf),
          back_(dist_.size(), -1),
          origin_(dist_.size(), -1) {}

    PathResult solve(int fixed_i0, int fixed_i1) {
        const int n = g_.n, m = g_.m, s = g_.s;
        std::fill(dist_.begin(), dist_.end(), kInf);
        for (int b = 0; b < m; ++b) {
            for (int k = 0; k < w_; ++k) {
                const int a = b + k - s;
                if (a < 0 || a >= m) continue;
                if (fixed_i0 >= 0 && (a != fixed_i0 || b != fixed_i1)) continue;
                const std::size_t st = state(1, b, k);
                dist_[st] = g_.cost(0, a) + g_.cost(1, b);
                origin_[st] = a * m + b;
            }
        }
        for (int j = 1; j + 1 < n; ++j) {
            for (int c = 0; c < m; ++c) {
                for (int kc = 0; kc < w_; ++kc) {
                    const int b = c + kc - s;
                    if (b < 0 || b >= m) continue;
                    double best = kInf;
                    int best_k = -1;
                    for (int k = 0; k < w_; ++k) {
                        const int a = b + k - s;
                        if (a < 0 || a >= m) continue;
                        const double d = dist_[state(j, b, k)];
                        if (d == kInf) continue;
                        const double cand = d + pen_.at(j, b, a, c);
                        if (cand < best) {
                            best = cand;
                            best_k = k;
                        }
                    }
                    if (best_k < 0) continue;
                    const std::size_t st = state(j + 1, c, kc);
                    dist_[st] = best + g_.cost(j + 1, c);
                    back_[st] = best_k;
                    origin_[st] = origin_[state(j, b, best_k)];
                }
            }
        }

        PathResult result;
        int end_b = -1, end_k = -1;
        for (int b = 0; b < m; ++b) {
            for (int k = 0; k < w_; ++k) {
                const int a = b + k - s;
                if (a < 0 || a >= m) continue;
                const std::size_t st = state(n - 1, b, k);
                if (dist_[st] == kInf) continue;
                const int i0 = origin_[st] / m;
                const int i1 = origin_[st] % m;
                if (std::abs(i0 - b) > s) continue;
                const double total = dist_[st] + pen_.at(n - 1, b, a, i0) + pen_.at(0, i0, b, i1);
                if (total < result.cost) {
                    result.cost = total;
                    end_b = b;
                    end_k = k;
                }
            }
        }
        if (end_b < 0) return result;

        result.indices.assign(static_cast<std::size_t>(n), 0);
        int b = end_b, k = end_k;
        for (int j = n - 1; j >= 1; --j) {
            result.indices[j] = b;
            const int a = b + k - s;
            if (j == 1) {
                result.indices[0] = a;
                break;
            }
            const int prev_k = back_[state(j, b, k)];
            b = a;
            k = prev_k;
        }
        return result;
    }

private:
    std::size_t state(int j, int b, int k) const { return (static_cast<std::size_t>(j) * g_.m + b) * w_ + k; }

    const RefinementGraph& g_;
    const PenaltyTable& pen_;
    int w_;
    std::vector<double> dist_;
    std::vector<int> back_;
    std::vector<int> origin_;
};

std::vector<std::pair<int, int>> start_pairs(const RefinementGraph& g) {
    std::vector<std::pair<int, int>> pairs;
    for (int i0 = 0; i0 < g.m; ++i0) {
        for (int i1 = std::max(0, i0 - g.s); i1 <= std::min(g.m - 1, i0 + g.s); ++i1) pairs.emplace_back(i0, i1);
    }
    return pairs;
}

RefinedContour to_contour(const RefinementGraph& g, PathResult&& r, bool exact) {
    if (r.indices.empty()) throw Error(ErrorCode::BadParams, "no feasible closed path");
    RefinedContour out;
    out.indices = std::move(r.indices);
    out.total_cost = r.cost;
    out.exact = exact;
    out.closure_index = out.indices[0];
    out.points.reserve(out.indices.size());
    for (int j = 0; j < g.n; ++j) out.points.push_back(g.point(j, out.indices[j]));
    return out;
}

// reduction in start-pair order keeps the result independent of scheduling
RefinedContour reduce_exact(const RefinementGraph& g, std::vector<PathResult>& per_pair) {
    std::size_t best = per_pair.size();
    for (std::size_t p = 0; p < per_pair.size(); ++p) {
        if (per_pair[p].indices.empty()) continue;
        if (best == per_pair.size() || per_pair[p].cost < per_pair[best].cost) best = p;
    }
    if (best == per_pair.size()) throw Error(ErrorCode::BadParams, "no feasible closed path");
    return to_contour(g, std::move(per_pair[best]), true);
}

// The fan needs odd m for its center point; a bare graph does not.
void check_graph(const RefinementGraph& g, const RefinementParams& params) {
    if (params.n < 4) throw Error(ErrorCode::BadN, "n must be at least 4");
    if (params.m < 2) throw Error(ErrorCode::BadM, "m must be at least 2");
    if (params.s < 0 || params.s > params.m - 1) throw Error(ErrorCode::BadParams, "s must lie in [0, m-1]");
    if (params.c < 0.0) throw Error(ErrorCode::BadParams, "c must be non-negative");
    if (g.vertex_cost.size() != static_cast<std::size_t>(g.n + 1) * g.m || g.geometry.size() != g.vertex_cost.size()) {
        throw Error(ErrorCode::DimensionMismatch, "graph storage does not match (n+1) x m");
    }
    if (g.n != params.n || g.m != params.m || g.s != params.s || g.c != params.c) {
        throw Error(ErrorCode::DimensionMismatch, "graph does not match refinement params");
    }
}

RefinedContour approximate_path(const RefinementGraph& g, const PenaltyTable& pen) {
    ClosedPathSolver solver(g, pen);
    PathResult r = solver.solve(-1, -1);
    if (r.indices.empty()) return {};
    return to_contour(g, std::move(r), false);
}

}  // namespace

void RefinementParams::validate() const {
    if (n < 4) throw Error(ErrorCode::BadN, "n must be at least 4");
    if (m < 3 || m % 2 == 0) throw Error(ErrorCode::BadM, "m must be odd and at least 3");
    if (s < 0 || s > m - 1) throw Error(ErrorCode::BadParams, "s must lie in [0, m-1]");
    if (c < 0.0) throw Error(ErrorCode::BadParams, "c must be non-negative");
    if (!(half_len > 0.0)) throw Error(ErrorCode::BadParams, "half_len must be positive");
}

double concavity_penalty(Point2 prev, Point2 mid, Point2 next, double c) {
    const Point2 d1 = mid - prev;
    const Point2 d2 = next - mid;
    if ((d1.x == 0.0 && d1.y == 0.0) || (d2.x == 0.0 && d2.y == 0.0)) return 0.0;
    const double cr = cross(d1, d2);
    if (cr <= 0.0) return 0.0;
    return c * std::atan2(cr, dot(d1, d2));
}

double convex_violation(std::span<const Point2> closed_polygon) {
    const std::size_t n = closed_polygon.size();
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        total += concavity_penalty(closed_polygon[(j + n - 1) % n], closed_polygon[j], closed_polygon[(j + 1) % n], 1.0);
    }
    return total;
}

double closed_path_cost(const RefinementGraph& graph, std::span<const int> indices) {
    const int n = graph.n;
    if (static_cast<int>(indices.size()) != n) throw Error(ErrorCode::DimensionMismatch, "index sequence length != n");
    double total = 0.0;
    for (int j = 0; j < n; ++j) total += graph.cost(j, indices[j]);
    for (int j = 0; j < n; ++j) {
        const int jp = (j + n - 1) % n;
        const int jn = (j + 1) % n;
        total += concavity_penalty(graph.point(jp, indices[jp]), graph.point(j, indices[j]), graph.point(jn, indices[jn]),
                                   graph.c);
    }
    return total;
}

bool satisfies_band(std::span<const int> indices, int s) {
    const std::size_t n = indices.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(indices[(j + 1) % n] - indices[j]) > s) return false;
    }
    return true;
}

RefinementGraph build_graph(const GradientField& field, const NormalFan& fan, const RefinementParams& params) {
    params.validate();
    if (fan.n != params.n || fan.m != params.m) throw Error(ErrorCode::DimensionMismatch, "fan does not match params");
    if (fan.width != field.width || fan.height != field.height) {
        throw Error(ErrorCode::DimensionMismatch, "fan bounds differ from gradient field");
    }
    RefinementGraph g;
    g.n = params.n;
    g.m = params.m;
    g.s = params.s;
    g.c = params.c;
    const std::size_t cells = static_cast<std::size_t>(g.n + 1) * g.m;
    g.vertex_cost.resize(cells);
    g.geometry.resize(cells);
    g.clamped.resize(cells);
    for (int j = 0; j <= g.n; ++j) {
        const int src = j % g.n;
        for (int i = 0; i < g.m; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * g.m + i;
            const Point2 p = fan.point(src, i);
            g.geometry[idx] = p;
            g.clamped[idx] = fan.was_clamped(src, i) ? 1 : 0;
            g.vertex_cost[idx] = -sample_bilinear(field, p.x, p.y);
        }
    }
    return g;
}

RefinedContour shortest_closed_path(const RefinementGraph& graph, const RefinementParams& params) {
    check_graph(graph, params);
    const PenaltyTable pen(graph);
    if (!params.exact_closure) {
        RefinedContour approx = approximate_path(graph, pen);
        if (!approx.indices.empty()) return approx;
    }
    const auto pairs = start_pairs(graph);
    std::vector<PathResult> per_pair(pairs.size());
#pragma omp parallel
    {
        ClosedPathSolver solver(graph, pen);
#pragma omp for schedule(dynamic)
        for (std::size_t p = 0; p < pairs.size(); ++p) per_pair[p] = solver.solve(pairs[p].first, pairs[p].second);
    }
    return reduce_exact(graph, per_pair);
}

namespace serial {

RefinedContour shortest_closed_path(const RefinementGraph& graph, const RefinementParams& params) {
    check_graph(graph, params);
    const PenaltyTable pen(graph);
    if (!params.exact_closure) {
        RefinedContour approx = approximate_path(graph, pen);
        if (!approx.indices.empty()) return approx;
    }
    const auto pairs = start_pairs(graph);
    std::vector<PathResult> per_pair(pairs.size());
    ClosedPathSolver solver(graph, pen);
    for (std::size_t p = 0; p < pairs.size(); ++p) per_pair[p] = solver.solve(pairs[p].first, pairs[p].second);
    return reduce_exact(graph, per_pair);
}

}  // namespace serial

RefinedContour enumerate_optimal(const RefinementGraph& graph, const RefinementParams& params) {
    check_graph(graph, params);
    if (graph.n > 8 || graph.m > 5) throw Error(ErrorCode::TooLarge, "enumeration limited to n <= 8, m <= 5");

    const int n = graph.n;
    std::vector<int> current(static_cast<std::size_t>(n), 0);
    std::vector<int> best;
    double best_cost = kInf;

    // depth-first over band-feasible prefixes, ascending indices
    auto visit = [&](auto&& self, int j) -> void {
        if (j == n) {
            if (std::abs(current[0] - current[n - 1]) > graph.s) return;
            double total = 0.0;
            for (int k = 0; k < n; ++k) {
                total += graph.cost(k, current[k]);
                const int kp = (k + n - 1) % n;
                const int kn = (k + 1) % n;
                total += concavity_penalty(graph.point(kp, current[kp]), graph.point(k, current[k]),
                                           graph.point(kn, current[kn]), graph.c);
            }
            if (total < best_cost) {
                best_cost = total;
                best = current;
            }
            return;
        }
        for (int i = 0; i < graph.m; ++i) {
            if (j > 0 && std::abs(i - current[j - 1]) > graph.s) continue;
            current[j] = i;
            self(self, j + 1);
        }
    };
    visit(visit, 0);

    PathResult r{best_cost, std::move(best)};
    return to_contour(graph, std::move(r), true);
}

namespace {

RefinementOutcome refine_impl(const RasterImage& image, const BinaryMask& mask, const RefinementParams& params,
                              bool use_serial) {
    params.validate();
    if (image.width != mask.width || image.height != mask.height) {
        throw Error(ErrorCode::DimensionMismatch, "crop and mask sizes differ");
    }
    RefinementOutcome out;
    const Polyline boundary = extract_contour(mask);
    out.contour = resample_uniform(boundary, params.n);
    const NormalFan fan = build_normal_fan(out.contour, params.m, params.half_len, image.width, image.height);
    const GradientField field = use_serial ? serial::gradient_magnitude(image) : gradient_magnitude(image);
    const RefinementGraph graph = build_graph(field, fan, params);
    out.path = use_serial ? serial::shortest_closed_path(graph, params) : shortest_closed_path(graph, params);

    // candidate points live on the pixel-index lattice; the rasterizer samples pixel centers at +0.5
    out.polygon.reserve(out.path.points.size());
    for (const Point2& p : out.path.points) out.polygon.push_back({p.x + 0.5, p.y + 0.5});
    out.mask = largest_component(rasterize_polygon(out.polygon, image.width, image.height));
    if (out.mask.count() == 0) throw Error(ErrorCode::EmptyMask, "refined polygon covers no pixel centers");
    return out;
}

BatchResult run_one(const HeadCrop& crop, const RefinementParams& params, bool use_serial) {
    BatchResult r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.outcome = refine_impl(crop.image, crop.pseudo_mask, params, use_serial);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

RefinementOutcome refine(const RasterImage& image, const BinaryMask& mask, const RefinementParams& params) {
    return refine_impl(image, mask, params, false);
}

BinaryMask refine_mask(const HeadCrop& crop, const RefinementParams& params) {
    return refine_impl(crop.image, crop.pseudo_mask, params, false).mask;
}

std::vector<BatchResult> refine_batch(std::span<const HeadCrop> crops, const RefinementParams& params, int workers) {
    std::vector<BatchResult> results(crops.size());
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::size_t k = 0; k < crops.size(); ++k) results[k] = run_one(crops[k], params, false);
    return results;
}

namespace serial {

std::vector<BatchResult> refine_batch(std::span<const HeadCrop> crops, const RefinementParams& params) {
    std::vector<BatchResult> results;
    results.reserve(crops.size());
    for (const HeadCrop& crop : crops) results.push_back(run_one(crop, params, true));
    return results;
}

}  // namespace serial

}  // namespace morphkit
