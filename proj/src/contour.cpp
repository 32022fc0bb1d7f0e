#include "morphkit/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "morphkit/error.hpp"

namespace morphkit {

namespace {

// Moore neighbourhood, clockwise on screen (y down), starting west.
constexpr std::array<std::array<int, 2>, 8> kRing{{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

int ring_index(int dx, int dy) {
    for (int k = 0; k < 8; ++k) {
        if (kRing[k][0] == dx && kRing[k][1] == dy) return k;
    }
    return -1;
}

}  // namespace

Polyline extract_contour(const BinaryMask& mask) {
    const ComponentLabels labels = label_components(mask);
    if (labels.count == 0) throw Error(ErrorCode::EmptyMask, "no foreground pixels");
    if (labels.count > 1) throw Error(ErrorCode::MultipleComponents, std::to_string(labels.count) + " components");
    if (labels.areas[0] < 4) throw Error(ErrorCode::TooSmall, "component area below 4 pixels");

    auto fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < mask.width && y < mask.height && mask.at(x, y); };

    int sx = 0, sy = 0;
    const auto first = std::find(mask.data.begin(), mask.data.end(), std::uint8_t{1});
    const auto offset = static_cast<int>(first - mask.data.begin());
    sx = offset % mask.width;
    sy = offset / mask.width;

    Polyline trace;
    trace.push_back({static_cast<double>(sx), static_cast<double>(sy)});
    int cx = sx, cy = sy;
    int back = 0;  // west of the start pixel is background
    int second_x = -1, second_y = -1;
    const std::size_t guard = 8 * mask.data.size() + 8;
    for (std::size_t step = 0; step < guard; ++step) {
        int next = -1;
        for (int k = 1; k <= 8; ++k) {
            const int d = (back + k) % 8;
            if (fg(cx + kRing[d][0], cy + kRing[d][1])) {
                next = d;
                break;
            }
        }
        if (next < 0) break;  // unreachable for area >= 4
        const int nx = cx + kRing[next][0];
        const int ny = cy + kRing[next][1];
        if (cx == sx && cy == sy && step > 0 && nx == second_x && ny == second_y) break;
        if (step == 0) {
            second_x = nx;
            second_y = ny;
        }
        // backtrack = the background neighbour examined just before `next`, seen from the new pixel
        const int prev = (next + 7) % 8;
        const int bx = cx + kRing[prev][0] - nx;
        const int by = cy + kRing[prev][1] - ny;
        back = ring_index(bx, by);
        cx = nx;
        cy = ny;
        trace.push_back({static_cast<double>(cx), static_cast<double>(cy)});
    }
    // the walk ends back on the start pixel
    if (trace.size() > 1 && trace.back() == trace.front()) trace.pop_back();

    if (signed_area(trace) > 0.0) std::reverse(trace.begin() + 1, trace.end());
    return trace;
}

SampledContour resample_uniform(const Polyline& polyline, int n) {
    if (n < 4) throw Error(ErrorCode::BadN, "n must be at least 4");
    if (polyline.size() < 2) throw Error(ErrorCode::BadParams, "polyline needs at least 2 vertices");

    const auto start_it = std::min_element(polyline.begin(), polyline.end(), [](Point2 a, Point2 b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    Polyline ring(polyline.size());
    std::rotate_copy(polyline.begin(), start_it, polyline.end(), ring.begin());

    const std::size_t count = ring.size();
    std::vector<double> cumulative(count + 1, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        cumulative[i + 1] = cumulative[i] + norm(ring[(i + 1) % count] - ring[i]);
    }
    const double total = cumulative[count];
    if (!(total > 0.0)) throw Error(ErrorCode::BadParams, "polyline has zero length");

    SampledContour out;
    out.perimeter = total;
    out.points.reserve(static_cast<std::size_t>(n));
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double target = total * k / n;
        while (seg + 1 < count && cumulative[seg + 1] <= target) ++seg;
        const double len = cumulative[seg + 1] - cumulative[seg];
        const double t = len > 0.0 ? (target - cumulative[seg]) / len : 0.0;
        const Point2 a = ring[seg];
        const Point2 b = ring[(seg + 1) % count];
        out.points.push_back(a + t * (b - a));
    }
    return out;
}

NormalFan build_normal_fan(const SampledContour& contour, int m, double half_len, int width, int height) {
    if (m < 3 || m % 2 == 0) throw Error(ErrorCode::BadM, "m must be odd and at least 3");
    if (!(half_len > 0.0)) throw Error(ErrorCode::BadParams, "half_len must be positive");
    const int n = contour.size();
    if (n < 4) throw Error(ErrorCode::BadN, "contour needs at least 4 samples");

    NormalFan fan;
    fan.n = n;
    fan.m = m;
    fan.half_len = half_len;
    fan.width = width;
    fan.height = height;
    fan.points.resize(static_cast<std::size_t>(n) * m);
    fan.clamped.resize(static_cast<std::size_t>(n) * m, 0);
    fan.normals.resize(static_cast<std::size_t>(n));

    const int mid = (m - 1) / 2;
    for (int j = 0; j < n; ++j) {
        const Point2 prev = contour.points[(j + n - 1) % n];
        const Point2 next = contour.points[(j + 1) % n];
        Point2 tangent = next - prev;
        if (norm(tangent) == 0.0) tangent = next - contour.points[j];
        const double len = norm(tangent);
        if (len == 0.0) throw Error(ErrorCode::BadParams, "coincident contour samples");
        const Point2 unit_t = (1.0 / len) * tangent;
        // outward for negative-signed-area contours
        const Point2 normal{-unit_t.y, unit_t.x};
        fan.normals[j] = normal;
        for (int i = 0; i < m; ++i) {
            const double offset = static_cast<double>(i - mid) / mid * half_len;
            Point2 p = contour.points[j] + offset * normal;
            const Point2 clamped{std::clamp(p.x, 0.0, width - 1.0), std::clamp(p.y, 0.0, height - 1.0)};
            const std::size_t idx = static_cast<std::size_t>(j) * m + i;
            if (clamped != p) {
                fan.clamped[idx] = 1;
                p = clamped;
            }
            fan.points[idx] = p;
        }
    }
    return fan;
}

}  // namespace morphkit
