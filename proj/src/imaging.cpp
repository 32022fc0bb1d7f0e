#include "morphkit/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "morphkit/error.hpp"

namespace morphkit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
        case ErrorCode::NoComponentFound: return "NoComponentFound";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::MultipleComponents: return "MultipleComponents";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::BadN: return "BadN";
        case ErrorCode::BadM: return "BadM";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::LabelMismatch: return "LabelMismatch";
        case ErrorCode::BadLabel: return "BadLabel";
        case ErrorCode::BadPrediction: return "BadPrediction";
        case ErrorCode::BadGamma: return "BadGamma";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Schema: return "Schema";
    }
    return "Unknown";
}

double signed_area(std::span<const Point2> polygon) {
    const std::size_t n = polygon.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        twice += cross(polygon[i], polygon[(i + 1) % n]);
    }
    return 0.5 * twice;
}

double closed_length(std::span<const Point2> polygon) {
    const std::size_t n = polygon.size();
    double len = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        len += norm(polygon[(i + 1) % n] - polygon[i]);
    }
    return len;
}

RasterImage::RasterImage(int w, int h, int c, double fill)
    : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

BinaryMask::BinaryMask(int w, int h, bool fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

RasterImage to_luma(const RasterImage& image) {
    if (image.channels == 1) return image;
    if (image.channels != 3) throw Error(ErrorCode::BadParams, "expected 1 or 3 channels");
    RasterImage out(image.width, image.height, 1);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            out.at(x, y) = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) + 0.114 * image.at(x, y, 2);
        }
    }
    return out;
}

namespace {

void check_gradient_input(const RasterImage& image) {
    if (image.width < 2 || image.height < 2) {
        throw Error(ErrorCode::ImageTooSmall, "gradient needs at least 2x2 pixels");
    }
}

inline double sobel_at(const RasterImage& g, int x, int y) {
    const int xm = std::max(x - 1, 0);
    const int xp = std::min(x + 1, g.width - 1);
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, g.height - 1);
    const double gx = (g.at(xp, ym) + 2.0 * g.at(xp, y) + g.at(xp, yp)) -
                      (g.at(xm, ym) + 2.0 * g.at(xm, y) + g.at(xm, yp));
    const double gy = (g.at(xm, yp) + 2.0 * g.at(x, yp) + g.at(xp, yp)) -
                      (g.at(xm, ym) + 2.0 * g.at(x, ym) + g.at(xp, ym));
    return std::sqrt(gx * gx + gy * gy);
}

}  // namespace

GradientField gradient_magnitude(const RasterImage& image) {
    check_gradient_input(image);
    const RasterImage gray = to_luma(image);
    GradientField out(gray.width, gray.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < gray.height; ++y) {
        for (int x = 0; x < gray.width; ++x) out.at(x, y) = sobel_at(gray, x, y);
    }
    return out;
}

namespace serial {

GradientField gradient_magnitude(const RasterImage& image) {
    check_gradient_input(image);
    const RasterImage gray = to_luma(image);
    GradientField out(gray.width, gray.height);
    for (int y = 0; y < gray.height; ++y) {
        for (int x = 0; x < gray.width; ++x) out.at(x, y) = sobel_at(gray, x, y);
    }
    return out;
}

}  // namespace serial

double sample_bilinear(const GradientField& field, double x, double y) {
    if (!(x >= 0.0 && y >= 0.0 && x <= field.width - 1 && y <= field.height - 1)) {
        throw Error(ErrorCode::OutOfBounds, "bilinear sample outside field");
    }
    const int x0 = std::min(static_cast<int>(x), field.width - 1);
    const int y0 = std::min(static_cast<int>(y), field.height - 1);
    const int x1 = std::min(x0 + 1, field.width - 1);
    const int y1 = std::min(y0 + 1, field.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = field.at(x0, y0) + fx * (field.at(x1, y0) - field.at(x0, y0));
    const double bottom = field.at(x0, y1) + fx * (field.at(x1, y1) - field.at(x0, y1));
    return top + fy * (bottom - top);
}

double sample_bilinear_clamped(const GradientField& field, double x, double y) {
    return sample_bilinear(field, std::clamp(x, 0.0, field.width - 1.0), std::clamp(y, 0.0, field.height - 1.0));
}

BinaryMask rasterize_polygon(std::span<const Point2> vertices, int width, int height) {
    if (vertices.size() < 3) throw Error(ErrorCode::DegeneratePolygon, "fewer than 3 vertices");
    if (std::abs(signed_area(vertices)) < 1e-12) throw Error(ErrorCode::DegeneratePolygon, "zero area");
    if (width <= 0 || height <= 0) throw Error(ErrorCode::BadParams, "raster size must be positive");

    BinaryMask mask(width, height);
    const std::size_t n = vertices.size();
    std::vector<double> xs;
    for (int y = 0; y < height; ++y) {
        const double py = y + 0.5;
        xs.clear();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Point2 a = vertices[i];
            const Point2 b = vertices[j];
            if ((a.y > py) != (b.y > py)) {
                xs.push_back((b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x);
            }
        }
        std::sort(xs.begin(), xs.end());
        // center px is inside iff an odd number of crossings lie strictly right of it
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const int first = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
            for (int x = first; x < width && x + 0.5 < xs[k + 1]; ++x) mask.set(x, y, true);
        }
    }
    return mask;
}

RasterImage gaussian_blur(const RasterImage& image, double sigma) {
    if (sigma <= 0.0) return image;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k) kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    const double total = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    for (double& v : kernel) v /= total;

    const int w = image.width;
    const int h = image.height;
    RasterImage tmp(w, h, image.channels);
    RasterImage out(w, h, image.channels);
    for (int c = 0; c < image.channels; ++c) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    acc += kernel[k + radius] * image.at(std::clamp(x + k, 0, w - 1), y, c);
                }
                tmp.at(x, y, c) = acc;
            }
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    acc += kernel[k + radius] * tmp.at(x, std::clamp(y + k, 0, h - 1), c);
                }
                out.at(x, y, c) = acc;
            }
        }
    }
    return out;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height) throw Error(ErrorCode::DimensionMismatch, "iou operands differ in size");
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        inter += (a.data[i] & b.data[i]);
        uni += (a.data[i] | b.data[i]);
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

ComponentLabels label_components(const BinaryMask& mask) {
    ComponentLabels out{mask.width, mask.height, 0, std::vector<int>(mask.data.size(), 0), {}};
    std::vector<int> stack;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const int idx = y * mask.width + x;
            if (!mask.data[idx] || out.labels[idx] != 0) continue;
            const int label = ++out.count;
            std::size_t area = 0;
            out.labels[idx] = label;
            stack.push_back(idx);
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                ++area;
                const int cx = cur % mask.width;
                const int cy = cur / mask.width;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                        const int nidx = ny * mask.width + nx;
                        if (mask.data[nidx] && out.labels[nidx] == 0) {
                            out.labels[nidx] = label;
                            stack.push_back(nidx);
                        }
                    }
                }
            }
            out.areas.push_back(area);
        }
    }
    return out;
}

BinaryMask component_mask(const ComponentLabels& labels, int label) {
    BinaryMask mask(labels.width, labels.height);
    for (std::size_t i = 0; i < labels.labels.size(); ++i) mask.data[i] = labels.labels[i] == label ? 1 : 0;
    return mask;
}

BinaryMask largest_component(const BinaryMask& mask) {
    const ComponentLabels labels = label_components(mask);
    if (labels.count <= 1) return mask;
    const auto best = std::max_element(labels.areas.begin(), labels.areas.end());
    return component_mask(labels, static_cast<int>(best - labels.areas.begin()) + 1);
}

RasterImage warp_bilinear(const RasterImage& src, const AffineMap& dst_to_src, int out_w, int out_h, Border border,
                          double fill) {
    RasterImage out(out_w, out_h, src.channels, fill);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const Point2 s = dst_to_src.apply({static_cast<double>(x), static_cast<double>(y)});
            const double fx0 = std::floor(s.x);
            const double fy0 = std::floor(s.y);
            const int x0 = static_cast<int>(fx0);
            const int y0 = static_cast<int>(fy0);
            const double fx = s.x - fx0;
            const double fy = s.y - fy0;
            for (int c = 0; c < src.channels; ++c) {
                auto px = [&](int xx, int yy) {
                    if (border == Border::Replicate) {
                        return src.at(std::clamp(xx, 0, src.width - 1), std::clamp(yy, 0, src.height - 1), c);
                    }
                    return (xx < 0 || yy < 0 || xx >= src.width || yy >= src.height) ? fill : src.at(xx, yy, c);
                };
                const double top = px(x0, y0) + fx * (px(x0 + 1, y0) - px(x0, y0));
                const double bottom = px(x0, y0 + 1) + fx * (px(x0 + 1, y0 + 1) - px(x0, y0 + 1));
                out.at(x, y, c) = std::clamp(top + fy * (bottom - top), 0.0, 1.0);
            }
        }
    }
    return out;
}

BinaryMask warp_nearest(const BinaryMask& src, const AffineMap& dst_to_src, int out_w, int out_h) {
    BinaryMask out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const Point2 s = dst_to_src.apply({static_cast<double>(x), static_cast<double>(y)});
            const int sx = static_cast<int>(std::lround(s.x));
            const int sy = static_cast<int>(std::lround(s.y));
            if (sx >= 0 && sy >= 0 && sx < src.width && sy < src.height) out.set(x, y, src.at(sx, sy));
        }
    }
    return out;
}

GradientField mask_to_field(const BinaryMask& mask) {
    GradientField f(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.data.size(); ++i) f.magnitude[i] = mask.data[i];
    return f;
}

}  // namespace morphkit
