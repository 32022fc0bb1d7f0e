#include "morphkit/image_io.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "morphkit/error.hpp"

namespace morphkit::io {

namespace {

cv::Mat load(const std::filesystem::path& path) {
    cv::Mat mat;
    try {
        mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::Io, "cannot decode " + path.string() + ": " + e.what());
    }
    if (mat.empty()) throw Error(ErrorCode::Io, "cannot read image " + path.string());
    return mat;
}

void save(const std::filesystem::path& path, const cv::Mat& mat) {
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::Io, "cannot encode " + path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorCode::Io, "cannot write image " + path.string());
}

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

RasterImage read_image(const std::filesystem::path& path) {
    cv::Mat mat = load(path);
    const double scale = mat.depth() == CV_16U ? 1.0 / 65535.0 : mat.depth() == CV_8U ? 1.0 / 255.0 : 0.0;
    if (scale == 0.0) throw Error(ErrorCode::Io, "unsupported bit depth in " + path.string());
    cv::Mat f;
    mat.convertTo(f, CV_64F, scale);

    const int ch = f.channels();
    if (ch != 1 && ch != 3 && ch != 4) throw Error(ErrorCode::Io, "unsupported channel count in " + path.string());
    RasterImage out(f.cols, f.rows, ch == 1 ? 1 : 3);
    for (int y = 0; y < f.rows; ++y) {
        const double* row = f.ptr<double>(y);
        for (int x = 0; x < f.cols; ++x) {
            if (ch == 1) {
                out.at(x, y) = row[x];
            } else {
                // OpenCV stores BGR(A)
                out.at(x, y, 0) = row[x * ch + 2];
                out.at(x, y, 1) = row[x * ch + 1];
                out.at(x, y, 2) = row[x * ch + 0];
            }
        }
    }
    return out;
}

BinaryMask read_mask(const std::filesystem::path& path) {
    cv::Mat mat = load(path);
    if (mat.channels() != 1) {
        cv::Mat planes[4];
        cv::split(mat, planes);
        mat = planes[0];
    }
    BinaryMask out(mat.cols, mat.rows);
    cv::Mat u8;
    mat.convertTo(u8, CV_8U, mat.depth() == CV_16U ? 1.0 / 257.0 : 1.0);
    for (int y = 0; y < u8.rows; ++y) {
        const std::uint8_t* row = u8.ptr<std::uint8_t>(y);
        for (int x = 0; x < u8.cols; ++x) out.set(x, y, row[x] != 0);
    }
    return out;
}

void write_image(const std::filesystem::path& path, const RasterImage& image) {
    if (image.channels != 1 && image.channels != 3) throw Error(ErrorCode::BadParams, "expected 1 or 3 channels");
    cv::Mat mat(image.height, image.width, image.channels == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < image.height; ++y) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < image.width; ++x) {
            if (image.channels == 1) {
                row[x] = quantize(image.at(x, y));
            } else {
                row[3 * x + 0] = quantize(image.at(x, y, 2));
                row[3 * x + 1] = quantize(image.at(x, y, 1));
                row[3 * x + 2] = quantize(image.at(x, y, 0));
            }
        }
    }
    save(path, mat);
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
    cv::Mat mat(mask.height, mask.width, CV_8UC1);
    for (int y = 0; y < mask.height; ++y) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < mask.width; ++x) row[x] = mask.at(x, y) ? 255 : 0;
    }
    save(path, mat);
}

void write_soft_mask(const std::filesystem::path& path, const GradientField& soft) {
    cv::Mat mat(soft.height, soft.width, CV_8UC1);
    for (int y = 0; y < soft.height; ++y) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < soft.width; ++x) row[x] = quantize(soft.at(x, y));
    }
    save(path, mat);
}

}  // namespace morphkit::io
