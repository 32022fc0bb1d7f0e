#pragma once

#include <filesystem>

#include "morphkit/imaging.hpp"

namespace morphkit::io {

// 8/16-bit gray or RGB(A) PNG into [0,1] intensities. Alpha is dropped.
RasterImage read_image(const std::filesystem::path& path);

// Any nonzero pixel is foreground.
BinaryMask read_mask(const std::filesystem::path& path);

// Quantizes with round(v*255); output is 8-bit gray or 24-bit RGB.
void write_image(const std::filesystem::path& path, const RasterImage& image);

// {0,255} 8-bit PNG.
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

// Real-valued [0,1] plane as 8-bit gray.
void write_soft_mask(const std::filesystem::path& path, const GradientField& soft);

}  // namespace morphkit::io
