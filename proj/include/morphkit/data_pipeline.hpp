#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "morphkit/imaging.hpp"
#include "morphkit/softmixup.hpp"

namespace morphkit {

enum class Agreement { Total, Partial, None };

std::string_view to_string(Agreement a);

struct ManifestRecord {
    std::string path;
    std::vector<int> expert_labels;
    std::optional<int> fold;
};

// JSON-lines manifest. An optional first line without "path" carries
// {"class_names": [...], "color": "grayscale"|"rgb", "native_size": [w, h]}.
struct DatasetManifest {
    std::vector<ManifestRecord> records;
    std::vector<std::string> class_names;
    std::string color{"grayscale"};
    std::optional<std::pair<int, int>> native_size;

    // class_names.size() when given, else one past the largest label
    int num_classes() const;
};

// Throws Schema with the offending 1-based line number.
DatasetManifest parse_manifest(std::istream& in);
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const DatasetManifest& manifest);

struct DerivedLabels {
    int majority{};
    int minority{};
    Agreement agreement{Agreement::None};
};

// Unanimous (or single) labels give Total; a 2-of-3 majority gives Partial
// with the dissenting label as minority; anything else gives None.
DerivedLabels derive_labels(std::span<const int> expert_labels);

// Stratified fold ids in [0,k) for each stratum entry. Members of each
// stratum are shuffled and dealt round-robin, continuing the dealer position
// across strata (ascending stratum id) so fold totals differ by at most one.
std::vector<int> kfold_split(std::span<const int> strata, int k, std::uint64_t seed);

// Stratifies by majority label; records without a majority use their first label.
std::vector<int> kfold_split(const DatasetManifest& manifest, int k, std::uint64_t seed);

struct AugmentationPipeline {
    int resize_to{64};
    int crop_min{45};
    int crop_max{64};
    double rotation_max_deg{10.0};
    bool vflip{true};
    double shift_max_frac{0.10};
    std::uint64_t seed{0};

    void validate() const;
};

// One set of geometric draws, shared by a crop and its mask.
struct AugmentationDraw {
    int crop_size{64};
    int crop_x{0};
    int crop_y{0};
    double rotation_deg{0.0};
    bool vflip{false};
    double shift_x{0.0};  // pixels on the output canvas
    double shift_y{0.0};

    static AugmentationDraw identity(const AugmentationPipeline& p) { return {p.resize_to, 0, 0, 0.0, false, 0.0, 0.0}; }
};

AugmentationDraw draw_augmentation(const AugmentationPipeline& pipeline, Rng& rng);

// Output-to-source map for a draw, applied to a source of the given size.
AffineMap augmentation_map(const AugmentationPipeline& pipeline, const AugmentationDraw& draw, int src_w, int src_h);

std::pair<RasterImage, BinaryMask> apply_augmentation(const AugmentationPipeline& pipeline, const AugmentationDraw& draw,
                                                      const RasterImage& crop, const BinaryMask& mask);

std::pair<RasterImage, BinaryMask> apply_augmentation(const AugmentationPipeline& pipeline, const RasterImage& crop,
                                                      const BinaryMask& mask, Rng& rng);

struct MetricsReport {
    double accuracy{};
    double macro_precision{};
    double macro_recall{};
    double f1{};
    std::vector<std::vector<std::size_t>> confusion;  // [truth][prediction]
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<std::string> warnings;  // 0/0 precision or recall per class
};

MetricsReport compute_metrics(std::span<const int> predictions, std::span<const int> truths, int num_classes);

void to_json(nlohmann::json& j, const MetricsReport& report);

}  // namespace morphkit
