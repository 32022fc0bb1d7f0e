#include "morphkit/data_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "morphkit/error.hpp"

namespace morphkit {

using nlohmann::json;

std::string_view to_string(Agreement a) {
    switch (a) {
        case Agreement::Total: return "TA";
        case Agreement::Partial: return "PA";
        case Agreement::None: return "none";
    }
    return "none";
}

int DatasetManifest::num_classes() const {
    if (!class_names.empty()) return static_cast<int>(class_names.size());
    int top = -1;
    for (const ManifestRecord& r : records) {
        for (int l : r.expert_labels) top = std::max(top, l);
    }
    return top + 1;
}

namespace {

[[noreturn]] void schema_error(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::Schema, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

DatasetManifest parse_manifest(std::istream& in) {
    DatasetManifest manifest;
    std::set<std::string> seen;
    std::string text;
    std::size_t line = 0;
    bool header_allowed = true;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            schema_error(line, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) schema_error(line, "expected a JSON object");

        if (!j.contains("path")) {
            if (!header_allowed) schema_error(line, "missing \"path\"");
            header_allowed = false;
            try {
                if (j.contains("class_names")) manifest.class_names = j.at("class_names").get<std::vector<std::string>>();
                if (j.contains("color")) manifest.color = j.at("color").get<std::string>();
                if (j.contains("native_size")) {
                    const auto size = j.at("native_size").get<std::vector<int>>();
                    if (size.size() != 2) schema_error(line, "native_size needs [w, h]");
                    manifest.native_size = std::pair{size[0], size[1]};
                }
            } catch (const json::exception& e) {
                schema_error(line, e.what());
            }
            if (manifest.color != "grayscale" && manifest.color != "rgb") schema_error(line, "color must be grayscale or rgb");
            continue;
        }
        header_allowed = false;

        ManifestRecord rec;
        try {
            rec.path = j.at("path").get<std::string>();
            if (!j.contains("expert_labels")) schema_error(line, "missing \"expert_labels\"");
            rec.expert_labels = j.at("expert_labels").get<std::vector<int>>();
            if (j.contains("fold") && !j.at("fold").is_null()) rec.fold = j.at("fold").get<int>();
        } catch (const json::exception& e) {
            schema_error(line, e.what());
        }
        if (rec.path.empty()) schema_error(line, "empty path");
        if (rec.expert_labels.empty() || rec.expert_labels.size() > 3) schema_error(line, "expert_labels needs 1-3 entries");
        for (int l : rec.expert_labels) {
            if (l < 0 || (!manifest.class_names.empty() && l >= static_cast<int>(manifest.class_names.size()))) {
                schema_error(line, "class id " + std::to_string(l) + " out of range");
            }
        }
        if (!seen.insert(rec.path).second) schema_error(line, "duplicate path " + rec.path);
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    // an ifstream on a directory opens fine and reads nothing
    if (std::filesystem::is_directory(path)) throw Error(ErrorCode::Io, "manifest path is a directory: " + path.string());
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open manifest " + path.string());
    return parse_manifest(in);
}

void write_manifest(std::ostream& out, const DatasetManifest& manifest) {
    if (!manifest.class_names.empty() || manifest.native_size || manifest.color != "grayscale") {
        json header = {{"class_names", manifest.class_names}, {"color", manifest.color}};
        if (manifest.native_size) header["native_size"] = {manifest.native_size->first, manifest.native_size->second};
        out << header.dump() << '\n';
    }
    for (const ManifestRecord& r : manifest.records) {
        json j = {{"path", r.path}, {"expert_labels", r.expert_labels}};
        if (r.fold) j["fold"] = *r.fold;
        out << j.dump() << '\n';
    }
}

DerivedLabels derive_labels(std::span<const int> expert_labels) {
    if (expert_labels.empty()) return {};
    if (std::all_of(expert_labels.begin(), expert_labels.end(), [&](int l) { return l == expert_labels[0]; })) {
        return {expert_labels[0], expert_labels[0], Agreement::Total};
    }
    if (expert_labels.size() == 3) {
        const int a = expert_labels[0], b = expert_labels[1], c = expert_labels[2];
        if (a == b) return {a, c, Agreement::Partial};
        if (a == c) return {a, b, Agreement::Partial};
        if (b == c) return {b, a, Agreement::Partial};
    }
    return {expert_labels[0], expert_labels[0], Agreement::None};
}

std::vector<int> kfold_split(std::span<const int> strata, int k, std::uint64_t seed) {
    if (strata.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to split");
    if (k < 2) throw Error(ErrorCode::BadParams, "k must be at least 2");

    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);

    std::vector<int> folds(strata.size(), -1);
    Rng rng(seed);
    std::size_t dealer = 0;
    for (auto& [label, members] : groups) {
        if (members.size() < static_cast<std::size_t>(k)) {
            spdlog::warn("class {} has {} samples, fewer than {} folds", label, members.size(), k);
        }
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t idx : members) folds[idx] = static_cast<int>(dealer++ % static_cast<std::size_t>(k));
    }
    return folds;
}

std::vector<int> kfold_split(const DatasetManifest& manifest, int k, std::uint64_t seed) {
    std::vector<int> strata;
    strata.reserve(manifest.records.size());
    for (const ManifestRecord& r : manifest.records) strata.push_back(derive_labels(r.expert_labels).majority);
    return kfold_split(strata, k, seed);
}

void AugmentationPipeline::validate() const {
    if (resize_to < 1) throw Error(ErrorCode::BadParams, "resize_to must be positive");
    if (crop_min < 1 || crop_min > crop_max || crop_max > resize_to) {
        throw Error(ErrorCode::BadParams, "crop range must lie within [1, resize_to]");
    }
    if (rotation_max_deg < 0.0 || shift_max_frac < 0.0) throw Error(ErrorCode::BadParams, "negative augmentation range");
}

AugmentationDraw draw_augmentation(const AugmentationPipeline& p, Rng& rng) {
    p.validate();
    AugmentationDraw d;
    d.crop_size = std::uniform_int_distribution<int>(p.crop_min, p.crop_max)(rng);
    std::uniform_int_distribution<int> pos(0, p.resize_to - d.crop_size);
    d.crop_x = pos(rng);
    d.crop_y = pos(rng);
    d.rotation_deg = std::uniform_real_distribution<double>(-p.rotation_max_deg, p.rotation_max_deg)(rng);
    d.vflip = p.vflip && std::bernoulli_distribution(0.5)(rng);
    const double max_shift = p.shift_max_frac * p.resize_to;
    std::uniform_real_distribution<double> shift(-max_shift, max_shift);
    d.shift_x = shift(rng);
    d.shift_y = shift(rng);
    return d;
}

AffineMap augmentation_map(const AugmentationPipeline& p, const AugmentationDraw& d, int src_w, int src_h) {
    const double size = p.resize_to;
    const double center = (size - 1.0) / 2.0;
    const double theta = d.rotation_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);

    // output o -> unshifted, unflipped q:  q = F (o - t), F = diag(1, +-1) with flip about the center
    const double fy = d.vflip ? -1.0 : 1.0;
    // rotation undone about the canvas center: r = C + R(-theta) (q - C)
    // window: w = crop_xy + (r + 0.5) * S / size - 0.5 ; source: src = (w + 0.5) * src_size / size - 0.5
    const double kx = d.crop_size / size * src_w / size;
    const double ky = d.crop_size / size * src_h / size;

    // q = (o.x - tx, center + fy * (o.y - ty - center))
    // r = C + [c s; -s c] (q - C)
    AffineMap m;
    const double qy_off = center - fy * (d.shift_y + center);  // q.y = fy * o.y + qy_off
    const double qx_off = -d.shift_x;                          // q.x = o.x + qx_off
    // r.x = center + c (q.x - center) + s (q.y - center)
    // r.y = center - s (q.x - center) + c (q.y - center)
    const double rx_a = c, rx_b = s * fy, rx_t = center + c * (qx_off - center) + s * (qy_off - center);
    const double ry_a = -s, ry_b = c * fy, ry_t = center - s * (qx_off - center) + c * (qy_off - center);
    // w = crop + (r + 0.5) * S/size - 0.5 ; src = (w + 0.5) * src/size - 0.5
    const double wx_t = d.crop_x + 0.5 * d.crop_size / size - 0.5;
    const double wy_t = d.crop_y + 0.5 * d.crop_size / size - 0.5;
    const double sx_scale = static_cast<double>(src_w) / size;
    const double sy_scale = static_cast<double>(src_h) / size;
    m.a00 = kx * rx_a;
    m.a01 = kx * rx_b;
    m.tx = kx * rx_t + (wx_t + 0.5) * sx_scale - 0.5;
    m.a10 = ky * ry_a;
    m.a11 = ky * ry_b;
    m.ty = ky * ry_t + (wy_t + 0.5) * sy_scale - 0.5;
    return m;
}

std::pair<RasterImage, BinaryMask> apply_augmentation(const AugmentationPipeline& p, const AugmentationDraw& d,
                                                      const RasterImage& crop, const BinaryMask& mask) {
    p.validate();
    if (crop.width != mask.width || crop.height != mask.height) {
        throw Error(ErrorCode::DimensionMismatch, "crop and mask sizes differ");
    }
    const AffineMap map = augmentation_map(p, d, crop.width, crop.height);
    return {warp_bilinear(crop, map, p.resize_to, p.resize_to), warp_nearest(mask, map, p.resize_to, p.resize_to)};
}

std::pair<RasterImage, BinaryMask> apply_augmentation(const AugmentationPipeline& p, const RasterImage& crop,
                                                      const BinaryMask& mask, Rng& rng) {
    return apply_augmentation(p, draw_augmentation(p, rng), crop, mask);
}

MetricsReport compute_metrics(std::span<const int> predictions, std::span<const int> truths, int num_classes) {
    if (predictions.size() != truths.size()) throw Error(ErrorCode::LengthMismatch, "predictions and truths differ in length");
    if (predictions.empty()) throw Error(ErrorCode::EmptyInput, "no predictions");
    if (num_classes < 1) throw Error(ErrorCode::BadParams, "num_classes must be positive");

    MetricsReport r;
    const auto k = static_cast<std::size_t>(num_classes);
    r.confusion.assign(k, std::vector<std::size_t>(k, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i];
        const int t = truths[i];
        if (p < 0 || p >= num_classes || t < 0 || t >= num_classes) {
            throw Error(ErrorCode::BadLabel, "class id outside [0, num_classes) at row " + std::to_string(i));
        }
        ++r.confusion[t][p];
        correct += p == t ? 1 : 0;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());

    r.precision.assign(k, 0.0);
    r.recall.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t predicted = 0;
        std::size_t support = 0;
        for (std::size_t o = 0; o < k; ++o) {
            predicted += r.confusion[o][c];
            support += r.confusion[c][o];
        }
        const auto tp = static_cast<double>(r.confusion[c][c]);
        if (predicted == 0) {
            r.warnings.push_back("class " + std::to_string(c) + ": precision 0/0 treated as 0");
        } else {
            r.precision[c] = tp / static_cast<double>(predicted);
        }
        if (support == 0) {
            r.warnings.push_back("class " + std::to_string(c) + ": recall 0/0 treated as 0");
        } else {
            r.recall[c] = tp / static_cast<double>(support);
        }
        r.macro_precision += r.precision[c];
        r.macro_recall += r.recall[c];
    }
    r.macro_precision /= static_cast<double>(k);
    r.macro_recall /= static_cast<double>(k);
    const double denom = r.macro_precision + r.macro_recall;
    r.f1 = denom > 0.0 ? 2.0 * r.macro_precision * r.macro_recall / denom : 0.0;
    return r;
}

void to_json(json& j, const MetricsReport& r) {
    j = json{{"accuracy", r.accuracy},   {"macro_precision", r.macro_precision},
             {"macro_recall", r.macro_recall}, {"f1", r.f1},
             {"confusion", r.confusion}, {"precision", r.precision},
             {"recall", r.recall},       {"warnings", r.warnings}};
}

}  // namespace morphkit
