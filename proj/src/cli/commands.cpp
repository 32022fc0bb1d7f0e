#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <omp.h>
#include <spdlog/spdlog.h>

#include "morphkit/error.hpp"
#include "morphkit/image_io.hpp"
#include "morphkit/synth.hpp"

namespace morphkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<fs::path> list_pngs(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "input directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (ext == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

void prepare_output(const fs::path& dir) {
    if (dir.empty()) throw Error(ErrorCode::BadParams, "--output is required");
    fs::create_directories(dir);
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string format_index(const char* prefix, std::size_t i, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%06zu%s", prefix, i, suffix);
    return buf;
}

int threads_for(const RunConfig& cfg) { return std::max(1, cfg.workers); }

// Crop rendered as RGB with the refined curve in red.
RasterImage draw_overlay(const RasterImage& crop, const std::vector<Point2>& polygon) {
    RasterImage rgb(crop.width, crop.height, 3);
    for (int y = 0; y < crop.height; ++y) {
        for (int x = 0; x < crop.width; ++x) {
            const double v = crop.channels == 1 ? crop.at(x, y)
                                                : 0.299 * crop.at(x, y, 0) + 0.587 * crop.at(x, y, 1) +
                                                      0.114 * crop.at(x, y, 2);
            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = v;
        }
    }
    const std::size_t n = polygon.size();
    for (std::size_t k = 0; k < n; ++k) {
        // polygon is in raster coordinates; pixel centers sit at +0.5
        const Point2 a = polygon[k] - Point2{0.5, 0.5};
        const Point2 b = polygon[(k + 1) % n] - Point2{0.5, 0.5};
        const int steps = std::max(1, static_cast<int>(std::ceil(2.0 * norm(b - a))));
        for (int t = 0; t <= steps; ++t) {
            const Point2 p = a + (static_cast<double>(t) / steps) * (b - a);
            const int x = static_cast<int>(std::lround(p.x));
            const int y = static_cast<int>(std::lround(p.y));
            if (x < 0 || y < 0 || x >= crop.width || y >= crop.height) continue;
            rgb.at(x, y, 0) = 1.0;
            rgb.at(x, y, 1) = 0.0;
            rgb.at(x, y, 2) = 0.0;
        }
    }
    return rgb;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

struct SubsetRecord {
    std::size_t record{};
    DerivedLabels labels;
};

std::vector<SubsetRecord> select_subset(const DatasetManifest& manifest, const std::string& subset) {
    if (subset != "all" && subset != "pa" && subset != "ta") {
        throw Error(ErrorCode::BadParams, "subset must be all, pa or ta");
    }
    std::vector<SubsetRecord> out;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        const DerivedLabels labels = derive_labels(manifest.records[i].expert_labels);
        const bool keep = subset == "all" || (subset == "pa" && labels.agreement != Agreement::None) ||
                          (subset == "ta" && labels.agreement == Agreement::Total);
        if (keep) {
            out.push_back({i, labels});
        } else {
            ++dropped;
        }
    }
    if (dropped > 0) spdlog::info("subset {}: {} records excluded", subset, dropped);
    return out;
}

// mix and split take either the manifest itself or the directory holding it
fs::path resolve_manifest(const fs::path& input) {
    return fs::is_directory(input) ? input / "manifest.jsonl" : input;
}

}  // namespace

Rng item_rng(std::uint64_t seed, std::uint64_t index, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream};
    return Rng(seq);
}

fs::path mask_for_image(const fs::path& image) {
    std::string base = image.stem().string();
    if (ends_with(base, "_crop")) base.resize(base.size() - 5);
    const fs::path dir = image.parent_path();
    for (const char* suffix : {"_refined.png", "_mask.png"}) {
        const fs::path candidate = dir / (base + suffix);
        if (fs::exists(candidate)) return candidate;
    }
    return {};
}

int cmd_gen_masks(const RunConfig& cfg) {
    cfg.prior.validate();
    const std::vector<fs::path> files = list_pngs(cfg.input);
    prepare_output(cfg.output);

    struct Item {
        bool ok{false};
        std::string error;
        HeadCrop crop;
    };
    std::vector<Item> items(files.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads_for(cfg))
    for (std::size_t k = 0; k < files.size(); ++k) {
        Item& item = items[k];
        try {
            const RasterImage image = io::read_image(files[k]);
            item.crop = right_align(generate_pseudo_mask(image, cfg.prior));
            const std::string stem = files[k].stem().string();
            io::write_image(cfg.output / (stem + "_crop.png"), item.crop.image);
            io::write_mask(cfg.output / (stem + "_mask.png"), item.crop.pseudo_mask);
            item.ok = true;
        } catch (const std::exception& e) {
            item.error = e.what();
        }
    }

    json entries = json::array();
    std::size_t errors = 0;
    std::map<std::string, std::string> crop_for_file;
    for (std::size_t k = 0; k < files.size(); ++k) {
        const Item& item = items[k];
        json e = {{"file", files[k].filename().string()}, {"stem", files[k].stem().string()}};
        if (item.ok) {
            const BoundingBox& b = item.crop.source_bbox;
            e["status"] = "ok";
            e["score"] = item.crop.score;
            e["bbox"] = {b.x, b.y, b.w, b.h};
            e["rotation_deg"] = item.crop.rotation_deg;
            e["flipped"] = item.crop.flipped;
            crop_for_file[files[k].filename().string()] = files[k].stem().string() + "_crop.png";
        } else {
            e["status"] = "error";
            e["error"] = item.error;
            ++errors;
            spdlog::error("{}: {}", files[k].filename().string(), item.error);
        }
        entries.push_back(std::move(e));
    }
    write_json(cfg.output / "gen_report.json",
               {{"command", "gen-masks"}, {"images", entries}, {"ok", files.size() - errors}, {"errors", errors}});

    // carry labels over to the crops when the input directory has a manifest
    const fs::path input_manifest = cfg.input / "manifest.jsonl";
    if (fs::exists(input_manifest)) {
        DatasetManifest manifest = load_manifest(input_manifest);
        DatasetManifest derived = manifest;
        derived.records.clear();
        for (const ManifestRecord& r : manifest.records) {
            const auto it = crop_for_file.find(fs::path(r.path).filename().string());
            if (it == crop_for_file.end()) continue;
            ManifestRecord copy = r;
            copy.path = it->second;
            derived.records.push_back(std::move(copy));
        }
        std::ofstream out(cfg.output / "manifest.jsonl", std::ios::binary);
        write_manifest(out, derived);
    }
    return errors == 0 ? 0 : 1;
}

int cmd_refine(const RunConfig& cfg) {
    cfg.refine.validate();
    const std::vector<fs::path> files = list_pngs(cfg.input);
    prepare_output(cfg.output);

    struct Item {
        std::string stem;
        std::string error;
        bool loaded{false};
    };
    std::vector<Item> items;
    std::vector<HeadCrop> crops;
    std::vector<std::size_t> crop_item;
    for (const fs::path& f : files) {
        const std::string name = f.filename().string();
        if (!ends_with(name, "_crop.png")) continue;
        Item item;
        item.stem = name.substr(0, name.size() - std::string("_crop.png").size());
        const fs::path mask_path = cfg.input / (item.stem + "_mask.png");
        try {
            if (!fs::exists(mask_path)) throw Error(ErrorCode::Io, "missing mask for " + item.stem);
            HeadCrop crop;
            crop.image = io::read_image(f);
            crop.pseudo_mask = io::read_mask(mask_path);
            crops.push_back(std::move(crop));
            crop_item.push_back(items.size());
            item.loaded = true;
        } catch (const std::exception& e) {
            item.error = e.what();
        }
        items.push_back(std::move(item));
    }

    const std::vector<BatchResult> results = refine_batch(crops, cfg.refine, threads_for(cfg));

    std::vector<const BatchResult*> by_item(items.size(), nullptr);
    for (std::size_t c = 0; c < results.size(); ++c) by_item[crop_item[c]] = &results[c];

    json entries = json::array();
    std::vector<double> times;
    std::size_t errors = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        json e = {{"stem", items[k].stem}};
        const BatchResult* r = by_item[k];
        std::string error = items[k].error;
        if (r && !r->outcome) error = r->error;
        if (r && r->outcome) {
            try {
                io::write_mask(cfg.output / (items[k].stem + "_refined.png"), r->outcome->mask);
                if (cfg.overlay) {
                    const std::size_t c = static_cast<std::size_t>(
                        std::find(crop_item.begin(), crop_item.end(), k) - crop_item.begin());
                    io::write_image(cfg.output / (items[k].stem + "_overlay.png"),
                                    draw_overlay(crops[c].image, r->outcome->polygon));
                }
            } catch (const std::exception& ex) {
                error = ex.what();
            }
        }
        if (error.empty()) {
            e["status"] = "ok";
            e["elapsed_ms"] = r->elapsed_ms;
            e["total_cost"] = r->outcome->path.total_cost;
            e["foreground_px"] = r->outcome->mask.count();
            times.push_back(r->elapsed_ms);
        } else {
            e["status"] = "error";
            e["error"] = error;
            ++errors;
            spdlog::error("{}: {}", items[k].stem, error);
        }
        entries.push_back(std::move(e));
    }
    const RefinementParams& p = cfg.refine;
    write_json(cfg.output / "refine_report.json",
               {{"command", "refine"},
                {"mode", p.exact_closure ? "exact" : "approximate"},
                {"params", {{"n", p.n}, {"m", p.m}, {"s", p.s}, {"c", p.c}, {"half_len", p.half_len}}},
                {"images", entries},
                {"median_ms", median(times)},
                {"ok", items.size() - errors},
                {"errors", errors}});
    return errors == 0 ? 0 : 1;
}

int cmd_mix(const RunConfig& cfg) {
    cfg.mix.validate();
    cfg.augment.validate();
    if (cfg.lambda && !(*cfg.lambda >= 0.0 && *cfg.lambda <= 1.0)) {
        throw Error(ErrorCode::BadParams, "--lambda must lie in [0,1]");
    }
    const fs::path manifest_path = resolve_manifest(cfg.input);
    const DatasetManifest manifest = load_manifest(manifest_path);
    const fs::path root = manifest_path.parent_path();
    prepare_output(cfg.output);

    json errors = json::array();
    std::vector<LabeledSample> samples;
    for (const SubsetRecord& sel : select_subset(manifest, cfg.subset)) {
        const ManifestRecord& rec = manifest.records[sel.record];
        const fs::path image_path = root / rec.path;
        try {
            LabeledSample s;
            s.crop = io::read_image(image_path);
            const fs::path mask_path = mask_for_image(image_path);
            if (mask_path.empty()) throw Error(ErrorCode::Io, "no mask next to " + rec.path);
            s.mask = io::read_mask(mask_path);
            s.majority_label = sel.labels.majority;
            s.minority_label = sel.labels.minority;
            s.sample_id = rec.path;
            samples.push_back(std::move(s));
        } catch (const std::exception& e) {
            errors.push_back({{"path", rec.path}, {"error", e.what()}});
            spdlog::error("{}: {}", rec.path, e.what());
        }
    }
    if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "no usable records in " + cfg.input.string());

    const std::vector<LabeledSample> pool = oversample(samples, cfg.seed);
    std::vector<int> majority;
    majority.reserve(pool.size());
    for (const LabeledSample& s : pool) majority.push_back(s.majority_label);
    const auto pairs = pair_intra_class(majority, cfg.seed + 1);

    std::vector<json> records(pool.size());
    std::vector<std::string> item_errors(pool.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads_for(cfg))
    for (std::size_t k = 0; k < pool.size(); ++k) {
        try {
            Rng rng = item_rng(cfg.seed, k, kMixStream);
            const double lambda = cfg.lambda ? *cfg.lambda : sample_lambda(cfg.mix.alpha, rng);
            const AugmentationDraw draw_i = draw_augmentation(cfg.augment, rng);
            const AugmentationDraw draw_j = draw_augmentation(cfg.augment, rng);
            const auto aug_i = [&](const RasterImage& x, const BinaryMask& m) {
                return apply_augmentation(cfg.augment, draw_i, x, m);
            };
            const auto aug_j = [&](const RasterImage& x, const BinaryMask& m) {
                return apply_augmentation(cfg.augment, draw_j, x, m);
            };
            const auto [i, j] = pairs[k];
            const MixedSample mixed = mix(pool[i], pool[j], lambda, aug_i, aug_j);
            const std::string crop_name = format_index("mix_", k, "_crop.png");
            const std::string mask_name = format_index("mix_", k, "_mask.png");
            io::write_image(cfg.output / crop_name, mixed.crop);
            io::write_soft_mask(cfg.output / mask_name, *mixed.mask);
            records[k] = {{"index", k},
                          {"crop", crop_name},
                          {"mask", mask_name},
                          {"lambda", mixed.lambda},
                          {"gamma", cfg.mix.gamma},
                          {"target", mixed.target},
                          {"parents", {mixed.parents.first, mixed.parents.second}},
                          {"parent_labels", mixed.parent_labels}};
        } catch (const std::exception& e) {
            item_errors[k] = e.what();
        }
    }

    std::ofstream out(cfg.output / "mixed.jsonl", std::ios::binary);
    for (std::size_t k = 0; k < pool.size(); ++k) {
        if (!item_errors[k].empty()) {
            errors.push_back({{"index", k}, {"error", item_errors[k]}});
            continue;
        }
        out << records[k].dump() << '\n';
    }
    write_json(cfg.output / "mix_report.json", {{"command", "mix"},
                                                {"samples", samples.size()},
                                                {"mixed", pool.size()},
                                                {"errors", errors}});
    return errors.empty() ? 0 : 1;
}

int cmd_split(const RunConfig& cfg) {
    const DatasetManifest manifest = load_manifest(resolve_manifest(cfg.input));
    const std::vector<SubsetRecord> selected = select_subset(manifest, cfg.subset);
    if (selected.empty()) throw Error(ErrorCode::EmptyDataset, "no records to split");
    prepare_output(cfg.output);

    std::vector<int> strata;
    strata.reserve(selected.size());
    for (const SubsetRecord& s : selected) strata.push_back(s.labels.majority);
    const std::vector<int> folds = kfold_split(strata, cfg.k, cfg.seed);

    std::ofstream out(cfg.output / "folds.csv", std::ios::binary);
    out << "path,fold\n";
    for (std::size_t i = 0; i < selected.size(); ++i) {
        out << manifest.records[selected[i].record].path << ',' << folds[i] << '\n';
    }
    return 0;
}

int cmd_eval(const RunConfig& cfg) {
    std::ifstream in(cfg.input);
    if (!in) throw Error(ErrorCode::Io, "cannot open predictions " + cfg.input.string());
    prepare_output(cfg.output);

    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell.erase(0, cell.find_first_not_of(" \t\r"));
            cell.erase(cell.find_last_not_of(" \t\r") + 1);
            cells.push_back(cell);
        }
        return cells;
    };

    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Schema, "line 1: empty predictions file");
    const std::vector<std::string> header = split(line);
    const auto col = [&](const char* name) {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    const int pred_col = col("prediction");
    const int truth_col = col("truth");
    if (pred_col < 0 || truth_col < 0) {
        throw Error(ErrorCode::Schema, "line 1: header needs 'prediction' and 'truth' columns");
    }

    std::vector<int> preds, truths;
    json errors = json::array();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split(line);
        try {
            if (static_cast<int>(cells.size()) <= std::max(pred_col, truth_col)) throw std::invalid_argument("too few columns");
            std::size_t used = 0;
            const int p = std::stoi(cells[pred_col], &used);
            if (used != cells[pred_col].size() || p < 0) throw std::invalid_argument("bad prediction");
            const int t = std::stoi(cells[truth_col], &used);
            if (used != cells[truth_col].size() || t < 0) throw std::invalid_argument("bad truth");
            if (cfg.num_classes && (p >= *cfg.num_classes || t >= *cfg.num_classes)) {
                throw std::invalid_argument("class id out of range");
            }
            preds.push_back(p);
            truths.push_back(t);
        } catch (const std::exception& e) {
            errors.push_back({{"line", line_no}, {"error", e.what()}});
            spdlog::error("line {}: {}", line_no, e.what());
        }
    }
    if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no valid prediction rows");

    int num_classes = cfg.num_classes.value_or(0);
    if (num_classes == 0) {
        num_classes = 1 + std::max(*std::max_element(preds.begin(), preds.end()), *std::max_element(truths.begin(), truths.end()));
    }
    const MetricsReport report = compute_metrics(preds, truths, num_classes);
    json j = report;
    j["num_classes"] = num_classes;
    j["rows"] = preds.size();
    j["errors"] = errors;
    write_json(cfg.output / "metrics.json", j);
    return errors.empty() ? 0 : 1;
}

int cmd_synth(const RunConfig& cfg) {
    if (cfg.count < 0) throw Error(ErrorCode::BadParams, "--count must be non-negative");
    prepare_output(cfg.output);
    fs::create_directories(cfg.output / "truth");

    constexpr int kCanvas = 96;
    constexpr int kClasses = 5;
    DatasetManifest manifest;
    manifest.class_names = {"normal", "tapered", "pyriform", "small", "amorphous"};
    manifest.native_size = std::pair{kCanvas, kCanvas};
    for (int k = 0; k < cfg.count; ++k) {
        Rng rng = item_rng(cfg.seed, static_cast<std::uint64_t>(k), 0x73796e);
        std::uniform_real_distribution<double> jitter(-8.0, 8.0);
        std::uniform_real_distribution<double> major(11.0, 16.0);
        std::uniform_real_distribution<double> aspect(0.55, 0.75);
        std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
        Ellipse e;
        e.center = {(kCanvas - 1) / 2.0 + jitter(rng), (kCanvas - 1) / 2.0 + jitter(rng)};
        e.semi_major = major(rng);
        e.semi_minor = e.semi_major * aspect(rng);
        e.angle = angle(rng);

        synth::RenderOptions opts;
        opts.width = kCanvas;
        opts.height = kCanvas;
        opts.noise_sigma = 0.03;
        opts.seed = rng();
        const auto sdf = synth::ellipse_sdf(e);
        const std::string name = format_index("synth_", static_cast<std::size_t>(k), ".png");
        io::write_image(cfg.output / name, synth::render(sdf, opts));
        io::write_mask(cfg.output / "truth" / name, synth::threshold_mask(sdf, 0.0, kCanvas, kCanvas));

        // three experts: mostly unanimous, some 2-of-3 splits, a few three-way disagreements
        std::uniform_int_distribution<int> cls(0, kClasses - 1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const int label = cls(rng);
        const double r = u(rng);
        ManifestRecord rec;
        rec.path = name;
        if (r < 0.6) {
            rec.expert_labels = {label, label, label};
        } else if (r < 0.92) {
            rec.expert_labels = {label, label, (label + 1 + cls(rng) % (kClasses - 1)) % kClasses};
        } else {
            rec.expert_labels = {label, (label + 1) % kClasses, (label + 2) % kClasses};
        }
        manifest.records.push_back(std::move(rec));
    }
    std::ofstream out(cfg.output / "manifest.jsonl", std::ios::binary);
    write_manifest(out, manifest);
    return 0;
}

}  // namespace morphkit::cli
