#include "config.hpp"

#include <fstream>
#include <set>

#include "morphkit/error.hpp"

namespace morphkit::cli {

using nlohmann::json;

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw Error(ErrorCode::Schema, "unknown config key \"" + key + "\" in " + where);
    }
}

}  // namespace

void apply_config(const json& j, RunConfig& cfg) {
    if (!j.is_object()) throw Error(ErrorCode::Schema, "config must be a JSON object");
    check_keys(j,
               {"input", "output", "seed", "workers", "n", "m", "s", "c", "half_len", "exact_closure", "overlay", "alpha",
                "gamma", "lambda", "subset", "k", "num_classes", "count", "prior", "augment"},
               "config");
    try {
        if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
        if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
        read_key(j, "seed", cfg.seed);
        read_key(j, "workers", cfg.workers);
        read_key(j, "n", cfg.refine.n);
        read_key(j, "m", cfg.refine.m);
        read_key(j, "s", cfg.refine.s);
        read_key(j, "c", cfg.refine.c);
        read_key(j, "half_len", cfg.refine.half_len);
        read_key(j, "exact_closure", cfg.refine.exact_closure);
        read_key(j, "overlay", cfg.overlay);
        read_key(j, "alpha", cfg.mix.alpha);
        read_key(j, "gamma", cfg.mix.gamma);
        if (j.contains("lambda") && !j.at("lambda").is_null()) cfg.lambda = j.at("lambda").get<double>();
        read_key(j, "subset", cfg.subset);
        read_key(j, "k", cfg.k);
        if (j.contains("num_classes") && !j.at("num_classes").is_null()) cfg.num_classes = j.at("num_classes").get<int>();
        read_key(j, "count", cfg.count);

        if (j.contains("prior")) {
            const json& p = j.at("prior");
            check_keys(p,
                       {"min_area_frac", "max_area_frac", "max_ellipse_residual", "centrality_weight", "area_weight",
                        "shape_weight", "blur_sigma", "crop_margin_frac"},
                       "prior");
            read_key(p, "min_area_frac", cfg.prior.min_area_frac);
            read_key(p, "max_area_frac", cfg.prior.max_area_frac);
            read_key(p, "max_ellipse_residual", cfg.prior.max_ellipse_residual);
            read_key(p, "centrality_weight", cfg.prior.centrality_weight);
            read_key(p, "area_weight", cfg.prior.area_weight);
            read_key(p, "shape_weight", cfg.prior.shape_weight);
            read_key(p, "blur_sigma", cfg.prior.blur_sigma);
            read_key(p, "crop_margin_frac", cfg.prior.crop_margin_frac);
        }
        if (j.contains("augment")) {
            const json& a = j.at("augment");
            check_keys(a, {"resize_to", "crop_min", "crop_max", "rotation_max_deg", "vflip", "shift_max_frac"}, "augment");
            read_key(a, "resize_to", cfg.augment.resize_to);
            read_key(a, "crop_min", cfg.augment.crop_min);
            read_key(a, "crop_max", cfg.augment.crop_max);
            read_key(a, "rotation_max_deg", cfg.augment.rotation_max_deg);
            read_key(a, "vflip", cfg.augment.vflip);
            read_key(a, "shift_max_frac", cfg.augment.shift_max_frac);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Schema, "config " + path.string() + ": " + e.what());
    }
    RunConfig cfg;
    apply_config(j, cfg);
    return cfg;
}

}  // namespace morphkit::cli
