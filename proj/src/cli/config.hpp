#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "morphkit/data_pipeline.hpp"
#include "morphkit/grbr.hpp"
#include "morphkit/mask_gen.hpp"
#include "morphkit/softmixup.hpp"

namespace morphkit::cli {

// Flags map 1:1 onto these fields; a JSON config supplies the same keys.
struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path output;
    std::uint64_t seed{0};
    int workers{1};

    RefinementParams refine;
    bool overlay{false};

    PriorConfig prior;

    MixParams mix;
    AugmentationPipeline augment;
    std::optional<double> lambda;  // forces the mixing weight
    std::string subset{"pa"};      // all | pa | ta

    int k{5};
    std::optional<int> num_classes;

    int count{20};  // synth
};

// Keys: input, output, seed, workers, n, m, s, c, half_len, exact_closure,
// overlay, alpha, gamma, lambda, subset, k, num_classes, count, plus nested
// "prior" and "augment" objects. Unknown keys are a Schema error.
RunConfig load_config(const std::filesystem::path& path);
void apply_config(const nlohmann::json& j, RunConfig& cfg);

}  // namespace morphkit::cli
