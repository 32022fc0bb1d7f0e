#pragma once

#include <cstdint>
#include <filesystem>

#include "config.hpp"

namespace morphkit::cli {

// Each command returns 0 when every item succeeded and 1 when at least one
// item failed (the rest are still written). Unusable inputs throw.
int cmd_gen_masks(const RunConfig& cfg);
int cmd_refine(const RunConfig& cfg);
int cmd_mix(const RunConfig& cfg);
int cmd_split(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);

// Writes a demo corpus: raw head images plus manifest.jsonl, with ground
// truth masks under truth/.
int cmd_synth(const RunConfig& cfg);

// Per-item random stream; identical for a given (seed, index, stream)
// regardless of worker count.
Rng item_rng(std::uint64_t seed, std::uint64_t index, std::uint32_t stream);

inline constexpr std::uint32_t kMixStream = 0x6d6978;

// Mask for an image record: <base>_refined.png, else <base>_mask.png, where
// base is the image stem without a trailing "_crop". Empty when neither exists.
std::filesystem::path mask_for_image(const std::filesystem::path& image);

}  // namespace morphkit::cli
