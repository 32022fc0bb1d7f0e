#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morphkit/imaging.hpp"

namespace morphkit {

using Rng = std::mt19937_64;

struct LabeledSample {
    RasterImage crop;
    std::optional<BinaryMask> mask;
    int majority_label{};
    int minority_label{};  // equals majority_label when there is no dissent
    std::string sample_id;
};

struct MixParams {
    double alpha{0.5};
    double gamma{0.85};
    std::uint64_t seed{0};

    void validate() const;
};

struct MixedSample {
    RasterImage crop;
    std::optional<GradientField> mask;  // blended, kept real-valued
    int target{};
    double lambda{};
    std::pair<std::string, std::string> parents;
    std::array<int, 4> parent_labels{};  // (y_i^a, y_i^b, y_j^a, y_j^b)
};

struct PredictionVector {
    std::vector<double> probs;

    // Throws BadPrediction unless non-negative and summing to 1 within 1e-6.
    void validate() const;
};

// (crop, mask) -> (crop', mask') with one shared set of geometric draws.
using Augmentation = std::function<std::pair<RasterImage, BinaryMask>(const RasterImage&, const BinaryMask&)>;

// Random oversampling of every class (by majority label) up to the largest
// class count. Originals keep their order and come first; duplicates follow
// in ascending class order.
std::vector<LabeledSample> oversample(std::span<const LabeledSample> samples, std::uint64_t seed);

// Index-level oversampling used by oversample(); returns source indices.
std::vector<std::size_t> oversample_indices(std::span<const int> majority_labels, std::uint64_t seed);

// One partner per sample drawn uniformly from the other members of its
// majority class; a class of one pairs with itself.
std::vector<std::pair<std::size_t, std::size_t>> pair_intra_class(std::span<const int> majority_labels,
                                                                  std::uint64_t seed);

double sample_lambda(double alpha, Rng& rng);

// Blends the augmented crops and masks; lambda weighs sample_i.
MixedSample mix(const LabeledSample& sample_i, const LabeledSample& sample_j, double lambda, const Augmentation& aug_i,
                const Augmentation& aug_j);

// Identity augmentation.
std::pair<RasterImage, BinaryMask> no_augmentation(const RasterImage& crop, const BinaryMask& mask);

// gamma * CE(pred, y_a) + (1 - gamma) * CE(pred, y_b), log clamped at 1e-12.
double soft_loss(const PredictionVector& pred, int y_a, int y_b, double gamma);

double soft_mixup_loss(const PredictionVector& pred, std::pair<int, int> labels_i, std::pair<int, int> labels_j,
                       double lambda, double gamma);

}  // namespace morphkit
