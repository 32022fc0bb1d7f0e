#include "morphkit/softmixup.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "morphkit/error.hpp"

namespace morphkit {

namespace {

constexpr double kLogFloor = 1e-12;

double cross_entropy(const PredictionVector& pred, int label) {
    return -std::log(std::max(pred.probs[static_cast<std::size_t>(label)], kLogFloor));
}

void check_label(const PredictionVector& pred, int label) {
    if (label < 0 || label >= static_cast<int>(pred.probs.size())) {
        throw Error(ErrorCode::BadLabel, "label " + std::to_string(label) + " outside prediction vector");
    }
}

std::map<int, std::vector<std::size_t>> group_by_label(std::span<const int> labels) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return groups;
}

}  // namespace

void MixParams::validate() const {
    if (!(alpha > 0.0)) throw Error(ErrorCode::BadParams, "alpha must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorCode::BadGamma, "gamma must lie in [0,1]");
}

void PredictionVector::validate() const {
    if (probs.empty()) throw Error(ErrorCode::BadPrediction, "empty prediction vector");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw Error(ErrorCode::BadPrediction, "negative or NaN probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw Error(ErrorCode::BadPrediction, "probabilities do not sum to 1");
}

std::vector<std::size_t> oversample_indices(std::span<const int> majority_labels, std::uint64_t seed) {
    if (majority_labels.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to oversample");
    const auto groups = group_by_label(majority_labels);
    std::size_t target = 0;
    for (const auto& [label, members] : groups) target = std::max(target, members.size());

    std::vector<std::size_t> out(majority_labels.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    Rng rng(seed);
    for (const auto& [label, members] : groups) {
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
        for (std::size_t k = members.size(); k < target; ++k) out.push_back(members[pick(rng)]);
    }
    return out;
}

std::vector<LabeledSample> oversample(std::span<const LabeledSample> samples, std::uint64_t seed) {
    std::vector<int> labels;
    labels.reserve(samples.size());
    for (const LabeledSample& s : samples) labels.push_back(s.majority_label);
    std::vector<LabeledSample> out;
    for (std::size_t idx : oversample_indices(labels, seed)) out.push_back(samples[idx]);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pair_intra_class(std::span<const int> majority_labels,
                                                                  std::uint64_t seed) {
    const auto groups = group_by_label(majority_labels);
    std::vector<std::pair<std::size_t, std::size_t>> pairs(majority_labels.size());
    Rng rng(seed);
    for (std::size_t i = 0; i < majority_labels.size(); ++i) {
        const std::vector<std::size_t>& members = groups.at(majority_labels[i]);
        if (members.size() == 1) {
            pairs[i] = {i, i};
            continue;
        }
        // uniform over the other members: draw from size-1 slots and skip i
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 2);
        const auto self = static_cast<std::size_t>(std::lower_bound(members.begin(), members.end(), i) - members.begin());
        std::size_t slot = pick(rng);
        if (slot >= self) ++slot;
        pairs[i] = {i, members[slot]};
    }
    return pairs;
}

double sample_lambda(double alpha, Rng& rng) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::BadParams, "alpha must be positive");
    std::gamma_distribution<double> g(alpha, 1.0);
    const double x = g(rng);
    const double y = g(rng);
    if (x + y == 0.0) return 0.5;
    return x / (x + y);
}

std::pair<RasterImage, BinaryMask> no_augmentation(const RasterImage& crop, const BinaryMask& mask) {
    return {crop, mask};
}

MixedSample mix(const LabeledSample& sample_i, const LabeledSample& sample_j, double lambda, const Augmentation& aug_i,
                const Augmentation& aug_j) {
    if (sample_i.majority_label != sample_j.majority_label) {
        throw Error(ErrorCode::LabelMismatch, "intra-class mixing needs equal majority labels");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::BadParams, "lambda must lie in [0,1]");
    if (sample_i.mask.has_value() != sample_j.mask.has_value()) {
        throw Error(ErrorCode::EmptyMask, "only one parent carries a mask");
    }
    const bool with_mask = sample_i.mask.has_value();
    const BinaryMask blank_i(sample_i.crop.width, sample_i.crop.height);
    const BinaryMask blank_j(sample_j.crop.width, sample_j.crop.height);
    const auto [xi, mi] = aug_i(sample_i.crop, with_mask ? *sample_i.mask : blank_i);
    const auto [xj, mj] = aug_j(sample_j.crop, with_mask ? *sample_j.mask : blank_j);
    if (xi.width != xj.width || xi.height != xj.height || xi.channels != xj.channels || mi.width != mj.width ||
        mi.height != mj.height) {
        throw Error(ErrorCode::DimensionMismatch, "augmented parents differ in shape");
    }

    MixedSample out;
    out.crop = RasterImage(xi.width, xi.height, xi.channels);
    for (std::size_t k = 0; k < out.crop.data.size(); ++k) {
        out.crop.data[k] = std::clamp(lambda * xi.data[k] + (1.0 - lambda) * xj.data[k], 0.0, 1.0);
    }
    if (with_mask) {
        GradientField soft(mi.width, mi.height);
        for (std::size_t k = 0; k < soft.magnitude.size(); ++k) {
            soft.magnitude[k] = lambda * mi.data[k] + (1.0 - lambda) * mj.data[k];
        }
        out.mask = std::move(soft);
    }
    out.target = sample_i.majority_label;
    out.lambda = lambda;
    out.parents = {sample_i.sample_id, sample_j.sample_id};
    out.parent_labels = {sample_i.majority_label, sample_i.minority_label, sample_j.majority_label,
                         sample_j.minority_label};
    return out;
}

double soft_loss(const PredictionVector& pred, int y_a, int y_b, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorCode::BadGamma, "gamma must lie in [0,1]");
    pred.validate();
    check_label(pred, y_a);
    check_label(pred, y_b);
    return gamma * cross_entropy(pred, y_a) + (1.0 - gamma) * cross_entropy(pred, y_b);
}

double soft_mixup_loss(const PredictionVector& pred, std::pair<int, int> labels_i, std::pair<int, int> labels_j,
                       double lambda, double gamma) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::BadParams, "lambda must lie in [0,1]");
    return lambda * soft_loss(pred, labels_i.first, labels_i.second, gamma) +
           (1.0 - lambda) * soft_loss(pred, labels_j.first, labels_j.second, gamma);
}

}  // namespace morphkit
