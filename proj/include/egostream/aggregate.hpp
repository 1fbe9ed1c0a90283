// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "egostream/stream_model.hpp"

namespace egostream {

/// What the aggregator accumulates from each record.
enum class AggregationInput {
    Logits,   ///< raw class scores (default)
    Softmax,  ///< per-step softmax probabilities
};

/**
 * Running accumulator of per-step classifier outputs.
 *
 * Keeps the sum of the class scores pushed since the last reset together with
 * the running mean of the features. The mean is updated incrementally so its
 * magnitude stays bounded on long streams. All storage is sized at
 * construction; push() and reset() never allocate.
 */
class Aggregator {
public:
    Aggregator() = default;
    Aggregator(std::size_t feature_dim, std::size_t num_classes,
               AggregationInput input = AggregationInput::Logits);

    void push(const FrameRecord& record);
    void push(std::span<const float> feature, std::span<const float> logits);

    /// Average of the accumulated scores, or nullopt when nothing was pushed
    /// since the last reset.
    std::optional<std::vector<double>> output() const;

    /// Allocation-free variant of output(); returns false when empty.
    bool output_into(std::span<double> out) const;

    void reset() noexcept;

    std::uint64_t count() const noexcept { return n_; }
    std::span<const double> logit_sum() const noexcept { return logit_sum_; }
    std::span<const double> feature_mean() const noexcept { return feature_mean_; }
    std::size_t feature_dim() const noexcept { return feature_mean_.size(); }
    std::size_t num_classes() const noexcept { return logit_sum_.size(); }
    AggregationInput input() const noexcept { return input_; }

    bool operator==(const Aggregator& other) const noexcept {
        return n_ == other.n_ && input_ == other.input_ && logit_sum_ == other.logit_sum_ &&
               feature_mean_ == other.feature_mean_;
    }

private:
    std::vector<double> logit_sum_;
    std::vector<double> feature_mean_;
    std::vector<double> scratch_;
    std::uint64_t n_ = 0;
    AggregationInput input_ = AggregationInput::Logits;
};

/// Index of the largest score; ties go to the lowest index.
std::size_t argmax(std::span<const double> scores);

enum class SamplingKind { Uniform, Dense };

struct SamplerSpec {
    SamplingKind kind = SamplingKind::Uniform;
    std::uint32_t frames_per_clip = 5;  // T_s
    std::uint32_t num_clips = 1;
};

void validate_sampler(const SamplerSpec& spec);

/**
 * Frame indices (relative to the start of the video) for each clip.
 *
 * Uniform: index_j = floor(j * (N - 1) / (T_s - 1)), endpoints included. With
 * several clips, clip c is shifted by c / num_clips of the stride and clamped
 * to the last frame.
 *
 * Dense: num_clips windows of T_s contiguous frames whose starts are spread
 * evenly over [0, N - T_s] (a single clip is centred). Indices past the end of
 * a short video repeat the last frame.
 */
std::vector<std::vector<std::uint64_t>> sample_indices(const SamplerSpec& spec, std::uint64_t num_frames);

}  // namespace egostream
