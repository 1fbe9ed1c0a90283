// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "egostream/error.hpp"

namespace egostream {

Aggregator::Aggregator(std::size_t feature_dim, std::size_t num_classes, AggregationInput input)
    : logit_sum_(num_classes, 0.0),
      feature_mean_(feature_dim, 0.0),
      scratch_(input == AggregationInput::Softmax ? num_classes : 0, 0.0),
      input_(input) {}

void Aggregator::push(const FrameRecord& record) { push(record.feature, record.logits); }

void Aggregator::push(std::span<const float> feature, std::span<const float> logits) {
    if (feature.size() != feature_mean_.size() || logits.size() != logit_sum_.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "aggregator expects D=" + std::to_string(feature_mean_.size()) + ", C=" +
                        std::to_string(logit_sum_.size()) + ", got D=" + std::to_string(feature.size()) +
                        ", C=" + std::to_string(logits.size()));
    }
    ++n_;
    if (input_ == AggregationInput::Softmax) {
        const double peak = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (std::size_t c = 0; c < logits.size(); ++c) {
            scratch_[c] = std::exp(static_cast<double>(logits[c]) - peak);
            z += scratch_[c];
        }
        for (std::size_t c = 0; c < logits.size(); ++c) logit_sum_[c] += scratch_[c] / z;
    } else {
        for (std::size_t c = 0; c < logits.size(); ++c) logit_sum_[c] += logits[c];
    }
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < feature.size(); ++i) {
        feature_mean_[i] += (static_cast<double>(feature[i]) - feature_mean_[i]) * inv_n;
    }
}

std::optional<std::vector<double>> Aggregator::output() const {
    if (n_ == 0) return std::nullopt;
    std::vector<double> out(logit_sum_.size());
    output_into(out);
    return out;
}

bool Aggregator::output_into(std::span<double> out) const {
    if (n_ == 0) return false;
    const double n = static_cast<double>(n_);
    for (std::size_t c = 0; c < logit_sum_.size(); ++c) out[c] = logit_sum_[c] / n;
    return true;
}

void Aggregator::reset() noexcept {
    std::fill(logit_sum_.begin(), logit_sum_.end(), 0.0);
    std::fill(feature_mean_.begin(), feature_mean_.end(), 0.0);
    n_ = 0;
}

std::size_t argmax(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return best;
}

void validate_sampler(const SamplerSpec& spec) {
    if (spec.frames_per_clip < 1) throw Error(ErrorCode::InvalidConfig, "sampler frames_per_clip must be >= 1");
    if (spec.num_clips < 1) throw Error(ErrorCode::InvalidConfig, "sampler num_clips must be >= 1");
}

std::vector<std::vector<std::uint64_t>> sample_indices(const SamplerSpec& spec, std::uint64_t num_frames) {
    validate_sampler(spec);
    const std::uint64_t n = std::max<std::uint64_t>(num_frames, 1);
    const std::uint64_t last = n - 1;
    const std::uint64_t ts = spec.frames_per_clip;
    const std::uint64_t clips = spec.num_clips;

    std::vector<std::vector<std::uint64_t>> out(clips, std::vector<std::uint64_t>(ts));
    if (spec.kind == SamplingKind::Uniform) {
        // Integer arithmetic keeps the grid exact. Offsets are in units of
        // 1 / (span_den * clips) frames.
        const std::uint64_t span_den = ts > 1 ? ts - 1 : 1;
        for (std::uint64_t c = 0; c < clips; ++c) {
            for (std::uint64_t j = 0; j < ts; ++j) {
                const std::uint64_t numer = (j * clips + c) * last;
                out[c][j] = std::min(last, numer / (span_den * clips));
            }
        }
    } else {
        const std::uint64_t room = n > ts ? n - ts : 0;
        for (std::uint64_t c = 0; c < clips; ++c) {
            // Round-half-up of c * room / (clips - 1); single clip centred.
            const std::uint64_t start = clips > 1 ? (2 * c * room + (clips - 1)) / (2 * (clips - 1)) : room / 2;
            for (std::uint64_t j = 0; j < ts; ++j) out[c][j] = std::min(last, start + j);
        }
    }
    return out;
}

}  // namespace egostream
