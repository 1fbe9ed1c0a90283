// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "egostream/stream_model.hpp"

namespace egostream {

/**
 * Parameters of the synthetic stream generator.
 *
 * Every action frame of class c gets feature = centroid_c + N(0, sigma_a^2)
 * and logits = beta * onehot(c) + N(0, 0.1^2). Overlapping neighbours blend
 * linearly across the overlap; unknown gaps are pure noise.
 */
struct SynthConfig {
    std::uint32_t num_classes = 8;
    std::uint32_t feature_dim = 64;
    /// Optional explicit centroids (normalized on use). Empty means random unit
    /// vectors with pairwise cosine below `max_centroid_cosine`.
    std::vector<std::vector<float>> class_centroids;
    double max_centroid_cosine = 0.3;
    double within_action_noise = 0.0;  // sigma_a
    double logit_sharpness = 5.0;      // beta
    double logit_noise = 0.1;
    std::uint32_t min_frames = 60;
    std::uint32_t max_frames = 120;
    double overlap_fraction = 0.0;
    std::uint32_t overlap_length = 20;
    double unknown_gap_probability = 0.0;
    double unknown_noise = 0.0;  // sigma_u
    double unknown_logit_noise = 0.5;
    std::uint64_t seed = 0;

    std::string video_id = "synth";
    std::string domain_id = "D1";
    double fps = 30.0;
};

void validate(const SynthConfig& config);

/// Unit-norm class centroids for `config` (explicit ones normalized, otherwise
/// rejection-sampled from the seed).
std::vector<std::vector<float>> make_centroids(const SynthConfig& config);

/// Deterministic for a fixed config. `total_segments` counts action segments;
/// unknown gaps come on top of them.
StreamDataset generate(const SynthConfig& config, std::uint32_t total_segments);

/// Start frames of every segment except the first, sorted.
std::vector<std::uint64_t> oracle_boundaries(const StreamDataset& dataset);

/// Smallest pairwise MSE between centroids; DBL thresholds below it separate
/// every pair of classes on noise-free streams.
double min_centroid_mse_gap(const std::vector<std::vector<float>>& centroids);

}  // namespace egostream
