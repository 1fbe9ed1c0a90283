// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "egostream/error.hpp"

namespace egostream {

namespace {

using Rng = std::mt19937_64;

double norm(const std::vector<float>& v) {
    double acc = 0.0;
    for (float x : v) acc += static_cast<double>(x) * x;
    return std::sqrt(acc);
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * b[i];
    return dot / (norm(a) * norm(b));
}

void normalize(std::vector<float>& v) {
    const double n = norm(v);
    for (auto& x : v) x = static_cast<float>(x / n);
}

std::uint32_t uniform_length(Rng& rng, const SynthConfig& c) {
    return std::uniform_int_distribution<std::uint32_t>(c.min_frames, c.max_frames)(rng);
}

}  // namespace

void validate(const SynthConfig& c) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, "synth: " + what); };
    if (c.num_classes < 2) fail("num_classes must be >= 2");
    if (c.feature_dim < 1) fail("feature_dim must be >= 1");
    if (c.min_frames < 1) fail("min_frames must be >= 1");
    if (c.max_frames < c.min_frames) fail("max_frames must be >= min_frames");
    if (!(c.within_action_noise >= 0.0) || !(c.unknown_noise >= 0.0) || !(c.logit_noise >= 0.0) ||
        !(c.unknown_logit_noise >= 0.0)) {
        fail("noise levels must be non-negative");
    }
    if (!(c.logit_sharpness > 0.0)) fail("logit_sharpness must be positive");
    if (!(c.overlap_fraction >= 0.0 && c.overlap_fraction < 1.0)) fail("overlap_fraction must be in [0, 1)");
    if (!(c.unknown_gap_probability >= 0.0 && c.unknown_gap_probability <= 1.0)) {
        fail("unknown_gap_probability must be in [0, 1]");
    }
    if (c.overlap_length < 1) fail("overlap_length must be >= 1");
    // A segment may overlap both neighbours; the two blend regions must not meet.
    if (c.overlap_fraction > 0.0 && 2 * c.overlap_length >= c.min_frames) {
        fail("2 * overlap_length must be < min_frames when overlaps are enabled");
    }
    if (!c.class_centroids.empty()) {
        if (c.class_centroids.size() != c.num_classes) fail("class_centroids must have num_classes entries");
        for (const auto& v : c.class_centroids) {
            if (v.size() != c.feature_dim) fail("class_centroids entries must have feature_dim components");
            if (norm(v) == 0.0) fail("class_centroids must be non-zero");
        }
    }
}

std::vector<std::vector<float>> make_centroids(const SynthConfig& c) {
    validate(c);
    std::vector<std::vector<float>> centroids;
    if (!c.class_centroids.empty()) {
        centroids = c.class_centroids;
        for (auto& v : centroids) normalize(v);
        for (std::size_t i = 0; i < centroids.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (centroids[i] == centroids[j]) throw Error(ErrorCode::InvalidConfig, "synth: duplicate centroids");
            }
        }
        return centroids;
    }
    // Separate stream so centroids do not depend on how many frames follow.
    Rng rng(c.seed ^ 0x9E3779B97F4A7C15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    constexpr int kMaxAttempts = 100000;
    while (centroids.size() < c.num_classes) {
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
            std::vector<float> v(c.feature_dim);
            for (auto& x : v) x = static_cast<float>(gauss(rng));
            if (norm(v) == 0.0) continue;
            normalize(v);
            accepted = std::all_of(centroids.begin(), centroids.end(),
                                   [&](const auto& other) { return cosine(v, other) < c.max_centroid_cosine; });
            if (accepted) centroids.push_back(std::move(v));
        }
        if (!accepted) {
            throw Error(ErrorCode::InvalidConfig, "synth: cannot place " + std::to_string(c.num_classes) +
                                                      " centroids with cosine < " +
                                                      std::to_string(c.max_centroid_cosine) + " in D=" +
                                                      std::to_string(c.feature_dim));
        }
    }
    return centroids;
}

double min_centroid_mse_gap(const std::vector<std::vector<float>>& centroids) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centroids.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < centroids[i].size(); ++k) {
                const double d = static_cast<double>(centroids[i][k]) - centroids[j][k];
                acc += d * d;
            }
            best = std::min(best, acc / static_cast<double>(centroids[i].size()));
        }
    }
    return best;
}

StreamDataset generate(const SynthConfig& c, std::uint32_t total_segments) {
    if (total_segments < 1) throw Error(ErrorCode::InvalidConfig, "synth: total_segments must be >= 1");
    const auto centroids = make_centroids(c);
    Rng rng(c.seed);

    // Layout: labels, lengths, gaps, then a fixed number of overlapping pairs.
    std::vector<int> labels(total_segments);
    std::vector<std::uint32_t> lengths(total_segments);
    std::uniform_int_distribution<int> pick_class(0, static_cast<int>(c.num_classes) - 1);
    std::uniform_int_distribution<int> pick_other(0, static_cast<int>(c.num_classes) - 2);
    for (std::uint32_t i = 0; i < total_segments; ++i) {
        if (i == 0) {
            labels[i] = pick_class(rng);
        } else {
            // Consecutive actions differ, otherwise the boundary is invisible.
            const int o = pick_other(rng);
            labels[i] = o >= labels[i - 1] ? o + 1 : o;
        }
        lengths[i] = uniform_length(rng, c);
    }
    const std::uint32_t pairs = total_segments - 1;
    std::vector<std::uint32_t> gap_lengths(pairs, 0);
    std::bernoulli_distribution has_gap(c.unknown_gap_probability);
    std::vector<std::uint32_t> eligible;
    for (std::uint32_t p = 0; p < pairs; ++p) {
        if (has_gap(rng)) {
            gap_lengths[p] = uniform_length(rng, c);
        } else {
            eligible.push_back(p);
        }
    }
    std::vector<bool> overlaps(pairs, false);
    std::shuffle(eligible.begin(), eligible.end(), rng);
    const auto num_overlaps =
        static_cast<std::size_t>(std::llround(c.overlap_fraction * static_cast<double>(eligible.size())));
    for (std::size_t i = 0; i < num_overlaps; ++i) overlaps[eligible[i]] = true;

    StreamDataset d;
    std::vector<LabelSegment>& segs = d.segments;
    std::vector<std::size_t> action_seg(total_segments);
    std::uint64_t cursor = 0;
    for (std::uint32_t i = 0; i < total_segments; ++i) {
        if (i > 0) {
            const std::uint32_t p = i - 1;
            const std::uint64_t prev_stop = segs[action_seg[p]].stop_frame;
            if (gap_lengths[p] > 0) {
                segs.push_back({c.video_id, prev_stop + 1, prev_stop + gap_lengths[p], kUnknownLabel});
                cursor = prev_stop + gap_lengths[p] + 1;
            } else if (overlaps[p]) {
                cursor = prev_stop + 1 - c.overlap_length;
            } else {
                cursor = prev_stop + 1;
            }
        }
        action_seg[i] = segs.size();
        segs.push_back({c.video_id, cursor, cursor + lengths[i] - 1, labels[i]});
    }
    const std::uint64_t num_frames = segs.back().stop_frame + 1;

    // Per-frame composition: which action(s) cover the frame.
    constexpr std::int64_t kNone = -1;
    std::vector<std::int64_t> first(num_frames, kNone), second(num_frames, kNone);
    for (std::uint32_t i = 0; i < total_segments; ++i) {
        const auto& s = segs[action_seg[i]];
        for (std::uint64_t t = s.start_frame; t <= s.stop_frame; ++t) {
            (first[t] == kNone ? first[t] : second[t]) = i;
        }
    }

    d.manifest.video_id = c.video_id;
    d.manifest.domain_id = c.domain_id;
    d.manifest.fps = c.fps;
    d.manifest.num_frames = num_frames;
    d.manifest.feature_dim = c.feature_dim;
    d.manifest.num_classes = c.num_classes;
    for (std::uint32_t k = 0; k < c.num_classes; ++k) d.manifest.class_names.push_back("class_" + std::to_string(k));

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> base_feature(c.feature_dim);
    std::vector<double> base_logits(c.num_classes);
    d.records.resize(num_frames);
    for (std::uint64_t t = 0; t < num_frames; ++t) {
        FrameRecord& r = d.records[t];
        r.frame_index = t;
        r.feature.resize(c.feature_dim);
        r.logits.resize(c.num_classes);
        double feature_sigma = c.within_action_noise;
        double logit_sigma = c.logit_noise;
        std::fill(base_feature.begin(), base_feature.end(), 0.0);
        std::fill(base_logits.begin(), base_logits.end(), 0.0);
        if (first[t] == kNone) {
            feature_sigma = c.unknown_noise;
            logit_sigma = c.unknown_logit_noise;
        } else if (second[t] == kNone) {
            const int label = labels[first[t]];
            for (std::uint32_t k = 0; k < c.feature_dim; ++k) base_feature[k] = centroids[label][k];
            base_logits[label] = c.logit_sharpness;
        } else {
            // Linear hand-over from the earlier action to the later one.
            const auto& next = segs[action_seg[second[t]]];
            const double alpha = static_cast<double>(t - next.start_frame + 1) / (c.overlap_length + 1.0);
            const int a = labels[first[t]];
            const int b = labels[second[t]];
            for (std::uint32_t k = 0; k < c.feature_dim; ++k) {
                base_feature[k] = (1.0 - alpha) * centroids[a][k] + alpha * centroids[b][k];
            }
            base_logits[a] += (1.0 - alpha) * c.logit_sharpness;
            base_logits[b] += alpha * c.logit_sharpness;
        }
        for (std::uint32_t k = 0; k < c.feature_dim; ++k) {
            r.feature[k] = static_cast<float>(base_feature[k] + feature_sigma * gauss(rng));
        }
        for (std::uint32_t k = 0; k < c.num_classes; ++k) {
            r.logits[k] = static_cast<float>(base_logits[k] + logit_sigma * gauss(rng));
        }
    }
    normalize_segments(segs, c.num_classes);
    return d;
}

std::vector<std::uint64_t> oracle_boundaries(const StreamDataset& dataset) {
    std::vector<std::uint64_t> starts;
    starts.reserve(dataset.segments.size());
    for (const auto& s : dataset.segments) starts.push_back(s.start_frame);
    std::sort(starts.begin(), starts.end());
    if (!starts.empty()) starts.erase(starts.begin());
    return starts;
}

}  // namespace egostream
