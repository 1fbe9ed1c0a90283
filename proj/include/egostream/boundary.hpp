// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "egostream/stream_model.hpp"

namespace egostream {

enum class DistanceMetric { Mse, CosineDistance };
enum class DblReference { SegmentMean, PreviousFrame };

struct SblConfig {
    std::uint32_t k = 16;  ///< frames between forced resets
};

struct DblConfig {
    double threshold = 1.0;
    DistanceMetric metric = DistanceMetric::Mse;
    DblReference reference = DblReference::SegmentMean;
    std::uint32_t warmup = 5;  ///< frames after a reset during which nothing can fire
};

void validate(const SblConfig& config);
void validate(const DblConfig& config);

/// MSE is (1/D) * sum (f - r)^2; cosine distance is 1 - cos(f, r), and 1 when
/// either vector has zero norm.
double dbl_distance(std::span<const float> feature, std::span<const double> reference, DistanceMetric metric);
double dbl_distance(std::span<const float> feature, std::span<const float> reference, DistanceMetric metric);

struct SblStep {
    std::uint32_t counter;
    bool reset;
};

/// counter' = (counter + 1) mod k; reset when counter' wraps to 0.
constexpr SblStep sbl_step(std::uint32_t counter, std::uint32_t k) noexcept {
    const std::uint32_t next = (counter + 1) % k;
    return {next, next == 0};
}

/**
 * Feature-space anomaly detector used to localize action boundaries.
 *
 * Frames of one action are treated as normal; a frame whose distance to the
 * reference exceeds the threshold marks the start of a new action. On an
 * anomaly the detector restarts with that frame as the new reference.
 */
class DblDetector {
public:
    DblDetector() = default;
    DblDetector(std::size_t feature_dim, DblConfig config, bool armed = true);

    /// Returns true when `record` is anomalous. Never fires while disarmed or
    /// during warmup.
    bool step(const FrameRecord& record) { return step(record.feature); }
    bool step(std::span<const float> feature);

    /// Distance of `feature` to the current reference without updating state;
    /// negative when no reference exists yet.
    double score(std::span<const float> feature) const;

    /// Clears the reference; the next frame seeds it.
    void reset() noexcept;

    /// Arms the detector with an explicit reference (e.g. an aggregator's
    /// feature mean built from `count` frames).
    void arm(std::span<const double> reference, std::uint64_t count);
    void arm() noexcept { armed_ = true; }
    void disarm() noexcept { armed_ = false; }

    bool armed() const noexcept { return armed_; }
    std::uint64_t frames_since_reset() const noexcept { return frames_since_reset_; }
    std::span<const double> reference() const noexcept { return reference_; }
    bool has_reference() const noexcept { return reference_count_ > 0; }
    const DblConfig& config() const noexcept { return config_; }

private:
    void seed(std::span<const float> feature) noexcept;
    void absorb(std::span<const float> feature) noexcept;

    DblConfig config_;
    std::vector<double> reference_;
    std::uint64_t reference_count_ = 0;
    std::uint64_t frames_since_reset_ = 0;
    bool armed_ = true;
};

}  // namespace egostream
