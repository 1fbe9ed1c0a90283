// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "egostream/aggregate.hpp"
#include "egostream/boundary.hpp"

namespace egostream {

/// A reset of one aggregator at `frame_index`.
struct BoundaryEvent {
    std::uint64_t frame_index = 0;
    std::uint8_t aggregator = 0;

    bool operator==(const BoundaryEvent&) const = default;
};

inline constexpr std::uint32_t kDefaultDelta = 20;

/**
 * Two-fold aggregator.
 *
 * Both aggregators see every frame. Only one boundary detector is armed at a
 * time. When it fires, its aggregator is flushed and starts over from the
 * current frame, the detector disarms, and the other aggregator's detector is
 * armed `delta` frames later with that aggregator's feature mean as
 * reference. No detector can fire during the hand-off window, so resets of
 * different aggregators are always at least `delta` frames apart.
 *
 * The prediction combines both aggregators weighted by their frame counts,
 * which equals the sum of their raw score accumulators.
 */
class TwoFoldAggregator {
public:
    TwoFoldAggregator() = default;
    TwoFoldAggregator(std::size_t feature_dim, std::size_t num_classes, DblConfig dbl,
                      std::uint32_t delta = kDefaultDelta, AggregationInput input = AggregationInput::Logits);

    /// Processes one frame; returns the reset it caused, if any.
    std::optional<BoundaryEvent> step(const FrameRecord& record);

    /// n1 * A1(x) + n2 * A2(x); nullopt when both aggregators are empty.
    std::optional<std::vector<double>> output() const;
    bool output_into(std::span<double> out) const;

    /// argmax of output(), lowest index on ties.
    std::optional<std::size_t> predict() const;

    const Aggregator& aggregator(std::size_t i) const { return aggs_.at(i); }
    const DblDetector& detector(std::size_t i) const { return dbls_.at(i); }

    /// Index of the armed detector, or nullopt during a hand-off.
    std::optional<std::uint8_t> armed_index() const noexcept;
    std::optional<std::uint32_t> pending_arm_countdown() const noexcept { return countdown_; }
    std::uint32_t delta() const noexcept { return delta_; }

    /// Back to the initial state: both empty, first detector armed.
    void reset() noexcept;

private:
    std::array<Aggregator, 2> aggs_;
    std::array<DblDetector, 2> dbls_;
    std::uint8_t active_ = 0;  // armed detector, or the one about to be armed
    std::optional<std::uint32_t> countdown_;
    std::uint32_t delta_ = kDefaultDelta;
};

}  // namespace egostream
