// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egostream/aggregate.hpp"
#include "egostream/boundary.hpp"
#include "egostream/protocols.hpp"
#include "egostream/twofold.hpp"

namespace egostream {

/**
 * Per-frame online recognizer: aggregation plus one boundary strategy.
 *
 * SBL flushes the aggregator after every k-th frame; the event carries the
 * frame that triggered it. DBL flushes before pushing the anomalous frame.
 * EXTERNAL flushes before pushing each listed frame. A2 delegates to
 * TwoFoldAggregator. After construction, step() and output_into() do not
 * allocate.
 */
class OnlinePipeline {
public:
    OnlinePipeline(std::size_t feature_dim, std::size_t num_classes, const BoundaryStrategy& strategy,
                   AggregationInput input = AggregationInput::Logits, const std::string& video_id = {});

    std::optional<BoundaryEvent> step(const FrameRecord& record);

    bool output_into(std::span<double> out) const;
    std::optional<std::size_t> predict() const;

    StrategyKind kind() const noexcept { return kind_; }
    const Aggregator& aggregator() const noexcept { return agg_; }
    const TwoFoldAggregator& twofold() const noexcept { return twofold_; }

private:
    StrategyKind kind_;
    Aggregator agg_;
    DblDetector dbl_;
    TwoFoldAggregator twofold_;
    std::uint32_t sbl_k_ = 1;
    std::uint32_t sbl_counter_ = 0;
    bool sbl_pending_ = false;
    std::vector<std::uint64_t> external_;
    std::size_t external_next_ = 0;
    mutable std::vector<double> scratch_;
};

}  // namespace egostream
