// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/pipeline.hpp"

#include <algorithm>

namespace egostream {

OnlinePipeline::OnlinePipeline(std::size_t feature_dim, std::size_t num_classes, const BoundaryStrategy& strategy,
                               AggregationInput input, const std::string& video_id)
    : kind_(strategy.kind), agg_(feature_dim, num_classes, input), scratch_(num_classes) {
    switch (kind_) {
        case StrategyKind::Sbl:
            validate(strategy.sbl);
            sbl_k_ = strategy.sbl.k;
            break;
        case StrategyKind::Dbl:
            dbl_ = DblDetector(feature_dim, strategy.dbl, true);
            break;
        case StrategyKind::A2:
            twofold_ = TwoFoldAggregator(feature_dim, num_classes, strategy.dbl, strategy.delta, input);
            break;
        case StrategyKind::External:
            if (auto it = strategy.external.find(video_id); it != strategy.external.end()) {
                external_ = it->second;
                std::sort(external_.begin(), external_.end());
            }
            break;
    }
}

std::optional<BoundaryEvent> OnlinePipeline::step(const FrameRecord& record) {
    std::optional<BoundaryEvent> event;
    switch (kind_) {
        case StrategyKind::Sbl: {
            if (sbl_pending_) {
                agg_.reset();
                sbl_pending_ = false;
            }
            agg_.push(record);
            const SblStep s = sbl_step(sbl_counter_, sbl_k_);
            sbl_counter_ = s.counter;
            if (s.reset) {
                sbl_pending_ = true;
                event = BoundaryEvent{record.frame_index, 0};
            }
            break;
        }
        case StrategyKind::Dbl:
            if (dbl_.step(record)) {
                agg_.reset();
                event = BoundaryEvent{record.frame_index, 0};
            }
            agg_.push(record);
            break;
        case StrategyKind::External:
            while (external_next_ < external_.size() && external_[external_next_] < record.frame_index) {
                ++external_next_;
            }
            if (external_next_ < external_.size() && external_[external_next_] == record.frame_index) {
                agg_.reset();
                event = BoundaryEvent{record.frame_index, 0};
                ++external_next_;
            }
            agg_.push(record);
            break;
        case StrategyKind::A2:
            event = twofold_.step(record);
            break;
    }
    return event;
}

bool OnlinePipeline::output_into(std::span<double> out) const {
    return kind_ == StrategyKind::A2 ? twofold_.output_into(out) : agg_.output_into(out);
}

std::optional<std::size_t> OnlinePipeline::predict() const {
    if (!output_into(scratch_)) return std::nullopt;
    return argmax(scratch_);
}

}  // namespace egostream
