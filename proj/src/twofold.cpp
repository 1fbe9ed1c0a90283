// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/twofold.hpp"

#include "egostream/error.hpp"

namespace egostream {

TwoFoldAggregator::TwoFoldAggregator(std::size_t feature_dim, std::size_t num_classes, DblConfig dbl,
                                     std::uint32_t delta, AggregationInput input)
    : aggs_{Aggregator(feature_dim, num_classes, input), Aggregator(feature_dim, num_classes, input)},
      dbls_{DblDetector(feature_dim, dbl, true), DblDetector(feature_dim, dbl, false)},
      delta_(delta) {
    if (delta_ < 1) throw Error(ErrorCode::InvalidConfig, "delta must be >= 1");
}

std::optional<BoundaryEvent> TwoFoldAggregator::step(const FrameRecord& record) {
    if (countdown_ && --*countdown_ == 0) {
        countdown_.reset();
        const Aggregator& survivor = aggs_[active_];
        dbls_[active_].arm(survivor.feature_mean(), survivor.count());
    }

    std::optional<BoundaryEvent> event;
    if (!countdown_ && dbls_[active_].step(record)) {
        aggs_[active_].reset();
        dbls_[active_].disarm();
        event = BoundaryEvent{record.frame_index, active_};
        active_ = static_cast<std::uint8_t>(1 - active_);
        countdown_ = delta_;
    }

    aggs_[0].push(record);
    aggs_[1].push(record);
    return event;
}

bool TwoFoldAggregator::output_into(std::span<double> out) const {
    const std::uint64_t n1 = aggs_[0].count();
    const std::uint64_t n2 = aggs_[1].count();
    if (n1 + n2 == 0) return false;
    const std::size_t classes = aggs_[0].num_classes();
    const double w1 = static_cast<double>(n1);
    const double w2 = static_cast<double>(n2);
    const auto s1 = aggs_[0].logit_sum();
    const auto s2 = aggs_[1].logit_sum();
    for (std::size_t c = 0; c < classes; ++c) {
        const double a1 = n1 ? w1 * (s1[c] / w1) : 0.0;
        const double a2 = n2 ? w2 * (s2[c] / w2) : 0.0;
        out[c] = a1 + a2;
    }
    return true;
}

std::optional<std::vector<double>> TwoFoldAggregator::output() const {
    std::vector<double> out(aggs_[0].num_classes());
    if (!output_into(out)) return std::nullopt;
    return out;
}

std::optional<std::size_t> TwoFoldAggregator::predict() const {
    auto o = output();
    if (!o) return std::nullopt;
    return argmax(*o);
}

std::optional<std::uint8_t> TwoFoldAggregator::armed_index() const noexcept {
    if (countdown_) return std::nullopt;
    return active_;
}

void TwoFoldAggregator::reset() noexcept {
    for (auto& a : aggs_) a.reset();
    for (auto& d : dbls_) d.reset();
    dbls_[0].arm();
    dbls_[1].disarm();
    active_ = 0;
    countdown_.reset();
}

}  // namespace egostream
