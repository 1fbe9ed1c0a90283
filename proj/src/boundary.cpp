// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "egostream/error.hpp"

namespace egostream {

void validate(const SblConfig& config) {
    if (config.k < 1) throw Error(ErrorCode::InvalidConfig, "SBL k must be >= 1");
}

void validate(const DblConfig& config) {
    if (!(config.threshold > 0.0) || !std::isfinite(config.threshold)) {
        throw Error(ErrorCode::InvalidConfig, "DBL threshold must be a positive finite number");
    }
}

namespace {

template <typename R>
double distance_impl(std::span<const float> f, std::span<const R> r, DistanceMetric metric) {
    if (f.size() != r.size()) {
        throw Error(ErrorCode::DimensionMismatch, "distance between vectors of size " + std::to_string(f.size()) +
                                                      " and " + std::to_string(r.size()));
    }
    if (f.empty()) return 0.0;
    if (metric == DistanceMetric::Mse) {
        double acc = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double d = static_cast<double>(f[i]) - static_cast<double>(r[i]);
            acc += d * d;
        }
        return acc / static_cast<double>(f.size());
    }
    double dot = 0.0, ff = 0.0, rr = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = f[i];
        const double b = r[i];
        dot += a * b;
        ff += a * a;
        rr += b * b;
    }
    if (ff == 0.0 || rr == 0.0) return 1.0;
    // Rounding can push the cosine a hair past +-1.
    return std::clamp(1.0 - dot / (std::sqrt(ff) * std::sqrt(rr)), 0.0, 2.0);
}

}  // namespace

double dbl_distance(std::span<const float> feature, std::span<const double> reference, DistanceMetric metric) {
    return distance_impl(feature, reference, metric);
}

double dbl_distance(std::span<const float> feature, std::span<const float> reference, DistanceMetric metric) {
    return distance_impl(feature, reference, metric);
}

DblDetector::DblDetector(std::size_t feature_dim, DblConfig config, bool armed)
    : config_(config), reference_(feature_dim, 0.0), armed_(armed) {
    validate(config_);
}

double DblDetector::score(std::span<const float> feature) const {
    if (reference_count_ == 0) return -1.0;
    return dbl_distance(feature, std::span<const double>(reference_), config_.metric);
}

bool DblDetector::step(std::span<const float> feature) {
    if (feature.size() != reference_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "DBL expects D=" + std::to_string(reference_.size()) + ", got " +
                                                      std::to_string(feature.size()));
    }
    if (reference_count_ == 0) {
        seed(feature);
        return false;
    }
    if (armed_ && frames_since_reset_ >= config_.warmup && score(feature) > config_.threshold) {
        seed(feature);
        return true;
    }
    absorb(feature);
    ++frames_since_reset_;
    return false;
}

void DblDetector::reset() noexcept {
    std::fill(reference_.begin(), reference_.end(), 0.0);
    reference_count_ = 0;
    frames_since_reset_ = 0;
}

void DblDetector::arm(std::span<const double> reference, std::uint64_t count) {
    if (reference.size() != reference_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "DBL reference has wrong dimension");
    }
    armed_ = true;
    if (count == 0) {
        reset();
        return;
    }
    std::copy(reference.begin(), reference.end(), reference_.begin());
    reference_count_ = count;
    // Same bookkeeping as if the reference had been seeded and grown frame by
    // frame: a one-frame reference has frames_since_reset == 0.
    frames_since_reset_ = count - 1;
}

void DblDetector::seed(std::span<const float> feature) noexcept {
    std::copy(feature.begin(), feature.end(), reference_.begin());
    reference_count_ = 1;
    frames_since_reset_ = 0;
}

void DblDetector::absorb(std::span<const float> feature) noexcept {
    if (config_.reference == DblReference::PreviousFrame) {
        std::copy(feature.begin(), feature.end(), reference_.begin());
        reference_count_ = 1;
        return;
    }
    ++reference_count_;
    const double inv = 1.0 / static_cast<double>(reference_count_);
    for (std::size_t i = 0; i < reference_.size(); ++i) {
        reference_[i] += (static_cast<double>(feature[i]) - reference_[i]) * inv;
    }
}

}  // namespace egostream
