// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "egostream/protocols.hpp"

namespace egostream {

/// Returns the number of heap allocations made so far by the process. Supplied
/// by binaries that link the allocation probe.
using AllocationCounter = std::uint64_t (*)();

struct BenchConfig {
    StrategyKind strategy = StrategyKind::A2;  // Dbl means "single aggregator"
    std::uint32_t feature_dim = 1024;
    std::uint32_t num_classes = 8;
    std::uint64_t num_frames = 1'000'000;
    std::uint64_t warmup_frames = 10'000;
    DblConfig dbl{};
    /// Overrides dbl.threshold; by default half the smallest centroid gap of
    /// the synthetic stream, so boundaries actually fire.
    std::optional<double> tau;
    std::uint32_t delta = kDefaultDelta;
    std::uint32_t k = 16;
    std::uint64_t seed = 7;
    /// Distinct synthetic frames cycled through by the loop.
    std::uint32_t ring_frames = 2048;
    AllocationCounter allocation_counter = nullptr;
};

struct BenchReport {
    std::uint64_t frames_processed = 0;
    double wall_time_s = 0.0;
    double throughput_fps = 0.0;
    double latency_p50_us = 0.0;
    double latency_p99_us = 0.0;
    std::uint64_t boundary_events = 0;
    std::optional<std::uint64_t> allocations_after_warmup;
    std::uint32_t feature_dim = 0;
    std::uint32_t num_classes = 0;
    StrategyKind strategy = StrategyKind::A2;
};

void validate(const BenchConfig& config);

/// Drives the online step loop over an in-memory synthetic stream. Warmup
/// frames are processed but excluded from the statistics.
BenchReport bench_pipeline(const BenchConfig& config);

nlohmann::ordered_json to_json(const BenchReport& report);

}  // namespace egostream
