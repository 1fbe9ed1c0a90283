// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/bench.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include "egostream/error.hpp"
#include "egostream/pipeline.hpp"
#include "egostream/report.hpp"
#include "egostream/synth.hpp"

namespace egostream {

void validate(const BenchConfig& c) {
    if (c.feature_dim < 1 || c.num_classes < 2) {
        throw Error(ErrorCode::InvalidConfig, "bench needs D >= 1 and C >= 2");
    }
    if (c.num_frames < c.warmup_frames + 1000) {
        throw Error(ErrorCode::InvalidConfig, "bench needs num_frames >= warmup_frames + 1000");
    }
    if (c.ring_frames < 1) throw Error(ErrorCode::InvalidConfig, "bench ring must hold at least one frame");
    if (c.strategy == StrategyKind::External) {
        throw Error(ErrorCode::InvalidConfig, "bench supports single, a2 and sbl strategies");
    }
    if (c.strategy == StrategyKind::Sbl && c.k < 1) throw Error(ErrorCode::InvalidConfig, "SBL k must be >= 1");
    if (c.strategy == StrategyKind::A2 && c.delta < 1) throw Error(ErrorCode::InvalidConfig, "delta must be >= 1");
}

namespace {

double percentile(std::vector<float>& samples, double q) {
    if (samples.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(q * static_cast<double>(samples.size() - 1));
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(rank), samples.end());
    return samples[rank];
}

}  // namespace

BenchReport bench_pipeline(const BenchConfig& c) {
    validate(c);

    SynthConfig synth;
    synth.feature_dim = c.feature_dim;
    synth.num_classes = c.num_classes;
    synth.within_action_noise = 0.01;
    synth.min_frames = 30;
    synth.max_frames = 90;
    synth.overlap_fraction = 0.3;
    synth.overlap_length = 10;
    synth.seed = c.seed;
    synth.video_id = "bench";
    StreamDataset data = generate(synth, c.ring_frames / synth.min_frames + 1);
    data.records.resize(std::min<std::size_t>(data.records.size(), c.ring_frames));
    std::vector<FrameRecord>& ring = data.records;

    BoundaryStrategy strategy;
    strategy.kind = c.strategy;
    strategy.dbl = c.dbl;
    strategy.dbl.threshold = c.tau.value_or(0.5 * min_centroid_mse_gap(make_centroids(synth)));
    strategy.delta = c.delta;
    strategy.sbl.k = c.k;
    OnlinePipeline pipeline(c.feature_dim, c.num_classes, strategy);
    std::vector<double> output(c.num_classes);

    std::vector<float> latencies;
    latencies.reserve(c.num_frames - c.warmup_frames);
    BenchReport report;
    report.feature_dim = c.feature_dim;
    report.num_classes = c.num_classes;
    report.strategy = c.strategy;

    using Clock = std::chrono::steady_clock;
    std::uint64_t allocations_at_start = 0;
    Clock::time_point start;
    std::size_t slot = 0;
    for (std::uint64_t t = 0; t < c.num_frames; ++t) {
        if (t == c.warmup_frames) {
            if (c.allocation_counter) allocations_at_start = c.allocation_counter();
            start = Clock::now();
        }
        FrameRecord& record = ring[slot];
        record.frame_index = t;
        if (++slot == ring.size()) slot = 0;

        const auto before = Clock::now();
        const bool reset = pipeline.step(record).has_value();
        pipeline.output_into(output);
        const auto after = Clock::now();

        if (t >= c.warmup_frames) {
            latencies.push_back(std::chrono::duration<float, std::micro>(after - before).count());
            if (reset) ++report.boundary_events;
        }
    }
    const auto stop = Clock::now();
    if (c.allocation_counter) report.allocations_after_warmup = c.allocation_counter() - allocations_at_start;

    report.frames_processed = c.num_frames - c.warmup_frames;
    report.wall_time_s = std::chrono::duration<double>(stop - start).count();
    report.throughput_fps = report.wall_time_s > 0.0 ? report.frames_processed / report.wall_time_s : 0.0;
    report.latency_p50_us = percentile(latencies, 0.50);
    report.latency_p99_us = percentile(latencies, 0.99);
    return report;
}

nlohmann::ordered_json to_json(const BenchReport& r) {
    nlohmann::ordered_json j;
    j["strategy"] = r.strategy == StrategyKind::Dbl ? std::string("single") : std::string(to_string(r.strategy));
    j["feature_dim"] = r.feature_dim;
    j["num_classes"] = r.num_classes;
    j["frames_processed"] = r.frames_processed;
    j["wall_time_s"] = r.wall_time_s;
    j["throughput_fps"] = r.throughput_fps;
    j["latency_p50_us"] = r.latency_p50_us;
    j["latency_p99_us"] = r.latency_p99_us;
    j["boundary_events"] = r.boundary_events;
    j["realtime_factor_30fps"] = r.throughput_fps / 30.0;
    if (r.allocations_after_warmup) {
        j["allocations_after_warmup"] = *r.allocations_after_warmup;
    } else {
        j["allocations_after_warmup"] = nullptr;
    }
    return j;
}

}  // namespace egostream
