// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "egostream/aggregate.hpp"
#include "egostream/boundary.hpp"
#include "egostream/stream_model.hpp"
#include "egostream/twofold.hpp"

namespace egostream {

enum class Mode { Offline, Streaming, Online };
enum class Trimming { Trimmed, Untrimmed };
enum class StrategyKind { Sbl, Dbl, A2, External };

/// How an online run finds action boundaries.
struct BoundaryStrategy {
    StrategyKind kind = StrategyKind::A2;
    SblConfig sbl;
    DblConfig dbl;
    std::uint32_t delta = kDefaultDelta;
    /// EXTERNAL only: per video, frame indices at which a new segment starts.
    /// The aggregator is flushed right before such a frame is pushed.
    std::map<std::string, std::vector<std::uint64_t>> external;
};

struct ProtocolSpec {
    Mode mode = Mode::Online;
    Trimming trimming = Trimming::Untrimmed;
    BoundaryStrategy strategy;                 // ONLINE only
    SamplerSpec sampler;                       // OFFLINE only
    bool full_segment_window = false;          // OFFLINE: one dense clip spanning the whole segment
    AggregationInput input = AggregationInput::Logits;
    double observed_fraction = 1.0;            // STREAMING: predict after this share of each segment
};

void validate(const ProtocolSpec& spec);

struct SegmentPrediction {
    std::size_t segment = 0;  // index into dataset.segments
    std::uint64_t stop_frame = 0;
    int label = kUnknownLabel;
    std::optional<std::size_t> predicted;  // nullopt when the aggregator was empty
    bool correct = false;

    bool operator==(const SegmentPrediction&) const = default;
};

struct VideoResult {
    std::string video_id;
    std::string train_domain;
    std::string test_domain;
    std::vector<SegmentPrediction> predictions;
    std::vector<BoundaryEvent> events;  // ONLINE only
};

struct ClassCounts {
    std::uint64_t evaluated = 0;
    std::uint64_t correct = 0;

    bool operator==(const ClassCounts&) const = default;
};

struct PairStats {
    std::uint64_t evaluated = 0;
    std::uint64_t correct = 0;
    double accuracy() const noexcept { return evaluated ? static_cast<double>(correct) / evaluated : 0.0; }
};

using DomainPair = std::pair<std::string, std::string>;  // (train, test)

struct DomainMeans {
    std::optional<double> mean_seen;
    std::optional<double> mean_unseen;
    std::optional<double> mean_all;
};

struct EvalReport {
    std::map<DomainPair, PairStats> per_pair;
    DomainMeans means;
    std::vector<ClassCounts> per_class;
    std::uint64_t num_evaluated_segments = 0;
    std::vector<VideoResult> videos;

    /// Pooled Top-1 over all evaluated segments.
    double pooled_accuracy() const noexcept;
};

/// One input of a benchmark run: a test stream plus the domain its backbone was
/// trained on (defaults to the stream's own domain, i.e. a seen pair).
struct EvalInput {
    const StreamDataset* dataset = nullptr;
    std::string train_domain;
};

// Single-video runners.
VideoResult run_offline_video(const StreamDataset& dataset, const ProtocolSpec& spec);
VideoResult run_streaming_video(const StreamDataset& dataset, const ProtocolSpec& spec);
VideoResult run_online_video(const StreamDataset& dataset, const ProtocolSpec& spec);
VideoResult run_video(const StreamDataset& dataset, const ProtocolSpec& spec);

/// Merges per-video results into a report. Order of `videos` is preserved.
EvalReport build_report(std::vector<VideoResult> videos, std::uint32_t num_classes);

/// Runs `spec` over every input, evaluating up to `jobs` videos concurrently.
/// The report does not depend on `jobs`.
EvalReport evaluate(const std::vector<EvalInput>& inputs, const ProtocolSpec& spec, unsigned jobs = 1);

EvalReport run_offline(const StreamDataset& dataset, const ProtocolSpec& spec);
EvalReport run_streaming(const StreamDataset& dataset, const ProtocolSpec& spec);
EvalReport run_online(const StreamDataset& dataset, const ProtocolSpec& spec);

struct CurvePoint {
    double fraction = 1.0;
    double accuracy = 0.0;  // unweighted mean over domain pairs
    std::uint64_t evaluated = 0;
};

/// Streaming accuracy when each segment is only observed up to
/// start + ceil(p * length) - 1.
std::vector<CurvePoint> accuracy_vs_percentage(const std::vector<EvalInput>& inputs,
                                               const std::vector<double>& fractions, unsigned jobs = 1,
                                               AggregationInput input = AggregationInput::Logits);

enum class SweepParameter { K, Tau, Delta };

struct SweepPoint {
    double value = 0.0;
    EvalReport report;
};

/// One report per grid value, in grid order. `base` must be an ONLINE spec
/// whose strategy uses the swept parameter.
std::vector<SweepPoint> sweep(const std::vector<EvalInput>& inputs, const ProtocolSpec& base, SweepParameter param,
                              const std::vector<double>& values, unsigned jobs = 1);

/// Unweighted means over (train, test) pairs: diagonal pairs are seen,
/// off-diagonal pairs unseen. Absent categories stay nullopt.
DomainMeans aggregate_domains(const std::map<DomainPair, double>& accuracies);

/// Frames at which a new annotated interval begins or a previous one has just
/// ended, excluding frame 0; the reset schedule that replays streaming
/// inference through the online runner.
std::vector<std::uint64_t> true_boundaries(const StreamDataset& dataset);

struct BoundaryMatch {
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t false_negatives = 0;
    double recall() const noexcept;
    double precision() const noexcept;
};

/// Greedy one-to-one matching of detected to true boundaries within
/// +-`tolerance` frames (both lists sorted).
BoundaryMatch match_boundaries(const std::vector<std::uint64_t>& detected, const std::vector<std::uint64_t>& truth,
                               std::uint64_t tolerance);

}  // namespace egostream
