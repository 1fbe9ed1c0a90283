// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "egostream/error.hpp"
#include "egostream/pipeline.hpp"
#include "egostream/protocols.hpp"
#include "egostream/report.hpp"
#include "egostream/synth.hpp"
#include "test_util.hpp"

namespace egostream {
namespace {

using testing::make_manifest;

SynthConfig clean_config(std::uint64_t seed, const std::string& domain = "D1") {
    SynthConfig c;
    c.num_classes = 6;
    c.feature_dim = 24;
    c.min_frames = 30;
    c.max_frames = 70;
    c.seed = seed;
    c.domain_id = domain;
    c.video_id = domain + "_v" + std::to_string(seed);
    return c;
}

ProtocolSpec spec_for(Mode mode) {
    ProtocolSpec s;
    s.mode = mode;
    s.trimming = mode == Mode::Online ? Trimming::Untrimmed : Trimming::Trimmed;
    return s;
}

void expect_code(ErrorCode code, const std::function<void()>& fn) {
    try {
        fn();
        FAIL() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

TEST(ProtocolSpecValidation, Combinations) {
    ProtocolSpec s = spec_for(Mode::Offline);
    s.trimming = Trimming::Untrimmed;
    expect_code(ErrorCode::InvalidConfig, [&] { validate(s); });

    s = spec_for(Mode::Online);
    s.trimming = Trimming::Trimmed;
    s.strategy.kind = StrategyKind::External;
    expect_code(ErrorCode::InvalidConfig, [&] { validate(s); });

    s = spec_for(Mode::Online);
    s.strategy.dbl.threshold = 0.0;
    expect_code(ErrorCode::InvalidConfig, [&] { validate(s); });

    s = spec_for(Mode::Online);
    s.strategy.delta = 0;
    expect_code(ErrorCode::InvalidConfig, [&] { validate(s); });

    s = spec_for(Mode::Streaming);
    s.observed_fraction = 0.0;
    expect_code(ErrorCode::InvalidConfig, [&] { validate(s); });
    s.observed_fraction = 1.5;
    expect_code(ErrorCode::InvalidConfig, [&] { validate(s); });
}

TEST(Protocols, MissingAnnotations) {
    auto d = generate(clean_config(60), 3);
    d.segments.clear();
    expect_code(ErrorCode::AnnotationMissing, [&] { run_streaming(d, spec_for(Mode::Streaming)); });
}

TEST(Protocols, OfflineFullWindowEqualsStreaming) {
    SynthConfig c = clean_config(61);
    c.within_action_noise = 0.3;
    c.logit_noise = 3.0;  // noisy enough that some predictions are wrong
    c.unknown_gap_probability = 0.3;
    const auto d = generate(c, 80);
    ProtocolSpec off = spec_for(Mode::Offline);
    off.full_segment_window = true;
    const auto a = run_offline_video(d, off);
    const auto b = run_streaming_video(d, spec_for(Mode::Streaming));
    EXPECT_EQ(a.predictions, b.predictions);
}

TEST(Protocols, StreamingEqualsOnlineWithTrueBoundaries) {
    for (std::uint64_t seed = 62; seed < 72; ++seed) {
        SynthConfig c = clean_config(seed);
        c.logit_noise = 3.0;
        c.unknown_gap_probability = 0.25;
        c.unknown_noise = 0.5;
        const auto d = generate(c, 40);

        ProtocolSpec online = spec_for(Mode::Online);
        online.strategy.kind = StrategyKind::External;
        online.strategy.external[d.manifest.video_id] = true_boundaries(d);
        OnlinePipeline pipeline(c.feature_dim, c.num_classes, online.strategy, AggregationInput::Logits,
                                d.manifest.video_id);
        std::vector<double> out(c.num_classes);
        std::size_t seg = 0;
        for (const auto& r : d.records) {
            pipeline.step(r);
            for (; seg < d.segments.size() && d.segments[seg].stop_frame == r.frame_index; ++seg) {
                const auto& s = d.segments[seg];
                if (s.is_unknown()) continue;
                Aggregator ref(c.feature_dim, c.num_classes);
                for (std::uint64_t t = s.start_frame; t <= s.stop_frame; ++t) ref.push(d.records[t]);
                ASSERT_TRUE(pipeline.output_into(out));
                const auto expected = *ref.output();
                for (std::size_t k = 0; k < out.size(); ++k) {
                    EXPECT_NEAR(out[k], expected[k], 1e-9 * std::max(1.0, std::fabs(expected[k])));
                }
            }
        }
        EXPECT_EQ(run_online_video(d, online).predictions, run_streaming_video(d, spec_for(Mode::Streaming)).predictions);
    }
}

TEST(Protocols, CleanStreamsAreSolved) {
    const auto c = clean_config(73);
    const auto d = generate(c, 50);
    EXPECT_EQ(run_streaming(d, spec_for(Mode::Streaming)).pooled_accuracy(), 1.0);
    ProtocolSpec off = spec_for(Mode::Offline);
    EXPECT_EQ(run_offline(d, off).pooled_accuracy(), 1.0);

    ProtocolSpec online = spec_for(Mode::Online);
    online.strategy.dbl.threshold = 0.5 * min_centroid_mse_gap(make_centroids(c));
    online.strategy.kind = StrategyKind::Dbl;
    const auto dbl = run_online(d, online);
    EXPECT_EQ(dbl.pooled_accuracy(), 1.0);
    ASSERT_EQ(dbl.videos.size(), 1u);
    std::vector<std::uint64_t> frames;
    for (const auto& e : dbl.videos[0].events) frames.push_back(e.frame_index);
    EXPECT_EQ(frames, oracle_boundaries(d));
}

TEST(Protocols, SblEventsAtTriggeringFrames) {
    const auto d = generate(clean_config(74), 5);
    ProtocolSpec online = spec_for(Mode::Online);
    online.strategy.kind = StrategyKind::Sbl;
    online.strategy.sbl.k = 16;
    const auto v = run_online_video(d, online);
    ASSERT_EQ(v.events.size(), d.records.size() / 16);
    for (std::size_t i = 0; i < v.events.size(); ++i) EXPECT_EQ(v.events[i].frame_index, 16 * i + 15);
}

TEST(Protocols, UnknownSegmentsAreNotEvaluated) {
    SynthConfig c = clean_config(75);
    c.unknown_gap_probability = 1.0;
    const auto d = generate(c, 10);
    ASSERT_EQ(d.segments.size(), 19u);
    for (Mode m : {Mode::Offline, Mode::Streaming, Mode::Online}) {
        const auto v = run_video(d, spec_for(m));
        EXPECT_EQ(v.predictions.size(), 10u);
        for (const auto& p : v.predictions) EXPECT_FALSE(d.segments[p.segment].is_unknown());
    }
}

TEST(Protocols, OnlineTrimmedCarriesStateAcrossClips) {
    // Two clips of different classes; without resets the second clip's
    // prediction still sees the first.
    StreamDataset d;
    d.manifest = make_manifest(30, 1, 2);
    for (std::uint64_t t = 0; t < 30; ++t) {
        const bool first = t < 20;
        d.records.push_back({t, {0.0f}, {first ? 1.0f : 0.0f, first ? 0.0f : 1.0f}});
    }
    d.segments = {{"vid", 0, 19, 0}, {"vid", 20, 29, 1}};
    ProtocolSpec s = spec_for(Mode::Online);
    s.trimming = Trimming::Trimmed;
    s.strategy.kind = StrategyKind::Sbl;
    s.strategy.sbl.k = 1000;
    const auto v = run_online_video(d, s);
    ASSERT_EQ(v.predictions.size(), 2u);
    EXPECT_TRUE(v.predictions[0].correct);
    EXPECT_EQ(v.predictions[1].predicted, std::optional<std::size_t>(0));
    EXPECT_FALSE(v.predictions[1].correct);
}

TEST(Protocols, ObservedFractionCutoff) {
    StreamDataset d;
    d.manifest = make_manifest(10, 1, 2);
    for (std::uint64_t t = 0; t < 10; ++t) {
        d.records.push_back({t, {0.0f}, {t < 3 ? 1.0f : 0.0f, t < 3 ? 0.0f : 10.0f}});
    }
    d.segments = {{"vid", 0, 9, 0}};
    ProtocolSpec s = spec_for(Mode::Streaming);
    s.observed_fraction = 0.3;  // exactly three frames despite 0.3 * 10 > 3 in binary
    EXPECT_EQ(run_streaming_video(d, s).predictions[0].predicted, std::optional<std::size_t>(0));
    s.observed_fraction = 0.31;
    EXPECT_EQ(run_streaming_video(d, s).predictions[0].predicted, std::optional<std::size_t>(1));
    s.observed_fraction = 0.01;  // at least one frame
    EXPECT_EQ(run_streaming_video(d, s).predictions[0].predicted, std::optional<std::size_t>(0));
}

TEST(Protocols, NoPredictionCountsAsIncorrect) {
    VideoResult v;
    v.video_id = "x";
    v.train_domain = v.test_domain = "D1";
    v.predictions.push_back({0, 9, 1, std::nullopt, false});
    v.predictions.push_back({1, 19, 0, 0, true});
    const auto r = build_report({v}, 2);
    EXPECT_EQ(r.num_evaluated_segments, 2u);
    EXPECT_DOUBLE_EQ(r.pooled_accuracy(), 0.5);
    EXPECT_EQ(r.per_class[1], (ClassCounts{1, 0}));
}

TEST(Protocols, CurveAtFullObservationEqualsStreaming) {
    std::vector<StreamDataset> data;
    for (std::uint64_t seed = 76; seed < 80; ++seed) {
        SynthConfig c = clean_config(seed);
        c.logit_noise = 4.0;
        data.push_back(generate(c, 30));
    }
    std::vector<EvalInput> inputs;
    for (const auto& d : data) inputs.push_back({&d, {}});
    const auto curve = accuracy_vs_percentage(inputs, {0.1, 0.5, 1.0});
    ASSERT_EQ(curve.size(), 3u);
    const auto streaming = evaluate(inputs, spec_for(Mode::Streaming));
    EXPECT_EQ(curve[2].accuracy, *streaming.means.mean_all);
    EXPECT_EQ(curve[2].evaluated, streaming.num_evaluated_segments);
    // Noisy logits: seeing more of each segment helps.
    EXPECT_LT(curve[0].accuracy, curve[2].accuracy);
}

TEST(Protocols, SweepGrids) {
    const auto d = generate(clean_config(81), 20);
    const std::vector<EvalInput> inputs{{&d, {}}};
    ProtocolSpec base = spec_for(Mode::Online);
    base.strategy.kind = StrategyKind::Sbl;
    const std::vector<double> ks{3, 4, 5, 6, 10};
    const auto by_k = sweep(inputs, base, SweepParameter::K, ks);
    ASSERT_EQ(by_k.size(), ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        EXPECT_EQ(by_k[i].value, ks[i]);
        EXPECT_EQ(by_k[i].report.videos[0].events.size(), d.records.size() / static_cast<std::size_t>(ks[i]));
    }

    base.strategy.kind = StrategyKind::A2;
    base.strategy.dbl.threshold = 0.5 * min_centroid_mse_gap(make_centroids(clean_config(81)));
    const std::vector<double> deltas{1, 5, 10, 20, 30, 40, 50};
    const auto by_delta = sweep(inputs, base, SweepParameter::Delta, deltas);
    ASSERT_EQ(by_delta.size(), deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto& ev = by_delta[i].report.videos[0].events;
        for (std::size_t j = 1; j < ev.size(); ++j) EXPECT_GE(ev[j].frame_index - ev[j - 1].frame_index, deltas[i]);
    }

    expect_code(ErrorCode::InvalidConfig, [&] { sweep(inputs, base, SweepParameter::K, ks); });
    expect_code(ErrorCode::InvalidConfig, [&] { sweep(inputs, base, SweepParameter::Delta, {2.5}); });
    base.strategy.kind = StrategyKind::Dbl;
    expect_code(ErrorCode::InvalidConfig, [&] { sweep(inputs, base, SweepParameter::Delta, deltas); });
}

TEST(DomainMeansTest, SeenUnseen) {
    const auto m = aggregate_domains({{{"D1", "D1"}, 0.6}, {{"D1", "D2"}, 0.3}, {{"D2", "D1"}, 0.5}});
    EXPECT_DOUBLE_EQ(*m.mean_seen, 0.6);
    EXPECT_DOUBLE_EQ(*m.mean_unseen, 0.4);
    EXPECT_NEAR(*m.mean_all, 1.4 / 3, 1e-15);

    const auto only_seen = aggregate_domains({{{"D1", "D1"}, 1.0}});
    EXPECT_FALSE(only_seen.mean_unseen);
    EXPECT_FALSE(aggregate_domains({}).mean_all);
}

TEST(DomainMeansTest, ThreeByThreeGrid) {
    const std::vector<std::string> domains{"D1", "D2", "D3"};
    std::vector<StreamDataset> data;
    for (std::size_t i = 0; i < domains.size(); ++i) data.push_back(generate(clean_config(82 + i, domains[i]), 10));
    std::vector<EvalInput> inputs;
    for (const auto& train : domains) {
        for (const auto& d : data) inputs.push_back({&d, train});
    }
    const auto r = evaluate(inputs, spec_for(Mode::Streaming));
    EXPECT_EQ(r.per_pair.size(), 9u);
    for (const auto& [pair, stats] : r.per_pair) EXPECT_EQ(stats.evaluated, 10u) << pair.first << pair.second;
    EXPECT_DOUBLE_EQ(*r.means.mean_seen, 1.0);
    EXPECT_DOUBLE_EQ(*r.means.mean_unseen, 1.0);
}

TEST(Protocols, ReportIndependentOfJobs) {
    std::vector<StreamDataset> data;
    for (std::uint64_t seed = 90; seed < 98; ++seed) {
        SynthConfig c = clean_config(seed, seed % 2 ? "D1" : "D2");
        c.within_action_noise = 0.2;
        c.logit_noise = 2.0;
        c.overlap_fraction = 0.3;
        c.overlap_length = 10;
        data.push_back(generate(c, 25));
    }
    std::vector<EvalInput> inputs;
    for (const auto& d : data) inputs.push_back({&d, "D1"});
    ProtocolSpec s = spec_for(Mode::Online);
    s.strategy.dbl.threshold = 0.01;
    const auto one = to_json(evaluate(inputs, s, 1), true).dump();
    const auto four = to_json(evaluate(inputs, s, 4), true).dump();
    EXPECT_EQ(one, four);
    EXPECT_EQ(one, to_json(evaluate(inputs, s, 1), true).dump());
}

TEST(TrueBoundaries, StartsAndEnds) {
    StreamDataset d;
    d.manifest = make_manifest(40, 1, 2);
    d.segments = {{"vid", 0, 9, 0}, {"vid", 10, 19, 1}, {"vid", 25, 39, 0}};
    EXPECT_EQ(true_boundaries(d), (std::vector<std::uint64_t>{10, 20, 25}));
}

TEST(MatchBoundaries, Greedy) {
    const auto m = match_boundaries({10, 50, 99}, {12, 48, 200}, 3);
    EXPECT_EQ(m.true_positives, 2u);
    EXPECT_EQ(m.false_positives, 1u);
    EXPECT_EQ(m.false_negatives, 1u);
    EXPECT_DOUBLE_EQ(m.recall(), 2.0 / 3);

    // One detection cannot satisfy two truths.
    const auto one = match_boundaries({10}, {9, 11}, 3);
    EXPECT_EQ(one.true_positives, 1u);
    EXPECT_EQ(one.false_negatives, 1u);
    EXPECT_EQ(match_boundaries({}, {}, 3).recall(), 1.0);
}

}  // namespace
}  // namespace egostream
