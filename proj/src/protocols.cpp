// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "egostream/error.hpp"
#include "egostream/pipeline.hpp"

namespace egostream {

void validate(const ProtocolSpec& spec) {
    if (spec.mode == Mode::Offline) {
        if (spec.trimming != Trimming::Trimmed) {
            throw Error(ErrorCode::InvalidConfig, "offline inference requires trimmed segments");
        }
        if (!spec.full_segment_window) validate_sampler(spec.sampler);
    }
    if (spec.mode == Mode::Streaming) {
        if (!(spec.observed_fraction > 0.0 && spec.observed_fraction <= 1.0)) {
            throw Error(ErrorCode::InvalidConfig, "observed fraction must be in (0, 1]");
        }
    }
    if (spec.mode == Mode::Online) {
        switch (spec.strategy.kind) {
            case StrategyKind::Sbl: validate(spec.strategy.sbl); break;
            case StrategyKind::Dbl: validate(spec.strategy.dbl); break;
            case StrategyKind::A2:
                validate(spec.strategy.dbl);
                if (spec.strategy.delta < 1) throw Error(ErrorCode::InvalidConfig, "delta must be >= 1");
                break;
            case StrategyKind::External:
                if (spec.trimming == Trimming::Trimmed) {
                    throw Error(ErrorCode::InvalidConfig,
                                "external boundaries index the untrimmed timeline; use streaming for trimmed clips");
                }
                break;
        }
    }
}

namespace {

void require_annotations(const StreamDataset& d) {
    if (d.segments.empty()) {
        throw Error(ErrorCode::AnnotationMissing, d.manifest.video_id + ": no annotations");
    }
}

VideoResult make_result(const StreamDataset& d) {
    VideoResult r;
    r.video_id = d.manifest.video_id;
    r.train_domain = d.manifest.domain_id;
    r.test_domain = d.manifest.domain_id;
    return r;
}

SegmentPrediction score(std::size_t index, const LabelSegment& s, std::optional<std::size_t> predicted) {
    SegmentPrediction p;
    p.segment = index;
    p.stop_frame = s.stop_frame;
    p.label = s.label;
    p.predicted = predicted;
    p.correct = predicted && static_cast<int>(*predicted) == s.label;
    return p;
}

std::optional<std::size_t> predict(const Aggregator& agg) {
    auto out = agg.output();
    if (!out) return std::nullopt;
    return argmax(*out);
}

std::uint64_t observed_length(std::uint64_t length, double fraction) {
    // Slack absorbs representation error, e.g. 0.3 * 10 = 3.0000000000000004.
    const double raw = fraction * static_cast<double>(length);
    auto k = static_cast<std::uint64_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    return std::clamp<std::uint64_t>(k, 1, length);
}

}  // namespace

VideoResult run_offline_video(const StreamDataset& d, const ProtocolSpec& spec) {
    require_annotations(d);
    VideoResult result = make_result(d);
    Aggregator agg(d.manifest.feature_dim, d.manifest.num_classes, spec.input);
    for (std::size_t i = 0; i < d.segments.size(); ++i) {
        const auto& s = d.segments[i];
        if (s.is_unknown()) continue;
        SamplerSpec sampler = spec.sampler;
        if (spec.full_segment_window) {
            sampler = {SamplingKind::Dense, static_cast<std::uint32_t>(s.length()), 1};
        }
        agg.reset();
        for (const auto& clip : sample_indices(sampler, s.length())) {
            for (std::uint64_t offset : clip) agg.push(d.records[s.start_frame + offset]);
        }
        result.predictions.push_back(score(i, s, predict(agg)));
    }
    return result;
}

VideoResult run_streaming_video(const StreamDataset& d, const ProtocolSpec& spec) {
    require_annotations(d);
    VideoResult result = make_result(d);
    Aggregator agg(d.manifest.feature_dim, d.manifest.num_classes, spec.input);
    for (std::size_t i = 0; i < d.segments.size(); ++i) {
        const auto& s = d.segments[i];
        if (s.is_unknown()) continue;
        agg.reset();
        const std::uint64_t last = s.start_frame + observed_length(s.length(), spec.observed_fraction) - 1;
        for (std::uint64_t t = s.start_frame; t <= last; ++t) agg.push(d.records[t]);
        result.predictions.push_back(score(i, s, predict(agg)));
    }
    return result;
}

VideoResult run_online_video(const StreamDataset& d, const ProtocolSpec& spec) {
    require_annotations(d);
    VideoResult result = make_result(d);
    OnlinePipeline pipeline(d.manifest.feature_dim, d.manifest.num_classes, spec.strategy, spec.input,
                            d.manifest.video_id);

    if (spec.trimming == Trimming::Untrimmed) {
        // Evaluation points: labeled segments ordered by stop frame, then index.
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < d.segments.size(); ++i) {
            if (!d.segments[i].is_unknown()) order.push_back(i);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return d.segments[a].stop_frame < d.segments[b].stop_frame;
        });
        auto next_eval = order.begin();
        for (const auto& record : d.records) {
            if (auto ev = pipeline.step(record)) result.events.push_back(*ev);
            while (next_eval != order.end() && d.segments[*next_eval].stop_frame == record.frame_index) {
                result.predictions.push_back(score(*next_eval, d.segments[*next_eval], pipeline.predict()));
                ++next_eval;
            }
        }
        // Preserve segment order in the output regardless of evaluation order.
        std::sort(result.predictions.begin(), result.predictions.end(),
                  [](const auto& a, const auto& b) { return a.segment < b.segment; });
    } else {
        // Trimmed clips are played back to back with no supervision between them.
        for (std::size_t i = 0; i < d.segments.size(); ++i) {
            const auto& s = d.segments[i];
            if (s.is_unknown()) continue;
            for (std::uint64_t t = s.start_frame; t <= s.stop_frame; ++t) {
                if (auto ev = pipeline.step(d.records[t])) result.events.push_back(*ev);
            }
            result.predictions.push_back(score(i, s, pipeline.predict()));
        }
    }
    return result;
}

VideoResult run_video(const StreamDataset& dataset, const ProtocolSpec& spec) {
    validate(spec);
    switch (spec.mode) {
        case Mode::Offline: return run_offline_video(dataset, spec);
        case Mode::Streaming: return run_streaming_video(dataset, spec);
        case Mode::Online: return run_online_video(dataset, spec);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown mode");
}

double EvalReport::pooled_accuracy() const noexcept {
    std::uint64_t correct = 0;
    for (const auto& c : per_class) correct += c.correct;
    return num_evaluated_segments ? static_cast<double>(correct) / num_evaluated_segments : 0.0;
}

EvalReport build_report(std::vector<VideoResult> videos, std::uint32_t num_classes) {
    EvalReport report;
    report.per_class.assign(num_classes, {});
    for (const auto& v : videos) {
        auto& pair = report.per_pair[{v.train_domain, v.test_domain}];
        for (const auto& p : v.predictions) {
            ++pair.evaluated;
            ++report.num_evaluated_segments;
            if (p.label >= 0 && static_cast<std::size_t>(p.label) < report.per_class.size()) {
                ++report.per_class[p.label].evaluated;
                if (p.correct) ++report.per_class[p.label].correct;
            }
            if (p.correct) ++pair.correct;
        }
    }
    std::map<DomainPair, double> accuracies;
    for (const auto& [key, stats] : report.per_pair) {
        if (stats.evaluated > 0) accuracies[key] = stats.accuracy();
    }
    report.means = aggregate_domains(accuracies);
    report.videos = std::move(videos);
    return report;
}

EvalReport evaluate(const std::vector<EvalInput>& inputs, const ProtocolSpec& spec, unsigned jobs) {
    validate(spec);
    std::uint32_t num_classes = 0;
    for (const auto& in : inputs) {
        if (!in.dataset) throw Error(ErrorCode::InvalidConfig, "null dataset");
        num_classes = std::max(num_classes, in.dataset->manifest.num_classes);
    }

    std::vector<VideoResult> results(inputs.size());
    std::vector<std::exception_ptr> errors(inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
            try {
                results[i] = run_video(*inputs[i].dataset, spec);
                if (!inputs[i].train_domain.empty()) results[i].train_domain = inputs[i].train_domain;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return build_report(std::move(results), num_classes);
}

EvalReport run_offline(const StreamDataset& dataset, const ProtocolSpec& spec) {
    ProtocolSpec s = spec;
    s.mode = Mode::Offline;
    return evaluate({{&dataset, {}}}, s);
}

EvalReport run_streaming(const StreamDataset& dataset, const ProtocolSpec& spec) {
    ProtocolSpec s = spec;
    s.mode = Mode::Streaming;
    return evaluate({{&dataset, {}}}, s);
}

EvalReport run_online(const StreamDataset& dataset, const ProtocolSpec& spec) {
    ProtocolSpec s = spec;
    s.mode = Mode::Online;
    return evaluate({{&dataset, {}}}, s);
}

std::vector<CurvePoint> accuracy_vs_percentage(const std::vector<EvalInput>& inputs,
                                               const std::vector<double>& fractions, unsigned jobs,
                                               AggregationInput input) {
    std::vector<CurvePoint> curve;
    for (double p : fractions) {
        ProtocolSpec spec;
        spec.mode = Mode::Streaming;
        spec.trimming = Trimming::Trimmed;
        spec.input = input;
        spec.observed_fraction = p;
        const EvalReport report = evaluate(inputs, spec, jobs);
        curve.push_back({p, report.means.mean_all.value_or(0.0), report.num_evaluated_segments});
    }
    return curve;
}

std::vector<SweepPoint> sweep(const std::vector<EvalInput>& inputs, const ProtocolSpec& base, SweepParameter param,
                              const std::vector<double>& values, unsigned jobs) {
    if (base.mode != Mode::Online) throw Error(ErrorCode::InvalidConfig, "sweeps run the online protocol");
    const StrategyKind kind = base.strategy.kind;
    const bool compatible = (param == SweepParameter::K && kind == StrategyKind::Sbl) ||
                            (param == SweepParameter::Tau && (kind == StrategyKind::Dbl || kind == StrategyKind::A2)) ||
                            (param == SweepParameter::Delta && kind == StrategyKind::A2);
    if (!compatible) throw Error(ErrorCode::InvalidConfig, "sweep parameter does not apply to the chosen strategy");

    std::vector<SweepPoint> points;
    points.reserve(values.size());
    for (double v : values) {
        ProtocolSpec spec = base;
        auto as_count = [&](const char* name) {
            if (!(v >= 1.0) || v != std::floor(v)) {
                throw Error(ErrorCode::InvalidConfig, std::string(name) + " values must be positive integers");
            }
            return static_cast<std::uint32_t>(v);
        };
        switch (param) {
            case SweepParameter::K: spec.strategy.sbl.k = as_count("k"); break;
            case SweepParameter::Tau: spec.strategy.dbl.threshold = v; break;
            case SweepParameter::Delta: spec.strategy.delta = as_count("delta"); break;
        }
        points.push_back({v, evaluate(inputs, spec, jobs)});
    }
    return points;
}

DomainMeans aggregate_domains(const std::map<DomainPair, double>& accuracies) {
    double seen = 0.0, unseen = 0.0;
    std::size_t n_seen = 0, n_unseen = 0;
    for (const auto& [pair, acc] : accuracies) {
        if (pair.first == pair.second) {
            seen += acc;
            ++n_seen;
        } else {
            unseen += acc;
            ++n_unseen;
        }
    }
    DomainMeans m;
    if (n_seen) m.mean_seen = seen / static_cast<double>(n_seen);
    if (n_unseen) m.mean_unseen = unseen / static_cast<double>(n_unseen);
    if (n_seen + n_unseen) m.mean_all = (seen + unseen) / static_cast<double>(n_seen + n_unseen);
    return m;
}

std::vector<std::uint64_t> true_boundaries(const StreamDataset& dataset) {
    std::set<std::uint64_t> marks;
    for (const auto& s : dataset.segments) {
        marks.insert(s.start_frame);
        marks.insert(s.stop_frame + 1);
    }
    marks.erase(0);
    std::vector<std::uint64_t> out;
    for (auto m : marks) {
        if (m < dataset.manifest.num_frames) out.push_back(m);
    }
    return out;
}

double BoundaryMatch::recall() const noexcept {
    const auto total = true_positives + false_negatives;
    return total ? static_cast<double>(true_positives) / total : 1.0;
}

double BoundaryMatch::precision() const noexcept {
    const auto total = true_positives + false_positives;
    return total ? static_cast<double>(true_positives) / total : 1.0;
}

BoundaryMatch match_boundaries(const std::vector<std::uint64_t>& detected, const std::vector<std::uint64_t>& truth,
                               std::uint64_t tolerance) {
    BoundaryMatch m;
    std::size_t d = 0;
    for (std::uint64_t b : truth) {
        const std::uint64_t lo = b >= tolerance ? b - tolerance : 0;
        while (d < detected.size() && detected[d] < lo) {
            ++m.false_positives;
            ++d;
        }
        if (d < detected.size() && detected[d] <= b + tolerance) {
            ++m.true_positives;
            ++d;
        } else {
            ++m.false_negatives;
        }
    }
    m.false_positives += detected.size() - d;
    return m;
}

}  // namespace egostream
