// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/report.hpp"

#include <array>
#include <charconv>
#include <iomanip>
#include <sstream>

namespace egostream {

namespace {

// Shortest text that parses back to the same double.
std::string shortest(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::Offline: return "offline";
        case Mode::Streaming: return "streaming";
        case Mode::Online: return "online";
    }
    return "?";
}

std::string_view to_string(Trimming trimming) {
    return trimming == Trimming::Trimmed ? "trimmed" : "untrimmed";
}

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Sbl: return "sbl";
        case StrategyKind::Dbl: return "dbl";
        case StrategyKind::A2: return "a2";
        case StrategyKind::External: return "external";
    }
    return "?";
}

std::string_view to_string(DistanceMetric metric) { return metric == DistanceMetric::Mse ? "mse" : "cosine"; }

std::string_view to_string(DblReference reference) {
    return reference == DblReference::SegmentMean ? "segment_mean" : "previous_frame";
}

std::string_view to_string(SamplingKind kind) { return kind == SamplingKind::Uniform ? "uniform" : "dense"; }

std::string_view to_string(AggregationInput input) {
    return input == AggregationInput::Logits ? "logits" : "softmax";
}

std::string_view to_string(SweepParameter param) {
    switch (param) {
        case SweepParameter::K: return "k";
        case SweepParameter::Tau: return "tau";
        case SweepParameter::Delta: return "delta";
    }
    return "?";
}

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string format_optional(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << *v;
    return out.str();
}

}  // namespace

nlohmann::ordered_json to_json(const ProtocolSpec& spec) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(spec.mode);
    j["trimming"] = to_string(spec.trimming);
    j["aggregation"] = to_string(spec.input);
    if (spec.mode == Mode::Offline) {
        if (spec.full_segment_window) {
            j["sampler"] = {{"full_segment", true}};
        } else {
            j["sampler"] = {{"kind", to_string(spec.sampler.kind)},
                            {"frames_per_clip", spec.sampler.frames_per_clip},
                            {"num_clips", spec.sampler.num_clips}};
        }
    }
    if (spec.mode == Mode::Streaming && spec.observed_fraction != 1.0) {
        j["observed_fraction"] = spec.observed_fraction;
    }
    if (spec.mode == Mode::Online) {
        const auto& s = spec.strategy;
        nlohmann::ordered_json b;
        b["strategy"] = to_string(s.kind);
        switch (s.kind) {
            case StrategyKind::Sbl: b["k"] = s.sbl.k; break;
            case StrategyKind::A2: b["delta"] = s.delta; [[fallthrough]];
            case StrategyKind::Dbl:
                b["tau"] = s.dbl.threshold;
                b["metric"] = to_string(s.dbl.metric);
                b["reference"] = to_string(s.dbl.reference);
                b["warmup"] = s.dbl.warmup;
                break;
            case StrategyKind::External: break;
        }
        j["boundary"] = std::move(b);
    }
    return j;
}

nlohmann::ordered_json to_json(const EvalReport& report, bool detailed) {
    nlohmann::ordered_json j;
    j["num_evaluated_segments"] = report.num_evaluated_segments;
    j["mean_all"] = optional_number(report.means.mean_all);
    j["mean_seen"] = optional_number(report.means.mean_seen);
    j["mean_unseen"] = optional_number(report.means.mean_unseen);
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& [key, stats] : report.per_pair) {
        pairs.push_back({{"train", key.first},
                         {"test", key.second},
                         {"evaluated", stats.evaluated},
                         {"correct", stats.correct},
                         {"accuracy", stats.accuracy()}});
    }
    j["per_pair"] = std::move(pairs);
    auto classes = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        classes.push_back({{"class", c},
                           {"evaluated", report.per_class[c].evaluated},
                           {"correct", report.per_class[c].correct}});
    }
    j["per_class"] = std::move(classes);
    if (detailed) {
        auto videos = nlohmann::ordered_json::array();
        for (const auto& v : report.videos) {
            nlohmann::ordered_json jv;
            jv["video_id"] = v.video_id;
            jv["train_domain"] = v.train_domain;
            jv["test_domain"] = v.test_domain;
            auto preds = nlohmann::ordered_json::array();
            for (const auto& p : v.predictions) {
                preds.push_back({{"segment", p.segment},
                                 {"stop_frame", p.stop_frame},
                                 {"label", p.label},
                                 {"predicted", p.predicted ? nlohmann::ordered_json(*p.predicted)
                                                           : nlohmann::ordered_json(nullptr)},
                                 {"correct", p.correct}});
            }
            jv["predictions"] = std::move(preds);
            auto events = nlohmann::ordered_json::array();
            for (const auto& e : v.events) events.push_back({e.frame_index, e.aggregator});
            jv["boundary_events"] = std::move(events);
            videos.push_back(std::move(jv));
        }
        j["videos"] = std::move(videos);
    }
    return j;
}

std::string to_text(const EvalReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(10) << "train" << std::setw(10) << "test" << std::right << std::setw(10)
        << "segments" << std::setw(10) << "correct" << std::setw(10) << "top1" << '\n';
    for (const auto& [key, stats] : report.per_pair) {
        out << std::left << std::setw(10) << key.first << std::setw(10) << key.second << std::right
            << std::setw(10) << stats.evaluated << std::setw(10) << stats.correct << std::setw(10) << std::fixed
            << std::setprecision(4) << stats.accuracy() << '\n';
    }
    out << '\n'
        << std::left << std::setw(14) << "mean (all)" << format_optional(report.means.mean_all) << '\n'
        << std::setw(14) << "mean seen" << format_optional(report.means.mean_seen) << '\n'
        << std::setw(14) << "mean unseen" << format_optional(report.means.mean_unseen) << '\n'
        << std::setw(14) << "segments" << report.num_evaluated_segments << '\n';
    return out.str();
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream out;
    out << "fraction,accuracy,evaluated\n";
    for (const auto& p : curve) {
        out << shortest(p.fraction) << ',' << shortest(p.accuracy) << ',' << p.evaluated << '\n';
    }
    return out.str();
}

nlohmann::ordered_json curve_to_json(const std::vector<CurvePoint>& curve) {
    auto j = nlohmann::ordered_json::array();
    for (const auto& p : curve) {
        j.push_back({{"fraction", p.fraction}, {"accuracy", p.accuracy}, {"evaluated", p.evaluated}});
    }
    return j;
}

std::string sweep_to_csv(SweepParameter param, const std::vector<SweepPoint>& points) {
    std::ostringstream out;
    out << to_string(param) << ",mean_all,mean_seen,mean_unseen,evaluated\n";
    auto cell = [&](const std::optional<double>& v) {
        if (v) out << shortest(*v);
    };
    for (const auto& p : points) {
        out << shortest(p.value) << ',';
        cell(p.report.means.mean_all);
        out << ',';
        cell(p.report.means.mean_seen);
        out << ',';
        cell(p.report.means.mean_unseen);
        out << ',' << p.report.num_evaluated_segments << '\n';
    }
    return out.str();
}

nlohmann::ordered_json sweep_to_json(SweepParameter param, const std::vector<SweepPoint>& points) {
    nlohmann::ordered_json j;
    j["parameter"] = to_string(param);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& p : points) {
        nlohmann::ordered_json row;
        row["value"] = p.value;
        row["report"] = to_json(p.report, false);
        rows.push_back(std::move(row));
    }
    j["points"] = std::move(rows);
    return j;
}

std::string pairs_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "train,test,evaluated,correct,accuracy\n";
    for (const auto& [key, stats] : report.per_pair) {
        out << key.first << ',' << key.second << ',' << stats.evaluated << ',' << stats.correct << ','
            << shortest(stats.accuracy()) << '\n';
    }
    return out.str();
}

}  // namespace egostream
