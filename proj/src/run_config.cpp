// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "egostream/error.hpp"

namespace egostream {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    require_object(j, where);
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!keys.contains(item.key())) fail(where, "unknown key '" + item.key() + "'");
    }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(where + "." + key, e.what());
    }
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return std::nullopt;
    return get<T>(j, key, where);
}

std::uint32_t get_count(const json& j, const char* key, const std::string& where, std::int64_t min_value) {
    const auto v = get<std::int64_t>(j, key, where);
    if (v < min_value) fail(where + "." + key, "must be >= " + std::to_string(min_value));
    return static_cast<std::uint32_t>(v);
}

template <typename E>
E parse_enum(const std::string& text, const std::string& where,
             std::initializer_list<std::pair<const char*, E>> choices) {
    for (const auto& [name, value] : choices) {
        if (text == name) return value;
    }
    std::string names;
    for (const auto& [name, value] : choices) names += std::string(names.empty() ? "" : ", ") + name;
    fail(where, "'" + text + "' is not one of " + names);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    check_keys(doc, "config",
               {"version", "datasets", "protocol", "boundary", "sampler", "sweep", "curve", "output", "seed", "jobs"});
    RunConfig cfg;
    if (!doc.contains("version")) fail("config", "missing 'version'");
    cfg.version = get<int>(doc, "version", "config");
    if (cfg.version != kRunConfigVersion) fail("config.version", "unsupported version " + std::to_string(cfg.version));

    if (!doc.contains("datasets") || !doc.at("datasets").is_array() || doc.at("datasets").empty()) {
        fail("config.datasets", "expected a non-empty array");
    }
    std::size_t i = 0;
    for (const auto& d : doc.at("datasets")) {
        const std::string where = "config.datasets[" + std::to_string(i++) + "]";
        check_keys(d, where, {"manifest", "stream", "annotations", "train_domain"});
        DatasetEntry e;
        if (!d.contains("manifest")) fail(where, "missing 'manifest'");
        e.manifest = resolve(base_dir, get<std::string>(d, "manifest", where));
        if (auto s = get_opt<std::string>(d, "stream", where)) e.stream = resolve(base_dir, *s);
        if (auto s = get_opt<std::string>(d, "annotations", where)) e.annotations = resolve(base_dir, *s);
        e.train_domain = get_opt<std::string>(d, "train_domain", where).value_or("");
        cfg.datasets.push_back(std::move(e));
    }

    ProtocolSpec& spec = cfg.protocol;
    if (doc.contains("protocol")) {
        const auto& p = doc.at("protocol");
        check_keys(p, "config.protocol", {"mode", "trimming", "strategy", "aggregation"});
        if (auto m = get_opt<std::string>(p, "mode", "config.protocol")) {
            spec.mode = parse_enum<Mode>(*m, "config.protocol.mode",
                                         {{"offline", Mode::Offline},
                                          {"streaming", Mode::Streaming},
                                          {"online", Mode::Online}});
        }
        spec.trimming = spec.mode == Mode::Offline ? Trimming::Trimmed : Trimming::Untrimmed;
        if (auto t = get_opt<std::string>(p, "trimming", "config.protocol")) {
            spec.trimming = parse_enum<Trimming>(*t, "config.protocol.trimming",
                                                 {{"trimmed", Trimming::Trimmed}, {"untrimmed", Trimming::Untrimmed}});
        }
        if (auto s = get_opt<std::string>(p, "strategy", "config.protocol")) {
            spec.strategy.kind = parse_enum<StrategyKind>(*s, "config.protocol.strategy",
                                                          {{"sbl", StrategyKind::Sbl},
                                                           {"dbl", StrategyKind::Dbl},
                                                           {"a2", StrategyKind::A2},
                                                           {"external", StrategyKind::External}});
        }
        if (auto a = get_opt<std::string>(p, "aggregation", "config.protocol")) {
            spec.input = parse_enum<AggregationInput>(
                *a, "config.protocol.aggregation",
                {{"logits", AggregationInput::Logits}, {"softmax", AggregationInput::Softmax}});
        }
    }

    if (doc.contains("boundary")) {
        const auto& b = doc.at("boundary");
        const std::string where = "config.boundary";
        check_keys(b, where, {"tau", "k", "delta", "metric", "reference", "warmup", "external"});
        if (b.contains("tau")) {
            const double tau = get<double>(b, "tau", where);
            if (!(tau > 0.0)) fail(where + ".tau", "must be > 0");
            spec.strategy.dbl.threshold = tau;
        }
        if (b.contains("k")) spec.strategy.sbl.k = get_count(b, "k", where, 1);
        if (b.contains("delta")) spec.strategy.delta = get_count(b, "delta", where, 1);
        if (b.contains("warmup")) spec.strategy.dbl.warmup = get_count(b, "warmup", where, 0);
        if (auto m = get_opt<std::string>(b, "metric", where)) {
            spec.strategy.dbl.metric = parse_enum<DistanceMetric>(
                *m, where + ".metric", {{"mse", DistanceMetric::Mse}, {"cosine", DistanceMetric::CosineDistance}});
        }
        if (auto r = get_opt<std::string>(b, "reference", where)) {
            spec.strategy.dbl.reference = parse_enum<DblReference>(
                *r, where + ".reference",
                {{"segment_mean", DblReference::SegmentMean}, {"previous_frame", DblReference::PreviousFrame}});
        }
        if (b.contains("external")) {
            const auto& ext = b.at("external");
            require_object(ext, where + ".external");
            for (const auto& item : ext.items()) {
                try {
                    spec.strategy.external[item.key()] = item.value().get<std::vector<std::uint64_t>>();
                } catch (const json::exception& e) {
                    fail(where + ".external." + item.key(), e.what());
                }
            }
        }
    }

    if (doc.contains("sampler")) {
        const auto& s = doc.at("sampler");
        const std::string where = "config.sampler";
        check_keys(s, where, {"kind", "frames_per_clip", "num_clips", "full_segment"});
        if (auto k = get_opt<std::string>(s, "kind", where)) {
            spec.sampler.kind = parse_enum<SamplingKind>(
                *k, where + ".kind", {{"uniform", SamplingKind::Uniform}, {"dense", SamplingKind::Dense}});
        }
        if (s.contains("frames_per_clip")) spec.sampler.frames_per_clip = get_count(s, "frames_per_clip", where, 1);
        if (s.contains("num_clips")) spec.sampler.num_clips = get_count(s, "num_clips", where, 1);
        spec.full_segment_window = get_opt<bool>(s, "full_segment", where).value_or(false);
    }

    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        check_keys(s, "config.sweep", {"parameter", "values"});
        SweepSpec sweep;
        sweep.parameter = parse_enum<SweepParameter>(
            get<std::string>(s, "parameter", "config.sweep"), "config.sweep.parameter",
            {{"k", SweepParameter::K}, {"tau", SweepParameter::Tau}, {"delta", SweepParameter::Delta}});
        sweep.values = get<std::vector<double>>(s, "values", "config.sweep");
        if (sweep.values.empty()) fail("config.sweep.values", "must not be empty");
        for (double v : sweep.values) {
            if (!(v > 0.0)) fail("config.sweep.values", "values must be > 0");
        }
        cfg.sweep = std::move(sweep);
    }

    if (doc.contains("curve")) {
        const auto& c = doc.at("curve");
        check_keys(c, "config.curve", {"fractions"});
        cfg.curve_fractions = get<std::vector<double>>(c, "fractions", "config.curve");
        for (double p : cfg.curve_fractions) {
            if (!(p > 0.0 && p <= 1.0)) fail("config.curve.fractions", "fractions must be in (0, 1]");
        }
    }

    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        check_keys(o, "config.output", {"json", "csv", "text"});
        if (auto p = get_opt<std::string>(o, "json", "config.output")) cfg.output.json = resolve(base_dir, *p);
        if (auto p = get_opt<std::string>(o, "csv", "config.output")) cfg.output.csv = resolve(base_dir, *p);
        if (auto p = get_opt<std::string>(o, "text", "config.output")) cfg.output.text = resolve(base_dir, *p);
    }

    if (doc.contains("seed")) cfg.seed = get<std::uint64_t>(doc, "seed", "config");
    if (doc.contains("jobs")) cfg.jobs = get_count(doc, "jobs", "config", 1);

    validate(cfg);
    return cfg;
}

void validate(const RunConfig& cfg) {
    if (cfg.datasets.empty()) fail("config.datasets", "no datasets");
    try {
        validate(cfg.protocol);
        if (cfg.sweep) {
            const auto kind = cfg.protocol.strategy.kind;
            const auto param = cfg.sweep->parameter;
            const bool ok = cfg.protocol.mode == Mode::Online &&
                            ((param == SweepParameter::K && kind == StrategyKind::Sbl) ||
                             (param == SweepParameter::Tau && (kind == StrategyKind::Dbl || kind == StrategyKind::A2)) ||
                             (param == SweepParameter::Delta && kind == StrategyKind::A2));
            if (!ok) throw Error(ErrorCode::InvalidConfig, "sweep parameter does not apply to the online strategy");
        }
    } catch (const Error& e) {
        fail("config", e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(path.string(), e.what());
    }
    return parse_run_config(doc, path.parent_path());
}

SynthPlan parse_synth_plan(const json& doc) {
    const std::string where = "synth";
    check_keys(doc, where,
               {"num_classes", "feature_dim", "class_centroids", "max_centroid_cosine", "within_action_noise",
                "logit_sharpness", "logit_noise", "min_frames", "max_frames", "overlap_fraction", "overlap_length",
                "unknown_gap_probability", "unknown_noise", "unknown_logit_noise", "seed", "fps", "videos",
                "domains", "videos_per_domain", "segments_per_video"});
    SynthPlan plan;
    SynthConfig& c = plan.base;
    if (doc.contains("num_classes")) c.num_classes = get_count(doc, "num_classes", where, 2);
    if (doc.contains("feature_dim")) c.feature_dim = get_count(doc, "feature_dim", where, 1);
    if (doc.contains("class_centroids")) {
        c.class_centroids = get<std::vector<std::vector<float>>>(doc, "class_centroids", where);
    }
    c.max_centroid_cosine = get_opt<double>(doc, "max_centroid_cosine", where).value_or(c.max_centroid_cosine);
    c.within_action_noise = get_opt<double>(doc, "within_action_noise", where).value_or(c.within_action_noise);
    c.logit_sharpness = get_opt<double>(doc, "logit_sharpness", where).value_or(c.logit_sharpness);
    c.logit_noise = get_opt<double>(doc, "logit_noise", where).value_or(c.logit_noise);
    if (doc.contains("min_frames")) c.min_frames = get_count(doc, "min_frames", where, 1);
    if (doc.contains("max_frames")) c.max_frames = get_count(doc, "max_frames", where, 1);
    c.overlap_fraction = get_opt<double>(doc, "overlap_fraction", where).value_or(c.overlap_fraction);
    if (doc.contains("overlap_length")) c.overlap_length = get_count(doc, "overlap_length", where, 1);
    c.unknown_gap_probability =
        get_opt<double>(doc, "unknown_gap_probability", where).value_or(c.unknown_gap_probability);
    c.unknown_noise = get_opt<double>(doc, "unknown_noise", where).value_or(c.unknown_noise);
    c.unknown_logit_noise = get_opt<double>(doc, "unknown_logit_noise", where).value_or(c.unknown_logit_noise);
    c.seed = get_opt<std::uint64_t>(doc, "seed", where).value_or(c.seed);
    c.fps = get_opt<double>(doc, "fps", where).value_or(c.fps);

    if (doc.contains("videos")) {
        if (doc.contains("domains")) fail(where, "give either 'videos' or 'domains', not both");
        std::size_t i = 0;
        for (const auto& v : doc.at("videos")) {
            const std::string w = where + ".videos[" + std::to_string(i++) + "]";
            check_keys(v, w, {"video_id", "domain_id", "seed", "segments"});
            SynthVideo sv;
            sv.video_id = get<std::string>(v, "video_id", w);
            sv.domain_id = get_opt<std::string>(v, "domain_id", w).value_or("D1");
            sv.seed = get_opt<std::uint64_t>(v, "seed", w).value_or(c.seed + i);
            if (v.contains("segments")) sv.segments = get_count(v, "segments", w, 1);
            plan.videos.push_back(std::move(sv));
        }
    } else {
        const auto domains = get_opt<std::vector<std::string>>(doc, "domains", where)
                                 .value_or(std::vector<std::string>{"D1"});
        const std::uint32_t per_domain =
            doc.contains("videos_per_domain") ? get_count(doc, "videos_per_domain", where, 1) : 1;
        const std::uint32_t segments =
            doc.contains("segments_per_video") ? get_count(doc, "segments_per_video", where, 1) : 50;
        std::uint64_t n = 0;
        for (const auto& d : domains) {
            for (std::uint32_t v = 0; v < per_domain; ++v) {
                plan.videos.push_back({d + "_v" + std::to_string(v), d, c.seed + 1000003 * ++n, segments});
            }
        }
    }
    if (plan.videos.empty()) fail(where, "no videos to generate");
    std::set<std::string> ids;
    for (const auto& v : plan.videos) {
        if (!ids.insert(v.video_id).second) fail(where, "duplicate video_id '" + v.video_id + "'");
    }
    validate(c);
    return plan;
}

SynthPlan load_synth_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open synth config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(path.string(), e.what());
    }
    return parse_synth_plan(doc);
}

}  // namespace egostream
