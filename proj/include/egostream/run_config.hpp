// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egostream/protocols.hpp"
#include "egostream/synth.hpp"

namespace egostream {

inline constexpr int kRunConfigVersion = 1;

struct DatasetEntry {
    std::filesystem::path manifest;
    std::optional<std::filesystem::path> stream;
    std::optional<std::filesystem::path> annotations;
    std::string train_domain;  // empty: same as the stream's domain
};

struct SweepSpec {
    SweepParameter parameter = SweepParameter::Tau;
    std::vector<double> values;
};

struct OutputSpec {
    std::optional<std::filesystem::path> json;
    std::optional<std::filesystem::path> csv;
    std::optional<std::filesystem::path> text;
};

/// Declarative description of a benchmark run. Relative paths are resolved
/// against the directory of the config file.
struct RunConfig {
    int version = kRunConfigVersion;
    std::vector<DatasetEntry> datasets;
    ProtocolSpec protocol;
    std::optional<SweepSpec> sweep;
    std::vector<double> curve_fractions;
    OutputSpec output;
    std::uint64_t seed = 0;
    std::optional<unsigned> jobs;
};

/// Strict parse: unknown keys, wrong types and invalid values are errors
/// (InvalidConfig), raised before any stream is opened.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Re-checks every module rule on an already built config.
void validate(const RunConfig& config);

/// Generator settings for `synth`: shared parameters plus the list of videos.
struct SynthVideo {
    std::string video_id;
    std::string domain_id;
    std::uint64_t seed = 0;
    std::uint32_t segments = 50;
};

struct SynthPlan {
    SynthConfig base;
    std::vector<SynthVideo> videos;
};

/// Accepts either an explicit "videos" list or "domains" +
/// "videos_per_domain" + "segments_per_video"; seeds derive from "seed".
SynthPlan parse_synth_plan(const nlohmann::json& doc);
SynthPlan load_synth_plan(const std::filesystem::path& path);

}  // namespace egostream
