// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "egostream/stream_model.hpp"

namespace egostream::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("egostream_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline StreamManifest make_manifest(std::uint64_t frames, std::uint32_t dim, std::uint32_t classes,
                                    std::string video_id = "vid") {
    StreamManifest m;
    m.video_id = std::move(video_id);
    m.domain_id = "D1";
    m.fps = 30.0;
    m.num_frames = frames;
    m.feature_dim = dim;
    m.num_classes = classes;
    for (std::uint32_t c = 0; c < classes; ++c) m.class_names.push_back("c" + std::to_string(c));
    return m;
}

inline std::vector<FrameRecord> random_records(std::mt19937_64& rng, std::uint64_t frames, std::uint32_t dim,
                                               std::uint32_t classes, double scale = 1.0) {
    std::normal_distribution<float> g(0.0f, static_cast<float>(scale));
    std::vector<FrameRecord> out(frames);
    for (std::uint64_t t = 0; t < frames; ++t) {
        out[t].frame_index = t;
        out[t].feature.resize(dim);
        out[t].logits.resize(classes);
        for (auto& v : out[t].feature) v = g(rng);
        for (auto& v : out[t].logits) v = g(rng);
    }
    return out;
}

inline FrameRecord record(std::uint64_t index, std::vector<float> feature, std::vector<float> logits) {
    return FrameRecord{index, std::move(feature), std::move(logits)};
}

}  // namespace egostream::testing
