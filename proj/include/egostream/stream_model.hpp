// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace egostream {

/// One window position of the backbone: the embedding and the class scores
/// produced for the clip ending at `frame_index`.
struct FrameRecord {
    std::uint64_t frame_index = 0;
    std::vector<float> feature;
    std::vector<float> logits;

    bool operator==(const FrameRecord&) const = default;
};

struct StreamManifest {
    std::string video_id;
    std::string domain_id;
    double fps = 30.0;
    std::uint64_t num_frames = 0;
    std::uint32_t feature_dim = 0;
    std::uint32_t num_classes = 0;
    std::vector<std::string> class_names;

    bool operator==(const StreamManifest&) const = default;
};

/// Label value of background intervals. Class indices stay dense in [0, C).
inline constexpr int kUnknownLabel = -1;

/// Annotated interval; `stop_frame` is inclusive.
struct LabelSegment {
    std::string video_id;
    std::uint64_t start_frame = 0;
    std::uint64_t stop_frame = 0;
    int label = kUnknownLabel;

    bool is_unknown() const noexcept { return label == kUnknownLabel; }
    std::uint64_t length() const noexcept { return stop_frame - start_frame + 1; }

    bool operator==(const LabelSegment&) const = default;
};

struct StreamDataset {
    StreamManifest manifest;
    std::vector<FrameRecord> records;
    std::vector<LabelSegment> segments;
};

// Wire format constants.
inline constexpr char kStreamMagic[4] = {'E', 'G', 'W', 'S'};
inline constexpr std::uint16_t kStreamVersion = 1;
inline constexpr std::size_t kStreamHeaderSize = 4 + 2 + 4 + 4 + 8;

struct StreamHeader {
    std::uint16_t version = kStreamVersion;
    std::uint32_t feature_dim = 0;
    std::uint32_t num_classes = 0;
    std::uint64_t num_frames = 0;
};

/// Checks the manifest invariants (D >= 1, C >= 2, one name per class).
/// Throws MalformedManifest.
void validate_manifest(const StreamManifest& manifest);

StreamManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const StreamManifest& manifest, const std::filesystem::path& path);

/// Forward-only reader over a stream file. Holds a single record buffer, so
/// memory use does not depend on the number of frames.
class StreamReader {
public:
    /// Opens `path` and checks its header against `manifest`.
    StreamReader(const std::filesystem::path& path, const StreamManifest& manifest);

    /// Opens without a manifest; used by `inspect`.
    explicit StreamReader(const std::filesystem::path& path);

    const StreamHeader& header() const noexcept { return header_; }
    std::uint64_t frames_read() const noexcept { return frames_read_; }

    /// Reads the next record into `out`, reusing its storage. Returns false once
    /// all declared frames were consumed.
    bool next(FrameRecord& out);

private:
    void read_header();

    std::filesystem::path path_;
    std::ifstream in_;
    StreamHeader header_;
    std::uint64_t frames_read_ = 0;
    std::vector<char> buffer_;
};

/// Convenience: reads every record of the stream into memory.
std::vector<FrameRecord> open_stream(const std::filesystem::path& path, const StreamManifest& manifest);

/// Serializes `records`; the manifest's dimensions and frame count must match.
void write_stream(std::span<const FrameRecord> records, const StreamManifest& manifest,
                  const std::filesystem::path& path);

/// Encodes to an in-memory byte buffer (same bytes as `write_stream`).
std::vector<char> encode_stream(std::span<const FrameRecord> records, const StreamManifest& manifest);

/// Decodes a complete byte buffer produced by `encode_stream`.
std::vector<FrameRecord> decode_stream(std::span<const char> bytes, const StreamManifest& manifest);

std::vector<LabelSegment> load_annotations(const std::filesystem::path& path,
                                           std::optional<std::uint32_t> num_classes = std::nullopt);
void save_annotations(std::span<const LabelSegment> segments, const std::filesystem::path& path);

/// Sorts by (start, stop) and enforces the segment invariants; shared by the
/// CSV loader and in-memory construction. Throws MalformedAnnotation.
void normalize_segments(std::vector<LabelSegment>& segments, std::optional<std::uint32_t> num_classes);

/// Loads manifest, stream and annotations from the sibling files
/// `<stem>.json`, `<stem>.egws`, `<stem>.csv`.
StreamDataset load_dataset(const std::filesystem::path& manifest_path,
                           std::optional<std::filesystem::path> stream_path = std::nullopt,
                           std::optional<std::filesystem::path> annotation_path = std::nullopt);
void save_dataset(const StreamDataset& dataset, const std::filesystem::path& directory);

/// Checks that the dataset is internally consistent (record dims, dense frame
/// indices, segments inside the stream).
void validate_dataset(const StreamDataset& dataset);

}  // namespace egostream
