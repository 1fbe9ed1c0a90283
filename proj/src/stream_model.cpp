// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include "egostream/stream_model.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "egostream/error.hpp"

namespace egostream {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::MalformedManifest: return "MalformedManifest";
        case ErrorCode::FormatMismatch: return "FormatMismatch";
        case ErrorCode::TruncatedStream: return "TruncatedStream";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MalformedAnnotation: return "MalformedAnnotation";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::NoPrediction: return "NoPrediction";
        case ErrorCode::AnnotationMissing: return "AnnotationMissing";
    }
    return "Unknown";
}

namespace {

template <typename T>
void put_le(std::vector<char>& out, T value) {
    using U = std::make_unsigned_t<T>;
    auto bits = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>(bits & 0xFF));
        bits = static_cast<U>(bits >> 8);
    }
}

template <typename T>
T get_le(const char* p) {
    using U = std::make_unsigned_t<T>;
    U bits = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) {
        bits = static_cast<U>((bits << 8) | static_cast<unsigned char>(p[i]));
    }
    return static_cast<T>(bits);
}

void put_f32(std::vector<char>& out, float value) { put_le(out, std::bit_cast<std::uint32_t>(value)); }
float get_f32(const char* p) { return std::bit_cast<float>(get_le<std::uint32_t>(p)); }

std::size_t record_size(std::uint32_t dim, std::uint32_t classes) {
    return 8 + 4 * (static_cast<std::size_t>(dim) + classes);
}

void encode_header(std::vector<char>& out, const StreamHeader& header) {
    out.insert(out.end(), std::begin(kStreamMagic), std::end(kStreamMagic));
    put_le(out, header.version);
    put_le(out, header.feature_dim);
    put_le(out, header.num_classes);
    put_le(out, header.num_frames);
}

StreamHeader decode_header(const char* p) {
    if (std::memcmp(p, kStreamMagic, 4) != 0) {
        throw Error(ErrorCode::FormatMismatch, "bad magic, expected \"EGWS\"");
    }
    StreamHeader h;
    h.version = get_le<std::uint16_t>(p + 4);
    h.feature_dim = get_le<std::uint32_t>(p + 6);
    h.num_classes = get_le<std::uint32_t>(p + 10);
    h.num_frames = get_le<std::uint64_t>(p + 14);
    if (h.version != kStreamVersion) {
        throw Error(ErrorCode::FormatMismatch, "unsupported stream version " + std::to_string(h.version));
    }
    return h;
}

void check_header_against(const StreamHeader& h, const StreamManifest& m) {
    if (h.feature_dim != m.feature_dim || h.num_classes != m.num_classes || h.num_frames != m.num_frames) {
        std::ostringstream msg;
        msg << "header (D=" << h.feature_dim << ", C=" << h.num_classes << ", frames=" << h.num_frames
            << ") disagrees with manifest '" << m.video_id << "' (D=" << m.feature_dim << ", C=" << m.num_classes
            << ", frames=" << m.num_frames << ")";
        throw Error(ErrorCode::FormatMismatch, msg.str());
    }
}

void decode_record(const char* p, std::uint32_t dim, std::uint32_t classes, std::uint64_t expected_index,
                   FrameRecord& out) {
    out.frame_index = get_le<std::uint64_t>(p);
    if (out.frame_index != expected_index) {
        throw Error(ErrorCode::FormatMismatch, "frame_index " + std::to_string(out.frame_index) + " at position " +
                                                   std::to_string(expected_index) + " (indices must be dense)");
    }
    p += 8;
    out.feature.resize(dim);
    out.logits.resize(classes);
    for (auto& v : out.feature) {
        v = get_f32(p);
        p += 4;
    }
    for (auto& v : out.logits) {
        v = get_f32(p);
        p += 4;
    }
    auto finite = [](float v) { return std::isfinite(v); };
    if (!std::all_of(out.feature.begin(), out.feature.end(), finite) ||
        !std::all_of(out.logits.begin(), out.logits.end(), finite)) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite value in frame " + std::to_string(expected_index));
    }
}

void check_record(const FrameRecord& r, std::size_t position, const StreamManifest& m) {
    if (r.feature.size() != m.feature_dim || r.logits.size() != m.num_classes) {
        throw Error(ErrorCode::DimensionMismatch, "record " + std::to_string(position) + " has D=" +
                                                      std::to_string(r.feature.size()) +
                                                      ", C=" + std::to_string(r.logits.size()));
    }
    if (r.frame_index != position) {
        throw Error(ErrorCode::DimensionMismatch,
                    "record " + std::to_string(position) + " has frame_index " + std::to_string(r.frame_index));
    }
    auto finite = [](float v) { return std::isfinite(v); };
    if (!std::all_of(r.feature.begin(), r.feature.end(), finite) ||
        !std::all_of(r.logits.begin(), r.logits.end(), finite)) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite value in record " + std::to_string(position));
    }
}

}  // namespace

void validate_manifest(const StreamManifest& m) {
    if (m.video_id.empty()) throw Error(ErrorCode::MalformedManifest, "empty video_id");
    if (!(m.fps > 0.0) || !std::isfinite(m.fps)) throw Error(ErrorCode::MalformedManifest, "fps must be positive");
    if (m.feature_dim < 1) throw Error(ErrorCode::MalformedManifest, "feature_dim must be >= 1");
    if (m.num_classes < 2) throw Error(ErrorCode::MalformedManifest, "num_classes must be >= 2");
    if (m.class_names.size() != m.num_classes) {
        throw Error(ErrorCode::MalformedManifest, "class_names has " + std::to_string(m.class_names.size()) +
                                                      " entries, expected " + std::to_string(m.num_classes));
    }
}

StreamManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedManifest, path.string() + ": " + e.what());
    }
    StreamManifest m;
    try {
        for (const char* key :
             {"video_id", "domain_id", "fps", "num_frames", "feature_dim", "num_classes", "class_names"}) {
            if (!doc.contains(key)) throw Error(ErrorCode::MalformedManifest, path.string() + ": missing " + key);
        }
        m.video_id = doc.at("video_id").get<std::string>();
        m.domain_id = doc.at("domain_id").get<std::string>();
        m.fps = doc.at("fps").get<double>();
        m.num_frames = doc.at("num_frames").get<std::uint64_t>();
        // Read as signed so that negative values are rejected instead of wrapping.
        auto dim = doc.at("feature_dim").get<std::int64_t>();
        auto classes = doc.at("num_classes").get<std::int64_t>();
        if (dim < 1) throw Error(ErrorCode::MalformedManifest, path.string() + ": feature_dim must be >= 1");
        if (classes < 2) throw Error(ErrorCode::MalformedManifest, path.string() + ": num_classes must be >= 2");
        m.feature_dim = static_cast<std::uint32_t>(dim);
        m.num_classes = static_cast<std::uint32_t>(classes);
        m.class_names = doc.at("class_names").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedManifest, path.string() + ": " + e.what());
    }
    validate_manifest(m);
    return m;
}

void save_manifest(const StreamManifest& m, const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["video_id"] = m.video_id;
    doc["domain_id"] = m.domain_id;
    doc["fps"] = m.fps;
    doc["num_frames"] = m.num_frames;
    doc["feature_dim"] = m.feature_dim;
    doc["num_classes"] = m.num_classes;
    doc["class_names"] = m.class_names;
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write manifest " + path.string());
    out << doc.dump(2) << '\n';
}

StreamReader::StreamReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::IoError, "cannot open stream " + path.string());
    read_header();
}

StreamReader::StreamReader(const std::filesystem::path& path, const StreamManifest& manifest)
    : StreamReader(path) {
    check_header_against(header_, manifest);
}

void StreamReader::read_header() {
    char raw[kStreamHeaderSize];
    in_.read(raw, kStreamHeaderSize);
    if (in_.gcount() != static_cast<std::streamsize>(kStreamHeaderSize)) {
        if (in_.gcount() >= 4 && std::memcmp(raw, kStreamMagic, 4) != 0) {
            throw Error(ErrorCode::FormatMismatch, path_.string() + ": bad magic");
        }
        throw Error(ErrorCode::TruncatedStream, path_.string() + ": incomplete header");
    }
    try {
        header_ = decode_header(raw);
    } catch (const Error& e) {
        throw Error(e.code(), path_.string() + ": " + e.what());
    }
    buffer_.resize(record_size(header_.feature_dim, header_.num_classes));
}

bool StreamReader::next(FrameRecord& out) {
    if (frames_read_ == header_.num_frames) return false;
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (in_.gcount() != static_cast<std::streamsize>(buffer_.size())) {
        throw Error(ErrorCode::TruncatedStream, path_.string() + ": stream ends inside record " +
                                                   std::to_string(frames_read_) + " of " +
                                                   std::to_string(header_.num_frames));
    }
    decode_record(buffer_.data(), header_.feature_dim, header_.num_classes, frames_read_, out);
    ++frames_read_;
    return true;
}

std::vector<FrameRecord> open_stream(const std::filesystem::path& path, const StreamManifest& manifest) {
    StreamReader reader(path, manifest);
    std::vector<FrameRecord> records;
    records.reserve(manifest.num_frames);
    FrameRecord r;
    while (reader.next(r)) records.push_back(r);
    return records;
}

std::vector<char> encode_stream(std::span<const FrameRecord> records, const StreamManifest& manifest) {
    if (records.size() != manifest.num_frames) {
        throw Error(ErrorCode::DimensionMismatch, "manifest declares " + std::to_string(manifest.num_frames) +
                                                      " frames, got " + std::to_string(records.size()));
    }
    std::vector<char> out;
    out.reserve(kStreamHeaderSize + records.size() * record_size(manifest.feature_dim, manifest.num_classes));
    encode_header(out, {kStreamVersion, manifest.feature_dim, manifest.num_classes, manifest.num_frames});
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        check_record(r, i, manifest);
        put_le(out, r.frame_index);
        for (float v : r.feature) put_f32(out, v);
        for (float v : r.logits) put_f32(out, v);
    }
    return out;
}

std::vector<FrameRecord> decode_stream(std::span<const char> bytes, const StreamManifest& manifest) {
    if (bytes.size() < kStreamHeaderSize) {
        if (bytes.size() >= 4 && std::memcmp(bytes.data(), kStreamMagic, 4) != 0) {
            throw Error(ErrorCode::FormatMismatch, "bad magic");
        }
        throw Error(ErrorCode::TruncatedStream, "incomplete header");
    }
    const StreamHeader h = decode_header(bytes.data());
    check_header_against(h, manifest);
    const std::size_t rs = record_size(h.feature_dim, h.num_classes);
    std::vector<FrameRecord> records(h.num_frames);
    std::size_t offset = kStreamHeaderSize;
    for (std::uint64_t i = 0; i < h.num_frames; ++i) {
        if (bytes.size() - offset < rs) {
            throw Error(ErrorCode::TruncatedStream, "stream ends inside record " + std::to_string(i));
        }
        decode_record(bytes.data() + offset, h.feature_dim, h.num_classes, i, records[i]);
        offset += rs;
    }
    return records;
}

void write_stream(std::span<const FrameRecord> records, const StreamManifest& manifest,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write stream " + path.string());

    // Encode in bounded chunks so that large streams do not need a second full copy.
    std::vector<char> chunk;
    encode_header(chunk, {kStreamVersion, manifest.feature_dim, manifest.num_classes, manifest.num_frames});
    if (records.size() != manifest.num_frames) {
        throw Error(ErrorCode::DimensionMismatch, "manifest declares " + std::to_string(manifest.num_frames) +
                                                      " frames, got " + std::to_string(records.size()));
    }
    constexpr std::size_t kFlushBytes = 1 << 20;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        check_record(r, i, manifest);
        put_le(chunk, r.frame_index);
        for (float v : r.feature) put_f32(chunk, v);
        for (float v : r.logits) put_f32(chunk, v);
        if (chunk.size() >= kFlushBytes) {
            out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
            chunk.clear();
        }
    }
    out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void normalize_segments(std::vector<LabelSegment>& segments, std::optional<std::uint32_t> num_classes) {
    for (const auto& s : segments) {
        if (s.stop_frame < s.start_frame) {
            throw Error(ErrorCode::MalformedAnnotation, s.video_id + ": stop_frame " + std::to_string(s.stop_frame) +
                                                            " < start_frame " + std::to_string(s.start_frame));
        }
        if (s.label < kUnknownLabel || (num_classes && s.label >= static_cast<int>(*num_classes))) {
            throw Error(ErrorCode::MalformedAnnotation,
                        s.video_id + ": label " + std::to_string(s.label) + " out of range");
        }
    }
    std::stable_sort(segments.begin(), segments.end(), [](const LabelSegment& a, const LabelSegment& b) {
        if (a.video_id != b.video_id) return a.video_id < b.video_id;
        if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
        return a.stop_frame < b.stop_frame;
    });
    // UNKNOWN intervals must not overlap labeled ones. Sorted by start, so a
    // sweep that tracks the furthest stop of each kind is enough.
    std::string current_video;
    std::optional<std::uint64_t> labeled_reach;
    std::optional<std::uint64_t> unknown_reach;
    for (const auto& s : segments) {
        if (s.video_id != current_video) {
            current_video = s.video_id;
            labeled_reach.reset();
            unknown_reach.reset();
        }
        auto& other = s.is_unknown() ? labeled_reach : unknown_reach;
        if (other && s.start_frame <= *other) {
            throw Error(ErrorCode::MalformedAnnotation, s.video_id + ": UNKNOWN segment overlaps a labeled one at frame " +
                                                            std::to_string(s.start_frame));
        }
        auto& mine = s.is_unknown() ? unknown_reach : labeled_reach;
        mine = mine ? std::max(*mine, s.stop_frame) : s.stop_frame;
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

template <typename T>
bool parse_int(const std::string& text, T& value) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last;
}

}  // namespace

std::vector<LabelSegment> load_annotations(const std::filesystem::path& path,
                                           std::optional<std::uint32_t> num_classes) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open annotations " + path.string());
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::MalformedAnnotation, path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    if (!std::getline(in, line)) fail("missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line != "video_id,start_frame,stop_frame,label") fail("unexpected header '" + line + "'");

    std::vector<LabelSegment> segments;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 4) fail("expected 4 fields, got " + std::to_string(fields.size()));
        LabelSegment s;
        s.video_id = fields[0];
        if (!parse_int(fields[1], s.start_frame)) fail("bad start_frame '" + fields[1] + "'");
        if (!parse_int(fields[2], s.stop_frame)) fail("bad stop_frame '" + fields[2] + "'");
        if (!parse_int(fields[3], s.label)) fail("bad label '" + fields[3] + "'");
        if (s.stop_frame < s.start_frame) fail("stop_frame < start_frame");
        segments.push_back(std::move(s));
    }
    try {
        normalize_segments(segments, num_classes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
    return segments;
}

void save_annotations(std::span<const LabelSegment> segments, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write annotations " + path.string());
    out << "video_id,start_frame,stop_frame,label\n";
    for (const auto& s : segments) {
        out << s.video_id << ',' << s.start_frame << ',' << s.stop_frame << ',' << s.label << '\n';
    }
}

void validate_dataset(const StreamDataset& d) {
    validate_manifest(d.manifest);
    if (d.records.size() != d.manifest.num_frames) {
        throw Error(ErrorCode::FormatMismatch, d.manifest.video_id + ": " + std::to_string(d.records.size()) +
                                                   " records for " + std::to_string(d.manifest.num_frames) +
                                                   " declared frames");
    }
    for (std::size_t i = 0; i < d.records.size(); ++i) check_record(d.records[i], i, d.manifest);
    for (const auto& s : d.segments) {
        if (s.stop_frame >= d.manifest.num_frames) {
            throw Error(ErrorCode::MalformedAnnotation, d.manifest.video_id + ": segment [" +
                                                            std::to_string(s.start_frame) + ", " +
                                                            std::to_string(s.stop_frame) + "] beyond stream end");
        }
        if (s.label >= static_cast<int>(d.manifest.num_classes) || s.label < kUnknownLabel) {
            throw Error(ErrorCode::MalformedAnnotation, "label out of range");
        }
    }
}

StreamDataset load_dataset(const std::filesystem::path& manifest_path,
                           std::optional<std::filesystem::path> stream_path,
                           std::optional<std::filesystem::path> annotation_path) {
    StreamDataset d;
    d.manifest = load_manifest(manifest_path);
    auto sibling = [&](const char* ext) { return std::filesystem::path(manifest_path).replace_extension(ext); };
    d.records = open_stream(stream_path.value_or(sibling(".egws")), d.manifest);
    auto all = load_annotations(annotation_path.value_or(sibling(".csv")),
                                d.manifest.num_classes);
    for (auto& s : all) {
        if (s.video_id == d.manifest.video_id) d.segments.push_back(std::move(s));
    }
    validate_dataset(d);
    return d;
}

void save_dataset(const StreamDataset& d, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    const auto& id = d.manifest.video_id;
    save_manifest(d.manifest, directory / (id + ".json"));
    write_stream(d.records, d.manifest, directory / (id + ".egws"));
    save_annotations(d.segments, directory / (id + ".csv"));
}

}  // namespace egostream
