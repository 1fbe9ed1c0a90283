// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "egostream/stream_model.hpp"
#include "test_util.hpp"

#ifndef EGOSTREAM_CLI
#error "EGOSTREAM_CLI must point at the egostream executable"
#endif

namespace egostream {
namespace {

using json = nlohmann::json;
using testing::TempDir;

struct Result {
    int status = -1;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(EGOSTREAM_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p);
    out << s;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliPipeline : public ::testing::Test {
protected:
    void SetUp() override {
        write_text(dir / "synth.json", R"({
            "num_classes": 4, "feature_dim": 16, "seed": 3, "min_frames": 30, "max_frames": 60,
            "within_action_noise": 0.05, "overlap_fraction": 0.25, "overlap_length": 10,
            "unknown_gap_probability": 0.1, "domains": ["D1", "D2"], "videos_per_domain": 2,
            "segments_per_video": 12})");
        const auto r = cli("synth --config " + (dir / "synth.json").string() + " --out " + (dir / "data").string() +
                           " --json");
        ASSERT_EQ(r.status, 0) << r.out;
        listing = json::parse(r.out);
    }

    std::string write_run(const std::string& protocol) {
        json cfg = json::parse(R"({"version": 1, "datasets": []})");
        for (const auto& v : listing) {
            cfg["datasets"].push_back({{"manifest", v["manifest"]}, {"train_domain", "D1"}});
        }
        cfg["protocol"] = json::parse(protocol);
        cfg["boundary"] = {{"tau", 0.02}, {"delta", 10}};
        const auto path = dir / "run.json";
        write_text(path, cfg.dump());
        return path.string();
    }

    TempDir dir{"cli"};
    json listing;
};

TEST_F(CliPipeline, SynthWritesAllVideos) {
    ASSERT_EQ(listing.size(), 4u);
    for (const auto& v : listing) {
        const auto manifest = v["manifest"].get<std::string>();
        EXPECT_TRUE(std::filesystem::exists(manifest));
        const auto d = load_dataset(manifest);
        EXPECT_EQ(d.manifest.num_frames, v["num_frames"].get<std::uint64_t>());
    }
}

TEST_F(CliPipeline, RunProducesParsableDeterministicReport) {
    const auto cfg = write_run(R"({"mode": "online", "strategy": "a2"})");
    const auto a = cli("run --config " + cfg + " --json --jobs 1");
    ASSERT_EQ(a.status, 0);
    const auto doc = json::parse(a.out);
    EXPECT_EQ(doc["protocol"]["mode"], "online");
    EXPECT_TRUE(doc["report"].contains("per_pair"));
    const auto b = cli("run --config " + cfg + " --json --jobs 3");
    EXPECT_EQ(a.out, b.out);

    const auto text = cli("run --config " + cfg);
    EXPECT_EQ(text.status, 0);
    EXPECT_FALSE(text.out.empty());
}

TEST_F(CliPipeline, OverridesAreValidated) {
    const auto cfg = write_run(R"({"mode": "online", "strategy": "a2"})");
    EXPECT_NE(cli("run --config " + cfg + " --tau 0").status, 0);
    EXPECT_NE(cli("run --config " + cfg + " --delta 0").status, 0);
    const auto ok = cli("run --config " + cfg + " --tau 0.5 --delta 5 --json");
    ASSERT_EQ(ok.status, 0);
    const auto doc = json::parse(ok.out);
    EXPECT_EQ(doc["protocol"]["boundary"]["delta"], 5);
}

TEST_F(CliPipeline, SweepAndCurve) {
    const auto cfg = write_run(R"({"mode": "online", "strategy": "sbl"})");
    auto c = json::parse(read_text(cfg));
    c["sweep"] = {{"parameter", "k"}, {"values", {3, 4, 5, 6, 10}}};
    write_text(cfg, c.dump());
    const auto s = cli("sweep --config " + cfg);
    ASSERT_EQ(s.status, 0);
    EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 6);  // header + five rows

    const auto curve = cli("curve --config " + cfg + " --fractions 0.25,0.5,1 --json");
    ASSERT_EQ(curve.status, 0);
    EXPECT_EQ(json::parse(curve.out).size(), 3u);
}

TEST_F(CliPipeline, BadConfigExitsWithError) {
    write_text(dir / "bad.json", R"({"version": 1, "datasets": [{"manifest": "x.json"}], "bogus": 1})");
    EXPECT_EQ(cli("run --config " + (dir / "bad.json").string()).status, 2);
}

TEST(Cli, InspectKnownFixture) {
    TempDir dir("inspect");
    const auto m = testing::make_manifest(2, 1, 2);
    const std::vector<FrameRecord> recs{{0, {0.5f}, {1.0f, -2.0f}}, {1, {0.25f}, {3.0f, 4.0f}}};
    write_stream(recs, m, dir / "v.egws");
    save_manifest(m, dir / "v.json");
    const auto r = cli("inspect " + (dir / "v.egws").string() + " --manifest " + (dir / "v.json").string() + " --json");
    ASSERT_EQ(r.status, 0);
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["num_frames"], 2);
    EXPECT_EQ(doc["feature_dim"], 1);
    EXPECT_EQ(doc["logits"][0]["min"], 1.0);
    EXPECT_EQ(doc["logits"][0]["max"], 3.0);
    EXPECT_EQ(doc["logits"][0]["mean"], 2.0);
    EXPECT_EQ(doc["logits"][1]["mean"], 1.0);
}

TEST(Cli, InspectHeaderOnlyStream) {
    TempDir dir("inspect");
    const auto m = testing::make_manifest(0, 3, 2);
    write_stream(std::vector<FrameRecord>{}, m, dir / "e.egws");
    EXPECT_EQ(std::filesystem::file_size(dir / "e.egws"), kStreamHeaderSize);
    const auto r = cli("inspect " + (dir / "e.egws").string() + " --json");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(json::parse(r.out)["num_frames"], 0);
}

TEST(Cli, InspectRejectsCorruptMagic) {
    TempDir dir("inspect");
    const auto m = testing::make_manifest(1, 1, 2);
    write_stream(std::vector<FrameRecord>{{0, {1.0f}, {0.0f, 1.0f}}}, m, dir / "c.egws");
    {
        std::fstream f(dir / "c.egws", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
    }
    EXPECT_EQ(cli("inspect " + (dir / "c.egws").string()).status, 2);
    EXPECT_EQ(cli("inspect " + (dir / "missing.egws").string()).status, 2);
}

TEST(Cli, BenchSmoke) {
    const auto r = cli("bench --dim 64 --frames 20000 --warmup 2000 --strategy a2 --json");
    ASSERT_EQ(r.status, 0);
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["frames_processed"], 18000);
    EXPECT_EQ(doc["allocations_after_warmup"], 0);
}

}  // namespace
}  // namespace egostream
