// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

// egostream: synthesize streams, run the recognition protocols, sweep
// boundary parameters, plot-ready curves, benchmarks and stream inspection.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "egostream/alloc_probe.hpp"
#include "egostream/bench.hpp"
#include "egostream/error.hpp"
#include "egostream/protocols.hpp"
#include "egostream/report.hpp"
#include "egostream/run_config.hpp"
#include "egostream/stream_model.hpp"
#include "egostream/synth.hpp"

namespace {

using namespace egostream;
using ordered_json = nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << content;
}

struct Overrides {
    std::optional<double> tau;
    std::optional<std::uint32_t> delta;
    std::optional<std::uint32_t> k;
    std::optional<unsigned> jobs;
};

struct LoadedRun {
    RunConfig config;
    std::vector<StreamDataset> datasets;
    std::vector<EvalInput> inputs;
    unsigned jobs = 1;
};

LoadedRun load_run(const std::string& config_path, const Overrides& o) {
    LoadedRun run;
    run.config = load_run_config(config_path);
    auto& strategy = run.config.protocol.strategy;
    if (o.tau) strategy.dbl.threshold = *o.tau;
    if (o.delta) strategy.delta = *o.delta;
    if (o.k) strategy.sbl.k = *o.k;
    // Overrides go through the same checks before any stream is opened.
    validate(run.config);

    run.jobs = o.jobs.value_or(run.config.jobs.value_or(std::max(1u, std::thread::hardware_concurrency())));
    run.datasets.reserve(run.config.datasets.size());
    for (const auto& entry : run.config.datasets) {
        run.datasets.push_back(load_dataset(entry.manifest, entry.stream, entry.annotations));
    }
    for (std::size_t i = 0; i < run.datasets.size(); ++i) {
        run.inputs.push_back({&run.datasets[i], run.config.datasets[i].train_domain});
    }
    return run;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir, bool as_json) {
    const SynthPlan plan = load_synth_plan(config_path);
    ordered_json listing = ordered_json::array();
    for (const auto& v : plan.videos) {
        SynthConfig c = plan.base;
        c.video_id = v.video_id;
        c.domain_id = v.domain_id;
        c.seed = v.seed;
        // Every video of a plan shares one set of class centroids.
        if (c.class_centroids.empty()) {
            SynthConfig shared = plan.base;
            c.class_centroids = make_centroids(shared);
        }
        const StreamDataset d = generate(c, v.segments);
        save_dataset(d, out_dir);
        const auto manifest = (std::filesystem::path(out_dir) / (v.video_id + ".json")).string();
        listing.push_back({{"video_id", v.video_id},
                           {"domain_id", v.domain_id},
                           {"num_frames", d.manifest.num_frames},
                           {"segments", d.segments.size()},
                           {"manifest", manifest}});
        if (!as_json) {
            std::cout << manifest << "  (" << v.domain_id << ", " << d.manifest.num_frames << " frames, "
                      << d.segments.size() << " segments)\n";
        }
    }
    if (as_json) std::cout << listing.dump(2) << '\n';
    return 0;
}

int cmd_run(const std::string& config_path, const Overrides& o, bool as_json) {
    LoadedRun run = load_run(config_path, o);
    const EvalReport report = evaluate(run.inputs, run.config.protocol, run.jobs);
    ordered_json doc;
    doc["protocol"] = to_json(run.config.protocol);
    doc["seed"] = run.config.seed;
    doc["report"] = to_json(report);
    if (run.config.output.json) write_file(*run.config.output.json, doc.dump(2) + "\n");
    if (run.config.output.csv) write_file(*run.config.output.csv, pairs_to_csv(report));
    if (run.config.output.text) write_file(*run.config.output.text, to_text(report));
    if (as_json) {
        std::cout << doc.dump(2) << '\n';
    } else {
        std::cout << to_text(report);
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const Overrides& o, bool as_json) {
    LoadedRun run = load_run(config_path, o);
    if (!run.config.sweep) throw Error(ErrorCode::InvalidConfig, "config has no 'sweep' section");
    const auto& s = *run.config.sweep;
    const auto points = sweep(run.inputs, run.config.protocol, s.parameter, s.values, run.jobs);
    ordered_json doc;
    doc["protocol"] = to_json(run.config.protocol);
    doc["sweep"] = sweep_to_json(s.parameter, points);
    const std::string csv = sweep_to_csv(s.parameter, points);
    if (run.config.output.json) write_file(*run.config.output.json, doc.dump(2) + "\n");
    if (run.config.output.csv) write_file(*run.config.output.csv, csv);
    std::cout << (as_json ? doc.dump(2) + "\n" : csv);
    return 0;
}

int cmd_curve(const std::string& config_path, const Overrides& o, const std::vector<double>& cli_fractions,
              bool as_json) {
    LoadedRun run = load_run(config_path, o);
    std::vector<double> fractions = cli_fractions.empty() ? run.config.curve_fractions : cli_fractions;
    if (fractions.empty()) fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    for (double p : fractions) {
        if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidConfig, "fractions must be in (0, 1]");
    }
    const auto curve = accuracy_vs_percentage(run.inputs, fractions, run.jobs, run.config.protocol.input);
    const std::string csv = curve_to_csv(curve);
    const ordered_json doc = curve_to_json(curve);
    if (run.config.output.json) write_file(*run.config.output.json, doc.dump(2) + "\n");
    if (run.config.output.csv) write_file(*run.config.output.csv, csv);
    std::cout << (as_json ? doc.dump(2) + "\n" : csv);
    return 0;
}

int cmd_bench(BenchConfig config, const std::string& strategy, bool as_json) {
    if (strategy == "single") {
        config.strategy = StrategyKind::Dbl;
    } else if (strategy == "a2") {
        config.strategy = StrategyKind::A2;
    } else {
        config.strategy = StrategyKind::Sbl;
    }
    config.allocation_counter = &probe::allocation_count;
    const BenchReport report = bench_pipeline(config);
    const ordered_json doc = to_json(report);
    if (as_json) {
        std::cout << doc.dump(2) << '\n';
    } else {
        for (const auto& item : doc.items()) {
            std::cout << std::left << std::setw(26) << item.key() << item.value().dump() << '\n';
        }
    }
    return 0;
}

int cmd_inspect(const std::string& stream_path, const std::string& manifest_path, bool as_json) {
    std::optional<StreamManifest> manifest;
    if (!manifest_path.empty()) manifest = load_manifest(manifest_path);
    StreamReader reader = manifest ? StreamReader(stream_path, *manifest) : StreamReader(stream_path);
    const StreamHeader h = reader.header();

    std::vector<double> lo(h.num_classes, std::numeric_limits<double>::infinity());
    std::vector<double> hi(h.num_classes, -std::numeric_limits<double>::infinity());
    std::vector<double> mean(h.num_classes, 0.0);
    FrameRecord r;
    std::uint64_t n = 0;
    while (reader.next(r)) {
        ++n;
        for (std::size_t c = 0; c < r.logits.size(); ++c) {
            const double v = r.logits[c];
            lo[c] = std::min(lo[c], v);
            hi[c] = std::max(hi[c], v);
            mean[c] += (v - mean[c]) / static_cast<double>(n);
        }
    }

    ordered_json doc;
    doc["path"] = stream_path;
    doc["version"] = h.version;
    doc["feature_dim"] = h.feature_dim;
    doc["num_classes"] = h.num_classes;
    doc["num_frames"] = n;
    auto dims = ordered_json::array();
    for (std::size_t c = 0; c < h.num_classes && n > 0; ++c) {
        dims.push_back({{"class", c}, {"min", lo[c]}, {"max", hi[c]}, {"mean", mean[c]}});
    }
    doc["logits"] = std::move(dims);
    if (as_json) {
        std::cout << doc.dump(2) << '\n';
        return 0;
    }
    std::cout << "stream       " << stream_path << '\n'
              << "version      " << h.version << '\n'
              << "feature_dim  " << h.feature_dim << '\n'
              << "num_classes  " << h.num_classes << '\n'
              << "num_frames   " << n << '\n';
    if (n > 0) {
        std::cout << '\n'
                  << std::setw(6) << "class" << std::setw(12) << "min" << std::setw(12) << "max" << std::setw(12)
                  << "mean" << '\n'
                  << std::fixed << std::setprecision(4);
        for (std::size_t c = 0; c < h.num_classes; ++c) {
            std::cout << std::setw(6) << c << std::setw(12) << lo[c] << std::setw(12) << hi[c] << std::setw(12)
                      << mean[c] << '\n';
        }
    }
    return 0;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--tau", o.tau, "DBL threshold override")->check(CLI::PositiveNumber);
    cmd->add_option("--delta", o.delta, "A2 hand-off delay in frames")->check(CLI::Range(1u, 1u << 30));
    cmd->add_option("--k", o.k, "SBL reset period in frames")->check(CLI::Range(1u, 1u << 30));
    cmd->add_option("--jobs", o.jobs, "videos evaluated in parallel (default: all cores)")
        ->check(CLI::Range(1u, 4096u));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online action recognition over per-frame feature/logit streams"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    std::string synth_config, synth_out;
    auto* synth = app.add_subcommand("synth", "generate synthetic streams with ground truth");
    synth->add_option("--config", synth_config, "generator JSON")->required()->check(CLI::ExistingFile);
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_flag("--json", as_json);

    std::string config_path;
    Overrides overrides;
    auto* run = app.add_subcommand("run", "run the configured protocol");
    run->add_option("--config", config_path, "run config JSON")->required()->check(CLI::ExistingFile);
    add_overrides(run, overrides);
    run->add_flag("--json", as_json);

    auto* sweep_cmd = app.add_subcommand("sweep", "sweep k, tau or delta");
    sweep_cmd->add_option("--config", config_path, "run config JSON")->required()->check(CLI::ExistingFile);
    add_overrides(sweep_cmd, overrides);
    sweep_cmd->add_flag("--json", as_json);

    std::vector<double> fractions;
    auto* curve = app.add_subcommand("curve", "accuracy vs. share of each action observed");
    curve->add_option("--config", config_path, "run config JSON")->required()->check(CLI::ExistingFile);
    curve->add_option("--fractions", fractions, "observed fractions in (0, 1]")->delimiter(',');
    add_overrides(curve, overrides);
    curve->add_flag("--json", as_json);

    BenchConfig bench_config;
    std::string strategy = "a2";
    double tau = 0.0;
    auto* bench = app.add_subcommand("bench", "throughput/latency of the per-frame step loop");
    bench->add_option("--dim", bench_config.feature_dim, "feature dimension D")->check(CLI::Range(1u, 1u << 20));
    bench->add_option("--classes", bench_config.num_classes, "number of classes C")->check(CLI::Range(2u, 1u << 20));
    bench->add_option("--frames", bench_config.num_frames, "measured + warmup frames");
    bench->add_option("--warmup", bench_config.warmup_frames, "frames excluded from statistics");
    bench->add_option("--strategy", strategy, "single | a2 | sbl")
        ->check(CLI::IsMember({"single", "a2", "sbl"}));
    bench->add_option("--tau", tau, "DBL threshold (default: half the smallest class gap)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--delta", bench_config.delta, "A2 delay")->check(CLI::Range(1u, 1u << 30));
    bench->add_option("--k", bench_config.k, "SBL period")->check(CLI::Range(1u, 1u << 30));
    bench->add_option("--seed", bench_config.seed, "synthetic input seed");
    bench->add_flag("--json", as_json);

    std::string stream_path, manifest_path;
    auto* inspect = app.add_subcommand("inspect", "summarize a stream file");
    inspect->add_option("stream", stream_path, "stream file")->required();
    inspect->add_option("--manifest", manifest_path, "check the header against a manifest");
    inspect->add_flag("--json", as_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(synth_config, synth_out, as_json);
        if (*run) return cmd_run(config_path, overrides, as_json);
        if (*sweep_cmd) return cmd_sweep(config_path, overrides, as_json);
        if (*curve) return cmd_curve(config_path, overrides, fractions, as_json);
        if (*bench) {
            if (tau > 0.0) bench_config.tau = tau;
            return cmd_bench(bench_config, strategy, as_json);
        }
        if (*inspect) return cmd_inspect(stream_path, manifest_path, as_json);
    } catch (const Error& e) {
        std::cerr << "egostream: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "egostream: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
