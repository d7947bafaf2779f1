// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridtrack/errors.hpp"
#include "gridtrack/io.hpp"
#include "gridtrack/runner.hpp"

namespace {

using gridtrack::ConfigError;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string scenario_path;
    std::string tracker;
    std::string out_dir;
    long long seed = -1;
    bool dump_frames = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_tracker = true) {
    cmd->add_option("--config", opts.config_path, "key = value config file");
    cmd->add_option("--set", opts.sets, "override a config key, e.g. --set scenario.frames=100");
    cmd->add_option("--seed", opts.seed, "scenario seed override");
    cmd->add_option("--out", opts.out_dir, "output directory");
    if (with_tracker)
        cmd->add_option("--tracker", opts.tracker, "one of nnkf, nnkf_gt, nnkf_reid, "
                                                   "nnkf_only_reid, integrated, integrated_entropy");
}

std::map<std::string, std::string> collect_key_values(const CommonOpts& opts) {
    std::map<std::string, std::string> kv;
    if (!opts.config_path.empty()) kv = gridtrack::parse_config_file(opts.config_path);
    if (opts.seed >= 0) kv["seed"] = std::to_string(opts.seed);
    if (!opts.tracker.empty()) kv["tracker"] = opts.tracker;
    if (!opts.scenario_path.empty()) kv["scenario_path"] = opts.scenario_path;
    if (!opts.out_dir.empty()) kv["out_dir"] = opts.out_dir;
    if (opts.dump_frames) kv["dump_frames"] = "true";
    for (const std::string& s : opts.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return kv;
}

void print_report(const gridtrack::MetricsReport& r) {
    std::printf("MOTA %.4f  MOTP %.4f  FP %lld  FN %lld  IDS %lld  MT %d  ML %d  IDF1 %.4f\n",
                r.mota, r.motp, r.fp, r.fn, r.ids, r.mt, r.ml, r.idf1);
}

int run_generate(const CommonOpts& opts, bool with_maps) {
    gridtrack::RunConfig cfg = gridtrack::make_run_config(collect_key_values(opts));
    if (cfg.out_dir.empty()) throw ConfigError("generate: --out is required");
    const gridtrack::Scenario scenario = gridtrack::generate_scenario(cfg.scenario);
    std::filesystem::create_directories(cfg.out_dir);
    gridtrack::save_scenario(scenario, cfg.out_dir + "/scenario.json");
    gridtrack::write_boxes_csv(gridtrack::gt_sequence(scenario), cfg.out_dir + "/gt.csv");
    gridtrack::write_detections_jsonl(scenario, cfg.out_dir + "/detections.jsonl");
    if (with_maps) gridtrack::write_embedding_maps(scenario, cfg.out_dir + "/maps.f32");
    std::printf("wrote %s/scenario.json (%d identities, %d frames)\n", cfg.out_dir.c_str(),
                cfg.scenario.num_identities, cfg.scenario.frames);
    return 0;
}

int run_track(const CommonOpts& opts) {
    gridtrack::RunConfig cfg = gridtrack::make_run_config(collect_key_values(opts));
    const gridtrack::Scenario scenario = gridtrack::obtain_scenario(cfg);
    const gridtrack::RunResult result = gridtrack::run_and_evaluate(scenario, cfg);
    print_report(result.report);
    if (!cfg.out_dir.empty())
        std::printf("wrote %s/{hyp.csv,gt.csv,metrics.json}\n", cfg.out_dir.c_str());
    return 0;
}

int run_eval(const CommonOpts& opts, const std::string& gt_path, const std::string& hyp_path,
             const std::string& out_path) {
    gridtrack::RunConfig cfg = gridtrack::make_run_config(collect_key_values(opts));
    const gridtrack::BoxSequence gt = gridtrack::read_boxes_csv(gt_path);
    const gridtrack::BoxSequence hyp = gridtrack::read_boxes_csv(hyp_path);
    const gridtrack::MetricsReport report = gridtrack::evaluate_sequences(gt, hyp, cfg.eval);
    print_report(report);
    if (!out_path.empty()) {
        gridtrack::write_metrics_json(report, out_path);
        std::printf("wrote %s\n", out_path.c_str());
    }
    return 0;
}

int run_sweep_cmd(const CommonOpts& opts, const std::string& sweep_spec) {
    const auto eq = sweep_spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--sweep expects key=v1,v2,..., got '" + sweep_spec + "'");
    const std::string key = sweep_spec.substr(0, eq);
    std::vector<double> values;
    std::string rest = sweep_spec.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        const auto comma = rest.find(',', pos);
        const std::string item =
            comma == std::string::npos ? rest.substr(pos) : rest.substr(pos, comma - pos);
        if (item.empty()) throw ConfigError("--sweep: empty value in list");
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("--sweep: '" + item + "' is not a number");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    gridtrack::RunConfig cfg = gridtrack::make_run_config(collect_key_values(opts));
    const auto points = gridtrack::run_sweep(cfg, key, values);
    for (const auto& p : points)
        std::printf("%s=%g  MOTA %.4f  MOTP %.4f\n", key.c_str(), p.value, p.report.mota,
                    p.report.motp);
    if (!cfg.out_dir.empty()) std::printf("wrote %s/sweep.csv\n", cfg.out_dir.c_str());
    return 0;
}

int run_render(const CommonOpts& opts, int frame, int identity_id) {
    gridtrack::RunConfig cfg = gridtrack::make_run_config(collect_key_values(opts));
    if (cfg.out_dir.empty()) throw ConfigError("render: --out is required");
    const gridtrack::Scenario scenario = gridtrack::obtain_scenario(cfg);
    if (scenario.identities().empty()) throw ConfigError("render: scenario has no identities");
    const gridtrack::Identity* identity = &scenario.identities().front();
    if (identity_id >= 0) {
        identity = nullptr;
        for (const gridtrack::Identity& cand : scenario.identities()) {
            if (cand.id == identity_id) identity = &cand;
        }
        if (identity == nullptr)
            throw ConfigError("render: no identity with id " + std::to_string(identity_id));
    }
    const gridtrack::FrameObservation obs = scenario.render_frame(frame);
    const gridtrack::DistanceGrid dist =
        gridtrack::distance_map(obs.embedding_map, identity->true_embedding);
    const gridtrack::ProbabilityGrid like =
        gridtrack::softmin(dist, cfg.hist.softmin_temperature);
    std::filesystem::create_directories(cfg.out_dir);
    char name[64];
    std::snprintf(name, sizeof(name), "/distance_f%04d_id%03d.pgm", frame, identity->id);
    gridtrack::write_pgm(dist, cfg.out_dir + name);
    std::snprintf(name, sizeof(name), "/softmin_f%04d_id%03d.pgm", frame, identity->id);
    gridtrack::write_pgm(like, cfg.out_dir + name);
    std::printf("wrote distance/softmin maps for identity %d at frame %d into %s\n",
                identity->id, frame, cfg.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridtrack: histogram-filter multi-target tracking on embedding maps"};
    app.require_subcommand(1);

    CommonOpts gen_opts;
    bool gen_maps = false;
    CLI::App* gen = app.add_subcommand("generate", "generate a synthetic scenario");
    add_common(gen, gen_opts, false);
    gen->add_flag("--maps", gen_maps, "also dump the embedding map sidecar (large)");

    CommonOpts track_opts;
    CLI::App* track = app.add_subcommand("track", "run a tracker over a scenario");
    add_common(track, track_opts);
    track->add_option("--scenario", track_opts.scenario_path, "scenario JSON to load");
    track->add_flag("--dump-frames", track_opts.dump_frames, "write PGM belief frames");

    CommonOpts eval_opts;
    std::string eval_gt, eval_hyp, eval_out;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a hypothesis CSV against GT");
    add_common(eval, eval_opts, false);
    eval->add_option("--gt", eval_gt, "ground truth CSV")->required();
    eval->add_option("--hyp", eval_hyp, "hypothesis CSV")->required();
    eval->add_option("--metrics-out", eval_out, "metrics JSON output path");

    CommonOpts sweep_opts;
    std::string sweep_spec;
    CLI::App* sweep = app.add_subcommand("sweep", "re-run an experiment over parameter values");
    add_common(sweep, sweep_opts);
    sweep->add_option("--scenario", sweep_opts.scenario_path, "scenario JSON to load");
    sweep->add_option("--sweep", sweep_spec, "key=v1,v2,... to sweep")->required();

    CommonOpts render_opts;
    int render_frame = 0, render_identity = -1;
    CLI::App* render = app.add_subcommand("render", "dump qualitative distance/softmin maps");
    add_common(render, render_opts, false);
    render->add_option("--scenario", render_opts.scenario_path, "scenario JSON to load");
    render->add_option("--frame", render_frame, "frame to render");
    render->add_option("--identity", render_identity, "identity id (default: first)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_generate(gen_opts, gen_maps);
        if (track->parsed()) return run_track(track_opts);
        if (eval->parsed()) return run_eval(eval_opts, eval_gt, eval_hyp, eval_out);
        if (sweep->parsed()) return run_sweep_cmd(sweep_opts, sweep_spec);
        if (render->parsed()) return run_render(render_opts, render_frame, render_identity);
    } catch (const gridtrack::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
