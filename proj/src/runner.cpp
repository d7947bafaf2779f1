// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gridtrack/errors.hpp"
#include "gridtrack/io.hpp"

namespace gridtrack {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    std::size_t idx = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &idx);
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
    }
    if (idx != value.size())
        throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t idx = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &idx);
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
    }
    if (idx != value.size())
        throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("config: '" + key + "' expects a boolean, got '" + value + "'");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

TrackerVariant parse_variant(const std::string& name) {
    if (name == "nnkf") return TrackerVariant::NnKf;
    if (name == "nnkf_gt") return TrackerVariant::NnKfGt;
    if (name == "nnkf_reid") return TrackerVariant::NnKfReid;
    if (name == "nnkf_only_reid") return TrackerVariant::NnKfOnlyReid;
    if (name == "integrated") return TrackerVariant::Integrated;
    if (name == "integrated_entropy") return TrackerVariant::IntegratedEntropy;
    throw ConfigError("unknown tracker variant '" + name + "'");
}

std::string variant_name(TrackerVariant v) {
    switch (v) {
        case TrackerVariant::NnKf: return "nnkf";
        case TrackerVariant::NnKfGt: return "nnkf_gt";
        case TrackerVariant::NnKfReid: return "nnkf_reid";
        case TrackerVariant::NnKfOnlyReid: return "nnkf_only_reid";
        case TrackerVariant::Integrated: return "integrated";
        case TrackerVariant::IntegratedEntropy: return "integrated_entropy";
    }
    throw ConfigError("unknown tracker variant");
}

const std::vector<std::string>& variant_names() {
    static const std::vector<std::string> names = {
        "nnkf", "nnkf_gt", "nnkf_reid", "nnkf_only_reid", "integrated", "integrated_entropy"};
    return names;
}

void apply_variant_preset(RunConfig& cfg) {
    cfg.tm = TrackManagementConfig{};
    cfg.assoc = AssociationConfig{};
    cfg.hist.entropy_fraction.reset();
    switch (cfg.tracker) {
        case TrackerVariant::NnKf:
            cfg.tm.sigma_init = 0.3;
            cfg.tm.d_init = 3;
            cfg.tm.sigma_cont = 0.0;
            cfg.tm.d_miss = 5;
            cfg.tm.gt_init = false;
            cfg.assoc.mode = AssocMode::Pos;
            break;
        case TrackerVariant::NnKfGt:
        case TrackerVariant::NnKfReid:
        case TrackerVariant::NnKfOnlyReid:
            cfg.tm.sigma_init = 0.3;
            cfg.tm.d_init = 1;
            cfg.tm.sigma_cont = -0.3;
            cfg.tm.d_miss = 90;
            cfg.tm.gt_init = true;
            cfg.assoc.mode = cfg.tracker == TrackerVariant::NnKfReid ? AssocMode::Combined
                             : cfg.tracker == TrackerVariant::NnKfOnlyReid ? AssocMode::App
                                                                           : AssocMode::Pos;
            break;
        case TrackerVariant::Integrated:
            cfg.tm.gt_init = true;
            break;
        case TrackerVariant::IntegratedEntropy:
            cfg.tm.gt_init = true;
            cfg.hist.entropy_fraction = 0.5;
            break;
    }
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: empty key on line " + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    ScenarioConfig& sc = cfg.scenario;
    HistFilterConfig& hf = cfg.hist;
    if (key == "tracker") {
        cfg.tracker = parse_variant(value);
    } else if (key == "scenario_path") {
        cfg.scenario_path = value;
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "dump_frames") {
        cfg.dump_frames = parse_bool(key, value);
    } else if (key == "seed" || key == "scenario.seed") {
        sc.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "scenario.grid_width") {
        sc.grid_width = static_cast<int>(parse_int(key, value));
    } else if (key == "scenario.grid_height") {
        sc.grid_height = static_cast<int>(parse_int(key, value));
    } else if (key == "scenario.cell_size") {
        sc.cell_size = parse_double(key, value);
    } else if (key == "scenario.embedding_dim") {
        sc.embedding_dim = static_cast<int>(parse_int(key, value));
    } else if (key == "scenario.num_identities") {
        sc.num_identities = static_cast<int>(parse_int(key, value));
    } else if (key == "scenario.frames") {
        sc.frames = static_cast<int>(parse_int(key, value));
    } else if (key == "scenario.velocity_range") {
        sc.velocity_range = parse_double(key, value);
    } else if (key == "scenario.motion_noise_sigma") {
        sc.motion_noise_sigma = parse_double(key, value);
    } else if (key == "scenario.embedding_noise_sigma") {
        sc.embedding_noise_sigma = parse_double(key, value);
    } else if (key == "scenario.background_mode") {
        if (value == "random_far") {
            sc.background_mode = BackgroundMode::RandomFar;
        } else if (value == "confuser") {
            sc.background_mode = BackgroundMode::Confuser;
        } else {
            throw ConfigError("config: unknown background_mode '" + value + "'");
        }
    } else if (key == "scenario.confuser_similarity") {
        sc.confuser_similarity = parse_double(key, value);
    } else if (key == "scenario.miss_rate") {
        sc.detection.miss_rate = parse_double(key, value);
    } else if (key == "scenario.fp_rate") {
        sc.detection.fp_rate = parse_double(key, value);
    } else if (key == "scenario.score_noise") {
        sc.detection.score_noise = parse_double(key, value);
    } else if (key == "scenario.pos_noise_sigma") {
        sc.detection.pos_noise_sigma = parse_double(key, value);
    } else if (key == "scenario.random_entry_exit") {
        sc.random_entry_exit = parse_bool(key, value);
    } else if (key == "scenario.height_slope") {
        sc.height_slope = parse_double(key, value);
    } else if (key == "scenario.height_intercept") {
        sc.height_intercept = parse_double(key, value);
    } else if (key == "scenario.aspect") {
        sc.aspect = parse_double(key, value);
    } else if (key == "hist.sigma_init_cells") {
        hf.sigma_init_cells = parse_double(key, value);
    } else if (key == "hist.vel_prior_var") {
        hf.vel_prior_cov = parse_double(key, value) * Eigen::Matrix2d::Identity();
    } else if (key == "hist.q_pos_var") {
        hf.q_pos = parse_double(key, value) * Eigen::Matrix2d::Identity();
    } else if (key == "hist.q_vel_var") {
        hf.q_vel = parse_double(key, value) * Eigen::Matrix2d::Identity();
    } else if (key == "hist.r_vel_var") {
        hf.r_vel = parse_double(key, value) * Eigen::Matrix2d::Identity();
    } else if (key == "hist.softmin_temperature") {
        hf.softmin_temperature = parse_double(key, value);
    } else if (key == "hist.n_app") {
        hf.n_app = parse_double(key, value);
    } else if (key == "hist.entropy_fraction") {
        if (value == "none" || value == "off") {
            hf.entropy_fraction.reset();
        } else {
            hf.entropy_fraction = parse_double(key, value);
        }
    } else if (key == "hist.d_max_missed") {
        hf.d_max_missed = static_cast<int>(parse_int(key, value));
    } else if (key == "hist.emit_mode") {
        if (value == "peak") {
            hf.emit_mode = EmitMode::Peak;
        } else if (value == "expectation") {
            hf.emit_mode = EmitMode::Expectation;
        } else {
            throw ConfigError("config: unknown emit_mode '" + value + "'");
        }
    } else if (key == "assoc.mode") {
        if (value == "pos") {
            cfg.assoc.mode = AssocMode::Pos;
        } else if (value == "app") {
            cfg.assoc.mode = AssocMode::App;
        } else if (value == "combined") {
            cfg.assoc.mode = AssocMode::Combined;
        } else {
            throw ConfigError("config: unknown association mode '" + value + "'");
        }
    } else if (key == "assoc.n_pos") {
        cfg.assoc.n_pos = parse_double(key, value);
    } else if (key == "assoc.n_app") {
        cfg.assoc.n_app = parse_double(key, value);
    } else if (key == "assoc.gate") {
        cfg.assoc.gate = parse_double(key, value);
    } else if (key == "tm.sigma_init") {
        cfg.tm.sigma_init = parse_double(key, value);
    } else if (key == "tm.d_init") {
        cfg.tm.d_init = static_cast<int>(parse_int(key, value));
    } else if (key == "tm.sigma_cont") {
        cfg.tm.sigma_cont = parse_double(key, value);
    } else if (key == "tm.d_miss") {
        cfg.tm.d_miss = static_cast<int>(parse_int(key, value));
    } else if (key == "tm.gt_init") {
        cfg.tm.gt_init = parse_bool(key, value);
    } else if (key == "bbox.scale") {
        cfg.bbox_scale = parse_double(key, value);
    } else if (key == "eval.iou_threshold") {
        cfg.eval.iou_threshold = parse_double(key, value);
    } else if (key == "eval.rematch") {
        cfg.eval.continuity = !parse_bool(key, value);
    } else if (key == "eval.mode") {
        if (value == "iou") {
            cfg.eval.mode = MatchMode::Iou;
        } else if (value == "center") {
            cfg.eval.mode = MatchMode::CenterDistance;
        } else {
            throw ConfigError("config: unknown eval mode '" + value + "'");
        }
    } else if (key == "eval.center_gate") {
        cfg.eval.center_gate = parse_double(key, value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

RunConfig make_run_config(const std::map<std::string, std::string>& kv) {
    RunConfig cfg;
    const auto tracker_it = kv.find("tracker");
    if (tracker_it != kv.end()) cfg.tracker = parse_variant(tracker_it->second);
    apply_variant_preset(cfg);
    for (const auto& [key, value] : kv) {
        if (key == "tracker") continue;
        apply_key_value(cfg, key, value);
    }
    return cfg;
}

BBoxRegressor fit_regressor(const Scenario& scenario, double scale) {
    std::vector<std::pair<double, double>> samples;
    for (int t = 0; t < scenario.config().frames; ++t) {
        for (const GtBox& g : scenario.gt_boxes(t)) samples.emplace_back(g.center.y(), g.height);
    }
    return fit_bbox_regressor(samples, scenario.config().aspect, scale);
}

Scenario obtain_scenario(const RunConfig& cfg) {
    if (!cfg.scenario_path.empty()) return load_scenario(cfg.scenario_path);
    return generate_scenario(cfg.scenario);
}

namespace {

std::vector<OutputBox> run_nnkf_family(const Scenario& scenario, const RunConfig& cfg,
                                       const BBoxRegressor& reg) {
    const ScenarioConfig& sc = scenario.config();

    std::map<int, std::vector<const Identity*>> births;
    if (cfg.tm.gt_init) {
        for (const Identity& identity : scenario.identities())
            births[identity.entry].push_back(&identity);
    }

    TrackerWorld world;
    std::vector<OutputBox> boxes;
    for (int t = 0; t < sc.frames; ++t) {
        std::vector<GtBirth> gt_births;
        const auto it = births.find(t);
        if (it != births.end()) {
            for (const Identity* identity : it->second) {
                GtBirth birth;
                birth.center = identity->center_at(t);
                birth.embedding = identity->true_embedding;
                gt_births.push_back(std::move(birth));
            }
        }
        step(world, scenario.detections(t), cfg.tm, cfg.assoc, gt_births);
        for (const KfTrack& track : world.tracks) {
            // Coasting predictions can leave the image; those produce no box.
            const Eigen::Vector2d pos = track.state.position();
            if (pos.x() < 0.0 || pos.x() >= sc.width_px() || pos.y() < 0.0 ||
                pos.y() >= sc.height_px())
                continue;
            boxes.push_back(reg.make_box(track.id, t, pos));
        }
    }
    return boxes;
}

std::vector<OutputBox> run_integrated_family(const Scenario& scenario, const RunConfig& cfg,
                                             const BBoxRegressor& reg) {
    const ScenarioConfig& sc = scenario.config();
    HistFilterConfig hist = cfg.hist;
    hist.grid_width = sc.grid_width;
    hist.grid_height = sc.grid_height;
    hist.cell_size = sc.cell_size;

    std::map<int, std::vector<const Identity*>> births;
    for (const Identity& identity : scenario.identities())
        births[identity.entry].push_back(&identity);

    const bool dump = cfg.dump_frames && !cfg.out_dir.empty();
    if (dump) std::filesystem::create_directories(cfg.out_dir + "/frames");

    std::vector<TrackState> tracks;
    int next_id = 1;
    std::vector<OutputBox> boxes;
    for (int t = 0; t < sc.frames; ++t) {
        const FrameObservation obs = scenario.render_frame(t);
        const auto it = births.find(t);
        if (it != births.end()) {
            for (const Identity* identity : it->second) {
                const Eigen::Vector2d center = identity->center_at(t);
                tracks.push_back(init_track(next_id++, center, identity->true_embedding, hist));
            }
        }
        for (TrackState& track : tracks) {
            if (!track.active()) continue;
            track = predict(track, hist);
            track = update(track, obs.embedding_map, hist);
            track = measure_velocity(track, hist);
            if (!track.active()) continue;
            boxes.push_back(emit(track, reg, hist.emit_mode, t));
            if (dump) {
                char name[64];
                std::snprintf(name, sizeof(name), "/frames/belief_f%04d_id%03d.pgm", t, track.id);
                write_pgm(track.position_belief, cfg.out_dir + name);
            }
        }
    }
    return boxes;
}

}  // namespace

std::vector<OutputBox> run_tracker(const Scenario& scenario, const RunConfig& cfg) {
    const BBoxRegressor reg = fit_regressor(scenario, cfg.bbox_scale);
    switch (cfg.tracker) {
        case TrackerVariant::NnKf:
        case TrackerVariant::NnKfGt:
        case TrackerVariant::NnKfReid:
        case TrackerVariant::NnKfOnlyReid:
            return run_nnkf_family(scenario, cfg, reg);
        case TrackerVariant::Integrated:
        case TrackerVariant::IntegratedEntropy:
            return run_integrated_family(scenario, cfg, reg);
    }
    throw ConfigError("unknown tracker variant");
}

RunResult run_and_evaluate(const Scenario& scenario, const RunConfig& cfg) {
    RunResult result;
    result.boxes = run_tracker(scenario, cfg);
    const BoxSequence gt = gt_sequence(scenario);
    const BoxSequence hyp = hyp_sequence(result.boxes);
    result.report = evaluate_sequences(gt, hyp, cfg.eval);
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_boxes_csv(hyp, cfg.out_dir + "/hyp.csv");
        write_boxes_csv(gt, cfg.out_dir + "/gt.csv");
        write_metrics_json(result.report, cfg.out_dir + "/metrics.json");
    }
    return result;
}

std::vector<SweepPoint> run_sweep(const RunConfig& base, const std::string& key,
                                  const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep: no values given");
    std::vector<SweepPoint> points;
    for (double v : values) {
        RunConfig cfg = base;
        cfg.out_dir.clear();
        cfg.dump_frames = false;
        apply_key_value(cfg, key, fmt_double(v));
        const Scenario scenario = obtain_scenario(cfg);
        SweepPoint point;
        point.value = v;
        point.report = run_and_evaluate(scenario, cfg).report;
        points.push_back(point);
    }
    if (!base.out_dir.empty()) {
        std::filesystem::create_directories(base.out_dir);
        std::ofstream out(base.out_dir + "/sweep.csv", std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + base.out_dir + "/sweep.csv");
        out << "value,MOTA,MOTP\n";
        for (const SweepPoint& p : points) {
            out << fmt_double(p.value) << ',' << fmt_double(p.report.mota) << ','
                << fmt_double(p.report.motp) << '\n';
        }
        if (!out) throw IoError("failed writing sweep CSV");
    }
    return points;
}

}  // namespace gridtrack
