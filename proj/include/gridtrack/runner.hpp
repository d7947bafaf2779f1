// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridtrack/assoc.hpp"
#include "gridtrack/bboxreg.hpp"
#include "gridtrack/histfilter.hpp"
#include "gridtrack/metrics.hpp"
#include "gridtrack/simworld.hpp"

namespace gridtrack {

/// The comparison systems: detection-driven Kalman baselines (with optional
/// ground-truth initialization and appearance terms) and the histogram-filter
/// tracker driven by embedding maps (with optional entropy gating).
enum class TrackerVariant { NnKf, NnKfGt, NnKfReid, NnKfOnlyReid, Integrated, IntegratedEntropy };

TrackerVariant parse_variant(const std::string& name);  ///< throws ConfigError
std::string variant_name(TrackerVariant v);
const std::vector<std::string>& variant_names();

/// One experiment: scenario source, tracker choice, and every module's knobs.
struct RunConfig {
    TrackerVariant tracker = TrackerVariant::Integrated;
    std::string scenario_path;  ///< load when set, otherwise generate inline
    ScenarioConfig scenario;
    HistFilterConfig hist;
    AssociationConfig assoc;
    TrackManagementConfig tm;
    double bbox_scale = 1.0;
    EvalOptions eval;
    std::string out_dir;
    bool dump_frames = false;
};

/// Resets the per-variant parameter block (tm/assoc/hist gating) to the
/// variant's published operating point. Explicit config keys are applied on
/// top of this afterwards.
void apply_variant_preset(RunConfig& cfg);

/// Plain-text `key = value` config files; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Applies dotted keys (scenario.*, hist.*, assoc.*, tm.*, bbox.*, eval.*,
/// tracker, out_dir, dump_frames) onto a RunConfig. Unknown keys throw.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Builds a RunConfig from key-values: the tracker key selects the preset,
/// remaining keys override individual parameters.
RunConfig make_run_config(const std::map<std::string, std::string>& kv);

/// Least-squares box regressor fitted on the scenario's ground-truth boxes.
BBoxRegressor fit_regressor(const Scenario& scenario, double scale);

/// Runs the configured tracker over a scenario and returns all emitted boxes.
std::vector<OutputBox> run_tracker(const Scenario& scenario, const RunConfig& cfg);

struct RunResult {
    std::vector<OutputBox> boxes;
    MetricsReport report;
};

/// Tracks and evaluates against the scenario's ground truth; writes hyp.csv,
/// gt.csv and metrics.json (plus PGM belief frames when dump_frames) into
/// out_dir when set.
RunResult run_and_evaluate(const Scenario& scenario, const RunConfig& cfg);

/// Scenario accessor honoring scenario_path.
Scenario obtain_scenario(const RunConfig& cfg);

struct SweepPoint {
    double value = 0.0;
    MetricsReport report;
};

/// Re-runs the experiment once per value of a numeric config key and returns
/// the metric curve (also written as CSV `value,MOTA,MOTP` when out_dir set).
std::vector<SweepPoint> run_sweep(const RunConfig& base, const std::string& key,
                                  const std::vector<double>& values);

}  // namespace gridtrack
