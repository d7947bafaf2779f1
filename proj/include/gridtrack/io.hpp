// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <string>
#include <vector>

#include "gridtrack/assoc.hpp"
#include "gridtrack/bboxreg.hpp"
#include "gridtrack/metrics.hpp"
#include "gridtrack/simworld.hpp"

namespace gridtrack {

/// Box CSV with header `frame,id,x,y,w,h`; x and y are the box center.
void write_boxes_csv(const BoxSequence& boxes, const std::string& path);
BoxSequence read_boxes_csv(const std::string& path);

/// Ground-truth boxes of a whole scenario as an evaluation sequence.
BoxSequence gt_sequence(const Scenario& scenario);

/// Tracker output as an evaluation sequence.
BoxSequence hyp_sequence(const std::vector<OutputBox>& boxes);

/// Detections as JSON lines `{"frame":t,"x":..,"y":..,"score":..,"embedding":[..]}`.
void write_detections_jsonl(const Scenario& scenario, const std::string& path);
std::vector<std::vector<Detection>> read_detections_jsonl(const std::string& path);

/// Metrics report as a JSON document with fixed key order.
std::string metrics_to_json(const MetricsReport& report);
void write_metrics_json(const MetricsReport& report, const std::string& path);

}  // namespace gridtrack
