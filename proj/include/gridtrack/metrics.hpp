// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

namespace gridtrack {

/// Axis-aligned box given by its center, used on both the ground-truth and
/// hypothesis side of the evaluation.
struct EvalBox {
    int id = 0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double width = 0.0;
    double height = 0.0;
};

/// Per-frame box lists keyed by frame number. Frames may be sparse; a frame
/// missing from one side counts as empty there.
using BoxSequence = std::map<int, std::vector<EvalBox>>;

/// Intersection-over-union of two center-format boxes.
double box_iou(const EvalBox& a, const EvalBox& b);

enum class MatchMode { Iou, CenterDistance };

struct EvalOptions {
    double iou_threshold = 0.5;
    /// Keep last frame's pairs while they still satisfy the gate before
    /// rematching the remainder; disables to rematch everything per frame.
    bool continuity = true;
    MatchMode mode = MatchMode::Iou;
    double center_gate = 50.0;  ///< px, used by MatchMode::CenterDistance
};

/// Last known hypothesis id per ground-truth id; persists across frames in
/// which the pair is not matched, so a switch after a gap still counts.
using Correspondence = std::map<int, int>;

struct FrameCounts {
    int gt = 0;
    int matches = 0;
    int fp = 0;
    int fn = 0;
    int ids = 0;
    /// Sum of the match quality (IoU, or center distance in center mode).
    double quality_sum = 0.0;
};

struct FrameMatchResult {
    Correspondence correspondence;
    FrameCounts counts;
    std::vector<std::pair<int, int>> pairs;  ///< matched (gt id, hyp id)
};

/// One frame of CLEAR matching: continue still-valid previous pairs, match
/// the remainder minimum-cost, count FP/FN/switches.
FrameMatchResult match_frame(const std::vector<EvalBox>& gt, const std::vector<EvalBox>& hyp,
                             const Correspondence& prev, const EvalOptions& opts);

/// Accumulates match_frame results over a sequence.
class EvalLedger {
public:
    explicit EvalLedger(EvalOptions opts = {}) : opts_(opts) {}

    void add_frame(const std::vector<EvalBox>& gt, const std::vector<EvalBox>& hyp);

    const EvalOptions& options() const { return opts_; }
    const FrameCounts& totals() const { return totals_; }

    /// MOTA = 1 − (FP+FN+IDS)/GT (unbounded below, never clamped) and
    /// MOTP = mean match quality. Throws EmptyGtError when no GT was seen.
    std::pair<double, double> mota_motp() const;

    /// Mostly-tracked (coverage > 0.8) and mostly-lost (< 0.2) GT track counts.
    std::pair<int, int> mt_ml() const;

    int gt_track_count() const { return static_cast<int>(gt_presence_.size()); }

private:
    EvalOptions opts_;
    Correspondence corr_;
    FrameCounts totals_;
    std::map<int, int> gt_presence_;  ///< gt id -> frames present
    std::map<int, int> gt_matched_;   ///< gt id -> frames matched
};

struct IdScores {
    double idf1 = 0.0;
    double idp = 0.0;
    double idr = 0.0;
    long long idtp = 0;
    long long idfp = 0;
    long long idfn = 0;
};

/// Identity measures from the single global min-cost ground-truth/hypothesis
/// track assignment, with per-frame validity decided by the same gate as the
/// CLEAR matching.
IdScores id_measures(const BoxSequence& gt, const BoxSequence& hyp, const EvalOptions& opts = {});

struct MetricsReport {
    double mota = 0.0;
    double motp = 0.0;
    long long fp = 0;
    long long fn = 0;
    long long ids = 0;
    long long matches = 0;
    long long gt_total = 0;
    int mt = 0;
    int ml = 0;
    int gt_tracks = 0;
    double idf1 = 0.0;
    double idp = 0.0;
    double idr = 0.0;
};

/// Full evaluation of a hypothesis sequence against ground truth.
/// Throws EmptyGtError when the ground truth has no boxes at all.
MetricsReport evaluate_sequences(const BoxSequence& gt, const BoxSequence& hyp,
                                 const EvalOptions& opts = {});

}  // namespace gridtrack
