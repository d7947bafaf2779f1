// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "gridtrack/kalman.hpp"
#include "gridtrack/measurement.hpp"

namespace gridtrack {

/// Center-point detection with a confidence score and an optional identity
/// embedding.
struct Detection {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double score = 1.0;
    std::optional<EmbeddingVector> embedding;
    int frame = 0;
};

enum class AssocMode { Pos, App, Combined };

/// Distance normalizers bringing position and appearance into a common scale,
/// and the gate above which a pairing is discarded.
struct AssociationConfig {
    AssocMode mode = AssocMode::Pos;
    double n_pos = 40.0;
    /// Median same-identity embedding distance measured on the simulator at
    /// its calibration noise point (noise sigma 0.1, 32-dim embeddings).
    double n_app = 0.5;
    double gate = 2.0;
};

/// Score thresholds and lifecycle counters of the detection-driven baselines.
struct TrackManagementConfig {
    double sigma_init = 0.3;  ///< min score to start (or extend) an init chain
    int d_init = 3;           ///< consecutive detections required to promote
    double sigma_cont = 0.0;  ///< min score for a detection to update tracks
    int d_miss = 5;           ///< consecutive misses before deletion
    bool gt_init = false;     ///< start tracks only from supplied first boxes
};

/// Normalized combined distance. Position and appearance are each divided by
/// their normalizer; combined mode multiplies the two.
double combined_distance(double d_pos, double d_app, const AssociationConfig& cfg);

/// Minimum-total-cost maximum matching of a finite n×m cost matrix.
/// Among cost ties the lexicographically smallest assignment (pairs sorted by
/// row) is returned. Infeasible pairs must be encoded by the caller as a
/// large finite sentinel.
std::vector<std::pair<int, int>> hungarian(const std::vector<std::vector<double>>& cost);

/// Total cost of an assignment over a cost matrix.
double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<std::pair<int, int>>& assignment);

/// One Kalman-filtered track of the NN-KF baseline family.
struct KfTrack {
    int id = 0;
    KFState state;
    int misses = 0;
    std::optional<EmbeddingVector> reference_embedding;
};

struct AssociationResult {
    std::vector<std::pair<int, int>> matches;  ///< (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

/// Hungarian association of detections to predicted track positions using the
/// combined distance; matches costlier than the gate land in the unmatched
/// sets. Pairs lacking an embedding in app/combined mode are infeasible.
AssociationResult associate(const std::vector<KfTrack>& tracks,
                            const std::vector<Detection>& detections,
                            const AssociationConfig& cfg);

/// Candidate track not yet promoted: a chain of consecutive detections.
struct TentativeChain {
    Eigen::Vector2d last_center = Eigen::Vector2d::Zero();
    int length = 0;
    std::optional<EmbeddingVector> first_embedding;
};

/// Externally supplied track birth (ground-truth first box).
struct GtBirth {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    std::optional<EmbeddingVector> embedding;
};

/// Mutable per-sequence tracker state. Track ids are never reused.
struct TrackerWorld {
    std::vector<KfTrack> tracks;
    std::vector<TentativeChain> tentative;
    int next_id = 1;

    Eigen::Matrix4d process_noise = kf_default_process_noise();
    Eigen::Matrix2d measurement_noise = kf_default_measurement_noise();
    double init_pos_var = 4.0;
    double init_vel_var = 25.0;
};

/// One frame of the NN-KF pipeline: predict, associate, update, manage
/// lifecycle, and start new tracks (from gt_births when gt_init, otherwise by
/// promoting detection chains).
void step(TrackerWorld& world, const std::vector<Detection>& detections,
          const TrackManagementConfig& tm, const AssociationConfig& ac,
          const std::vector<GtBirth>& gt_births = {});

}  // namespace gridtrack
