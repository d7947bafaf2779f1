// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <Eigen/Dense>
#include <optional>

#include "gridtrack/bboxreg.hpp"
#include "gridtrack/grid.hpp"
#include "gridtrack/measurement.hpp"

namespace gridtrack {

/// Gaussian belief over a 2-D quantity (here: velocity in px/frame).
struct GaussianBelief2D {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
};

enum class TrackStatus { Active, Dead };

enum class EmitMode { Peak, Expectation };

/// Parameters of the histogram-filter tracker. Velocity units are px/frame;
/// the grid geometry converts them to cells when building the predict kernel.
struct HistFilterConfig {
    int grid_width = 64;
    int grid_height = 48;
    double cell_size = 4.0;

    /// Std of the initial isotropic position belief, in cells.
    double sigma_init_cells = 2.0;
    /// Initial velocity covariance, (px/frame)².
    Eigen::Matrix2d vel_prior_cov = 4.0 * Eigen::Matrix2d::Identity();
    /// Positional diffusion added to the predict kernel, px²/frame².
    Eigen::Matrix2d q_pos = 1.0 * Eigen::Matrix2d::Identity();
    /// Velocity process noise, (px/frame)² per frame.
    Eigen::Matrix2d q_vel = 0.25 * Eigen::Matrix2d::Identity();
    /// Velocity measurement noise. Peak differences are quantized to cell
    /// size, so this should not drop below the cell size.
    Eigen::Matrix2d r_vel = 4.0 * Eigen::Matrix2d::Identity();

    double softmin_temperature = 0.1;
    /// Missing-measurement threshold on min embedding distance.
    double n_app = 0.8;
    /// Entropy gate as a fraction of ln(W·H); disabled when absent.
    std::optional<double> entropy_fraction;
    /// Consecutive rejected/missing measurements before the track dies.
    /// Entropy-rejected frames count toward this limit.
    int d_max_missed = 90;

    EmitMode emit_mode = EmitMode::Peak;
};

/// Per-track belief state of the integrated tracker: a histogram position
/// belief, a Gaussian velocity belief and a fixed reference embedding taken
/// from the first observation.
struct TrackState {
    int id = 0;
    ProbabilityGrid position_belief;
    GaussianBelief2D velocity_belief;
    EmbeddingVector reference_embedding;
    TrackStatus status = TrackStatus::Active;
    int frames_since_accepted_measurement = 0;
    std::optional<Cell> prev_peak;

    bool active() const { return status == TrackStatus::Active; }
};

/// Starts a track with an isotropic Gaussian belief of sigma_init_cells at
/// `start_center` and a zero-mean velocity prior.
/// Throws OutOfBoundsError when the center lies outside the grid.
TrackState init_track(int id, const Eigen::Vector2d& start_center,
                      const EmbeddingVector& reference_embedding,
                      const HistFilterConfig& cfg);

/// Predict step: convolves the position belief with a Gaussian kernel built
/// from the velocity belief (plus q_pos) and inflates the velocity covariance
/// by q_vel. A belief whose mass entirely leaves the grid kills the track.
/// No-op on Dead tracks.
TrackState predict(const TrackState& t, const HistFilterConfig& cfg);

/// Update step: derives the track-specific distance map from the frame's
/// embedding map, gates it, and either multiplies the softmin likelihood into
/// the belief (accepted) or keeps the prediction as posterior (missing).
/// Missing frames increment the miss counter; exceeding d_max_missed kills
/// the track. No-op on Dead tracks.
TrackState update(const TrackState& t, const EmbeddingMap& frame_map,
                  const HistFilterConfig& cfg);

/// Velocity point-measurement from the difference of consecutive MAP peaks,
/// fused into the Gaussian velocity belief. Skipped when no previous peak is
/// known. No-op on Dead tracks.
TrackState measure_velocity(const TrackState& t, const HistFilterConfig& cfg);

/// Turns the current belief into an output box via the regressor. The center
/// is the MAP peak or the expectation depending on mode.
OutputBox emit(const TrackState& t, const BBoxRegressor& reg, EmitMode mode, int frame);

}  // namespace gridtrack
