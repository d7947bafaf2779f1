// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridtrack/assoc.hpp"
#include "gridtrack/measurement.hpp"

namespace gridtrack {

enum class BackgroundMode { RandomFar, Confuser };

/// Detection corruption applied to the ground-truth centers.
struct DetectionNoiseConfig {
    double miss_rate = 0.0;        ///< probability of dropping a true detection
    double fp_rate = 0.0;          ///< false alarms per cell per frame
    double score_noise = 0.0;      ///< stddev of the score perturbation
    double pos_noise_sigma = 2.0;  ///< stddev of the center perturbation, px
};

/// Full description of a synthetic sequence; identical configs (including
/// seed) reproduce identical scenarios bit for bit.
struct ScenarioConfig {
    int grid_width = 64;   ///< cells
    int grid_height = 48;  ///< cells
    double cell_size = 4.0;
    int embedding_dim = 32;
    int num_identities = 5;
    int frames = 300;
    double velocity_range = 1.5;        ///< max |v| per axis, px/frame
    double motion_noise_sigma = 0.0;    ///< positional jitter, px
    double embedding_noise_sigma = 0.0;
    BackgroundMode background_mode = BackgroundMode::RandomFar;
    double confuser_similarity = 0.9;  ///< cosine similarity to the target
    DetectionNoiseConfig detection;
    bool random_entry_exit = false;
    double height_slope = 0.2;  ///< box height as a linear function of y
    double height_intercept = 40.0;
    double aspect = 0.4;  ///< box width / height
    std::uint64_t seed = 1;

    double width_px() const { return grid_width * cell_size; }
    double height_px() const { return grid_height * cell_size; }
    void validate() const;  ///< throws ConfigError on out-of-range values
};

struct TrajectoryPoint {
    int frame = 0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
};

/// One simulated target: a fixed unit-norm embedding and a trajectory over
/// its presence interval [entry, exit].
struct Identity {
    int id = 0;
    EmbeddingVector true_embedding;
    int entry = 0;
    int exit = 0;
    std::vector<TrajectoryPoint> trajectory;

    bool present(int frame) const { return frame >= entry && frame <= exit; }
    Eigen::Vector2d center_at(int frame) const;  ///< throws FrameOutOfRangeError
};

struct GtBox {
    int id = 0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double width = 0.0;
    double height = 0.0;
};

/// Everything a tracker may consume for one frame.
struct FrameObservation {
    int frame = 0;
    EmbeddingMap embedding_map;
    std::vector<Detection> detections;
    std::vector<GtBox> gt_boxes;
};

/// A generated scenario: detections and ground truth are materialized, while
/// embedding maps are rendered on demand from per-frame deterministic streams.
class Scenario {
public:
    Scenario() = default;
    Scenario(ScenarioConfig config, std::vector<Identity> identities,
             std::vector<std::vector<Detection>> detections,
             std::optional<EmbeddingVector> confuser_vector, Cell confuser_cell,
             int confuser_target_id);

    const ScenarioConfig& config() const { return config_; }
    const std::vector<Identity>& identities() const { return identities_; }
    const std::vector<Detection>& detections(int frame) const;
    std::vector<GtBox> gt_boxes(int frame) const;
    const std::optional<EmbeddingVector>& confuser_vector() const { return confuser_vector_; }
    Cell confuser_cell() const { return confuser_cell_; }
    int confuser_target_id() const { return confuser_target_id_; }

    /// Background + identity writes + detections for one frame. Deterministic
    /// in (seed, frame) regardless of rendering order.
    FrameObservation render_frame(int frame) const;

    GtBox gt_box_for(const Identity& identity, int frame) const;

private:
    ScenarioConfig config_;
    std::vector<Identity> identities_;
    std::vector<std::vector<Detection>> detections_;
    std::optional<EmbeddingVector> confuser_vector_;
    Cell confuser_cell_{0, 0};
    int confuser_target_id_ = -1;
};

/// Samples identities, trajectories, and detections from the config's seed.
Scenario generate_scenario(const ScenarioConfig& config);

/// JSON round-trip of a full scenario (embedding maps stay procedural).
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

/// Raw little-endian float32 dump of all rendered maps, preceded by a
/// four-uint32 header (frames, height, width, dim); frame-major, row-major,
/// dimension innermost.
void write_embedding_maps(const Scenario& scenario, const std::string& path);
std::vector<EmbeddingMap> read_embedding_maps(const std::string& path);

}  // namespace gridtrack
