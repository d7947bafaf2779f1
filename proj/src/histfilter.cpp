// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/histfilter.hpp"

#include <cmath>
#include <limits>

namespace gridtrack {

namespace {

/// Isotropic Gaussian belief grid built in log-space, so sigma → 0 collapses
/// to a delta at the nearest cell instead of vanishing entirely.
ProbabilityGrid gaussian_belief_grid(int width, int height, double cell_size,
                                     const Eigen::Vector2d& center_px, double sigma_px) {
    ProbabilityGrid g(width, height, cell_size);
    if (sigma_px <= 0.0) {
        const Cell c = g.cell_of(center_px);
        g.at(c.row, c.col) = 1.0;
        return normalize(g);
    }
    const double inv_two_var = 1.0 / (2.0 * sigma_px * sigma_px);
    std::vector<double> logq(g.values().size());
    double max_logq = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double d2 = (g.cell_center(r, c) - center_px).squaredNorm();
            const double q = -d2 * inv_two_var;
            logq[static_cast<size_t>(r) * width + c] = q;
            max_logq = std::max(max_logq, q);
        }
    }
    for (size_t i = 0; i < logq.size(); ++i)
        g.values()[i] = std::exp(logq[i] - max_logq);
    return normalize(g);
}

int kernel_radius(const Eigen::Vector2d& mean_cells, const Eigen::Matrix2d& cov_cells) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov_cells);
    const double max_eig = std::max(es.eigenvalues().maxCoeff(), 0.0);
    const double r = 3.0 * std::sqrt(max_eig) + mean_cells.cwiseAbs().maxCoeff();
    return static_cast<int>(std::ceil(r));
}

}  // namespace

TrackState init_track(int id, const Eigen::Vector2d& start_center,
                      const EmbeddingVector& reference_embedding,
                      const HistFilterConfig& cfg) {
    TrackState t;
    t.id = id;
    t.position_belief = ProbabilityGrid(cfg.grid_width, cfg.grid_height, cfg.cell_size);
    if (!t.position_belief.contains_point(start_center))
        throw OutOfBoundsError("track start center outside grid");
    t.position_belief =
        gaussian_belief_grid(cfg.grid_width, cfg.grid_height, cfg.cell_size, start_center,
                             cfg.sigma_init_cells * cfg.cell_size);
    t.velocity_belief.mean = Eigen::Vector2d::Zero();
    t.velocity_belief.covariance = cfg.vel_prior_cov;
    t.reference_embedding = reference_embedding;
    t.status = TrackStatus::Active;
    t.frames_since_accepted_measurement = 0;
    t.prev_peak = map_peak(t.position_belief).first;
    return t;
}

TrackState predict(const TrackState& t, const HistFilterConfig& cfg) {
    if (!t.active()) return t;
    TrackState out = t;
    const double cs = t.position_belief.cell_size();
    const Eigen::Vector2d mean_cells = t.velocity_belief.mean / cs;
    const Eigen::Matrix2d cov_cells =
        (t.velocity_belief.covariance + cfg.q_pos) / (cs * cs);
    const GaussianKernel k = gaussian_kernel(mean_cells, cov_cells,
                                             kernel_radius(mean_cells, cov_cells));
    try {
        out.position_belief = convolve(t.position_belief, k);
    } catch (const ZeroMassError&) {
        out.status = TrackStatus::Dead;
        return out;
    }
    out.velocity_belief.covariance = t.velocity_belief.covariance + cfg.q_vel;
    return out;
}

TrackState update(const TrackState& t, const EmbeddingMap& frame_map,
                  const HistFilterConfig& cfg) {
    if (!t.active()) return t;
    TrackState out = t;
    const DistanceGrid dist = distance_map(frame_map, t.reference_embedding);
    bool accepted = gate_missing(dist, cfg.n_app);
    ProbabilityGrid likelihood;
    if (accepted) {
        likelihood = softmin(dist, cfg.softmin_temperature);
        if (cfg.entropy_fraction && !gate_entropy(likelihood, *cfg.entropy_fraction))
            accepted = false;
    }
    if (accepted) {
        try {
            out.position_belief = multiply_update(t.position_belief, likelihood);
        } catch (const ZeroMassError&) {
            out.status = TrackStatus::Dead;
            return out;
        }
        out.frames_since_accepted_measurement = 0;
    } else {
        // missing measurement: the prediction is used as posterior, untouched
        out.frames_since_accepted_measurement = t.frames_since_accepted_measurement + 1;
        if (out.frames_since_accepted_measurement > cfg.d_max_missed)
            out.status = TrackStatus::Dead;
    }
    return out;
}

TrackState measure_velocity(const TrackState& t, const HistFilterConfig& cfg) {
    if (!t.active()) return t;
    TrackState out = t;
    const Cell peak = map_peak(t.position_belief).first;
    if (t.prev_peak) {
        const double cs = t.position_belief.cell_size();
        const Eigen::Vector2d v_z(
            (peak.col - t.prev_peak->col) * cs,
            (peak.row - t.prev_peak->row) * cs);
        const Eigen::Matrix2d& p = t.velocity_belief.covariance;
        const Eigen::Matrix2d innov_cov = p + cfg.r_vel;
        const Eigen::Matrix2d gain = p * innov_cov.inverse();
        out.velocity_belief.mean =
            t.velocity_belief.mean + gain * (v_z - t.velocity_belief.mean);
        const Eigen::Matrix2d ik = Eigen::Matrix2d::Identity() - gain;
        out.velocity_belief.covariance =
            ik * p * ik.transpose() + gain * cfg.r_vel * gain.transpose();
    }
    out.prev_peak = peak;
    return out;
}

OutputBox emit(const TrackState& t, const BBoxRegressor& reg, EmitMode mode, int frame) {
    Eigen::Vector2d center;
    if (mode == EmitMode::Peak) {
        center = t.position_belief.cell_center(map_peak(t.position_belief).first);
    } else {
        center = expectation(t.position_belief);
    }
    return reg.make_box(t.id, frame, center);
}

}  // namespace gridtrack
