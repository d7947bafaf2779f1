// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <Eigen/Dense>

namespace gridtrack {

/// Constant-velocity Kalman state on a 2-D center point:
/// mean = (x, y, vx, vy) in px and px/frame, 4×4 SPD covariance.
struct KFState {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();

    Eigen::Vector2d position() const { return mean.head<2>(); }
    Eigen::Vector2d velocity() const { return mean.tail<2>(); }
};

/// Constant-velocity transition matrix (x += vx, y += vy per frame).
Eigen::Matrix4d kf_transition();

/// Default process noise. Hand-tuned for the synthetic world, not a value
/// from any reference system.
Eigen::Matrix4d kf_default_process_noise();

/// Default measurement noise (px²), same caveat as above.
Eigen::Matrix2d kf_default_measurement_noise();

/// Predict step: mean ← F·mean, covariance ← F·P·Fᵀ + Q.
KFState kf_predict(const KFState& s, const Eigen::Matrix4d& process_noise);

/// Measurement update with a 2-D center-point observation. H extracts the
/// position block; the posterior covariance uses the Joseph form.
KFState kf_update(const KFState& s, const Eigen::Vector2d& z,
                  const Eigen::Matrix2d& measurement_noise);

/// Fresh track state at a measured center with zero velocity and an inflated
/// velocity covariance.
KFState kf_init(const Eigen::Vector2d& center, double pos_var = 4.0, double vel_var = 25.0);

}  // namespace gridtrack
