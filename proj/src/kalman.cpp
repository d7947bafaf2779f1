// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/kalman.hpp"

namespace gridtrack {

Eigen::Matrix4d kf_transition() {
    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 2) = 1.0;
    f(1, 3) = 1.0;
    return f;
}

Eigen::Matrix4d kf_default_process_noise() {
    Eigen::Vector4d d(1.0, 1.0, 0.25, 0.25);
    return d.asDiagonal();
}

Eigen::Matrix2d kf_default_measurement_noise() {
    return 4.0 * Eigen::Matrix2d::Identity();
}

KFState kf_predict(const KFState& s, const Eigen::Matrix4d& process_noise) {
    const Eigen::Matrix4d f = kf_transition();
    KFState out;
    out.mean = f * s.mean;
    out.covariance = f * s.covariance * f.transpose() + process_noise;
    return out;
}

KFState kf_update(const KFState& s, const Eigen::Vector2d& z,
                  const Eigen::Matrix2d& measurement_noise) {
    Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;

    const Eigen::Matrix2d innov_cov = h * s.covariance * h.transpose() + measurement_noise;
    const Eigen::Matrix<double, 4, 2> gain =
        s.covariance * h.transpose() * innov_cov.inverse();
    const Eigen::Vector2d innovation = z - h * s.mean;

    KFState out;
    out.mean = s.mean + gain * innovation;
    const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - gain * h;
    out.covariance = ikh * s.covariance * ikh.transpose() +
                     gain * measurement_noise * gain.transpose();
    return out;
}

KFState kf_init(const Eigen::Vector2d& center, double pos_var, double vel_var) {
    KFState s;
    s.mean.head<2>() = center;
    s.covariance = Eigen::Matrix4d::Zero();
    s.covariance(0, 0) = pos_var;
    s.covariance(1, 1) = pos_var;
    s.covariance(2, 2) = vel_var;
    s.covariance(3, 3) = vel_var;
    return s;
}

}  // namespace gridtrack
