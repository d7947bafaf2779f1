// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gridtrack/errors.hpp"

namespace gridtrack {

/// Tracker output: a full box reconstructed from a center point.
/// Width is always aspect·height, enforced at emit time.
struct OutputBox {
    int track_id = 0;
    int frame = 0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double width = 0.0;
    double height = 0.0;
};

/// Camera-specific box regressor: average person height as a linear function
/// of the center's y coordinate, width as a fixed fraction of height.
class BBoxRegressor {
public:
    BBoxRegressor() = default;
    BBoxRegressor(double slope, double intercept, double aspect = 0.4, double scale = 1.0)
        : slope_(slope), intercept_(intercept), aspect_(aspect), scale_(scale) {}

    double slope() const { return slope_; }
    double intercept() const { return intercept_; }
    double aspect() const { return aspect_; }
    double scale() const { return scale_; }
    void set_scale(double s) { scale_ = s; }
    void set_aspect(double a) { aspect_ = a; }

    /// (width, height) at a center point. Throws NonPositiveHeightError when
    /// the regressed height is not positive.
    std::pair<double, double> regress(const Eigen::Vector2d& center) const;

    OutputBox make_box(int track_id, int frame, const Eigen::Vector2d& center) const;

private:
    double slope_ = 0.0;
    double intercept_ = 0.0;
    double aspect_ = 0.4;
    double scale_ = 1.0;
};

/// Ordinary least squares fit of height = slope·center_y + intercept.
/// Throws DegenerateFitError when fewer than two samples or all center_y equal.
BBoxRegressor fit_bbox_regressor(const std::vector<std::pair<double, double>>& samples,
                                 double aspect = 0.4, double scale = 1.0);

}  // namespace gridtrack
