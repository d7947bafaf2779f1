// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/bboxreg.hpp"

namespace gridtrack {

std::pair<double, double> BBoxRegressor::regress(const Eigen::Vector2d& center) const {
    const double height = scale_ * (slope_ * center.y() + intercept_);
    if (height <= 0.0)
        throw NonPositiveHeightError();
    return {aspect_ * height, height};
}

OutputBox BBoxRegressor::make_box(int track_id, int frame, const Eigen::Vector2d& center) const {
    const auto [w, h] = regress(center);
    return OutputBox{track_id, frame, center, w, h};
}

BBoxRegressor fit_bbox_regressor(const std::vector<std::pair<double, double>>& samples,
                                 double aspect, double scale) {
    if (samples.size() < 2)
        throw DegenerateFitError("need at least two samples");
    double sum_y = 0.0, sum_h = 0.0;
    for (const auto& [y, h] : samples) {
        sum_y += y;
        sum_h += h;
    }
    const double n = static_cast<double>(samples.size());
    const double mean_y = sum_y / n;
    const double mean_h = sum_h / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [y, h] : samples) {
        sxx += (y - mean_y) * (y - mean_y);
        sxy += (y - mean_y) * (h - mean_h);
    }
    if (sxx == 0.0)
        throw DegenerateFitError("all center_y values are equal");
    const double slope = sxy / sxx;
    const double intercept = mean_h - slope * mean_y;
    return BBoxRegressor(slope, intercept, aspect, scale);
}

}  // namespace gridtrack
