// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gridtrack {

double EmbeddingVector::norm() const {
    double s = 0.0;
    for (float v : values) s += static_cast<double>(v) * v;
    return std::sqrt(s);
}

double EmbeddingVector::distance(const EmbeddingVector& other) const {
    if (dim() != other.dim())
        throw DimMismatchError();
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) {
        const double d = static_cast<double>(values[i]) - other.values[i];
        s += d * d;
    }
    return std::sqrt(s);
}

EmbeddingVector EmbeddingVector::normalized() const {
    const double n = norm();
    if (n <= 0.0)
        throw ConfigError("cannot normalize a zero embedding");
    EmbeddingVector out = *this;
    for (float& v : out.values) v = static_cast<float>(v / n);
    return out;
}

EmbeddingMap::EmbeddingMap(int width, int height, double cell_size, int dim)
    : width_(width), height_(height), cell_size_(cell_size), dim_(dim) {
    if (width <= 0 || height <= 0 || dim <= 0)
        throw ConfigError("embedding map dimensions must be positive");
    values_.assign(static_cast<size_t>(width) * height * dim, 0.0f);
}

void EmbeddingMap::set_cell(int row, int col, const EmbeddingVector& e) {
    if (e.dim() != dim_)
        throw DimMismatchError();
    std::copy(e.values.begin(), e.values.end(), cell(row, col));
}

EmbeddingVector EmbeddingMap::cell_embedding(int row, int col) const {
    const float* p = cell(row, col);
    return EmbeddingVector(std::vector<float>(p, p + dim_));
}

Cell EmbeddingMap::cell_at(const Eigen::Vector2d& position_px) const {
    int col = static_cast<int>(std::floor(position_px.x() / cell_size_));
    int row = static_cast<int>(std::floor(position_px.y() / cell_size_));
    col = std::clamp(col, 0, width_ - 1);
    row = std::clamp(row, 0, height_ - 1);
    return Cell{row, col};
}

DistanceGrid distance_map(const EmbeddingMap& map, const EmbeddingVector& reference) {
    if (map.dim() != reference.dim())
        throw DimMismatchError();
    DistanceGrid out(map.width(), map.height(), map.cell_size());
    const int d = map.dim();
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < map.width(); ++c) {
            const float* e = map.cell(r, c);
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                const double diff = static_cast<double>(e[k]) - reference.values[k];
                s += diff * diff;
            }
            out.at(r, c) = std::sqrt(s);
        }
    }
    return out;
}

ProbabilityGrid softmin(const DistanceGrid& distances, double temperature) {
    if (temperature <= 0.0)
        throw ConfigError("softmin temperature must be positive");
    const double dmin = *std::min_element(distances.values().begin(), distances.values().end());
    ProbabilityGrid out(distances.width(), distances.height(), distances.cell_size());
    double total = 0.0;
    for (size_t i = 0; i < out.values().size(); ++i) {
        const double w = std::exp(-(distances.values()[i] - dmin) / temperature);
        out.values()[i] = w;
        total += w;
    }
    for (double& v : out.values()) v /= total;
    out.set_normalized(true);
    return out;
}

bool gate_missing(const DistanceGrid& distances, double min_distance_threshold) {
    const double dmin = *std::min_element(distances.values().begin(), distances.values().end());
    return !(dmin > min_distance_threshold);
}

bool gate_entropy(const ProbabilityGrid& likelihood, double fraction) {
    return entropy(likelihood) <= fraction * max_entropy(likelihood);
}

}  // namespace gridtrack
