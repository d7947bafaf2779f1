// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gridtrack/grid.hpp"

namespace gridtrack {

/// d-dimensional identity vector. Simulator-produced identity embeddings are
/// unit-norm, so Euclidean distances live in [0, 2].
struct EmbeddingVector {
    std::vector<float> values;

    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<float> v) : values(std::move(v)) {}

    int dim() const { return static_cast<int>(values.size()); }

    double norm() const;

    /// Euclidean distance to another embedding. Throws DimMismatchError.
    double distance(const EmbeddingVector& other) const;

    /// Returns a copy scaled to unit L2 norm.
    EmbeddingVector normalized() const;
};

/// Per-cell identity vectors over the same lattice as a ProbabilityGrid.
/// Storage is row-major with the embedding dimension innermost.
class EmbeddingMap {
public:
    EmbeddingMap() = default;
    EmbeddingMap(int width, int height, double cell_size, int dim);

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }
    int dim() const { return dim_; }

    float* cell(int row, int col) {
        return values_.data() + (static_cast<size_t>(row) * width_ + col) * dim_;
    }
    const float* cell(int row, int col) const {
        return values_.data() + (static_cast<size_t>(row) * width_ + col) * dim_;
    }

    void set_cell(int row, int col, const EmbeddingVector& e);
    EmbeddingVector cell_embedding(int row, int col) const;

    /// Cell under a pixel position, clamped to the map bounds.
    Cell cell_at(const Eigen::Vector2d& position_px) const;

    const std::vector<float>& values() const { return values_; }
    std::vector<float>& values() { return values_; }

private:
    int width_ = 0;
    int height_ = 0;
    double cell_size_ = 1.0;
    int dim_ = 0;
    std::vector<float> values_;
};

/// Grid of non-negative embedding distances; same geometry as ProbabilityGrid.
using DistanceGrid = ProbabilityGrid;

/// Per-cell Euclidean distance between the map and a reference embedding.
/// Throws DimMismatchError when dimensions differ.
DistanceGrid distance_map(const EmbeddingMap& map, const EmbeddingVector& reference);

/// Converts a distance map into a normalized measurement likelihood:
/// out ∝ exp(−D/temperature), computed with a max shift so large distances
/// cannot underflow the whole grid. All-equal distances yield uniform.
ProbabilityGrid softmin(const DistanceGrid& distances, double temperature);

/// Missing-measurement gate: accepted iff min(D) ≤ threshold. A rejected map
/// is treated as a missing measurement and the filter skips its update.
bool gate_missing(const DistanceGrid& distances, double min_distance_threshold);

/// Entropy gate: accepted iff entropy(likelihood) ≤ fraction · ln(W·H).
/// Expressed as a fraction of maximum entropy so it is grid-size independent.
bool gate_entropy(const ProbabilityGrid& likelihood, double fraction);

}  // namespace gridtrack
