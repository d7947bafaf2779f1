// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "gridtrack/errors.hpp"

namespace gridtrack {

/// Integer cell coordinate inside a grid. `row` runs along y, `col` along x.
struct Cell {
    int row = 0;
    int col = 0;

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.row == b.row && a.col == b.col;
    }
    friend bool operator!=(const Cell& a, const Cell& b) { return !(a == b); }
};

/// Dense W×H grid of non-negative values over a regular pixel lattice.
///
/// Stores both probability maps (beliefs, likelihoods) and raw value maps
/// (embedding distances). Values are row-major doubles. A grid is `normalized`
/// once it has passed through normalize()/convolve()/multiply_update() and its
/// cells sum to 1 within 1e-9.
class ProbabilityGrid {
public:
    ProbabilityGrid() = default;

    /// Zero-filled grid. Throws ConfigError on non-positive dimensions.
    ProbabilityGrid(int width, int height, double cell_size);

    ProbabilityGrid(int width, int height, double cell_size, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }
    int size() const { return width_ * height_; }
    bool is_normalized() const { return normalized_; }

    double& at(int row, int col) { return values_[static_cast<size_t>(row) * width_ + col]; }
    double at(int row, int col) const { return values_[static_cast<size_t>(row) * width_ + col]; }

    double& operator()(int row, int col) { return at(row, col); }
    double operator()(int row, int col) const { return at(row, col); }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    /// Center of a cell in pixel coordinates, (x, y).
    Eigen::Vector2d cell_center(int row, int col) const {
        return {(col + 0.5) * cell_size_, (row + 0.5) * cell_size_};
    }
    Eigen::Vector2d cell_center(const Cell& c) const { return cell_center(c.row, c.col); }

    /// Cell containing a pixel position. Throws OutOfBoundsError outside the grid.
    Cell cell_of(const Eigen::Vector2d& position_px) const;

    bool contains_point(const Eigen::Vector2d& position_px) const {
        return position_px.x() >= 0.0 && position_px.x() < width_ * cell_size_ &&
               position_px.y() >= 0.0 && position_px.y() < height_ * cell_size_;
    }

    double sum() const;

    void set_normalized(bool v) { normalized_ = v; }

private:
    int width_ = 0;
    int height_ = 0;
    double cell_size_ = 1.0;
    bool normalized_ = false;
    std::vector<double> values_;
};

/// Truncated, discretized 2-D Gaussian used as the dynamics kernel of the
/// histogram filter's predict step. Offsets are in cells per frame; support is
/// a (2·radius+1)² window of weights summing to 1.
class GaussianKernel {
public:
    GaussianKernel() = default;

    int radius() const { return radius_; }
    int extent() const { return 2 * radius_ + 1; }
    const Eigen::Vector2d& mean() const { return mean_; }
    const Eigen::Matrix2d& covariance() const { return covariance_; }

    /// Weight at offset (dx, dy) cells, each in [-radius, radius].
    double weight(int dx, int dy) const {
        return support_[static_cast<size_t>(dy + radius_) * extent() + (dx + radius_)];
    }

    const std::vector<double>& support() const { return support_; }

    friend GaussianKernel gaussian_kernel(const Eigen::Vector2d& mean,
                                          const Eigen::Matrix2d& cov, int radius);

private:
    int radius_ = 0;
    Eigen::Vector2d mean_ = Eigen::Vector2d::Zero();
    Eigen::Matrix2d covariance_ = Eigen::Matrix2d::Identity();
    std::vector<double> support_{1.0};
};

/// Rescales a grid so its cells sum to 1. Ratios between cells are preserved.
/// Throws ZeroMassError when every cell is 0.
ProbabilityGrid normalize(const ProbabilityGrid& g);

/// Builds a discretized Gaussian kernel with the given mean shift and
/// covariance (both in cells / cells² per frame). Weights are evaluated at
/// integer cell offsets in log-space with a max shift, so near-degenerate
/// covariances collapse to exact delta kernels instead of under/overflowing.
/// Throws NonPsdError when `cov` is not symmetric positive-definite.
GaussianKernel gaussian_kernel(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
                               int radius);

/// Predict step: out[r,c] = Σ_{dr,dc} posterior[r−dr, c−dc] · k[dr,dc].
/// Mass shifted off the grid is dropped and the result renormalized.
/// Throws ZeroMassError when all probability mass exits the grid.
ProbabilityGrid convolve(const ProbabilityGrid& posterior, const GaussianKernel& k);

/// Update step: element-wise product of prior and likelihood, renormalized.
/// Throws ZeroMassError when the supports are disjoint, DimMismatchError
/// when shapes differ.
ProbabilityGrid multiply_update(const ProbabilityGrid& prior, const ProbabilityGrid& likelihood);

/// MAP cell and its probability. Ties break to the row-major first occurrence.
std::pair<Cell, double> map_peak(const ProbabilityGrid& g);

/// Expected position under the grid, in pixel coordinates (x, y).
Eigen::Vector2d expectation(const ProbabilityGrid& g);

/// Shannon entropy −Σ p·ln p in nats, with 0·ln 0 := 0.
double entropy(const ProbabilityGrid& g);

/// Maximum attainable entropy for this grid's size, ln(W·H).
double max_entropy(const ProbabilityGrid& g);

/// Writes the grid as a portable graymap, values scaled to 0–65535 by the
/// maximum cell. `binary` selects P5 (16-bit big-endian) over ASCII P2.
void write_pgm(const ProbabilityGrid& g, const std::string& path, bool binary = true);

/// JSON round-trip used by tests and qualitative dumps.
std::string grid_to_json(const ProbabilityGrid& g);
ProbabilityGrid grid_from_json(const std::string& text);

}  // namespace gridtrack
