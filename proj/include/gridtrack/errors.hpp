// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#pragma once

#include <stdexcept>
#include <string>

namespace gridtrack {

/// Base class for all gridtrack errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A belief or likelihood grid carries no probability mass at all.
/// For a track this signals a fully vanished belief; the caller must
/// terminate or reinitialize the track.
class ZeroMassError : public Error {
public:
    explicit ZeroMassError(const std::string& what = "grid has zero total mass")
        : Error(what) {}
};

/// A covariance matrix is not symmetric positive-definite.
class NonPsdError : public Error {
public:
    explicit NonPsdError(const std::string& what = "covariance is not positive-definite")
        : Error(what) {}
};

/// Embedding dimensions of two operands disagree.
class DimMismatchError : public Error {
public:
    explicit DimMismatchError(const std::string& what = "embedding dimension mismatch")
        : Error(what) {}
};

/// A point lies outside the grid.
class OutOfBoundsError : public Error {
public:
    explicit OutOfBoundsError(const std::string& what = "point outside grid bounds")
        : Error(what) {}
};

/// Regression input cannot determine a line (all abscissae equal).
class DegenerateFitError : public Error {
public:
    explicit DegenerateFitError(const std::string& what = "degenerate regression input")
        : Error(what) {}
};

/// A regressed box height came out non-positive.
class NonPositiveHeightError : public Error {
public:
    explicit NonPositiveHeightError(const std::string& what = "regressed height is not positive")
        : Error(what) {}
};

/// Evaluation was asked for but no ground truth was accumulated.
class EmptyGtError : public Error {
public:
    explicit EmptyGtError(const std::string& what = "no ground truth boxes")
        : Error(what) {}
};

/// A scenario or run configuration is invalid.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Frame index outside the scenario's range.
class FrameOutOfRangeError : public Error {
public:
    explicit FrameOutOfRangeError(const std::string& what = "frame index out of range")
        : Error(what) {}
};

/// I/O failure while reading or writing an artifact file.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace gridtrack
