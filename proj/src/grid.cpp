// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace gridtrack {

ProbabilityGrid::ProbabilityGrid(int width, int height, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size) {
    if (width <= 0 || height <= 0)
        throw ConfigError("grid dimensions must be positive");
    if (cell_size <= 0.0)
        throw ConfigError("cell_size must be positive");
    values_.assign(static_cast<size_t>(width) * height, 0.0);
}

ProbabilityGrid::ProbabilityGrid(int width, int height, double cell_size,
                                 std::vector<double> values)
    : ProbabilityGrid(width, height, cell_size) {
    if (values.size() != static_cast<size_t>(width) * height)
        throw ConfigError("value count does not match grid dimensions");
    values_ = std::move(values);
}

Cell ProbabilityGrid::cell_of(const Eigen::Vector2d& position_px) const {
    if (!contains_point(position_px))
        throw OutOfBoundsError();
    int col = static_cast<int>(position_px.x() / cell_size_);
    int row = static_cast<int>(position_px.y() / cell_size_);
    // guard against the right-open interval edge under floating point
    col = std::min(col, width_ - 1);
    row = std::min(row, height_ - 1);
    return {row, col};
}

double ProbabilityGrid::sum() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

ProbabilityGrid normalize(const ProbabilityGrid& g) {
    const double total = g.sum();
    if (total <= 0.0)
        throw ZeroMassError();
    ProbabilityGrid out = g;
    for (double& v : out.values()) v /= total;
    out.set_normalized(true);
    return out;
}

GaussianKernel gaussian_kernel(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
                               int radius) {
    if (radius < 0)
        throw ConfigError("kernel radius must be non-negative");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + cov.cwiseAbs().maxCoeff()))
        throw NonPsdError("covariance is not symmetric");
    Eigen::LLT<Eigen::Matrix2d> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NonPsdError();
    const Eigen::Matrix2d inv = cov.inverse();

    GaussianKernel k;
    k.radius_ = radius;
    k.mean_ = mean;
    k.covariance_ = cov;
    const int extent = 2 * radius + 1;
    std::vector<double> logq(static_cast<size_t>(extent) * extent);
    double max_logq = -std::numeric_limits<double>::infinity();
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            Eigen::Vector2d d(dx - mean.x(), dy - mean.y());
            const double q = -0.5 * d.dot(inv * d);
            logq[static_cast<size_t>(dy + radius) * extent + (dx + radius)] = q;
            max_logq = std::max(max_logq, q);
        }
    }
    k.support_.resize(logq.size());
    double total = 0.0;
    for (size_t i = 0; i < logq.size(); ++i) {
        k.support_[i] = std::exp(logq[i] - max_logq);
        total += k.support_[i];
    }
    for (double& w : k.support_) w /= total;
    return k;
}

ProbabilityGrid convolve(const ProbabilityGrid& posterior, const GaussianKernel& k) {
    ProbabilityGrid out(posterior.width(), posterior.height(), posterior.cell_size());
    const int radius = k.radius();
    for (int r = 0; r < posterior.height(); ++r) {
        for (int c = 0; c < posterior.width(); ++c) {
            const double p = posterior.at(r, c);
            if (p == 0.0) continue;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int rr = r + dy;
                if (rr < 0 || rr >= posterior.height()) continue;
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int cc = c + dx;
                    if (cc < 0 || cc >= posterior.width()) continue;
                    out.at(rr, cc) += p * k.weight(dx, dy);
                }
            }
        }
    }
    return normalize(out);
}

ProbabilityGrid multiply_update(const ProbabilityGrid& prior, const ProbabilityGrid& likelihood) {
    if (prior.width() != likelihood.width() || prior.height() != likelihood.height())
        throw DimMismatchError("grid shapes differ");
    ProbabilityGrid out(prior.width(), prior.height(), prior.cell_size());
    for (size_t i = 0; i < out.values().size(); ++i)
        out.values()[i] = prior.values()[i] * likelihood.values()[i];
    try {
        return normalize(out);
    } catch (const ZeroMassError&) {
        throw ZeroMassError("prior and likelihood have disjoint support");
    }
}

std::pair<Cell, double> map_peak(const ProbabilityGrid& g) {
    int best = 0;
    const auto& v = g.values();
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = static_cast<int>(i);
    Cell c{best / g.width(), best % g.width()};
    return {c, v[best]};
}

Eigen::Vector2d expectation(const ProbabilityGrid& g) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c)
            e += g.at(r, c) * g.cell_center(r, c);
    return e;
}

double entropy(const ProbabilityGrid& g) {
    double h = 0.0;
    for (double p : g.values())
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

double max_entropy(const ProbabilityGrid& g) {
    return std::log(static_cast<double>(g.size()));
}

void write_pgm(const ProbabilityGrid& g, const std::string& path, bool binary) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f)
        throw IoError("cannot open " + path + " for writing");
    double maxv = 0.0;
    for (double v : g.values()) maxv = std::max(maxv, v);
    const double scale = maxv > 0.0 ? 65535.0 / maxv : 0.0;
    f << (binary ? "P5" : "P2") << "\n" << g.width() << " " << g.height() << "\n65535\n";
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            const auto v = static_cast<uint16_t>(std::lround(g.at(r, c) * scale));
            if (binary) {
                // 16-bit PGM samples are big-endian
                const unsigned char hi = static_cast<unsigned char>(v >> 8);
                const unsigned char lo = static_cast<unsigned char>(v & 0xff);
                f.put(static_cast<char>(hi));
                f.put(static_cast<char>(lo));
            } else {
                f << v << (c + 1 == g.width() ? "" : " ");
            }
        }
        if (!binary) f << "\n";
    }
    if (!f)
        throw IoError("failed writing " + path);
}

std::string grid_to_json(const ProbabilityGrid& g) {
    nlohmann::json j;
    j["width"] = g.width();
    j["height"] = g.height();
    j["cell_size"] = g.cell_size();
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < g.height(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < g.width(); ++c) row.push_back(g.at(r, c));
        rows.push_back(std::move(row));
    }
    j["values"] = std::move(rows);
    return j.dump();
}

ProbabilityGrid grid_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ProbabilityGrid g(j.at("width").get<int>(), j.at("height").get<int>(),
                      j.at("cell_size").get<double>());
    const auto& rows = j.at("values");
    if (static_cast<int>(rows.size()) != g.height())
        throw ConfigError("JSON grid row count mismatch");
    for (int r = 0; r < g.height(); ++r) {
        const auto& row = rows[r];
        if (static_cast<int>(row.size()) != g.width())
            throw ConfigError("JSON grid column count mismatch");
        for (int c = 0; c < g.width(); ++c) g.at(r, c) = row[c].get<double>();
    }
    return g;
}

}  // namespace gridtrack
