// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include <doctest.h>

#include <cmath>

#include "gridtrack/histfilter.hpp"

using namespace gridtrack;

namespace {

HistFilterConfig unit_config(int w = 64, int h = 48) {
    HistFilterConfig cfg;
    cfg.grid_width = w;
    cfg.grid_height = h;
    cfg.cell_size = 1.0;
    return cfg;
}

EmbeddingVector unit_axis(int dim, int axis) {
    std::vector<float> v(static_cast<size_t>(dim), 0.0f);
    v[static_cast<size_t>(axis)] = 1.0f;
    return EmbeddingVector(std::move(v));
}

/// Map where every cell carries `background` except `hot`, which carries `fg`.
EmbeddingMap one_hot_map(int w, int h, const Cell& hot, const EmbeddingVector& fg,
                         const EmbeddingVector& background) {
    EmbeddingMap m(w, h, 1.0, fg.dim());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) m.set_cell(r, c, background);
    m.set_cell(hot.row, hot.col, fg);
    return m;
}

EmbeddingMap constant_map(int w, int h, const EmbeddingVector& e) {
    EmbeddingMap m(w, h, 1.0, e.dim());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) m.set_cell(r, c, e);
    return m;
}

Eigen::Matrix2d grid_covariance(const ProbabilityGrid& g) {
    const Eigen::Vector2d mu = expectation(g);
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            const Eigen::Vector2d d = g.cell_center(r, c) - mu;
            cov += g.at(r, c) * (d * d.transpose());
        }
    }
    return cov;
}

}  // namespace

TEST_CASE("init_track builds a normalized Gaussian belief at the start center") {
    HistFilterConfig cfg = unit_config();

    SUBCASE("sigma -> 0 collapses to a delta at the start cell") {
        cfg.sigma_init_cells = 0.0;
        const TrackState t = init_track(1, Eigen::Vector2d(32.0, 24.0), unit_axis(4, 0), cfg);
        const auto [cell, p] = map_peak(t.position_belief);
        CHECK(cell == Cell{24, 32});
        CHECK(p == doctest::Approx(1.0));
    }
    SUBCASE("sigma = 1 cell peaks at the start cell") {
        cfg.sigma_init_cells = 1.0;
        const TrackState t = init_track(1, Eigen::Vector2d(10.5, 20.5), unit_axis(4, 0), cfg);
        CHECK(map_peak(t.position_belief).first == Cell{20, 10});
        CHECK(t.position_belief.is_normalized());
        CHECK(t.active());
        CHECK(t.frames_since_accepted_measurement == 0);
    }
    SUBCASE("expectation of the fresh belief reproduces the start center") {
        const TrackState t = init_track(1, Eigen::Vector2d(13.7, 9.2), unit_axis(4, 0), cfg);
        const OutputBox b = emit(t, BBoxRegressor(0.0, 100.0), EmitMode::Expectation, 0);
        CHECK((b.center - Eigen::Vector2d(13.7, 9.2)).cwiseAbs().maxCoeff() < 0.5);
    }
    SUBCASE("out-of-grid center is rejected") {
        CHECK_THROWS_AS(init_track(1, Eigen::Vector2d(-1.0, 5.0), unit_axis(4, 0), cfg),
                        OutOfBoundsError);
        CHECK_THROWS_AS(init_track(1, Eigen::Vector2d(64.0, 5.0), unit_axis(4, 0), cfg),
                        OutOfBoundsError);
    }
}

TEST_CASE("predict with zero velocity and vanishing noise keeps the belief") {
    HistFilterConfig cfg = unit_config();
    cfg.vel_prior_cov = 1e-12 * Eigen::Matrix2d::Identity();
    cfg.q_pos = 1e-12 * Eigen::Matrix2d::Identity();
    const TrackState t = init_track(1, Eigen::Vector2d(30.0, 20.0), unit_axis(4, 0), cfg);
    const TrackState p = predict(t, cfg);
    for (int i = 0; i < t.position_belief.size(); ++i)
        CHECK(std::abs(p.position_belief.values()[i] - t.position_belief.values()[i]) < 1e-9);
}

TEST_CASE("predict shifts a delta belief by the velocity mean in cells") {
    HistFilterConfig cfg;
    cfg.grid_width = 32;
    cfg.grid_height = 32;
    cfg.cell_size = 2.0;
    cfg.sigma_init_cells = 0.0;
    cfg.vel_prior_cov = 1e-12 * Eigen::Matrix2d::Identity();
    cfg.q_pos = 1e-12 * Eigen::Matrix2d::Identity();
    TrackState t = init_track(1, Eigen::Vector2d(21.0, 21.0), unit_axis(4, 0), cfg);
    REQUIRE(map_peak(t.position_belief).first == Cell{10, 10});
    // 2 cells/frame right, 3 cells/frame down, expressed in px/frame
    t.velocity_belief.mean = Eigen::Vector2d(2.0 * cfg.cell_size, 3.0 * cfg.cell_size);
    const TrackState p = predict(t, cfg);
    CHECK(map_peak(p.position_belief).first == Cell{13, 12});
    CHECK(map_peak(p.position_belief).second == doctest::Approx(1.0));
}

TEST_CASE("predict agrees with the closed-form Kalman predict on Gaussian beliefs") {
    HistFilterConfig cfg = unit_config(64, 48);
    cfg.sigma_init_cells = 3.0;
    cfg.vel_prior_cov = 0.25 * Eigen::Matrix2d::Identity();
    cfg.q_pos = 0.5 * Eigen::Matrix2d::Identity();
    TrackState t = init_track(1, Eigen::Vector2d(32.0, 24.0), unit_axis(4, 0), cfg);
    t.velocity_belief.mean = Eigen::Vector2d(1.5, -0.8);

    const TrackState p = predict(t, cfg);

    // Kalman predict on the matched continuous system
    const Eigen::Vector2d mean_ref = Eigen::Vector2d(32.0, 24.0) + t.velocity_belief.mean;
    const Eigen::Matrix2d cov_ref = 9.0 * Eigen::Matrix2d::Identity() +
                                    t.velocity_belief.covariance + cfg.q_pos;

    CHECK((expectation(p.position_belief) - mean_ref).cwiseAbs().maxCoeff() < 0.5);
    const Eigen::Matrix2d cov = grid_covariance(p.position_belief);
    CHECK(cov.trace() == doctest::Approx(cov_ref.trace()).epsilon(0.10));

    // velocity covariance inflates by q_vel
    CHECK((p.velocity_belief.covariance -
           (t.velocity_belief.covariance + cfg.q_vel)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("predict kills a track whose mass leaves the grid") {
    HistFilterConfig cfg = unit_config(5, 5);
    cfg.sigma_init_cells = 0.0;
    cfg.vel_prior_cov = 1e-12 * Eigen::Matrix2d::Identity();
    cfg.q_pos = 1e-12 * Eigen::Matrix2d::Identity();
    TrackState t = init_track(1, Eigen::Vector2d(2.5, 2.5), unit_axis(4, 0), cfg);
    t.velocity_belief.mean = Eigen::Vector2d(50.0, 0.0);
    const TrackState p = predict(t, cfg);
    CHECK(p.status == TrackStatus::Dead);
}

TEST_CASE("update accepts a matching map and concentrates the belief") {
    HistFilterConfig cfg = unit_config(16, 12);
    const EmbeddingVector ref = unit_axis(4, 0);
    const EmbeddingVector bg = unit_axis(4, 1);
    TrackState t = init_track(1, Eigen::Vector2d(6.0, 6.0), ref, cfg);
    const EmbeddingMap m = one_hot_map(16, 12, Cell{5, 7}, ref, bg);
    const TrackState u = update(t, m, cfg);
    CHECK(map_peak(u.position_belief).first == Cell{5, 7});
    CHECK(u.frames_since_accepted_measurement == 0);
    CHECK(u.position_belief.is_normalized());
}

TEST_CASE("update treats an all-far map as a missing measurement") {
    HistFilterConfig cfg = unit_config(16, 12);
    cfg.n_app = 0.8;  // background distance is sqrt(2) > 0.8
    const TrackState t = init_track(1, Eigen::Vector2d(6.0, 6.0), unit_axis(4, 0), cfg);
    const EmbeddingMap m = constant_map(16, 12, unit_axis(4, 1));
    const TrackState u = update(t, m, cfg);
    CHECK(u.frames_since_accepted_measurement == 1);
    CHECK(u.active());
    // posterior equals the prediction bit-for-bit
    CHECK(u.position_belief.values() == t.position_belief.values());
}

TEST_CASE("entropy gate rejects a uniform likelihood, preserving the prior") {
    HistFilterConfig cfg = unit_config(16, 12);
    const EmbeddingVector ref = unit_axis(4, 0);
    const TrackState t = init_track(1, Eigen::Vector2d(6.0, 6.0), ref, cfg);
    const EmbeddingMap m = constant_map(16, 12, ref);  // distance 0 everywhere → uniform softmin

    SUBCASE("with the gate on: rejected, counter incremented, belief untouched") {
        cfg.entropy_fraction = 0.9;
        const TrackState u = update(t, m, cfg);
        CHECK(u.frames_since_accepted_measurement == 1);
        CHECK(u.position_belief.values() == t.position_belief.values());
    }
    SUBCASE("with the gate off: a uniform likelihood cancels out of the product") {
        const TrackState u = update(t, m, cfg);
        CHECK(u.frames_since_accepted_measurement == 0);
        for (int i = 0; i < t.position_belief.size(); ++i)
            CHECK(std::abs(u.position_belief.values()[i] - t.position_belief.values()[i]) <
                  1e-12);
    }
}

TEST_CASE("a track dies after d_max_missed consecutive missing measurements") {
    HistFilterConfig cfg = unit_config(8, 8);
    cfg.d_max_missed = 2;
    TrackState t = init_track(1, Eigen::Vector2d(4.0, 4.0), unit_axis(4, 0), cfg);
    const EmbeddingMap far = constant_map(8, 8, unit_axis(4, 1));
    t = update(t, far, cfg);
    CHECK(t.active());
    t = update(t, far, cfg);
    CHECK(t.active());
    t = update(t, far, cfg);  // third miss exceeds d_max_missed = 2
    CHECK(t.status == TrackStatus::Dead);
}

TEST_CASE("death is permanent") {
    HistFilterConfig cfg = unit_config(8, 8);
    cfg.d_max_missed = 0;
    TrackState t = init_track(1, Eigen::Vector2d(4.0, 4.0), unit_axis(4, 0), cfg);
    t = update(t, constant_map(8, 8, unit_axis(4, 1)), cfg);
    REQUIRE(t.status == TrackStatus::Dead);
    const std::vector<double> frozen = t.position_belief.values();
    t = predict(t, cfg);
    CHECK(t.status == TrackStatus::Dead);
    t = update(t, constant_map(8, 8, unit_axis(4, 0)), cfg);
    CHECK(t.status == TrackStatus::Dead);
    t = measure_velocity(t, cfg);
    CHECK(t.status == TrackStatus::Dead);
    CHECK(t.position_belief.values() == frozen);
}

TEST_CASE("measure_velocity fuses the peak-difference measurement") {
    HistFilterConfig cfg = unit_config(32, 32);
    cfg.sigma_init_cells = 0.0;
    TrackState t = init_track(1, Eigen::Vector2d(10.5, 10.5), unit_axis(4, 0), cfg);
    REQUIRE(t.prev_peak == Cell{10, 10});
    // move the belief to cell (row 13, col 12): peak displacement (2, 3) px at cell 1
    ProbabilityGrid moved(32, 32, 1.0);
    moved.at(13, 12) = 1.0;
    t.position_belief = normalize(moved);

    SUBCASE("R -> 0 snaps the velocity mean to the measurement") {
        cfg.r_vel = 1e-12 * Eigen::Matrix2d::Identity();
        const TrackState v = measure_velocity(t, cfg);
        CHECK((v.velocity_belief.mean - Eigen::Vector2d(2.0, 3.0)).norm() < 1e-6);
        CHECK(v.prev_peak == Cell{13, 12});
    }
    SUBCASE("R -> inf leaves the velocity belief unchanged") {
        cfg.r_vel = 1e12 * Eigen::Matrix2d::Identity();
        const TrackState v = measure_velocity(t, cfg);
        CHECK((v.velocity_belief.mean - t.velocity_belief.mean).norm() < 1e-6);
        CHECK(v.prev_peak == Cell{13, 12});
    }
    SUBCASE("finite R lands between prior and measurement") {
        cfg.r_vel = cfg.vel_prior_cov;  // equal weight → midpoint
        const TrackState v = measure_velocity(t, cfg);
        CHECK((v.velocity_belief.mean - Eigen::Vector2d(1.0, 1.5)).norm() < 1e-9);
    }
}

TEST_CASE("emit converts beliefs to boxes") {
    BBoxRegressor reg(0.0, 100.0);
    HistFilterConfig cfg = unit_config(10, 10);
    TrackState t = init_track(3, Eigen::Vector2d(5.0, 5.0), unit_axis(4, 0), cfg);

    SUBCASE("delta belief emits its cell center in both modes") {
        ProbabilityGrid d(10, 10, 1.0);
        d.at(5, 7) = 1.0;
        t.position_belief = normalize(d);
        const OutputBox pk = emit(t, reg, EmitMode::Peak, 9);
        CHECK(pk.center == Eigen::Vector2d(7.5, 5.5));
        CHECK(pk.track_id == 3);
        CHECK(pk.frame == 9);
        CHECK(pk.height == doctest::Approx(100.0));
        CHECK(pk.width == doctest::Approx(40.0));
        const OutputBox ex = emit(t, reg, EmitMode::Expectation, 9);
        CHECK((ex.center - Eigen::Vector2d(7.5, 5.5)).norm() < 1e-12);
    }
    SUBCASE("symmetric bimodal belief: expectation at the midpoint, peak at the heavier mode") {
        ProbabilityGrid b(10, 10, 1.0);
        b.at(2, 2) = 0.5;
        b.at(2, 6) = 0.5;
        t.position_belief = normalize(b);
        CHECK(emit(t, reg, EmitMode::Expectation, 0).center.x() == doctest::Approx(4.5));

        b.at(2, 2) = 0.3;
        b.at(2, 6) = 0.7;
        t.position_belief = normalize(b);
        CHECK(emit(t, reg, EmitMode::Peak, 0).center == Eigen::Vector2d(6.5, 2.5));
    }
}

TEST_CASE("predict-update cycles preserve normalization and are deterministic") {
    HistFilterConfig cfg = unit_config(24, 18);
    const EmbeddingVector ref = unit_axis(8, 0);
    const EmbeddingVector bg = unit_axis(8, 1);

    auto run = [&](int frames) {
        TrackState t = init_track(1, Eigen::Vector2d(4.0, 4.0), ref, cfg);
        for (int f = 0; f < frames; ++f) {
            t = predict(t, cfg);
            const Cell gt{4 + f / 4, 4 + f / 2};
            t = update(t, one_hot_map(24, 18, gt, ref, bg), cfg);
            t = measure_velocity(t, cfg);
            REQUIRE(t.active());
            CHECK(std::abs(t.position_belief.sum() - 1.0) < 1e-9);
        }
        return t;
    };

    const TrackState a = run(20);
    const TrackState b = run(20);
    CHECK(a.position_belief.values() == b.position_belief.values());
    CHECK(a.velocity_belief.mean == b.velocity_belief.mean);
    CHECK(a.velocity_belief.covariance == b.velocity_belief.covariance);
}
