// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include <doctest.h>

#include <cmath>

#include "gridtrack/errors.hpp"
#include "gridtrack/metrics.hpp"

using namespace gridtrack;

namespace {

EvalBox box(int id, double x, double y, double w = 10.0, double h = 10.0) {
    EvalBox b;
    b.id = id;
    b.center = Eigen::Vector2d(x, y);
    b.width = w;
    b.height = h;
    return b;
}

/// Sequence of one GT id standing still for `frames` frames.
BoxSequence still_track(int id, int frames, double x = 50.0, double y = 50.0) {
    BoxSequence seq;
    for (int f = 0; f < frames; ++f) seq[f] = {box(id, x, y)};
    return seq;
}

}  // namespace

TEST_CASE("box_iou closed forms") {
    const EvalBox a = box(1, 0.0, 0.0, 10.0, 10.0);
    CHECK(box_iou(a, a) == doctest::Approx(1.0));
    // shifted by half a width: intersection 5×10=50, union 150
    CHECK(box_iou(a, box(2, 5.0, 0.0, 10.0, 10.0)) == doctest::Approx(1.0 / 3.0));
    // disjoint
    CHECK(box_iou(a, box(2, 100.0, 0.0, 10.0, 10.0)) == doctest::Approx(0.0));
    // touching edges only
    CHECK(box_iou(a, box(2, 10.0, 0.0, 10.0, 10.0)) == doctest::Approx(0.0));
    // contained box: intersection 25, union 100
    CHECK(box_iou(a, box(2, 0.0, 0.0, 5.0, 5.0)) == doctest::Approx(0.25));
}

TEST_CASE("match_frame on identical sets is perfect") {
    const std::vector<EvalBox> gt = {box(1, 10.0, 10.0), box(2, 40.0, 40.0)};
    const std::vector<EvalBox> hyp = {box(7, 10.0, 10.0), box(8, 40.0, 40.0)};
    const FrameMatchResult r = match_frame(gt, hyp, {}, {});
    CHECK(r.counts.gt == 2);
    CHECK(r.counts.matches == 2);
    CHECK(r.counts.fp == 0);
    CHECK(r.counts.fn == 0);
    CHECK(r.counts.ids == 0);
    CHECK(r.counts.quality_sum == doctest::Approx(2.0));
    CHECK(r.correspondence.at(1) == 7);
    CHECK(r.correspondence.at(2) == 8);
}

TEST_CASE("match_frame counts misses and false positives") {
    const std::vector<EvalBox> gt = {box(1, 10.0, 10.0), box(2, 40.0, 40.0)};
    const FrameMatchResult none = match_frame(gt, {}, {}, {});
    CHECK(none.counts.fn == 2);
    CHECK(none.counts.fp == 0);
    CHECK(none.counts.matches == 0);

    const FrameMatchResult extra =
        match_frame(gt, {box(7, 10.0, 10.0), box(8, 40.0, 40.0), box(9, 200.0, 200.0)}, {}, {});
    CHECK(extra.counts.fp == 1);
    CHECK(extra.counts.fn == 0);
    CHECK(extra.counts.matches == 2);
}

TEST_CASE("an id switch is counted once against the last known correspondence") {
    EvalOptions opts;
    Correspondence corr;
    int total_ids = 0;
    // 5 frames covered by hyp id 7, then 5 frames by hyp id 8
    for (int f = 0; f < 10; ++f) {
        const int hyp_id = f < 5 ? 7 : 8;
        const FrameMatchResult r =
            match_frame({box(1, 50.0, 50.0)}, {box(hyp_id, 50.0, 50.0)}, corr, opts);
        corr = r.correspondence;
        total_ids += r.counts.ids;
        CHECK(r.counts.matches == 1);
    }
    CHECK(total_ids == 1);
    CHECK(corr.at(1) == 8);
}

TEST_CASE("a switch across an unmatched gap still counts") {
    EvalOptions opts;
    Correspondence corr;
    const FrameMatchResult r1 =
        match_frame({box(1, 50.0, 50.0)}, {box(7, 50.0, 50.0)}, corr, opts);
    corr = r1.correspondence;
    const FrameMatchResult gap = match_frame({box(1, 50.0, 50.0)}, {}, corr, opts);
    corr = gap.correspondence;
    CHECK(gap.counts.fn == 1);
    const FrameMatchResult r2 =
        match_frame({box(1, 50.0, 50.0)}, {box(8, 50.0, 50.0)}, corr, opts);
    CHECK(r2.counts.ids == 1);
}

TEST_CASE("continuity keeps a drifting pair that a rematch would replace") {
    EvalOptions opts;
    opts.iou_threshold = 0.3;
    Correspondence corr;
    // frame 0: GT 1 matched to hyp 7 exactly; hyp 8 is far
    const FrameMatchResult r0 = match_frame(
        {box(1, 50.0, 50.0)}, {box(7, 50.0, 50.0), box(8, 300.0, 300.0)}, corr, opts);
    corr = r0.correspondence;
    REQUIRE(corr.at(1) == 7);
    // frame 1: hyp 8 now sits exactly on GT while hyp 7 has drifted but still
    // overlaps above the threshold → continuity keeps (1,7)
    const FrameMatchResult r1 = match_frame(
        {box(1, 50.0, 50.0)}, {box(7, 54.0, 50.0), box(8, 50.0, 50.0)}, corr, opts);
    CHECK(r1.correspondence.at(1) == 7);
    CHECK(r1.counts.ids == 0);
    CHECK(r1.counts.fp == 1);  // hyp 8 left over

    // same frame without continuity: minimum-cost rematch prefers hyp 8
    EvalOptions fresh = opts;
    fresh.continuity = false;
    const FrameMatchResult r1b = match_frame(
        {box(1, 50.0, 50.0)}, {box(7, 54.0, 50.0), box(8, 50.0, 50.0)}, corr, fresh);
    CHECK(r1b.correspondence.at(1) == 8);
    CHECK(r1b.counts.ids == 1);
}

TEST_CASE("center-distance mode gates by pixel distance") {
    EvalOptions opts;
    opts.mode = MatchMode::CenterDistance;
    opts.center_gate = 5.0;
    const FrameMatchResult near =
        match_frame({box(1, 50.0, 50.0)}, {box(7, 53.0, 50.0)}, {}, opts);
    CHECK(near.counts.matches == 1);
    CHECK(near.counts.quality_sum == doctest::Approx(3.0));
    const FrameMatchResult far =
        match_frame({box(1, 50.0, 50.0)}, {box(7, 56.0, 50.0)}, {}, opts);
    CHECK(far.counts.matches == 0);
    CHECK(far.counts.fn == 1);
    CHECK(far.counts.fp == 1);
}

TEST_CASE("mota_motp closed forms") {
    SUBCASE("perfect tracking scores 1.0 / 1.0") {
        EvalLedger ledger;
        for (int f = 0; f < 10; ++f)
            ledger.add_frame({box(1, 50.0, 50.0)}, {box(7, 50.0, 50.0)});
        const auto [mota, motp] = ledger.mota_motp();
        CHECK(mota == doctest::Approx(1.0));
        CHECK(motp == doctest::Approx(1.0));
    }
    SUBCASE("one switch over ten matched frames gives MOTA 0.9") {
        EvalLedger ledger;
        for (int f = 0; f < 10; ++f)
            ledger.add_frame({box(1, 50.0, 50.0)}, {box(f < 5 ? 7 : 8, 50.0, 50.0)});
        const auto [mota, motp] = ledger.mota_motp();
        CHECK(mota == doctest::Approx(0.9));
        CHECK(motp == doctest::Approx(1.0));
    }
    SUBCASE("no hypotheses gives MOTA 0 and FN = GT") {
        EvalLedger ledger;
        for (int f = 0; f < 10; ++f) ledger.add_frame({box(1, 50.0, 50.0)}, {});
        CHECK(ledger.mota_motp().first == doctest::Approx(0.0));
        CHECK(ledger.totals().fn == 10);
    }
    SUBCASE("floods of false positives push MOTA negative, never clamped") {
        EvalLedger ledger;
        for (int f = 0; f < 10; ++f)
            ledger.add_frame({box(1, 50.0, 50.0)},
                             {box(7, 50.0, 50.0), box(8, 200.0, 200.0), box(9, 300.0, 300.0)});
        const auto [mota, motp] = ledger.mota_motp();
        CHECK(mota == doctest::Approx(-1.0));  // 1 − 20/10
        CHECK(motp == doctest::Approx(1.0));
    }
    SUBCASE("empty ground truth is an error") {
        EvalLedger ledger;
        ledger.add_frame({}, {box(7, 50.0, 50.0)});
        CHECK_THROWS_AS(ledger.mota_motp(), EmptyGtError);
    }
}

TEST_CASE("per-frame conservation: matches + fn = gt") {
    EvalLedger ledger;
    ledger.add_frame({box(1, 10.0, 10.0), box(2, 40.0, 40.0)}, {box(7, 10.0, 10.0)});
    ledger.add_frame({box(1, 10.0, 10.0)}, {});
    ledger.add_frame({}, {box(9, 99.0, 99.0)});
    CHECK(ledger.totals().matches + ledger.totals().fn == ledger.totals().gt);
}

TEST_CASE("mt_ml uses strict 0.8 / 0.2 boundaries") {
    SUBCASE("fully covered is MT, 10% is ML") {
        EvalLedger ledger;
        for (int f = 0; f < 10; ++f) {
            std::vector<EvalBox> hyp = {box(7, 50.0, 50.0)};
            if (f < 1) hyp.push_back(box(8, 90.0, 90.0));
            ledger.add_frame({box(1, 50.0, 50.0), box(2, 90.0, 90.0)}, hyp);
        }
        const auto [mt, ml] = ledger.mt_ml();
        CHECK(mt == 1);
        CHECK(ml == 1);
        CHECK(ledger.gt_track_count() == 2);
    }
    SUBCASE("exactly 80%, 50% and 20% coverage are neither MT nor ML") {
        EvalLedger ledger;
        for (int f = 0; f < 10; ++f) {
            std::vector<EvalBox> hyp;
            if (f < 8) hyp.push_back(box(7, 10.0, 10.0));
            if (f < 5) hyp.push_back(box(8, 50.0, 50.0));
            if (f < 2) hyp.push_back(box(9, 90.0, 90.0));
            ledger.add_frame({box(1, 10.0, 10.0), box(2, 50.0, 50.0), box(3, 90.0, 90.0)}, hyp);
        }
        const auto [mt, ml] = ledger.mt_ml();
        CHECK(mt == 0);
        CHECK(ml == 0);
    }
}

TEST_CASE("id_measures closed forms") {
    SUBCASE("perfect tracking gives all ones") {
        const BoxSequence gt = still_track(1, 10);
        const BoxSequence hyp = still_track(42, 10);
        const IdScores s = id_measures(gt, hyp);
        CHECK(s.idf1 == doctest::Approx(1.0));
        CHECK(s.idp == doctest::Approx(1.0));
        CHECK(s.idr == doctest::Approx(1.0));
        CHECK(s.idtp == 10);
    }
    SUBCASE("half-and-half coverage gives IDF1 = 0.5") {
        const BoxSequence gt = still_track(1, 10);
        BoxSequence hyp;
        for (int f = 0; f < 10; ++f) hyp[f] = {box(f < 5 ? 7 : 8, 50.0, 50.0)};
        const IdScores s = id_measures(gt, hyp);
        CHECK(s.idtp == 5);
        CHECK(s.idfp == 5);
        CHECK(s.idfn == 5);
        CHECK(s.idf1 == doctest::Approx(0.5));
    }
    SUBCASE("no hypotheses gives IDR 0") {
        const IdScores s = id_measures(still_track(1, 10), {});
        CHECK(s.idr == doctest::Approx(0.0));
        CHECK(s.idf1 == doctest::Approx(0.0));
        CHECK(s.idfn == 10);
    }
    SUBCASE("empty ground truth is an error") {
        CHECK_THROWS_AS(id_measures({}, still_track(7, 5)), EmptyGtError);
    }
}

TEST_CASE("IDF1 is the harmonic mean of IDP and IDR") {
    BoxSequence gt;
    BoxSequence hyp;
    // two GT tracks, unequal coverage, plus a pure-FP hypothesis track
    for (int f = 0; f < 20; ++f) {
        gt[f] = {box(1, 20.0, 20.0), box(2, 80.0, 80.0)};
        std::vector<EvalBox> h;
        if (f < 15) h.push_back(box(7, 20.0, 20.0));
        if (f % 2 == 0) h.push_back(box(8, 80.0, 80.0));
        if (f < 6) h.push_back(box(9, 300.0, 300.0));
        hyp[f] = h;
    }
    const IdScores s = id_measures(gt, hyp);
    const double expected = 2.0 * s.idp * s.idr / (s.idp + s.idr);
    CHECK(std::abs(s.idf1 - expected) < 1e-12);
}

TEST_CASE("evaluate_sequences composes the full report and is 1.0 against itself") {
    BoxSequence gt;
    for (int f = 0; f < 30; ++f)
        gt[f] = {box(1, 20.0 + f, 20.0), box(2, 200.0 - f, 90.0)};

    const MetricsReport self = evaluate_sequences(gt, gt);
    CHECK(self.mota == doctest::Approx(1.0));
    CHECK(self.motp == doctest::Approx(1.0));
    CHECK(self.idf1 == doctest::Approx(1.0));
    CHECK(self.fp == 0);
    CHECK(self.fn == 0);
    CHECK(self.ids == 0);
    CHECK(self.mt == 2);
    CHECK(self.ml == 0);
    CHECK(self.gt_tracks == 2);
    CHECK(self.gt_total == 60);

    CHECK_THROWS_AS(evaluate_sequences({}, gt), EmptyGtError);
}

TEST_CASE("hand-traced mixed sequence") {
    // GT: id 1 on frames 0..9 at x=10; id 2 on frames 0..4 at x=90.
    // Hyp: id 7 covers gt1 frames 0..9 but switches to id 8 on frames 5..9;
    //      gt2 never covered; a stray box on frames 8..9.
    BoxSequence gt, hyp;
    for (int f = 0; f < 10; ++f) {
        std::vector<EvalBox> g = {box(1, 10.0, 10.0)};
        if (f < 5) g.push_back(box(2, 90.0, 90.0));
        gt[f] = g;
        std::vector<EvalBox> h = {box(f < 5 ? 7 : 8, 10.0, 10.0)};
        if (f >= 8) h.push_back(box(9, 300.0, 300.0));
        hyp[f] = h;
    }
    const MetricsReport r = evaluate_sequences(gt, hyp);
    // totals: gt = 15, matches = 10, fn = 5, fp = 2, ids = 1
    CHECK(r.gt_total == 15);
    CHECK(r.matches == 10);
    CHECK(r.fn == 5);
    CHECK(r.fp == 2);
    CHECK(r.ids == 1);
    CHECK(r.mota == doctest::Approx(1.0 - (2.0 + 5.0 + 1.0) / 15.0));
    CHECK(r.motp == doctest::Approx(1.0));
    CHECK(r.mt == 1);   // gt1 covered 10/10
    CHECK(r.ml == 1);   // gt2 covered 0/5
    // IDTP: best assignment pairs gt1 with id 7 (5 frames) or id 8 (5) → 5
    CHECK(r.idf1 == doctest::Approx(2.0 * 5.0 / (2.0 * 5.0 + 7.0 + 10.0)));
}
