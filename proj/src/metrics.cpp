// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gridtrack/assoc.hpp"
#include "gridtrack/errors.hpp"

namespace gridtrack {

namespace {

/// Match quality and validity of a gt/hyp pair under the configured gate.
struct PairGate {
    bool valid = false;
    double quality = 0.0;
    double cost = 0.0;
};

PairGate gate_pair(const EvalBox& g, const EvalBox& h, const EvalOptions& opts) {
    PairGate p;
    if (opts.mode == MatchMode::Iou) {
        const double iou = box_iou(g, h);
        p.valid = iou >= opts.iou_threshold;
        p.quality = iou;
        p.cost = 1.0 - iou;
    } else {
        const double d = (g.center - h.center).norm();
        p.valid = d <= opts.center_gate;
        p.quality = d;
        p.cost = d;
    }
    return p;
}

}  // namespace

double box_iou(const EvalBox& a, const EvalBox& b) {
    const double ax1 = a.center.x() - a.width / 2.0, ax2 = a.center.x() + a.width / 2.0;
    const double ay1 = a.center.y() - a.height / 2.0, ay2 = a.center.y() + a.height / 2.0;
    const double bx1 = b.center.x() - b.width / 2.0, bx2 = b.center.x() + b.width / 2.0;
    const double by1 = b.center.y() - b.height / 2.0, by2 = b.center.y() + b.height / 2.0;
    const double iw = std::max(0.0, std::min(ax2, bx2) - std::max(ax1, bx1));
    const double ih = std::max(0.0, std::min(ay2, by2) - std::max(ay1, by1));
    const double inter = iw * ih;
    const double uni = std::max(0.0, ax2 - ax1) * std::max(0.0, ay2 - ay1) +
                       std::max(0.0, bx2 - bx1) * std::max(0.0, by2 - by1) - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

FrameMatchResult match_frame(const std::vector<EvalBox>& gt, const std::vector<EvalBox>& hyp,
                             const Correspondence& prev, const EvalOptions& opts) {
    FrameMatchResult result;
    result.correspondence = prev;
    result.counts.gt = static_cast<int>(gt.size());

    std::vector<char> gt_used(gt.size(), 0), hyp_used(hyp.size(), 0);
    std::vector<std::pair<int, int>> matched_index_pairs;

    if (opts.continuity) {
        for (std::size_t i = 0; i < gt.size(); ++i) {
            const auto it = prev.find(gt[i].id);
            if (it == prev.end()) continue;
            for (std::size_t j = 0; j < hyp.size(); ++j) {
                if (hyp_used[j] || hyp[j].id != it->second) continue;
                if (gate_pair(gt[i], hyp[j], opts).valid) {
                    gt_used[i] = 1;
                    hyp_used[j] = 1;
                    matched_index_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
                }
                break;
            }
        }
    }

    std::vector<int> free_gt, free_hyp;
    for (std::size_t i = 0; i < gt.size(); ++i)
        if (!gt_used[i]) free_gt.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < hyp.size(); ++j)
        if (!hyp_used[j]) free_hyp.push_back(static_cast<int>(j));

    if (!free_gt.empty() && !free_hyp.empty()) {
        const double sentinel =
            10.0 * (opts.mode == MatchMode::Iou ? 1.0 : std::max(opts.center_gate, 1.0));
        std::vector<std::vector<double>> cost(free_gt.size(),
                                              std::vector<double>(free_hyp.size(), sentinel));
        for (std::size_t a = 0; a < free_gt.size(); ++a) {
            for (std::size_t b = 0; b < free_hyp.size(); ++b) {
                const PairGate p = gate_pair(gt[free_gt[a]], hyp[free_hyp[b]], opts);
                if (p.valid) cost[a][b] = p.cost;
            }
        }
        for (const auto& [a, b] : hungarian(cost)) {
            if (cost[a][b] >= sentinel) continue;
            matched_index_pairs.emplace_back(free_gt[a], free_hyp[b]);
        }
    }

    std::sort(matched_index_pairs.begin(), matched_index_pairs.end());
    for (const auto& [i, j] : matched_index_pairs) {
        const int gid = gt[i].id;
        const int hid = hyp[j].id;
        ++result.counts.matches;
        result.counts.quality_sum += gate_pair(gt[i], hyp[j], opts).quality;
        const auto it = result.correspondence.find(gid);
        if (it != result.correspondence.end() && it->second != hid) ++result.counts.ids;
        result.correspondence[gid] = hid;
        result.pairs.emplace_back(gid, hid);
    }
    result.counts.fn = result.counts.gt - result.counts.matches;
    result.counts.fp = static_cast<int>(hyp.size()) - result.counts.matches;
    return result;
}

void EvalLedger::add_frame(const std::vector<EvalBox>& gt, const std::vector<EvalBox>& hyp) {
    FrameMatchResult r = match_frame(gt, hyp, corr_, opts_);
    corr_ = std::move(r.correspondence);
    totals_.gt += r.counts.gt;
    totals_.matches += r.counts.matches;
    totals_.fp += r.counts.fp;
    totals_.fn += r.counts.fn;
    totals_.ids += r.counts.ids;
    totals_.quality_sum += r.counts.quality_sum;
    for (const EvalBox& g : gt) ++gt_presence_[g.id];
    for (const auto& [gid, hid] : r.pairs) ++gt_matched_[gid];
}

std::pair<double, double> EvalLedger::mota_motp() const {
    if (totals_.gt == 0) throw EmptyGtError();
    const double mota =
        1.0 - static_cast<double>(totals_.fp + totals_.fn + totals_.ids) / totals_.gt;
    const double motp =
        totals_.matches > 0 ? totals_.quality_sum / totals_.matches : 0.0;
    return {mota, motp};
}

std::pair<int, int> EvalLedger::mt_ml() const {
    int mt = 0, ml = 0;
    for (const auto& [gid, present] : gt_presence_) {
        const auto it = gt_matched_.find(gid);
        const double coverage =
            present > 0 ? static_cast<double>(it == gt_matched_.end() ? 0 : it->second) / present
                        : 0.0;
        if (coverage > 0.8) ++mt;
        if (coverage < 0.2) ++ml;
    }
    return {mt, ml};
}

IdScores id_measures(const BoxSequence& gt, const BoxSequence& hyp, const EvalOptions& opts) {
    std::map<int, long long> gt_len, hyp_len;
    std::map<std::pair<int, int>, long long> overlap;

    std::set<int> frames;
    for (const auto& [f, boxes] : gt) frames.insert(f);
    for (const auto& [f, boxes] : hyp) frames.insert(f);
    static const std::vector<EvalBox> kEmpty;
    for (int f : frames) {
        const auto git = gt.find(f);
        const auto hit = hyp.find(f);
        const std::vector<EvalBox>& gb = git == gt.end() ? kEmpty : git->second;
        const std::vector<EvalBox>& hb = hit == hyp.end() ? kEmpty : hit->second;
        for (const EvalBox& g : gb) ++gt_len[g.id];
        for (const EvalBox& h : hb) ++hyp_len[h.id];
        for (const EvalBox& g : gb) {
            for (const EvalBox& h : hb) {
                if (gate_pair(g, h, opts).valid) ++overlap[{g.id, h.id}];
            }
        }
    }

    std::vector<int> gt_ids, hyp_ids;
    long long total_gt = 0, total_hyp = 0;
    for (const auto& [id, len] : gt_len) {
        gt_ids.push_back(id);
        total_gt += len;
    }
    for (const auto& [id, len] : hyp_len) {
        hyp_ids.push_back(id);
        total_hyp += len;
    }

    if (total_gt == 0) throw EmptyGtError("id_measures: no ground truth boxes");
    IdScores scores;

    // Square bipartite problem with one dummy column per GT track (leaving it
    // fully missed) and one dummy row per hypothesis track (leaving it fully
    // false); cross dummy pairings are blocked by a dominating sentinel.
    const int ng = static_cast<int>(gt_ids.size());
    const int nh = static_cast<int>(hyp_ids.size());
    const int n = ng + nh;
    const double big = static_cast<double>(total_gt + total_hyp) + 1.0;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i < ng && j < nh) {
                const auto it = overlap.find({gt_ids[i], hyp_ids[j]});
                const long long ov = it == overlap.end() ? 0 : it->second;
                cost[i][j] =
                    static_cast<double>(gt_len[gt_ids[i]] + hyp_len[hyp_ids[j]] - 2 * ov);
            } else if (i < ng) {
                cost[i][j] = (j - nh == i) ? static_cast<double>(gt_len[gt_ids[i]]) : big;
            } else if (j < nh) {
                cost[i][j] = (i - ng == j) ? static_cast<double>(hyp_len[hyp_ids[j]]) : big;
            }
        }
    }

    long long idtp = 0;
    for (const auto& [i, j] : hungarian(cost)) {
        if (i < ng && j < nh) {
            const auto it = overlap.find({gt_ids[i], hyp_ids[j]});
            idtp += it == overlap.end() ? 0 : it->second;
        }
    }
    scores.idtp = idtp;
    scores.idfn = total_gt - idtp;
    scores.idfp = total_hyp - idtp;
    scores.idp = total_hyp > 0 ? static_cast<double>(idtp) / total_hyp : 0.0;
    scores.idr = total_gt > 0 ? static_cast<double>(idtp) / total_gt : 0.0;
    const long long denom = total_gt + total_hyp;
    scores.idf1 = denom > 0 ? 2.0 * static_cast<double>(idtp) / denom : 0.0;
    return scores;
}

MetricsReport evaluate_sequences(const BoxSequence& gt, const BoxSequence& hyp,
                                 const EvalOptions& opts) {
    EvalLedger ledger(opts);
    std::set<int> frames;
    for (const auto& [f, boxes] : gt) frames.insert(f);
    for (const auto& [f, boxes] : hyp) frames.insert(f);
    static const std::vector<EvalBox> kEmpty;
    for (int f : frames) {
        const auto git = gt.find(f);
        const auto hit = hyp.find(f);
        ledger.add_frame(git == gt.end() ? kEmpty : git->second,
                         hit == hyp.end() ? kEmpty : hit->second);
    }

    MetricsReport report;
    const auto [mota, motp] = ledger.mota_motp();
    report.mota = mota;
    report.motp = motp;
    report.fp = ledger.totals().fp;
    report.fn = ledger.totals().fn;
    report.ids = ledger.totals().ids;
    report.matches = ledger.totals().matches;
    report.gt_total = ledger.totals().gt;
    const auto [mt, ml] = ledger.mt_ml();
    report.mt = mt;
    report.ml = ml;
    report.gt_tracks = ledger.gt_track_count();
    const IdScores id = id_measures(gt, hyp, opts);
    report.idf1 = id.idf1;
    report.idp = id.idp;
    report.idr = id.idr;
    return report;
}

}  // namespace gridtrack
