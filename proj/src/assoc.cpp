// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridtrack/errors.hpp"

namespace gridtrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Square min-cost assignment via shortest augmenting paths. Returns the
/// column of each row and fills feasible dual potentials with matched edges
/// tight: u[r] + v[c] == cost[r][c].
std::vector<int> solve_square(const std::vector<std::vector<double>>& cost, int n,
                              std::vector<double>& u, std::vector<double>& v) {
    u.assign(n + 1, 0.0);
    v.assign(n + 1, 0.0);
    std::vector<int> p(n + 1, 0);  // row matched to column j (1-based)
    std::vector<int> way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= n; ++j) col_of_row[p[j] - 1] = j - 1;
    return col_of_row;
}

/// Augmenting-path step of a bipartite matching over an adjacency list.
bool try_kuhn(int row, const std::vector<std::vector<int>>& adj, std::vector<char>& visited,
              std::vector<int>& row_of_col) {
    for (int c : adj[row]) {
        if (visited[c]) continue;
        visited[c] = 1;
        if (row_of_col[c] < 0 || try_kuhn(row_of_col[c], adj, visited, row_of_col)) {
            row_of_col[c] = row;
            return true;
        }
    }
    return false;
}

/// Whether the adjacency admits a perfect matching of all n rows.
bool has_perfect_matching(const std::vector<std::vector<int>>& adj, int n) {
    std::vector<int> row_of_col(n, -1);
    for (int r = 0; r < n; ++r) {
        std::vector<char> visited(n, 0);
        if (!try_kuhn(r, adj, visited, row_of_col)) return false;
    }
    return true;
}

}  // namespace

double combined_distance(double d_pos, double d_app, const AssociationConfig& cfg) {
    const double pos = d_pos / cfg.n_pos;
    const double app = d_app / cfg.n_app;
    switch (cfg.mode) {
        case AssocMode::Pos:
            return pos;
        case AssocMode::App:
            return app;
        case AssocMode::Combined:
            return pos * app;
    }
    throw ConfigError("unknown association mode");
}

std::vector<std::pair<int, int>> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return {};
    const int m = static_cast<int>(cost[0].size());
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != m)
            throw DimMismatchError("hungarian: ragged cost matrix");
        for (double c : row) {
            if (!std::isfinite(c)) throw ConfigError("hungarian: non-finite cost");
        }
    }
    if (m == 0) return {};

    // Pad to square with zero-cost slack rows/columns; an assignment to a
    // slack column leaves the row unmatched.
    const int N = std::max(n, m);
    std::vector<std::vector<double>> sq(N, std::vector<double>(N, 0.0));
    double scale = 1.0;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) {
            sq[r][c] = cost[r][c];
            scale = std::max(scale, std::abs(cost[r][c]));
        }
    }

    std::vector<double> u, v;
    std::vector<int> col_of_row = solve_square(sq, N, u, v);
    const double tol = 1e-9 * scale;

    // Every optimal assignment uses only edges tight under the optimal duals,
    // and every perfect matching of tight edges is optimal. The
    // lexicographically smallest optimum is therefore extracted greedily over
    // the tight-edge graph, fixing each row to its smallest feasible column.
    std::vector<std::vector<int>> adj(N);
    for (int r = 0; r < N; ++r) {
        for (int c = 0; c < N; ++c) {
            if (sq[r][c] - u[r + 1] - v[c + 1] <= tol) adj[r].push_back(c);
        }
    }

    std::vector<int> fixed_col(N, -1);
    for (int r = 0; r < n; ++r) {
        bool fixed = false;
        const std::vector<int> candidates = adj[r];
        for (int c : candidates) {
            adj[r].assign(1, c);
            if (has_perfect_matching(adj, N)) {
                fixed_col[r] = c;
                fixed = true;
                break;
            }
            adj[r] = candidates;
        }
        if (!fixed) {
            // Numerical safety net: fall back to the column of a fresh
            // optimal completion of the unfixed remainder.
            std::vector<int> free_rows, free_cols;
            for (int i = r; i < N; ++i) free_rows.push_back(i);
            std::vector<char> col_taken(N, 0);
            for (int i = 0; i < r; ++i) col_taken[fixed_col[i]] = 1;
            for (int c = 0; c < N; ++c)
                if (!col_taken[c]) free_cols.push_back(c);
            const int k = static_cast<int>(free_rows.size());
            std::vector<std::vector<double>> sub(k, std::vector<double>(k));
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub[i][j] = sq[free_rows[i]][free_cols[j]];
            std::vector<double> su, sv;
            const std::vector<int> sub_col = solve_square(sub, k, su, sv);
            fixed_col[r] = free_cols[sub_col[0]];
            adj[r].assign(1, fixed_col[r]);
        }
    }

    std::vector<std::pair<int, int>> result;
    for (int r = 0; r < n; ++r) {
        if (fixed_col[r] < m) result.emplace_back(r, fixed_col[r]);
    }
    return result;
}

double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<std::pair<int, int>>& assignment) {
    double total = 0.0;
    for (const auto& [r, c] : assignment) total += cost.at(r).at(c);
    return total;
}

AssociationResult associate(const std::vector<KfTrack>& tracks,
                            const std::vector<Detection>& detections,
                            const AssociationConfig& cfg) {
    AssociationResult result;
    const int nt = static_cast<int>(tracks.size());
    const int nd = static_cast<int>(detections.size());
    if (nt == 0 || nd == 0) {
        for (int i = 0; i < nt; ++i) result.unmatched_tracks.push_back(i);
        for (int j = 0; j < nd; ++j) result.unmatched_detections.push_back(j);
        return result;
    }

    // Square matrix padded with the sentinel so hungarian sees no shape
    // asymmetry; the gate filters sentinel matches out again below.
    const double sentinel = 10.0 * cfg.gate;
    const int n = std::max(nt, nd);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, sentinel));
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nd; ++j) {
            const double d_pos = (detections[j].center - tracks[i].state.position()).norm();
            double d_app = 0.0;
            if (cfg.mode != AssocMode::Pos) {
                if (!tracks[i].reference_embedding || !detections[j].embedding) continue;
                d_app = tracks[i].reference_embedding->distance(*detections[j].embedding);
            }
            const double d = combined_distance(d_pos, d_app, cfg);
            if (d <= cfg.gate) cost[i][j] = d;
        }
    }

    std::vector<char> track_matched(nt, 0), det_matched(nd, 0);
    for (const auto& [i, j] : hungarian(cost)) {
        if (i >= nt || j >= nd || cost[i][j] > cfg.gate) continue;
        result.matches.emplace_back(i, j);
        track_matched[i] = 1;
        det_matched[j] = 1;
    }
    for (int i = 0; i < nt; ++i)
        if (!track_matched[i]) result.unmatched_tracks.push_back(i);
    for (int j = 0; j < nd; ++j)
        if (!det_matched[j]) result.unmatched_detections.push_back(j);
    return result;
}

void step(TrackerWorld& world, const std::vector<Detection>& detections,
          const TrackManagementConfig& tm, const AssociationConfig& ac,
          const std::vector<GtBirth>& gt_births) {
    if (tm.sigma_cont > tm.sigma_init)
        throw ConfigError("track management: sigma_cont must not exceed sigma_init");

    for (KfTrack& track : world.tracks) track.state = kf_predict(track.state, world.process_noise);

    std::vector<Detection> eligible;
    std::vector<int> eligible_index;
    for (int j = 0; j < static_cast<int>(detections.size()); ++j) {
        if (detections[j].score >= tm.sigma_cont) {
            eligible.push_back(detections[j]);
            eligible_index.push_back(j);
        }
    }

    const AssociationResult assoc = associate(world.tracks, eligible, ac);
    for (const auto& [i, j] : assoc.matches) {
        world.tracks[i].state =
            kf_update(world.tracks[i].state, eligible[j].center, world.measurement_noise);
        world.tracks[i].misses = 0;
    }
    for (int i : assoc.unmatched_tracks) ++world.tracks[i].misses;
    world.tracks.erase(std::remove_if(world.tracks.begin(), world.tracks.end(),
                                      [&](const KfTrack& t) { return t.misses > tm.d_miss; }),
                       world.tracks.end());

    if (tm.gt_init) {
        for (const GtBirth& birth : gt_births) {
            KfTrack track;
            track.id = world.next_id++;
            track.state = kf_init(birth.center, world.init_pos_var, world.init_vel_var);
            track.reference_embedding = birth.embedding;
            world.tracks.push_back(track);
        }
        return;
    }

    // Detection-driven births: extend chains with the nearest unconsumed
    // candidate, drop broken chains, promote full ones, seed new ones.
    std::vector<int> candidates;
    for (int j : assoc.unmatched_detections) {
        if (eligible[j].score >= tm.sigma_init) candidates.push_back(eligible_index[j]);
    }
    std::vector<char> consumed(detections.size(), 0);
    const double chain_gate = ac.gate * ac.n_pos;
    std::vector<TentativeChain> kept;
    for (TentativeChain& chain : world.tentative) {
        int best = -1;
        double best_dist = chain_gate;
        for (int j : candidates) {
            if (consumed[j]) continue;
            const double d = (detections[j].center - chain.last_center).norm();
            if (d <= best_dist && (best < 0 || d < best_dist)) {
                best = j;
                best_dist = d;
            }
        }
        if (best < 0) continue;
        consumed[best] = 1;
        chain.last_center = detections[best].center;
        if (!chain.first_embedding) chain.first_embedding = detections[best].embedding;
        ++chain.length;
        if (chain.length >= tm.d_init) {
            KfTrack track;
            track.id = world.next_id++;
            track.state = kf_init(chain.last_center, world.init_pos_var, world.init_vel_var);
            track.reference_embedding = chain.first_embedding;
            world.tracks.push_back(track);
        } else {
            kept.push_back(chain);
        }
    }
    for (int j : candidates) {
        if (consumed[j]) continue;
        TentativeChain chain;
        chain.last_center = detections[j].center;
        chain.first_embedding = detections[j].embedding;
        chain.length = 1;
        if (chain.length >= tm.d_init) {
            KfTrack track;
            track.id = world.next_id++;
            track.state = kf_init(chain.last_center, world.init_pos_var, world.init_vel_var);
            track.reference_embedding = chain.first_embedding;
            world.tracks.push_back(track);
        } else {
            kept.push_back(chain);
        }
    }
    world.tentative = std::move(kept);
}

}  // namespace gridtrack
