// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "gridtrack/errors.hpp"

namespace gridtrack {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t frame_stream_seed(std::uint64_t seed, int frame) {
    return splitmix64(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(frame + 1));
}

EmbeddingVector random_unit_vector(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<float> values(dim);
    double sq = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double x = normal(rng);
        values[k] = static_cast<float>(x);
        sq += x * x;
    }
    EmbeddingVector e{std::move(values)};
    if (sq <= 0.0) {
        e.values.assign(dim, 0.0f);
        e.values[0] = 1.0f;
        return e;
    }
    return e.normalized();
}

EmbeddingVector perturbed(const EmbeddingVector& base, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) return base;
    std::normal_distribution<double> normal(0.0, sigma);
    EmbeddingVector out = base;
    for (float& v : out.values) v = static_cast<float>(v + normal(rng));
    return out.normalized();
}

/// Fold a coordinate back into [lo, hi], flipping the velocity on each bounce.
void reflect_interval(double& x, double& v, double lo, double hi) {
    while (x < lo || x > hi) {
        if (x < lo) {
            x = 2.0 * lo - x;
            v = -v;
        } else {
            x = 2.0 * hi - x;
            v = -v;
        }
    }
}

Cell cell_from_point(const ScenarioConfig& config, const Eigen::Vector2d& p) {
    int col = static_cast<int>(std::floor(p.x() / config.cell_size));
    int row = static_cast<int>(std::floor(p.y() / config.cell_size));
    col = std::clamp(col, 0, config.grid_width - 1);
    row = std::clamp(row, 0, config.grid_height - 1);
    return Cell{row, col};
}

}  // namespace

void ScenarioConfig::validate() const {
    if (grid_width <= 0 || grid_height <= 0) throw ConfigError("scenario: grid must be non-empty");
    if (cell_size <= 0.0) throw ConfigError("scenario: cell_size must be positive");
    if (embedding_dim < 2) throw ConfigError("scenario: embedding_dim must be at least 2");
    if (num_identities < 1) throw ConfigError("scenario: num_identities must be at least 1");
    if (frames <= 0) throw ConfigError("scenario: frames must be positive");
    if (velocity_range < 0.0) throw ConfigError("scenario: velocity_range must be non-negative");
    if (motion_noise_sigma < 0.0 || embedding_noise_sigma < 0.0)
        throw ConfigError("scenario: noise sigmas must be non-negative");
    if (confuser_similarity < 0.0 || confuser_similarity >= 1.0)
        throw ConfigError("scenario: confuser_similarity must lie in [0, 1)");
    if (detection.miss_rate < 0.0 || detection.miss_rate > 1.0)
        throw ConfigError("scenario: miss_rate must lie in [0, 1]");
    if (detection.fp_rate < 0.0) throw ConfigError("scenario: fp_rate must be non-negative");
    if (detection.score_noise < 0.0 || detection.pos_noise_sigma < 0.0)
        throw ConfigError("scenario: detection noise must be non-negative");
    if (height_slope < 0.0 || height_intercept <= 0.0)
        throw ConfigError("scenario: height model must yield positive heights");
    if (aspect <= 0.0) throw ConfigError("scenario: aspect must be positive");
}

Eigen::Vector2d Identity::center_at(int frame) const {
    if (!present(frame)) throw FrameOutOfRangeError("identity not present in frame");
    return trajectory[static_cast<std::size_t>(frame - entry)].center;
}

Scenario::Scenario(ScenarioConfig config, std::vector<Identity> identities,
                   std::vector<std::vector<Detection>> detections,
                   std::optional<EmbeddingVector> confuser_vector, Cell confuser_cell,
                   int confuser_target_id)
    : config_(std::move(config)),
      identities_(std::move(identities)),
      detections_(std::move(detections)),
      confuser_vector_(std::move(confuser_vector)),
      confuser_cell_(confuser_cell),
      confuser_target_id_(confuser_target_id) {}

const std::vector<Detection>& Scenario::detections(int frame) const {
    if (frame < 0 || frame >= static_cast<int>(detections_.size()))
        throw FrameOutOfRangeError("detections: frame out of range");
    return detections_[static_cast<std::size_t>(frame)];
}

GtBox Scenario::gt_box_for(const Identity& identity, int frame) const {
    const Eigen::Vector2d center = identity.center_at(frame);
    GtBox box;
    box.id = identity.id;
    box.center = center;
    box.height = config_.height_slope * center.y() + config_.height_intercept;
    box.width = config_.aspect * box.height;
    return box;
}

std::vector<GtBox> Scenario::gt_boxes(int frame) const {
    if (frame < 0 || frame >= config_.frames)
        throw FrameOutOfRangeError("gt_boxes: frame out of range");
    std::vector<GtBox> boxes;
    for (const Identity& identity : identities_) {
        if (identity.present(frame)) boxes.push_back(gt_box_for(identity, frame));
    }
    return boxes;
}

FrameObservation Scenario::render_frame(int frame) const {
    if (frame < 0 || frame >= config_.frames)
        throw FrameOutOfRangeError("render_frame: frame out of range");
    FrameObservation obs;
    obs.frame = frame;
    obs.detections = detections(frame);
    obs.gt_boxes = gt_boxes(frame);

    std::mt19937_64 rng(frame_stream_seed(config_.seed, frame));
    EmbeddingMap map(config_.grid_width, config_.grid_height, config_.cell_size,
                     config_.embedding_dim);
    for (int row = 0; row < config_.grid_height; ++row) {
        for (int col = 0; col < config_.grid_width; ++col) {
            map.set_cell(row, col, random_unit_vector(rng, config_.embedding_dim));
        }
    }
    if (config_.background_mode == BackgroundMode::Confuser && confuser_vector_) {
        map.set_cell(confuser_cell_.row, confuser_cell_.col, *confuser_vector_);
    }
    for (const Identity& identity : identities_) {
        if (!identity.present(frame)) continue;
        const Cell cell = cell_from_point(config_, identity.center_at(frame));
        map.set_cell(cell.row, cell.col,
                     perturbed(identity.true_embedding, config_.embedding_noise_sigma, rng));
    }
    obs.embedding_map = std::move(map);
    return obs;
}

Scenario generate_scenario(const ScenarioConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Identity> identities(static_cast<std::size_t>(config.num_identities));
    for (int i = 0; i < config.num_identities; ++i) {
        identities[i].id = i + 1;
        identities[i].true_embedding = random_unit_vector(rng, config.embedding_dim);
    }

    std::optional<EmbeddingVector> confuser_vector;
    Cell confuser_cell{0, 0};
    int confuser_target_id = -1;
    if (config.background_mode == BackgroundMode::Confuser && config.num_identities > 0) {
        std::uniform_int_distribution<int> pick_id(0, config.num_identities - 1);
        const int target_index = pick_id(rng);
        confuser_target_id = identities[target_index].id;
        std::uniform_int_distribution<int> pick_row(0, config.grid_height - 1);
        std::uniform_int_distribution<int> pick_col(0, config.grid_width - 1);
        confuser_cell = Cell{pick_row(rng), pick_col(rng)};

        // Build a unit vector at the requested cosine similarity: target
        // direction plus an orthogonal complement.
        const EmbeddingVector& target = identities[target_index].true_embedding;
        EmbeddingVector raw = random_unit_vector(rng, config.embedding_dim);
        double dot = 0.0;
        for (int k = 0; k < config.embedding_dim; ++k)
            dot += static_cast<double>(raw.values[k]) * target.values[k];
        std::vector<float> perp(config.embedding_dim);
        double perp_sq = 0.0;
        for (int k = 0; k < config.embedding_dim; ++k) {
            const double v = raw.values[k] - dot * target.values[k];
            perp[k] = static_cast<float>(v);
            perp_sq += v * v;
        }
        const double perp_norm = std::sqrt(perp_sq);
        const double c = config.confuser_similarity;
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        std::vector<float> blend(config.embedding_dim);
        for (int k = 0; k < config.embedding_dim; ++k) {
            const double p = perp_norm > 0.0 ? perp[k] / perp_norm : 0.0;
            blend[k] = static_cast<float>(c * target.values[k] + s * p);
        }
        confuser_vector = EmbeddingVector{std::move(blend)}.normalized();
    }

    const double w = config.width_px();
    const double h = config.height_px();
    const double margin = config.cell_size * 0.5;
    for (Identity& identity : identities) {
        if (config.random_entry_exit && config.frames >= 2) {
            std::uniform_int_distribution<int> pick_entry(0, config.frames / 5);
            std::uniform_int_distribution<int> pick_exit(config.frames / 2, config.frames - 1);
            identity.entry = pick_entry(rng);
            identity.exit = pick_exit(rng);
        } else {
            identity.entry = 0;
            identity.exit = config.frames - 1;
        }
        Eigen::Vector2d pos(0.1 * w + 0.8 * w * unit(rng), 0.1 * h + 0.8 * h * unit(rng));
        Eigen::Vector2d vel((2.0 * unit(rng) - 1.0) * config.velocity_range,
                            (2.0 * unit(rng) - 1.0) * config.velocity_range);
        identity.trajectory.reserve(static_cast<std::size_t>(identity.exit - identity.entry + 1));
        for (int t = identity.entry; t <= identity.exit; ++t) {
            if (t > identity.entry) {
                pos += vel;
                if (config.motion_noise_sigma > 0.0) {
                    pos.x() += config.motion_noise_sigma * normal(rng);
                    pos.y() += config.motion_noise_sigma * normal(rng);
                }
                reflect_interval(pos.x(), vel.x(), margin, w - margin);
                reflect_interval(pos.y(), vel.y(), margin, h - margin);
            }
            identity.trajectory.push_back(TrajectoryPoint{t, pos});
        }
    }

    std::vector<std::vector<Detection>> detections(static_cast<std::size_t>(config.frames));
    std::poisson_distribution<int> fp_count(config.detection.fp_rate *
                                            static_cast<double>(config.grid_width) *
                                            static_cast<double>(config.grid_height));
    for (int t = 0; t < config.frames; ++t) {
        for (const Identity& identity : identities) {
            if (!identity.present(t)) continue;
            if (config.detection.miss_rate > 0.0 && unit(rng) < config.detection.miss_rate)
                continue;
            Detection det;
            det.frame = t;
            det.center = identity.center_at(t);
            if (config.detection.pos_noise_sigma > 0.0) {
                det.center.x() += config.detection.pos_noise_sigma * normal(rng);
                det.center.y() += config.detection.pos_noise_sigma * normal(rng);
            }
            det.score = std::clamp(0.8 + config.detection.score_noise * normal(rng), 0.0, 1.0);
            det.embedding = perturbed(identity.true_embedding, config.embedding_noise_sigma, rng);
            detections[t].push_back(std::move(det));
        }
        if (config.detection.fp_rate > 0.0) {
            const int count = fp_count(rng);
            for (int k = 0; k < count; ++k) {
                Detection det;
                det.frame = t;
                if (confuser_vector && unit(rng) < 0.5) {
                    // The detector fires on the confusing background spot.
                    det.center = Eigen::Vector2d(
                        (confuser_cell.col + 0.5) * config.cell_size + config.cell_size * normal(rng),
                        (confuser_cell.row + 0.5) * config.cell_size + config.cell_size * normal(rng));
                    det.center.x() = std::clamp(det.center.x(), 0.0, w - 1e-9);
                    det.center.y() = std::clamp(det.center.y(), 0.0, h - 1e-9);
                    det.embedding = perturbed(*confuser_vector, config.embedding_noise_sigma, rng);
                } else {
                    det.center = Eigen::Vector2d(unit(rng) * w, unit(rng) * h);
                    det.embedding = random_unit_vector(rng, config.embedding_dim);
                }
                det.score = unit(rng);
                detections[t].push_back(std::move(det));
            }
        }
    }

    return Scenario(config, std::move(identities), std::move(detections),
                    std::move(confuser_vector), confuser_cell, confuser_target_id);
}

namespace {

using nlohmann::json;

json embedding_to_json(const EmbeddingVector& e) {
    json arr = json::array();
    for (float v : e.values) arr.push_back(v);
    return arr;
}

EmbeddingVector embedding_from_json(const json& arr) {
    EmbeddingVector e;
    e.values.reserve(arr.size());
    for (const auto& v : arr) e.values.push_back(v.get<float>());
    return e;
}

json config_to_json(const ScenarioConfig& c) {
    return json{{"grid_width", c.grid_width},
                {"grid_height", c.grid_height},
                {"cell_size", c.cell_size},
                {"embedding_dim", c.embedding_dim},
                {"num_identities", c.num_identities},
                {"frames", c.frames},
                {"velocity_range", c.velocity_range},
                {"motion_noise_sigma", c.motion_noise_sigma},
                {"embedding_noise_sigma", c.embedding_noise_sigma},
                {"background_mode",
                 c.background_mode == BackgroundMode::Confuser ? "confuser" : "random_far"},
                {"confuser_similarity", c.confuser_similarity},
                {"miss_rate", c.detection.miss_rate},
                {"fp_rate", c.detection.fp_rate},
                {"score_noise", c.detection.score_noise},
                {"pos_noise_sigma", c.detection.pos_noise_sigma},
                {"random_entry_exit", c.random_entry_exit},
                {"height_slope", c.height_slope},
                {"height_intercept", c.height_intercept},
                {"aspect", c.aspect},
                {"seed", c.seed}};
}

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    c.grid_width = j.at("grid_width").get<int>();
    c.grid_height = j.at("grid_height").get<int>();
    c.cell_size = j.at("cell_size").get<double>();
    c.embedding_dim = j.at("embedding_dim").get<int>();
    c.num_identities = j.at("num_identities").get<int>();
    c.frames = j.at("frames").get<int>();
    c.velocity_range = j.at("velocity_range").get<double>();
    c.motion_noise_sigma = j.at("motion_noise_sigma").get<double>();
    c.embedding_noise_sigma = j.at("embedding_noise_sigma").get<double>();
    const std::string mode = j.at("background_mode").get<std::string>();
    if (mode == "confuser") {
        c.background_mode = BackgroundMode::Confuser;
    } else if (mode == "random_far") {
        c.background_mode = BackgroundMode::RandomFar;
    } else {
        throw ConfigError("scenario: unknown background_mode '" + mode + "'");
    }
    c.confuser_similarity = j.at("confuser_similarity").get<double>();
    c.detection.miss_rate = j.at("miss_rate").get<double>();
    c.detection.fp_rate = j.at("fp_rate").get<double>();
    c.detection.score_noise = j.at("score_noise").get<double>();
    c.detection.pos_noise_sigma = j.at("pos_noise_sigma").get<double>();
    c.random_entry_exit = j.at("random_entry_exit").get<bool>();
    c.height_slope = j.at("height_slope").get<double>();
    c.height_intercept = j.at("height_intercept").get<double>();
    c.aspect = j.at("aspect").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

void save_scenario(const Scenario& scenario, const std::string& path) {
    json doc;
    doc["format"] = "gridtrack-scenario-v1";
    doc["config"] = config_to_json(scenario.config());

    json ids = json::array();
    for (const Identity& identity : scenario.identities()) {
        json traj = json::array();
        for (const TrajectoryPoint& p : identity.trajectory)
            traj.push_back(json::array({p.frame, p.center.x(), p.center.y()}));
        ids.push_back(json{{"id", identity.id},
                           {"embedding", embedding_to_json(identity.true_embedding)},
                           {"entry", identity.entry},
                           {"exit", identity.exit},
                           {"trajectory", std::move(traj)}});
    }
    doc["identities"] = std::move(ids);

    if (scenario.confuser_vector()) {
        doc["confuser"] = json{{"target_id", scenario.confuser_target_id()},
                               {"cell_row", scenario.confuser_cell().row},
                               {"cell_col", scenario.confuser_cell().col},
                               {"vector", embedding_to_json(*scenario.confuser_vector())}};
    } else {
        doc["confuser"] = nullptr;
    }

    json frames = json::array();
    for (int t = 0; t < scenario.config().frames; ++t) {
        json dets = json::array();
        for (const Detection& det : scenario.detections(t)) {
            json d{{"x", det.center.x()}, {"y", det.center.y()}, {"score", det.score}};
            d["embedding"] = det.embedding ? embedding_to_json(*det.embedding) : json(nullptr);
            dets.push_back(std::move(d));
        }
        frames.push_back(std::move(dets));
    }
    doc["detections"] = std::move(frames);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing scenario: " + path);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw IoError("malformed scenario JSON: " + std::string(e.what()));
    }
    if (doc.value("format", "") != "gridtrack-scenario-v1")
        throw IoError("unsupported scenario format in " + path);

    const ScenarioConfig config = config_from_json(doc.at("config"));
    config.validate();

    std::vector<Identity> identities;
    for (const auto& j : doc.at("identities")) {
        Identity identity;
        identity.id = j.at("id").get<int>();
        identity.true_embedding = embedding_from_json(j.at("embedding"));
        identity.entry = j.at("entry").get<int>();
        identity.exit = j.at("exit").get<int>();
        for (const auto& p : j.at("trajectory")) {
            identity.trajectory.push_back(
                TrajectoryPoint{p.at(0).get<int>(),
                                Eigen::Vector2d(p.at(1).get<double>(), p.at(2).get<double>())});
        }
        identities.push_back(std::move(identity));
    }

    std::vector<std::vector<Detection>> detections(static_cast<std::size_t>(config.frames));
    const auto& frames = doc.at("detections");
    if (static_cast<int>(frames.size()) != config.frames)
        throw IoError("scenario detections do not cover all frames");
    for (int t = 0; t < config.frames; ++t) {
        for (const auto& d : frames[static_cast<std::size_t>(t)]) {
            Detection det;
            det.frame = t;
            det.center = Eigen::Vector2d(d.at("x").get<double>(), d.at("y").get<double>());
            det.score = d.at("score").get<double>();
            if (!d.at("embedding").is_null()) det.embedding = embedding_from_json(d.at("embedding"));
            detections[static_cast<std::size_t>(t)].push_back(std::move(det));
        }
    }

    std::optional<EmbeddingVector> confuser_vector;
    Cell confuser_cell{0, 0};
    int confuser_target_id = -1;
    if (!doc.at("confuser").is_null()) {
        const auto& j = doc.at("confuser");
        confuser_target_id = j.at("target_id").get<int>();
        confuser_cell = Cell{j.at("cell_row").get<int>(), j.at("cell_col").get<int>()};
        confuser_vector = embedding_from_json(j.at("vector"));
    }

    return Scenario(config, std::move(identities), std::move(detections),
                    std::move(confuser_vector), confuser_cell, confuser_target_id);
}

void write_embedding_maps(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    const ScenarioConfig& c = scenario.config();
    const std::uint32_t header[4] = {
        static_cast<std::uint32_t>(c.frames), static_cast<std::uint32_t>(c.grid_height),
        static_cast<std::uint32_t>(c.grid_width), static_cast<std::uint32_t>(c.embedding_dim)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (int t = 0; t < c.frames; ++t) {
        const FrameObservation obs = scenario.render_frame(t);
        const std::vector<float>& data = obs.embedding_map.values();
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(float)));
    }
    if (!out) throw IoError("failed writing embedding maps: " + path);
}

std::vector<EmbeddingMap> read_embedding_maps(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open embedding maps: " + path);
    std::uint32_t header[4] = {0, 0, 0, 0};
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) throw IoError("truncated embedding map header: " + path);
    const int frames = static_cast<int>(header[0]);
    const int height = static_cast<int>(header[1]);
    const int width = static_cast<int>(header[2]);
    const int dim = static_cast<int>(header[3]);
    std::vector<EmbeddingMap> maps;
    maps.reserve(static_cast<std::size_t>(frames));
    for (int t = 0; t < frames; ++t) {
        EmbeddingMap map(width, height, 1.0, dim);
        std::vector<float>& data = map.values();
        in.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(data.size() * sizeof(float)));
        if (!in) throw IoError("truncated embedding map payload: " + path);
        maps.push_back(std::move(map));
    }
    return maps;
}

}  // namespace gridtrack
