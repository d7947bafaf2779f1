// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 gridtrack contributors

#include "gridtrack/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridtrack/errors.hpp"

namespace gridtrack {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_boxes_csv(const BoxSequence& boxes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "frame,id,x,y,w,h\n";
    for (const auto& [frame, list] : boxes) {
        for (const EvalBox& b : list) {
            out << frame << ',' << b.id << ',' << fmt_double(b.center.x()) << ','
                << fmt_double(b.center.y()) << ',' << fmt_double(b.width) << ','
                << fmt_double(b.height) << '\n';
        }
    }
    if (!out) throw IoError("failed writing boxes: " + path);
}

BoxSequence read_boxes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open boxes CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty boxes CSV: " + path);
    BoxSequence boxes;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        int frame = 0, id = 0;
        double x = 0, y = 0, w = 0, h = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf", &frame, &id, &x, &y, &w, &h) != 6)
            throw IoError("malformed CSV line " + std::to_string(lineno) + " in " + path);
        EvalBox box;
        box.id = id;
        box.center = Eigen::Vector2d(x, y);
        box.width = w;
        box.height = h;
        boxes[frame].push_back(box);
    }
    return boxes;
}

BoxSequence gt_sequence(const Scenario& scenario) {
    BoxSequence seq;
    for (int t = 0; t < scenario.config().frames; ++t) {
        for (const GtBox& g : scenario.gt_boxes(t)) {
            EvalBox box;
            box.id = g.id;
            box.center = g.center;
            box.width = g.width;
            box.height = g.height;
            seq[t].push_back(box);
        }
    }
    return seq;
}

BoxSequence hyp_sequence(const std::vector<OutputBox>& boxes) {
    BoxSequence seq;
    for (const OutputBox& b : boxes) {
        EvalBox box;
        box.id = b.track_id;
        box.center = b.center;
        box.width = b.width;
        box.height = b.height;
        seq[b.frame].push_back(box);
    }
    return seq;
}

void write_detections_jsonl(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (int t = 0; t < scenario.config().frames; ++t) {
        for (const Detection& det : scenario.detections(t)) {
            nlohmann::ordered_json j;
            j["frame"] = t;
            j["x"] = det.center.x();
            j["y"] = det.center.y();
            j["score"] = det.score;
            if (det.embedding) {
                nlohmann::ordered_json arr = nlohmann::ordered_json::array();
                for (float v : det.embedding->values) arr.push_back(v);
                j["embedding"] = std::move(arr);
            } else {
                j["embedding"] = nullptr;
            }
            out << j.dump() << '\n';
        }
    }
    if (!out) throw IoError("failed writing detections: " + path);
}

std::vector<std::vector<Detection>> read_detections_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open detections: " + path);
    std::vector<std::vector<Detection>> frames;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoError("malformed JSONL line " + std::to_string(lineno) + ": " + e.what());
        }
        Detection det;
        det.frame = j.at("frame").get<int>();
        det.center = Eigen::Vector2d(j.at("x").get<double>(), j.at("y").get<double>());
        det.score = j.at("score").get<double>();
        if (j.contains("embedding") && !j.at("embedding").is_null()) {
            EmbeddingVector e;
            for (const auto& v : j.at("embedding")) e.values.push_back(v.get<float>());
            det.embedding = std::move(e);
        }
        if (det.frame < 0) throw IoError("negative frame in detections line " +
                                         std::to_string(lineno));
        if (det.frame >= static_cast<int>(frames.size()))
            frames.resize(static_cast<std::size_t>(det.frame) + 1);
        frames[static_cast<std::size_t>(det.frame)].push_back(std::move(det));
    }
    return frames;
}

std::string metrics_to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["MOTA"] = report.mota;
    j["MOTP"] = report.motp;
    j["FP"] = report.fp;
    j["FN"] = report.fn;
    j["IDS"] = report.ids;
    j["MT"] = report.mt;
    j["ML"] = report.ml;
    j["IDF1"] = report.idf1;
    j["IDP"] = report.idp;
    j["IDR"] = report.idr;
    j["GT"] = report.gt_total;
    j["MATCHES"] = report.matches;
    j["GT_TRACKS"] = report.gt_tracks;
    return j.dump(2) + "\n";
}

void write_metrics_json(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << metrics_to_json(report);
    if (!out) throw IoError("failed writing metrics: " + path);
}

}  // namespace gridtrack
