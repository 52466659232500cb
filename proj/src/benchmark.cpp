#include "hmr/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace hmr {

double iou(const NormalizedBox& a, const NormalizedBox& b) {
    double area_a = double(a.x2 - a.x1) * double(a.y2 - a.y1);
    double area_b = double(b.x2 - b.x1) * double(b.y2 - b.y1);
    if (area_a == 0.0 && area_b == 0.0) return a == b ? 1.0 : 0.0;

    double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    double inter = ix * iy;
    return inter / (area_a + area_b - inter);
}

ScoreReport evaluate(const std::vector<Prediction>& predictions,
                     const std::vector<ManifestSample>& manifest,
                     const std::vector<double>& thresholds) {
    struct Pair {
        NormalizedBox truth;
        Lighting lighting;
        double best_iou = -1.0; // -1 = no prediction seen
    };
    std::map<std::pair<std::string, int>, Pair> pairs;
    for (const auto& sample : manifest) {
        for (const auto& ann : sample.annotations) {
            Pair p;
            p.truth = normalize_box(ann.box_px, sample.width, sample.height);
            p.lighting = sample.lighting;
            pairs.emplace(std::make_pair(sample.image_ref, ann.acupoint_id), p);
        }
    }
    if (pairs.empty()) throw EmptyGroundTruth("manifest carries no annotations");

    std::map<std::string, bool> images;
    for (const auto& sample : manifest) images[sample.image_ref] = true;

    ScoreReport report;
    report.total = pairs.size();
    for (const auto& pred : predictions) {
        if (!images.count(pred.image_ref))
            throw UnknownImage("prediction references unknown image " + pred.image_ref);
        auto it = pairs.find({pred.image_ref, pred.acupoint_id});
        if (it == pairs.end()) {
            ++report.spurious;
            continue;
        }
        it->second.best_iou = std::max(it->second.best_iou, iou(pred.box, it->second.truth));
    }

    std::map<double, size_t> hits;
    std::map<std::string, std::pair<std::map<double, size_t>, size_t>> lighting_hits;
    for (const auto& [key, pair] : pairs) {
        if (pair.best_iou >= 0.0) ++report.matched;
        auto& bucket = lighting_hits[to_string(pair.lighting)];
        ++bucket.second;
        for (double t : thresholds) {
            if (pair.best_iou >= t) {
                ++hits[t];
                ++bucket.first[t];
            }
        }
    }
    for (double t : thresholds) {
        report.success_rate[t] = double(hits[t]) / double(report.total);
        for (auto& [light, bucket] : lighting_hits)
            report.by_lighting[light][t] = double(bucket.first[t]) / double(bucket.second);
    }
    return report;
}

namespace {
std::string percent(double rate) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f%%", rate * 100.0);
    return buf;
}
} // namespace

std::string render_report(const std::vector<ScoreReport>& reports) {
    std::string out;
    if (reports.empty()) return out;

    char buf[64];
    out += "Model                   ";
    bool first = true;
    for (const auto& [t, rate] : reports.front().success_rate) {
        (void)rate;
        std::snprintf(buf, sizeof(buf), "IoU=%.2f", t);
        if (!first) out += " | ";
        out += buf;
        first = false;
    }
    out += "\n";

    for (const auto& report : reports) {
        std::string label = report.label.empty() ? "(unnamed)" : report.label;
        label.resize(24, ' ');
        out += label;
        first = true;
        for (const auto& [t, rate] : report.success_rate) {
            (void)t;
            if (!first) out += " | ";
            out += percent(rate);
            first = false;
        }
        out += "\n";
    }
    return out;
}

std::string render_report(const ScoreReport& report) {
    return render_report(std::vector<ScoreReport>{report});
}

std::vector<ScoreReport> sweep(
    const std::vector<std::pair<std::string, std::vector<Prediction>>>& prediction_sets,
    const std::vector<ManifestSample>& manifest, const std::vector<double>& thresholds) {
    std::vector<ScoreReport> reports;
    reports.reserve(prediction_sets.size());
    for (const auto& [label, predictions] : prediction_sets) {
        ScoreReport report = evaluate(predictions, manifest, thresholds);
        report.label = label;
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<Prediction> load_predictions(const std::string& path, const NameResolver& resolver) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open predictions: " + path, 0);
    std::vector<Prediction> predictions;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        std::string image = j.at("image").get<std::string>();
        if (j.contains("raw")) {
            for (const auto& rec : parse_grounding_output(j["raw"].get<std::string>(), resolver)) {
                Prediction p;
                p.image_ref = image;
                p.acupoint_id = rec.acupoint_id;
                p.box = rec.box;
                predictions.push_back(std::move(p));
            }
        } else {
            Prediction p;
            p.image_ref = image;
            p.acupoint_id = j.at("acupoint_id").get<int>();
            auto box = j.at("box_norm");
            p.box = NormalizedBox{box[0].get<int>(), box[1].get<int>(), box[2].get<int>(),
                                  box[3].get<int>()};
            if (!p.box.valid()) throw ValidationError("invalid normalized box", lineno);
            predictions.push_back(std::move(p));
        }
    }
    return predictions;
}

} // namespace hmr
