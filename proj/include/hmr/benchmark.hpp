#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmr/grounding_protocol.hpp"
#include "hmr/manifest.hpp"

namespace hmr {

struct UnknownImage : std::runtime_error {
    explicit UnknownImage(const std::string& what) : std::runtime_error(what) {}
};
struct EmptyGroundTruth : std::runtime_error {
    explicit EmptyGroundTruth(const std::string& what) : std::runtime_error(what) {}
};

struct Prediction {
    std::string image_ref;
    int acupoint_id = -1;
    NormalizedBox box;
};

struct ScoreReport {
    std::string label;
    std::map<double, double> success_rate; // IoU threshold -> fraction in [0,1]
    size_t matched = 0;                    // predictions paired with a ground truth
    size_t total = 0;                      // ground-truth (image, acupoint) pairs
    size_t spurious = 0;                   // predictions with no matching pair
    std::map<std::string, std::map<double, double>> by_lighting;
};

/// Intersection over union of two normalized boxes treated as continuous
/// rectangles. 0 for disjoint or zero-area boxes, except two identical
/// degenerate boxes which score 1.
double iou(const NormalizedBox& a, const NormalizedBox& b);

inline const std::vector<double> kDefaultThresholds{0.30, 0.50, 0.75};

/// Scores predictions against manifest ground truth. A prediction succeeds at
/// threshold t iff its IoU against the ground-truth box of the same
/// (image, acupoint) pair is >= t; the denominator is the number of
/// ground-truth pairs. Duplicate predictions keep the highest-IoU one.
ScoreReport evaluate(const std::vector<Prediction>& predictions,
                     const std::vector<ManifestSample>& manifest,
                     const std::vector<double>& thresholds = kDefaultThresholds);

/// Fixed-width text table, one row per report, percentages to two decimals.
std::string render_report(const std::vector<ScoreReport>& reports);
std::string render_report(const ScoreReport& report);

/// One evaluate() per labeled prediction set, order preserved.
std::vector<ScoreReport> sweep(
    const std::vector<std::pair<std::string, std::vector<Prediction>>>& prediction_sets,
    const std::vector<ManifestSample>& manifest,
    const std::vector<double>& thresholds = kDefaultThresholds);

/// Predictions file: JSON Lines, either {"image", "acupoint_id", "box_norm"} or
/// {"image", "raw"} records; raw text is parsed with the grounding protocol.
std::vector<Prediction> load_predictions(const std::string& path, const NameResolver& resolver);

} // namespace hmr
