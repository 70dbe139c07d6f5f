#pragma once

#include <string>
#include <utility>
#include <vector>

#include "icid/data.hpp"
#include "icid/detector.hpp"

namespace icid::eval {

enum class Anchor { start, mid, end };

Anchor parse_anchor(const std::string& name);
std::string anchor_name(Anchor a);

// For each change-point label, whether some flagged interval [j*w, (j+1)*w)
// contains it. Order follows labels.change_points.
std::vector<bool> interval_hits(const std::vector<std::size_t>& flagged, std::size_t w,
                                const data::Labels& labels);

// Detection time for a flagged interval j: its start j*w, midpoint, or last
// contained index.
std::vector<std::size_t> flags_to_times(const std::vector<std::size_t>& flagged,
                                        std::size_t w, Anchor anchor);

struct EvalReport {
    std::size_t tp{};
    std::size_t fp{};
    std::size_t fn{};
    double precision{};
    double recall{};
    double f1{};
    std::size_t margin{};
    // Indices into the detections and labels lists, in match order.
    std::vector<std::pair<std::size_t, std::size_t>> matched_pairs;
};

// Greedy one-to-one matching by increasing |detection - label|; a pair only
// matches within the margin. 0/0 ratios are reported as 0.
EvalReport f1_with_margin(const std::vector<std::size_t>& detections,
                          const std::vector<std::size_t>& labels, std::size_t margin);

std::string report_to_json(const EvalReport& report);

// A score artifact: one row per interval (or per point in point mode) with a
// provenance header carrying the full run configuration. The CSV layout is
//   # key=value key=value ...
//   index,score,flagged
// with scores printed at full round-trip precision, so identical runs produce
// byte-identical files.
struct ScoreArtifact {
    std::vector<std::pair<std::string, std::string>> provenance;  // ordered
    std::vector<double> scores;
    std::vector<std::size_t> flagged;
};

ScoreArtifact make_artifact(const detector::DetectionResult& result,
                            std::vector<std::pair<std::string, std::string>> provenance);

void export_scores_csv(const ScoreArtifact& artifact, const std::string& path);
void export_scores_json(const ScoreArtifact& artifact, const std::string& path);

// Reads back a CSV artifact (scores exactly as written).
ScoreArtifact load_scores_csv(const std::string& path);

}  // namespace icid::eval
