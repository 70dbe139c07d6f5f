#include "icid/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace icid::eval {

namespace {

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Anchor parse_anchor(const std::string& name) {
    if (name == "start") return Anchor::start;
    if (name == "mid") return Anchor::mid;
    if (name == "end") return Anchor::end;
    throw std::invalid_argument("unknown anchor: " + name);
}

std::string anchor_name(Anchor a) {
    switch (a) {
        case Anchor::start: return "start";
        case Anchor::mid: return "mid";
        case Anchor::end: return "end";
    }
    throw std::logic_error("unreachable");
}

std::vector<bool> interval_hits(const std::vector<std::size_t>& flagged, std::size_t w,
                                const data::Labels& labels) {
    if (w == 0) throw std::invalid_argument("window must be positive");
    std::vector<bool> hits(labels.change_points.size(), false);
    for (std::size_t li = 0; li < labels.change_points.size(); ++li) {
        std::size_t cp = labels.change_points[li];
        for (std::size_t j : flagged)
            if (cp >= j * w && cp < (j + 1) * w) {
                hits[li] = true;
                break;
            }
    }
    return hits;
}

std::vector<std::size_t> flags_to_times(const std::vector<std::size_t>& flagged,
                                        std::size_t w, Anchor anchor) {
    std::vector<std::size_t> out;
    out.reserve(flagged.size());
    for (std::size_t j : flagged) {
        switch (anchor) {
            case Anchor::start: out.push_back(j * w); break;
            case Anchor::mid: out.push_back(j * w + w / 2); break;
            case Anchor::end: out.push_back((j + 1) * w - 1); break;
        }
    }
    return out;
}

EvalReport f1_with_margin(const std::vector<std::size_t>& detections,
                          const std::vector<std::size_t>& labels, std::size_t margin) {
    struct Candidate {
        std::size_t dist, det, label;
    };
    std::vector<Candidate> candidates;
    for (std::size_t d = 0; d < detections.size(); ++d)
        for (std::size_t l = 0; l < labels.size(); ++l) {
            std::size_t a = detections[d], b = labels[l];
            std::size_t dist = a > b ? a - b : b - a;
            if (dist <= margin) candidates.push_back({dist, d, l});
        }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.det != b.det) return a.det < b.det;
        return a.label < b.label;
    });

    std::vector<bool> det_used(detections.size(), false), label_used(labels.size(), false);
    EvalReport report;
    report.margin = margin;
    for (const auto& c : candidates) {
        if (det_used[c.det] || label_used[c.label]) continue;
        det_used[c.det] = true;
        label_used[c.label] = true;
        report.matched_pairs.emplace_back(c.det, c.label);
    }
    report.tp = report.matched_pairs.size();
    report.fp = detections.size() - report.tp;
    report.fn = labels.size() - report.tp;
    report.precision =
        detections.empty() ? 0.0 : static_cast<double>(report.tp) / detections.size();
    report.recall = labels.empty() ? 0.0 : static_cast<double>(report.tp) / labels.size();
    report.f1 = (report.precision + report.recall) > 0.0
                    ? 2.0 * report.precision * report.recall /
                          (report.precision + report.recall)
                    : 0.0;
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["tp"] = report.tp;
    j["fp"] = report.fp;
    j["fn"] = report.fn;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    j["margin"] = report.margin;
    auto pairs = nlohmann::json::array();
    for (const auto& [d, l] : report.matched_pairs) pairs.push_back({d, l});
    j["matched_pairs"] = pairs;
    return j.dump(2);
}

ScoreArtifact make_artifact(const detector::DetectionResult& result,
                            std::vector<std::pair<std::string, std::string>> provenance) {
    ScoreArtifact artifact;
    artifact.provenance = {
        {"w", std::to_string(result.series.window)},
        {"psi_star", std::to_string(result.psi_star)},
        {"alpha", fmt_full(result.alpha)},
        {"tau", fmt_full(result.tau)},
        {"scoring", detector::scoring_name(result.series.scoring)},
    };
    for (auto& kv : provenance) artifact.provenance.push_back(std::move(kv));
    artifact.scores = result.series.scores;
    artifact.flagged = result.flagged;
    return artifact;
}

void export_scores_csv(const ScoreArtifact& artifact, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "#";
    for (const auto& [k, v] : artifact.provenance) out << " " << k << "=" << v;
    out << "\n";
    out << "index,score,flagged\n";
    std::vector<bool> is_flagged(artifact.scores.size(), false);
    for (std::size_t j : artifact.flagged)
        if (j < is_flagged.size()) is_flagged[j] = true;
    for (std::size_t i = 0; i < artifact.scores.size(); ++i)
        out << i << "," << fmt_full(artifact.scores[i]) << "," << (is_flagged[i] ? 1 : 0)
            << "\n";
}

void export_scores_json(const ScoreArtifact& artifact, const std::string& path) {
    nlohmann::json j;
    auto prov = nlohmann::json::object();
    for (const auto& [k, v] : artifact.provenance) prov[k] = v;
    j["provenance"] = prov;
    j["scores"] = artifact.scores;
    j["flagged"] = artifact.flagged;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

ScoreArtifact load_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ScoreArtifact artifact;
    std::string line;
    std::size_t line_no = 0;
    bool saw_columns = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::stringstream ss(line.substr(1));
            std::string token;
            while (ss >> token) {
                auto eq = token.find('=');
                if (eq != std::string::npos)
                    artifact.provenance.emplace_back(token.substr(0, eq),
                                                     token.substr(eq + 1));
            }
            continue;
        }
        if (!saw_columns) {
            if (line != "index,score,flagged")
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": unexpected column header '" + line + "'");
            saw_columns = true;
            continue;
        }
        std::size_t idx;
        double score;
        int flag;
        if (std::sscanf(line.c_str(), "%zu,%lf,%d", &idx, &score, &flag) != 3)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed score row '" + line + "'");
        if (idx != artifact.scores.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": indices must be dense from 0");
        artifact.scores.push_back(score);
        if (flag) artifact.flagged.push_back(idx);
    }
    if (!saw_columns) throw std::runtime_error(path + ": missing column header");
    return artifact;
}

}  // namespace icid::eval
