// Command-line front end: synthetic data generation, offline/online/point
// detection, artifact evaluation and the scaling benchmark. Every output file
// starts with a "# key=value ..." provenance line so a run can be reproduced
// from its artifact alone.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "icid/bench.hpp"
#include "icid/data.hpp"
#include "icid/detector.hpp"
#include "icid/embedding.hpp"
#include "icid/eval.hpp"
#include "icid/matrix.hpp"

namespace data = icid::data;
namespace detector = icid::detector;
namespace embedding = icid::embedding;
namespace eval = icid::eval;

namespace {

constexpr std::size_t kDefaultT = 200;
const std::vector<std::size_t> kDefaultPsiGrid = {2, 4, 8, 16, 32, 64};

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

std::string resolve_input(const std::string& path) {
    return path == "-" ? "/dev/stdin" : path;
}

struct DetectOptions {
    std::string input;
    std::size_t w = 60;
    std::vector<std::size_t> psi_list = kDefaultPsiGrid;
    double alpha = 2.0;
    std::size_t t = kDefaultT;
    std::uint64_t seed = 1;
    std::string measure = "approx_entropy";
    std::string scoring = "icid";
    std::string kernel = "gaussian";
    double gamma = -1.0;
    double coef0 = 1.0;
    int degree = 3;
    bool no_normalize = false;
    std::string output;
    std::string json_output;
};

void add_detect_options(CLI::App* sub, DetectOptions& o, bool with_scoring,
                        bool with_normalize = true) {
    sub->add_option("--input", o.input, "Input CSV ('-' for standard input)")->required();
    sub->add_option("--w", o.w, "Interval width in points");
    sub->add_option("--psi", o.psi_list, "Candidate subsample sizes");
    sub->add_option("--alpha", o.alpha, "Threshold multiplier for the flag rule");
    sub->add_option("--t", o.t, "Number of partitionings");
    sub->add_option("--seed", o.seed, "Master seed")->envname("ICID_SEED");
    sub->add_option("--measure", o.measure, "Score-series instability measure")
        ->check(CLI::IsMember({"approx_entropy", "apen", "variance", "gini"}));
    if (with_scoring) {
        sub->add_option("--scoring", o.scoring, "Interval dissimilarity")
            ->check(CLI::IsMember({"icid", "icid_mmd", "gcid_mmd"}));
        sub->add_option("--kernel", o.kernel, "Point kernel for gcid_mmd")
            ->check(CLI::IsMember({"gaussian", "laplacian", "chi2", "polynomial", "sigmoid"}));
        sub->add_option("--gamma", o.gamma, "Kernel bandwidth (<0 = median heuristic)");
        sub->add_option("--coef0", o.coef0, "Kernel offset (polynomial, sigmoid)");
        sub->add_option("--degree", o.degree, "Polynomial degree");
    }
    if (with_normalize)
        sub->add_flag("--no-normalize", o.no_normalize, "Skip per-dimension min-max scaling");
}

detector::InstabilityMeasure make_measure(const std::string& name) {
    detector::InstabilityMeasure m;
    m.kind = detector::parse_measure(name);
    return m;
}

data::Provenance common_provenance(const DetectOptions& o, const icid::Matrix& values) {
    return {
        {"input", o.input},
        {"n", std::to_string(values.rows())},
        {"d", std::to_string(values.cols())},
        {"psi_grid", join(o.psi_list)},
        {"t", std::to_string(o.t)},
        {"seed", std::to_string(o.seed)},
        {"measure", detector::measure_name(detector::parse_measure(o.measure))},
        {"normalize", o.no_normalize ? "0" : "1"},
    };
}

int run_synth(const std::string& dataset, std::uint64_t seed, std::size_t points_per_block,
              std::string output, std::string labels_out) {
    std::pair<data::TimeSeries, data::Labels> generated;
    std::size_t ppb = points_per_block;
    if (dataset == "s1") {
        if (ppb == 0) ppb = 300;
        generated = data::gen_s1(seed, ppb);
    } else {
        if (ppb == 0) ppb = 1000;
        generated = data::gen_s2(seed, ppb);
    }
    if (output.empty()) output = dataset + ".csv";
    if (labels_out.empty()) labels_out = dataset + ".labels";

    data::Provenance prov = {{"mode", "synth"},
                             {"dataset", dataset},
                             {"seed", std::to_string(seed)},
                             {"points_per_block", std::to_string(ppb)},
                             {"n", std::to_string(generated.first.values.rows())},
                             {"d", std::to_string(generated.first.values.cols())}};
    data::write_csv(generated.first, output, prov);
    data::write_labels(generated.second, labels_out, prov);
    std::cout << "wrote " << output << " and " << labels_out << "\n";
    return 0;
}

int run_offline(const DetectOptions& o) {
    auto ts = data::load_csv(resolve_input(o.input));
    icid::Matrix values =
        o.no_normalize ? ts.values : data::minmax_normalize(ts).first.values;

    auto scoring = detector::parse_scoring(o.scoring);
    embedding::PointKernelSpec spec;
    spec.family = embedding::parse_kernel_family(o.kernel);
    spec.gamma = o.gamma;
    spec.coef0 = o.coef0;
    spec.degree = o.degree;

    auto result = detector::detect_offline(values, o.w, o.psi_list, o.alpha, o.t, o.seed,
                                           make_measure(o.measure), scoring, &spec);

    data::Provenance prov = common_provenance(o, values);
    prov.insert(prov.begin(), {"mode", "offline"});
    if (scoring == detector::Scoring::gcid_mmd) {
        auto resolved = embedding::resolve_kernel_spec(spec, values, o.seed);
        prov.push_back({"kernel", embedding::kernel_family_name(resolved.family)});
        prov.push_back({"gamma", fmt_full(resolved.gamma)});
        if (resolved.family == embedding::PointKernelFamily::polynomial ||
            resolved.family == embedding::PointKernelFamily::sigmoid) {
            prov.push_back({"coef0", fmt_full(resolved.coef0)});
            prov.push_back({"degree", std::to_string(resolved.degree)});
        }
    }

    auto artifact = eval::make_artifact(result, std::move(prov));
    std::string output = o.output.empty() ? "scores.csv" : o.output;
    eval::export_scores_csv(artifact, output);
    if (!o.json_output.empty()) eval::export_scores_json(artifact, o.json_output);

    std::cout << "psi_star=" << result.psi_star << " tau=" << fmt_full(result.tau)
              << " flagged=" << join(result.flagged) << "\n";
    return 0;
}

int run_online(const DetectOptions& o, std::size_t reference_rows) {
    auto ts = data::load_csv(resolve_input(o.input));
    // The stream is scaled as a whole before the replay, exactly like the
    // offline path, so the two modes stay comparable on the same file.
    icid::Matrix values =
        o.no_normalize ? ts.values : data::minmax_normalize(ts).first.values;
    const std::size_t n = values.rows();
    std::size_t k = reference_rows == 0 ? n / 2 : reference_rows;
    if (k > n) throw std::invalid_argument("reference window exceeds the stream length");

    auto state = detector::init_online(values.slice_rows(0, k), o.w, o.psi_list,
                                       o.alpha, o.t, o.seed, make_measure(o.measure));

    std::string output = o.output.empty() ? "online_scores.csv" : o.output;
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write " + output);
    data::Provenance prov = common_provenance(o, ts.values);
    prov.insert(prov.begin(), {"mode", "online"});
    prov.push_back({"w", std::to_string(o.w)});
    prov.push_back({"psi_star", std::to_string(state.psi_star())});
    prov.push_back({"alpha", fmt_full(o.alpha)});
    prov.push_back({"tau", fmt_full(state.reference_threshold())});
    prov.push_back({"scoring", "icid"});
    prov.push_back({"reference_rows", std::to_string(k)});
    out << "#";
    for (const auto& [key, value] : prov) out << " " << key << "=" << value;
    out << "\nindex,score,flagged\n";

    // The whole stream is replayed from its start in w-sized steps; the first
    // interval has no predecessor and scores 0 by the same convention as the
    // offline series. Each row is flushed as soon as its score exists.
    const std::size_t steps = n / o.w;
    std::size_t flagged_count = 0;
    for (std::size_t j = 0; j < steps; ++j) {
        icid::Matrix block = values.slice_rows(j * o.w, (j + 1) * o.w);
        double score = 0.0;
        if (j == 0) {
            state.append(block);
        } else {
            score = detector::online_step(state, block);
        }
        bool flag = j >= 1 && score > state.reference_threshold();
        flagged_count += flag ? 1 : 0;
        out << j << "," << fmt_full(score) << "," << (flag ? 1 : 0) << "\n";
        out.flush();
    }
    std::cout << "psi_star=" << state.psi_star()
              << " tau=" << fmt_full(state.reference_threshold()) << " steps=" << steps
              << " flagged_steps=" << flagged_count << "\n";
    return 0;
}

int run_cpd(const DetectOptions& o, std::size_t psi) {
    auto ts = data::load_csv(resolve_input(o.input));
    icid::Matrix values =
        o.no_normalize ? ts.values : data::minmax_normalize(ts).first.values;

    if (psi == 0) {
        // No explicit cell count: reuse the interval-mode selection.
        auto [psi_star, series] = detector::select_psi(values, o.w, o.psi_list, o.t,
                                                       o.seed, make_measure(o.measure));
        psi = psi_star;
    }
    auto scores = detector::score_points_cpd(values, o.w, psi, o.t, o.seed);
    double tau = detector::threshold(scores, o.alpha);
    auto flagged = detector::flags_above(scores, tau);

    eval::ScoreArtifact artifact;
    artifact.provenance = common_provenance(o, values);
    artifact.provenance.insert(artifact.provenance.begin(), {"mode", "cpd"});
    artifact.provenance.push_back({"w", std::to_string(o.w)});
    artifact.provenance.push_back({"psi", std::to_string(psi)});
    artifact.provenance.push_back({"alpha", fmt_full(o.alpha)});
    artifact.provenance.push_back({"tau", fmt_full(tau)});
    artifact.scores = scores;
    artifact.flagged = flagged;

    std::string output = o.output.empty() ? "point_scores.csv" : o.output;
    eval::export_scores_csv(artifact, output);
    if (!o.json_output.empty()) eval::export_scores_json(artifact, o.json_output);
    std::cout << "psi=" << psi << " tau=" << fmt_full(tau)
              << " flagged_points=" << flagged.size() << "\n";
    return 0;
}

int run_eval(const std::string& scores_path, const std::string& labels_path,
             std::size_t margin, bool margin_set, const std::string& anchor,
             std::size_t w_override) {
    auto artifact = eval::load_scores_csv(scores_path);
    auto labels = data::load_labels(labels_path);

    std::string mode = "offline";
    std::size_t w = w_override;
    for (const auto& [k, v] : artifact.provenance) {
        if (k == "mode") mode = v;
        if (k == "w" && w == 0) w = static_cast<std::size_t>(std::stoull(v));
    }

    std::vector<std::size_t> detections;
    if (mode == "cpd") {
        detections = artifact.flagged;  // already time indices
    } else {
        if (w == 0)
            throw std::invalid_argument(
                "interval width unknown: artifact has no w and --w was not given");
        detections = eval::flags_to_times(artifact.flagged, w, eval::parse_anchor(anchor));
    }
    if (!margin_set) {
        if (w == 0)
            throw std::invalid_argument("no margin given and no interval width to default to");
        margin = w;
    }

    auto report = eval::f1_with_margin(detections, labels.change_points, margin);
    auto j = nlohmann::json::parse(eval::report_to_json(report));
    j["provenance"] = {{"mode", "eval"},
                       {"scores", scores_path},
                       {"labels", labels_path},
                       {"anchor", anchor},
                       {"artifact_mode", mode},
                       {"w", w}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_bench_mode(const std::vector<std::size_t>& sizes, std::size_t w,
                   const std::vector<std::size_t>& psi_list, std::size_t t,
                   std::uint64_t seed) {
    std::cout << "# mode=bench sizes=" << join(sizes) << " w=" << w
              << " psi_grid=" << join(psi_list) << " t=" << t << " seed=" << seed << "\n";
    auto result = icid::bench::run_bench(sizes, w, psi_list, t, seed);
    std::cout << icid::bench::format_table(result);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming change-interval detection with isolation kernels"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read option defaults from a TOML/INI file");

    // synth
    std::string synth_dataset;
    std::uint64_t synth_seed = 1;
    std::size_t synth_ppb = 0;
    std::string synth_output, synth_labels;
    auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic stream");
    synth->add_option("--dataset", synth_dataset, "s1 (scale shifts) or s2 (covariance shifts)")
        ->required()
        ->check(CLI::IsMember({"s1", "s2"}));
    synth->add_option("--seed", synth_seed, "Generator seed")->envname("ICID_SEED");
    synth->add_option("--points-per-block", synth_ppb, "Block length (0 = dataset default)");
    synth->add_option("--output", synth_output, "Output CSV (default <dataset>.csv)");
    synth->add_option("--labels-out", synth_labels, "Labels file (default <dataset>.labels)");

    // offline
    DetectOptions off;
    auto* offline = app.add_subcommand("offline", "Score a whole series interval by interval");
    add_detect_options(offline, off, true);
    offline->add_option("--output", off.output, "Score CSV (default scores.csv)");
    offline->add_option("--json", off.json_output, "Also write the artifact as JSON");

    // online
    DetectOptions onl;
    std::size_t reference_rows = 0;
    auto* online = app.add_subcommand("online", "Replay a stream through the rolling buffer");
    add_detect_options(online, onl, false);
    online->add_option("--reference-rows", reference_rows,
                       "Rows frozen as the reference/buffer size (0 = first half)");
    online->add_option("--output", onl.output, "Per-step score CSV (default online_scores.csv)");

    // cpd
    DetectOptions cpd;
    std::size_t cpd_psi = 0;
    auto* cpd_cmd = app.add_subcommand("cpd", "Point-level change scores (sliding cut)");
    add_detect_options(cpd_cmd, cpd, false);
    cpd_cmd->add_option("--point-psi", cpd_psi, "Cell count (0 = reuse interval-mode selection)");
    cpd_cmd->add_option("--output", cpd.output, "Per-point score CSV (default point_scores.csv)");
    cpd_cmd->add_option("--json", cpd.json_output, "Also write the artifact as JSON");

    // eval
    std::string eval_scores, eval_labels, eval_anchor = "start";
    std::size_t eval_margin = 0, eval_w = 0;
    auto* eval_cmd = app.add_subcommand("eval", "Match flagged detections against labels");
    eval_cmd->add_option("--scores", eval_scores, "Score artifact CSV")->required();
    eval_cmd->add_option("--labels", eval_labels, "Ground-truth labels file")->required();
    auto* margin_opt =
        eval_cmd->add_option("--margin", eval_margin, "Match tolerance in points (default w)");
    eval_cmd->add_option("--anchor", eval_anchor, "Detection time within a flagged interval")
        ->check(CLI::IsMember({"start", "mid", "end"}));
    eval_cmd->add_option("--w", eval_w, "Interval width override when the artifact lacks one");

    // bench
    std::vector<std::size_t> bench_sizes = {12500, 25000, 50000, 100000};
    std::size_t bench_w = 60, bench_t = kDefaultT;
    std::uint64_t bench_seed = 1;
    std::vector<std::size_t> bench_psi = kDefaultPsiGrid;
    auto* bench = app.add_subcommand("bench", "Time offline and online runs across sizes");
    bench->add_option("--sizes", bench_sizes, "Stream lengths to time");
    bench->add_option("--w", bench_w, "Interval width");
    bench->add_option("--t", bench_t, "Number of partitionings");
    bench->add_option("--psi", bench_psi, "Candidate subsample sizes");
    bench->add_option("--seed", bench_seed, "Master seed")->envname("ICID_SEED");

    try {
        app.parse(argc, argv);
        if (synth->parsed())
            return run_synth(synth_dataset, synth_seed, synth_ppb, synth_output, synth_labels);
        if (offline->parsed()) return run_offline(off);
        if (online->parsed()) return run_online(onl, reference_rows);
        if (cpd_cmd->parsed()) return run_cpd(cpd, cpd_psi);
        if (eval_cmd->parsed())
            return run_eval(eval_scores, eval_labels, eval_margin, margin_opt->count() > 0,
                            eval_anchor, eval_w);
        if (bench->parsed())
            return run_bench_mode(bench_sizes, bench_w, bench_psi, bench_t, bench_seed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help exits clean, bad flags are a usage error
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
