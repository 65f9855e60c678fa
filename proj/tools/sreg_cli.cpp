// sreg: train/grid/compare/analyze front end for the sparse regularization
// experiment harness. Exit codes: 0 ok, 2 config error, 3 data error,
// 4 numeric divergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>

#include "sreg/checkpoint.hpp"
#include "sreg/config.hpp"
#include "sreg/io_util.hpp"
#include "sreg/threads.hpp"
#include "sreg/visualize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    std::optional<double> tau;
    bool verbose = false;
};

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

sreg::ExperimentConfig load_with_overrides(const CommonOpts& opts) {
    sreg::ExperimentConfig cfg = sreg::load_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.tau) {
        if (!(*opts.tau > 0.0)) throw sreg::config_error("--tau must be > 0");
        cfg.analysis.tau = *opts.tau;
    }
    return cfg;
}

json sparsity_json(const sreg::SparsityReport& rep) {
    json layers = json::array();
    for (const sreg::LayerSparsity& ls : rep.per_layer)
        layers.push_back({{"layer_id", ls.layer_id},
                          {"kind", sreg::to_string(ls.kind)},
                          {"oc", ls.oc},
                          {"ic", ls.ic},
                          {"kh", ls.kh},
                          {"kw", ls.kw},
                          {"zeros", ls.zeros},
                          {"weights", ls.weights},
                          {"sparsity", ls.sparsity},
                          {"dead_filters", ls.dead_filters},
                          {"dead_out", ls.dead_out},
                          {"dead_in", ls.dead_in}});
    return {{"tau", rep.tau},
            {"zeros", rep.zeros},
            {"weights", rep.weights},
            {"overall_sparsity", rep.overall_sparsity},
            {"per_layer", layers}};
}

// result.json + report.csv + weights.sreg + one PGM per conv layer
void write_run_artifacts(const std::string& dir, const sreg::ExperimentConfig& cfg,
                         const sreg::RunResult& res) {
    fs::create_directories(dir);

    json j;
    j["config"] = json::parse(sreg::serialize_config(cfg));
    j["lambda"] = res.lambda;
    j["test_accuracy"] = res.test_accuracy;
    j["pruned_test_accuracy"] = res.pruned_test_accuracy;
    j["train_loss_curve"] = res.train_loss_curve;
    j["penalty_curve"] = res.penalty_curve;
    j["objective_curve"] = res.objective_curve;
    j["sparsity"] = sparsity_json(res.sparsity);
    j["train_seconds"] = res.train_seconds;
    j["timestamp"] = timestamp_utc();
    sreg::atomic_write(dir + "/result.json", j.dump(2) + "\n");

    sreg::atomic_write(dir + "/report.csv", sreg::report_csv(res.sparsity));
    sreg::save_checkpoint(dir + "/weights.sreg", res.final_weights);
    for (const sreg::WeightTensor& w : res.final_weights)
        if (w.kind == sreg::LayerParamKind::conv)
            sreg::export_filter_grid(w,
                                     dir + "/filters_layer" + std::to_string(w.layer_id) + ".pgm");
}

std::string lambda_dir_name(double lambda) {
    std::ostringstream ss;
    ss << "lambda_" << lambda;
    return ss.str();
}

int run_train(const CommonOpts& opts) {
    sreg::ExperimentConfig cfg = load_with_overrides(opts);
    if (!cfg.training.lambda_grid.empty())
        throw sreg::config_error(
            "config has training.lambda_grid; use the grid subcommand (or set training.lambda)");
    if (opts.jobs > 0) sreg::set_threads(opts.jobs);

    auto [train_ds, test_ds] = sreg::load_experiment_data(cfg);
    sreg::TrainConfig tc = sreg::make_train_config(cfg);
    tc.verbose = opts.verbose;
    const sreg::RunResult res = sreg::train(tc, train_ds, test_ds);
    write_run_artifacts(cfg.output_dir, cfg, res);

    std::printf("criterion=%s lambda=%g accuracy=%.4f pruned_accuracy=%.4f sparsity=%.4f -> %s\n",
                sreg::to_string(cfg.criterion.id).c_str(), res.lambda, res.test_accuracy,
                res.pruned_test_accuracy, res.sparsity.overall_sparsity, cfg.output_dir.c_str());
    return 0;
}

int run_grid(const CommonOpts& opts) {
    sreg::ExperimentConfig cfg = load_with_overrides(opts);
    std::vector<double> grid = cfg.training.lambda_grid;
    if (grid.empty()) grid.push_back(cfg.training.lambda);

    auto [train_ds, test_ds] = sreg::load_experiment_data(cfg);
    sreg::TrainConfig tc = sreg::make_train_config(cfg);
    tc.verbose = opts.verbose;
    const sreg::GridResult gr =
        sreg::grid_search(tc, grid, train_ds, test_ds, std::max(1, opts.jobs));

    std::ostringstream summary;
    summary << "lambda,accuracy,pruned_accuracy,sparsity,best\n";
    for (std::size_t i = 0; i < gr.entries.size(); ++i) {
        const sreg::GridEntry& e = gr.entries[i];
        if (!e.ok) {
            std::fprintf(stderr, "lambda %g failed: %s\n", e.lambda, e.error.c_str());
            summary << e.lambda << ",,,,0\n";
            continue;
        }
        sreg::ExperimentConfig sub = cfg;
        sub.training.lambda = e.lambda;
        sub.training.lambda_grid.clear();
        sub.output_dir = cfg.output_dir + "/" + lambda_dir_name(e.lambda);
        write_run_artifacts(sub.output_dir, sub, e.result);
        char row[160];
        std::snprintf(row, sizeof row, "%g,%.6f,%.6f,%.6f,%d\n", e.lambda,
                      e.result.test_accuracy, e.result.pruned_test_accuracy,
                      e.result.sparsity.overall_sparsity,
                      static_cast<int>(i) == gr.best_index ? 1 : 0);
        summary << row;
    }
    sreg::atomic_write(cfg.output_dir + "/summary.csv", summary.str());

    if (gr.best_index < 0) throw sreg::numeric_error("every grid run failed");
    const sreg::GridEntry& best = gr.entries[gr.best_index];
    std::printf("best lambda=%g accuracy=%.4f sparsity=%.4f -> %s\n", best.lambda,
                best.result.test_accuracy, best.result.sparsity.overall_sparsity,
                cfg.output_dir.c_str());
    return 0;
}

struct CompareRow {
    std::string method;
    std::string grouping;
    double lambda = 0.0;
    double accuracy = 0.0;
    double sparsity = 0.0;
    int order = 0;  // canonical criterion order
    bool top2 = false;
};

CompareRow row_from_result(const std::string& path) {
    json j;
    try {
        j = json::parse(sreg::read_text_file(path));
    } catch (const json::exception& e) {
        throw sreg::data_error("cannot parse " + path + ": " + e.what());
    }
    CompareRow row;
    try {
        const json& crit = j.at("config").at("criterion");
        row.method = crit.at("id").get<std::string>();
        const sreg::CriterionId id = sreg::parse_criterion_id(row.method);
        if (id == sreg::CriterionId::l1 || id == sreg::CriterionId::l2)
            row.grouping = "-";
        else if (sreg::is_hierarchical(id))
            row.grouping = crit.at("hier_axis").get<std::string>();
        else
            row.grouping = crit.at("grouping").get<std::string>();
        const auto& ids = sreg::all_criterion_ids();
        row.order = static_cast<int>(std::find(ids.begin(), ids.end(), id) - ids.begin());
        row.lambda = j.at("lambda").get<double>();
        row.accuracy = j.at("test_accuracy").get<double>();
        row.sparsity = j.at("sparsity").at("overall_sparsity").get<double>();
    } catch (const json::exception& e) {
        throw sreg::data_error("missing fields in " + path + ": " + e.what());
    }
    return row;
}

// A run directory holds result.json directly; a grid directory holds
// lambda_*/result.json, from which the best (accuracy, then sparsity) is taken.
CompareRow row_from_dir(const std::string& dir) {
    if (fs::exists(fs::path(dir) / "result.json")) return row_from_result(dir + "/result.json");
    std::vector<CompareRow> subs;
    if (fs::is_directory(dir))
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_directory()) continue;
            const fs::path sub = entry.path() / "result.json";
            if (fs::exists(sub)) subs.push_back(row_from_result(sub.string()));
        }
    if (subs.empty()) throw sreg::data_error("no result.json under " + dir);
    std::sort(subs.begin(), subs.end(), [](const CompareRow& a, const CompareRow& b) {
        if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
        if (a.sparsity != b.sparsity) return a.sparsity > b.sparsity;
        return a.lambda < b.lambda;
    });
    return subs.front();
}

int run_compare(const std::vector<std::string>& dirs, const std::string& out_file) {
    std::vector<CompareRow> rows;
    for (const std::string& d : dirs) rows.push_back(row_from_dir(d));

    // flag the two sparsest rows (Table-II boldface equivalent)
    std::vector<int> by_sparsity(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) by_sparsity[i] = static_cast<int>(i);
    std::sort(by_sparsity.begin(), by_sparsity.end(), [&](int a, int b) {
        if (rows[a].sparsity != rows[b].sparsity) return rows[a].sparsity > rows[b].sparsity;
        return rows[a].order < rows[b].order;
    });
    for (std::size_t k = 0; k < by_sparsity.size() && k < 2; ++k) rows[by_sparsity[k]].top2 = true;

    std::sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
        if (a.order != b.order) return a.order < b.order;
        return a.lambda < b.lambda;
    });

    std::ostringstream csv;
    csv << "method,grouping,lambda,accuracy,sparsity,top2_flag\n";
    for (const CompareRow& r : rows) {
        char row[160];
        std::snprintf(row, sizeof row, "%s,%s,%g,%.6f,%.6f,%d\n", r.method.c_str(),
                      r.grouping.c_str(), r.lambda, r.accuracy, r.sparsity, r.top2 ? 1 : 0);
        csv << row;
    }
    sreg::atomic_write(out_file, csv.str());
    std::printf("wrote %s (%zu rows)\n", out_file.c_str(), rows.size());
    return 0;
}

int run_analyze(const std::string& weights_file, double tau, const std::string& out_dir) {
    if (!(tau > 0.0)) throw sreg::config_error("--tau must be > 0");
    const std::vector<sreg::WeightTensor> weights = sreg::load_checkpoint(weights_file);
    const sreg::SparsityReport rep = sreg::sparsity_report(weights, tau);
    fs::create_directories(out_dir);
    sreg::atomic_write(out_dir + "/report.csv", sreg::report_csv(rep));
    for (const sreg::WeightTensor& w : weights)
        if (w.kind == sreg::LayerParamKind::conv)
            sreg::export_filter_grid(
                w, out_dir + "/filters_layer" + std::to_string(w.layer_id) + ".pgm");
    std::printf("tau=%g overall_sparsity=%.6f layers=%zu -> %s\n", tau, rep.overall_sparsity,
                rep.per_layer.size(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"group sparse regularization experiments for CNNs"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> compare_dirs;
    std::string compare_out = "table.csv";
    std::string weights_file;
    double analyze_tau = 1e-3;
    std::string analyze_out = ".";

    CLI::App* train = app.add_subcommand("train", "single training run from a JSON config");
    train->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    train->add_option("--out", opts.out_dir, "output directory (overrides config)");
    train->add_option("--jobs", opts.jobs, "kernel threads");
    train->add_option("--seed", opts.seed, "seed override");
    train->add_option("--tau", opts.tau, "sparsity threshold override");
    train->add_flag("--verbose", opts.verbose, "per-epoch progress on stderr");

    CLI::App* grid = app.add_subcommand("grid", "lambda grid search from a JSON config");
    grid->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    grid->add_option("--out", opts.out_dir, "output directory (overrides config)");
    grid->add_option("--jobs", opts.jobs, "concurrent trials");
    grid->add_option("--seed", opts.seed, "seed override");
    grid->add_option("--tau", opts.tau, "sparsity threshold override");
    grid->add_flag("--verbose", opts.verbose, "per-epoch progress on stderr");

    CLI::App* compare = app.add_subcommand("compare", "comparison table from run directories");
    compare->add_option("dirs", compare_dirs, "run or grid output directories")
        ->required()
        ->expected(-1);
    compare->add_option("--out", compare_out, "output CSV path");

    CLI::App* analyze = app.add_subcommand("analyze", "re-analyze a saved weight checkpoint");
    analyze->add_option("weights", weights_file, "weights.sreg checkpoint")->required();
    analyze->add_option("--tau", analyze_tau, "sparsity threshold");
    analyze->add_option("--out", analyze_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags/usage are configuration errors
    }

    try {
        if (train->parsed()) return run_train(opts);
        if (grid->parsed()) return run_grid(opts);
        if (compare->parsed()) return run_compare(compare_dirs, compare_out);
        if (analyze->parsed()) return run_analyze(weights_file, analyze_tau, analyze_out);
        std::fprintf(stderr, "no subcommand given\n");
        return 2;
    } catch (const sreg::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const sreg::data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const sreg::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
