#include "sreg/config.hpp"

#include <cstdlib>

#include <json.hpp>

#include "sreg/errors.hpp"
#include "sreg/io_util.hpp"

namespace sreg {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& block,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw config_error("config: '" + block + "' must be an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw config_error("config: unknown key '" + item.key() + "' in " + block);
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

DatasetBlock parse_dataset(const json& j) {
    check_keys(j, "dataset", {"name", "path", "train_subset", "test_subset", "seed", "classes"});
    DatasetBlock b;
    b.name = get_or<std::string>(j, "name", b.name);
    if (b.name != "mnist" && b.name != "fashion-mnist" && b.name != "synth")
        throw config_error("config: dataset.name must be mnist, fashion-mnist, or synth");
    b.path = get_or<std::string>(j, "path", b.path);
    b.train_subset = get_or<int>(j, "train_subset", b.train_subset);
    b.test_subset = get_or<int>(j, "test_subset", b.test_subset);
    if (b.train_subset < 0 || b.test_subset < 0)
        throw config_error("config: dataset subset sizes must be >= 0");
    if (j.contains("seed")) b.seed = j.at("seed").get<std::uint64_t>();
    b.classes = get_or<int>(j, "classes", b.classes);
    if (b.classes < 2 || b.classes > 10)
        throw config_error("config: dataset.classes must be in [2,10]");
    return b;
}

ArchBlock parse_arch(const json& j) {
    check_keys(j, "arch", {"conv_channels", "fc_widths", "kernel"});
    ArchBlock b;
    b.conv_channels = get_or<std::vector<int>>(j, "conv_channels", b.conv_channels);
    b.fc_widths = get_or<std::vector<int>>(j, "fc_widths", b.fc_widths);
    b.kernel = get_or<int>(j, "kernel", b.kernel);
    if (b.fc_widths.empty()) throw config_error("config: arch.fc_widths must not be empty");
    if (b.kernel < 1 || b.kernel % 2 == 0)
        throw config_error("config: arch.kernel must be odd and >= 1");
    for (int c : b.conv_channels)
        if (c < 1) throw config_error("config: arch.conv_channels entries must be >= 1");
    for (int c : b.fc_widths)
        if (c < 1) throw config_error("config: arch.fc_widths entries must be >= 1");
    return b;
}

CriterionBlock parse_criterion(const json& j) {
    check_keys(j, "criterion", {"id", "grouping", "hier_axis", "alpha", "m", "eps"});
    CriterionBlock b;
    if (!j.contains("id")) throw config_error("config: criterion.id is required");
    b.id = parse_criterion_id(j.at("id").get<std::string>());
    if (j.contains("grouping")) b.grouping = parse_grouping(j.at("grouping").get<std::string>());
    if (j.contains("hier_axis")) b.hier_axis = parse_hier_axis(j.at("hier_axis").get<std::string>());
    b.alpha = get_or<double>(j, "alpha", b.alpha);
    b.m = get_or<double>(j, "m", b.m);
    b.eps = get_or<double>(j, "eps", b.eps);
    if (b.alpha < 0.0 || b.alpha > 1.0) throw config_error("config: criterion.alpha must be in [0,1]");
    if (b.m < 0.0 || b.m > 1.0) throw config_error("config: criterion.m must be in [0,1]");
    if (!(b.eps > 0.0)) throw config_error("config: criterion.eps must be > 0");
    return b;
}

TrainingBlock parse_training(const json& j) {
    check_keys(j, "training",
               {"lr", "momentum", "weight_decay", "epochs", "batch_size", "lambda", "lambda_grid"});
    TrainingBlock b;
    b.lr = get_or<double>(j, "lr", b.lr);
    b.momentum = get_or<double>(j, "momentum", b.momentum);
    b.weight_decay = get_or<double>(j, "weight_decay", b.weight_decay);
    b.epochs = get_or<int>(j, "epochs", b.epochs);
    b.batch_size = get_or<int>(j, "batch_size", b.batch_size);
    if (j.contains("lambda") && j.contains("lambda_grid"))
        throw config_error("config: give training.lambda or training.lambda_grid, not both");
    b.lambda = get_or<double>(j, "lambda", b.lambda);
    b.lambda_grid = get_or<std::vector<double>>(j, "lambda_grid", b.lambda_grid);
    if (!(b.lr > 0.0)) throw config_error("config: training.lr must be > 0");
    if (b.momentum < 0.0 || b.momentum >= 1.0)
        throw config_error("config: training.momentum must be in [0,1)");
    if (b.batch_size < 1) throw config_error("config: training.batch_size must be >= 1");
    if (b.epochs < 1) throw config_error("config: training.epochs must be >= 1");
    if (b.lambda < 0.0) throw config_error("config: training.lambda must be >= 0");
    for (double l : b.lambda_grid)
        if (l < 0.0) throw config_error("config: training.lambda_grid entries must be >= 0");
    return b;
}

AnalysisBlock parse_analysis(const json& j) {
    check_keys(j, "analysis", {"tau"});
    AnalysisBlock b;
    b.tau = get_or<double>(j, "tau", b.tau);
    if (!(b.tau > 0.0)) throw config_error("config: analysis.tau must be > 0");
    return b;
}

}  // namespace

std::uint64_t ExperimentConfig::dataset_seed() const {
    return dataset.seed ? *dataset.seed : derive_seed(seed, 11);
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        check_keys(j, "config root",
                   {"dataset", "arch", "criterion", "training", "analysis", "output_dir", "seed"});
        ExperimentConfig cfg;
        if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"));
        if (j.contains("arch")) cfg.arch = parse_arch(j.at("arch"));
        if (!j.contains("criterion")) throw config_error("config: criterion block is required");
        cfg.criterion = parse_criterion(j.at("criterion"));
        if (j.contains("training")) cfg.training = parse_training(j.at("training"));
        if (j.contains("analysis")) cfg.analysis = parse_analysis(j.at("analysis"));
        cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);
        cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
        return cfg;
    } catch (const json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const data_error&) {
        throw config_error("config: cannot read " + path);
    }
    return parse_config(text);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["dataset"] = {{"name", cfg.dataset.name},
                    {"path", cfg.dataset.path},
                    {"train_subset", cfg.dataset.train_subset},
                    {"test_subset", cfg.dataset.test_subset},
                    {"classes", cfg.dataset.classes}};
    if (cfg.dataset.seed) j["dataset"]["seed"] = *cfg.dataset.seed;
    j["arch"] = {{"conv_channels", cfg.arch.conv_channels},
                 {"fc_widths", cfg.arch.fc_widths},
                 {"kernel", cfg.arch.kernel}};
    j["criterion"] = {{"id", to_string(cfg.criterion.id)},
                      {"grouping", to_string(cfg.criterion.grouping)},
                      {"hier_axis", to_string(cfg.criterion.hier_axis)},
                      {"alpha", cfg.criterion.alpha},
                      {"m", cfg.criterion.m},
                      {"eps", cfg.criterion.eps}};
    j["training"] = {{"lr", cfg.training.lr},
                     {"momentum", cfg.training.momentum},
                     {"weight_decay", cfg.training.weight_decay},
                     {"epochs", cfg.training.epochs},
                     {"batch_size", cfg.training.batch_size}};
    if (cfg.training.lambda_grid.empty())
        j["training"]["lambda"] = cfg.training.lambda;
    else
        j["training"]["lambda_grid"] = cfg.training.lambda_grid;
    j["analysis"] = {{"tau", cfg.analysis.tau}};
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

CriterionSpec make_criterion(const CriterionBlock& block) {
    CriterionSpec spec;
    spec.id = block.id;
    spec.grouping = block.grouping;
    spec.hier_axis = block.hier_axis;
    spec.alpha = block.alpha;
    spec.m = block.m;
    spec.eps = block.eps;
    return spec;
}

TrainConfig make_train_config(const ExperimentConfig& cfg) {
    TrainConfig t;
    t.conv_channels = cfg.arch.conv_channels;
    t.fc_widths = cfg.arch.fc_widths;
    t.kernel = cfg.arch.kernel;
    t.criterion = make_criterion(cfg.criterion);
    t.lambda = cfg.training.lambda;
    t.epochs = cfg.training.epochs;
    t.batch_size = cfg.training.batch_size;
    t.lr = cfg.training.lr;
    t.momentum = cfg.training.momentum;
    t.weight_decay = cfg.training.weight_decay;
    t.seed = cfg.seed;
    t.tau = cfg.analysis.tau;
    return t;
}

std::pair<Dataset, Dataset> load_experiment_data(const ExperimentConfig& cfg) {
    const std::uint64_t dseed = cfg.dataset_seed();
    if (cfg.dataset.name == "synth") {
        const int n_train = cfg.dataset.train_subset > 0 ? cfg.dataset.train_subset : 2000;
        const int n_test = cfg.dataset.test_subset > 0 ? cfg.dataset.test_subset : 500;
        return {synth_blobs(n_train, cfg.dataset.classes, dseed),
                synth_blobs(n_test, cfg.dataset.classes, derive_seed(dseed, 1))};
    }
    std::string dir = cfg.dataset.path;
    if (dir.empty()) {
        const char* env = std::getenv("SREG_DATA_DIR");
        if (!env || !*env)
            throw data_error("no dataset.path configured and SREG_DATA_DIR is not set");
        dir = std::string(env) + "/" + cfg.dataset.name;
    }
    auto [train, test] = load_dataset_dir(dir, cfg.dataset.name);
    if (cfg.dataset.train_subset > 0 && cfg.dataset.train_subset < train.n())
        train = subset(train, cfg.dataset.train_subset, dseed);
    if (cfg.dataset.test_subset > 0 && cfg.dataset.test_subset < test.n())
        test = subset(test, cfg.dataset.test_subset, derive_seed(dseed, 1));
    return {std::move(train), std::move(test)};
}

}  // namespace sreg
