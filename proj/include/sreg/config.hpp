#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sreg/criteria.hpp"
#include "sreg/dataset.hpp"
#include "sreg/trainer.hpp"

namespace sreg {

// JSON experiment configuration. Every block is schema-checked and unknown
// keys are rejected; parse -> serialize -> parse is the identity.

struct DatasetBlock {
    std::string name = "mnist";  // mnist | fashion-mnist | synth
    std::string path;            // IDX directory; empty -> $SREG_DATA_DIR/<name>
    int train_subset = 10000;    // 0 = full split
    int test_subset = 2000;      // 0 = full split
    std::optional<std::uint64_t> seed;  // absent -> derived from the experiment seed
    int classes = 10;            // synth only
};

struct ArchBlock {
    std::vector<int> conv_channels{16, 32};
    std::vector<int> fc_widths{128, 10};
    int kernel = 5;
};

struct CriterionBlock {
    CriterionId id = CriterionId::l2;
    Grouping grouping = Grouping::feature_wise;
    HierAxis hier_axis = HierAxis::feature_based;
    double alpha = 0.5;
    double m = 0.8;
    double eps = 1e-12;
};

struct TrainingBlock {
    double lr = 0.05;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    int epochs = 30;
    int batch_size = 256;
    double lambda = 0.0;
    std::vector<double> lambda_grid;  // non-empty selects grid mode
};

struct AnalysisBlock {
    double tau = 1e-3;
};

struct ExperimentConfig {
    DatasetBlock dataset;
    ArchBlock arch;
    CriterionBlock criterion;
    TrainingBlock training;
    AnalysisBlock analysis;
    std::string output_dir = "out";
    std::uint64_t seed = 42;

    std::uint64_t dataset_seed() const;  // explicit value or derived from seed
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

CriterionSpec make_criterion(const CriterionBlock& block);
TrainConfig make_train_config(const ExperimentConfig& cfg);

// Loads (or synthesizes) the train/test pair described by the dataset block,
// applying the env-var fallback for the path and the configured subsetting.
std::pair<Dataset, Dataset> load_experiment_data(const ExperimentConfig& cfg);

}  // namespace sreg
