#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sreg/criteria.hpp"
#include "sreg/dataset.hpp"
#include "sreg/layers.hpp"
#include "sreg/sparsity.hpp"

namespace sreg {

struct TrainConfig {
    // architecture (conv k, stride 1, pad k/2, relu, 2x2 maxpool per width)
    std::vector<int> conv_channels{16, 32};
    std::vector<int> fc_widths{128, 10};
    int kernel = 5;

    CriterionSpec criterion{};
    double lambda = 0.0;

    int epochs = 30;
    int batch_size = 256;
    double lr = 0.05;  // constant, no schedule
    double momentum = 0.9;
    double weight_decay = 1e-4;
    std::uint64_t seed = 42;

    double tau = 1e-3;    // sparsity threshold for the final report
    int eval_batch = 512;
    bool verbose = false;  // per-epoch progress lines on stderr
};

struct RunResult {
    TrainConfig config;  // echo
    double lambda = 0.0;
    double test_accuracy = 0.0;
    double pruned_test_accuracy = 0.0;  // after zeroing conv |w| < tau
    std::vector<double> train_loss_curve;  // mean batch loss per epoch
    std::vector<double> penalty_curve;     // sum_l R(W^l) per epoch (conv layers)
    std::vector<double> objective_curve;   // loss + lambda * penalty
    SparsityReport sparsity;
    std::vector<WeightTensor> final_weights;          // all parameter tensors
    std::vector<std::vector<double>> final_biases;    // parallel to final_weights
    double train_seconds = 0.0;
};

// Eq.-1 objective: mini-batch SGD with momentum, weight decay on all weight
// tensors, and lambda-scaled criterion subgradients on conv weights only
// (biases receive neither). Deterministic for a fixed seed.
RunResult train(const TrainConfig& cfg, const Dataset& train_ds, const Dataset& test_ds);

// Fraction of correctly predicted labels.
double evaluate(const Network& net, const Dataset& ds, int eval_batch = 512);

// sum_l R(W^l) over the conv tensors (OICSR couples consecutive layers and
// adds each tensor's L1 part once).
double regularization_total(const CriterionSpec& spec,
                            const std::vector<const WeightTensor*>& convs);
// lambda-scaled subgradients accumulated into the matching buffers.
void regularization_add_subgradients(const CriterionSpec& spec, double lambda,
                                     const std::vector<const WeightTensor*>& convs,
                                     const std::vector<std::vector<double>*>& grads);

struct GridEntry {
    double lambda = 0.0;
    bool ok = false;
    std::string error;  // failure message when !ok
    RunResult result;
};

struct GridResult {
    std::vector<GridEntry> entries;  // ascending lambda
    int best_index = -1;  // highest accuracy, ties broken by higher sparsity
};

// One independent run per lambda (same seed), up to `parallelism` at a time.
// Per-run failures are captured in the entry, not propagated.
GridResult grid_search(const TrainConfig& base, const std::vector<double>& lambda_grid,
                       const Dataset& train_ds, const Dataset& test_ds, int parallelism);

}  // namespace sreg
