#include "sreg/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <thread>

#include "sreg/errors.hpp"

namespace sreg {

namespace {

void validate(const TrainConfig& cfg, const Dataset& train_ds, const Dataset& test_ds) {
    if (cfg.fc_widths.empty()) throw config_error("train: fc_widths must not be empty");
    if (cfg.lr < 0.0) throw config_error("train: lr must be >= 0");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
        throw config_error("train: momentum must be in [0,1)");
    if (cfg.batch_size < 1) throw config_error("train: batch_size must be >= 1");
    if (cfg.epochs < 0) throw config_error("train: epochs must be >= 0");
    if (cfg.lambda < 0.0) throw config_error("train: lambda must be >= 0");
    if (train_ds.n() < 1) throw config_error("train: empty training set");
    const int classes = cfg.fc_widths.back();
    for (int l : train_ds.labels)
        if (l < 0 || l >= classes)
            throw config_error("train: label " + std::to_string(l) + " outside [0, " +
                               std::to_string(classes) + ")");
    for (int l : test_ds.labels)
        if (l < 0 || l >= classes)
            throw config_error("train: test label " + std::to_string(l) + " outside [0, " +
                               std::to_string(classes) + ")");
}

Batch make_batch(const Dataset& ds, const std::vector<int>& order, int start, int count) {
    Batch b;
    b.inputs = Tensor4(count, ds.images.c(), ds.images.h(), ds.images.w());
    b.labels.resize(count);
    const std::size_t plane =
        static_cast<std::size_t>(ds.images.c()) * ds.images.h() * ds.images.w();
    for (int i = 0; i < count; ++i) {
        const int src = order[start + i];
        std::copy(ds.images.data.begin() + src * plane, ds.images.data.begin() + (src + 1) * plane,
                  b.inputs.data.begin() + i * plane);
        b.labels[i] = ds.labels[src];
    }
    return b;
}

std::vector<const WeightTensor*> conv_tensors(const Network& net) {
    std::vector<const WeightTensor*> out;
    for (const WeightTensor& w : net.params)
        if (w.kind == LayerParamKind::conv) out.push_back(&w);
    return out;
}

}  // namespace

double regularization_total(const CriterionSpec& spec,
                            const std::vector<const WeightTensor*>& convs) {
    if (convs.empty()) return 0.0;
    if (is_pairwise(spec.id)) {
        double total = 0.0;
        for (double share : oicsr_chain_penalties(spec, convs)) total += share;
        return total;
    }
    double total = 0.0;
    for (const WeightTensor* w : convs) total += penalty(spec, *w);
    return total;
}

void regularization_add_subgradients(const CriterionSpec& spec, double lambda,
                                     const std::vector<const WeightTensor*>& convs,
                                     const std::vector<std::vector<double>*>& grads) {
    if (lambda == 0.0 || convs.empty()) return;
    if (grads.size() != convs.size())
        throw usage_error("regularization_add_subgradients: buffer count mismatch");
    if (is_pairwise(spec.id)) {
        oicsr_chain_add_subgradient(spec, convs, lambda, grads);
        return;
    }
    for (std::size_t i = 0; i < convs.size(); ++i)
        add_subgradient(spec, *convs[i], lambda, *grads[i]);
}

double evaluate(const Network& net, const Dataset& ds, int eval_batch) {
    if (ds.n() == 0) return 0.0;
    const std::vector<int> pred = predict(net, ds.images, eval_batch);
    int hits = 0;
    for (int i = 0; i < ds.n(); ++i)
        if (pred[i] == ds.labels[i]) ++hits;
    return static_cast<double>(hits) / ds.n();
}

RunResult train(const TrainConfig& cfg, const Dataset& train_ds, const Dataset& test_ds) {
    validate(cfg, train_ds, test_ds);
    const auto t0 = std::chrono::steady_clock::now();

    Network net = make_simple_cnn(
        {train_ds.images.c(), train_ds.images.h(), train_ds.images.w()}, cfg.conv_channels,
        cfg.fc_widths, cfg.kernel);
    init_params(net, derive_seed(cfg.seed, 1));

    // early shape check for the pairwise criterion
    if (is_pairwise(cfg.criterion.id)) (void)oicsr_chain_penalties(cfg.criterion, conv_tensors(net));

    Gradients velocity = zero_gradients(net);
    RunResult res;
    res.config = cfg;
    res.lambda = cfg.lambda;

    std::vector<int> order(train_ds.n());
    std::iota(order.begin(), order.end(), 0);
    ForwardCache cache;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::mt19937_64 rng(derive_seed(cfg.seed, 1000 + epoch));
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        for (int start = 0; start < train_ds.n(); start += cfg.batch_size) {
            const int m = std::min(cfg.batch_size, train_ds.n() - start);
            const Batch batch = make_batch(train_ds, order, start, m);

            double loss;
            try {
                loss = forward_loss(net, batch, cache);
            } catch (const numeric_error& e) {
                throw numeric_error(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                                        ", step " + std::to_string(start / cfg.batch_size) +
                                        "; lambda = " + std::to_string(cfg.lambda) +
                                        " may be too large)",
                                    e.layer_index);
            }
            loss_sum += loss * m;

            Gradients grads = backward(net, cache, batch.labels);

            // weight decay on every weight tensor; criterion on conv weights
            // only; biases receive neither
            if (cfg.weight_decay != 0.0)
                for (std::size_t p = 0; p < net.params.size(); ++p) {
                    const std::vector<double>& w = net.params[p].data;
                    std::vector<double>& g = grads.weights[p];
                    for (std::size_t i = 0; i < w.size(); ++i) g[i] += cfg.weight_decay * w[i];
                }
            if (cfg.lambda != 0.0) {
                std::vector<const WeightTensor*> convs;
                std::vector<std::vector<double>*> conv_grads;
                for (std::size_t p = 0; p < net.params.size(); ++p)
                    if (net.params[p].kind == LayerParamKind::conv) {
                        convs.push_back(&net.params[p]);
                        conv_grads.push_back(&grads.weights[p]);
                    }
                regularization_add_subgradients(cfg.criterion, cfg.lambda, convs, conv_grads);
            }

            for (std::size_t p = 0; p < net.params.size(); ++p) {
                std::vector<double>& w = net.params[p].data;
                std::vector<double>& v = velocity.weights[p];
                const std::vector<double>& g = grads.weights[p];
                for (std::size_t i = 0; i < w.size(); ++i) {
                    v[i] = cfg.momentum * v[i] + g[i];
                    w[i] -= cfg.lr * v[i];
                }
                std::vector<double>& b = net.biases[p];
                std::vector<double>& vb = velocity.biases[p];
                const std::vector<double>& gb = grads.biases[p];
                for (std::size_t i = 0; i < b.size(); ++i) {
                    vb[i] = cfg.momentum * vb[i] + gb[i];
                    b[i] -= cfg.lr * vb[i];
                }
            }
        }

        const double epoch_loss = loss_sum / train_ds.n();
        const double penalty_total = regularization_total(cfg.criterion, conv_tensors(net));
        if (!std::isfinite(penalty_total))
            throw numeric_error("non-finite penalty after epoch " + std::to_string(epoch) +
                                " (lambda = " + std::to_string(cfg.lambda) +
                                " may be too large)");
        res.train_loss_curve.push_back(epoch_loss);
        res.penalty_curve.push_back(penalty_total);
        res.objective_curve.push_back(epoch_loss + cfg.lambda * penalty_total);
        if (cfg.verbose)
            std::fprintf(stderr, "[%s lambda=%g] epoch %d/%d loss %.4f J %.4f\n",
                         to_string(cfg.criterion.id).c_str(), cfg.lambda, epoch + 1, cfg.epochs,
                         epoch_loss, res.objective_curve.back());
    }

    res.test_accuracy = evaluate(net, test_ds, cfg.eval_batch);
    res.sparsity = sparsity_report(net.params, cfg.tau);

    Network pruned = net;
    for (WeightTensor& w : pruned.params)
        if (w.kind == LayerParamKind::conv) w = prune(w, cfg.tau);
    res.pruned_test_accuracy = evaluate(pruned, test_ds, cfg.eval_batch);

    res.final_weights = net.params;
    res.final_biases = net.biases;
    res.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

GridResult grid_search(const TrainConfig& base, const std::vector<double>& lambda_grid,
                       const Dataset& train_ds, const Dataset& test_ds, int parallelism) {
    if (lambda_grid.empty()) throw config_error("grid_search: empty lambda grid");
    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end());

    GridResult out;
    out.entries.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out.entries[i].lambda = grid[i];

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            GridEntry& e = out.entries[i];
            TrainConfig cfg = base;
            cfg.lambda = grid[i];
            try {
                e.result = train(cfg, train_ds, test_ds);
                e.ok = true;
            } catch (const std::exception& ex) {
                e.ok = false;
                e.error = ex.what();
            }
        }
    };

    const int jobs = std::max(1, std::min<int>(parallelism, static_cast<int>(grid.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        const GridEntry& e = out.entries[i];
        if (!e.ok) continue;
        if (out.best_index < 0) {
            out.best_index = static_cast<int>(i);
            continue;
        }
        const GridEntry& b = out.entries[out.best_index];
        if (e.result.test_accuracy > b.result.test_accuracy ||
            (e.result.test_accuracy == b.result.test_accuracy &&
             e.result.sparsity.overall_sparsity > b.result.sparsity.overall_sparsity))
            out.best_index = static_cast<int>(i);
    }
    return out;
}

}  // namespace sreg
