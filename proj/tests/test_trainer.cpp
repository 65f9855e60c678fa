#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "sreg/dataset.hpp"
#include "sreg/errors.hpp"
#include "sreg/layers.hpp"
#include "sreg/trainer.hpp"
#include "test_util.hpp"

using namespace sreg;

namespace {

// a tiny, fast configuration on the synthetic blobs
TrainConfig tiny_config(int K) {
    TrainConfig cfg;
    cfg.conv_channels = {6};
    cfg.fc_widths = {32, K};
    cfg.kernel = 3;
    cfg.epochs = 2;
    cfg.batch_size = 32;
    cfg.lr = 0.05;
    cfg.momentum = 0.9;
    cfg.weight_decay = 1e-4;
    cfg.seed = 42;
    return cfg;
}

std::vector<const WeightTensor*> conv_tensors(const std::vector<WeightTensor>& ws) {
    std::vector<const WeightTensor*> out;
    for (const WeightTensor& w : ws)
        if (w.kind == LayerParamKind::conv) out.push_back(&w);
    return out;
}

}  // namespace

TEST_CASE("an unregularized run learns the synthetic blobs past 95 percent") {
    Dataset train_ds = synth_blobs(512, 4, 7);
    Dataset test_ds = synth_blobs(128, 4, 8);

    TrainConfig cfg = tiny_config(4);
    cfg.epochs = 5;
    RunResult res = train(cfg, train_ds, test_ds);

    CHECK(res.test_accuracy > 0.95);
    CHECK(res.train_loss_curve.size() == 5);
    CHECK(res.penalty_curve.size() == 5);
    CHECK(res.objective_curve.size() == 5);
    CHECK(res.pruned_test_accuracy >= 0.0);
    CHECK(res.pruned_test_accuracy <= 1.0);
    CHECK(res.sparsity.tau == cfg.tau);
    CHECK(res.train_seconds > 0.0);
}

TEST_CASE("lr = 0 leaves the initial weights untouched") {
    Dataset train_ds = synth_blobs(96, 3, 1);
    Dataset test_ds = synth_blobs(32, 3, 2);

    TrainConfig cfg = tiny_config(3);
    cfg.lr = 0.0;
    cfg.epochs = 3;
    RunResult res = train(cfg, train_ds, test_ds);

    // replicate the trainer's initialization
    Network net = make_simple_cnn({1, 28, 28}, cfg.conv_channels, cfg.fc_widths, cfg.kernel);
    init_params(net, derive_seed(cfg.seed, 1));

    REQUIRE(res.final_weights.size() == net.params.size());
    for (std::size_t p = 0; p < net.params.size(); ++p)
        CHECK(res.final_weights[p].data == net.params[p].data);
}

TEST_CASE("one small step descends the full-batch loss") {
    Dataset train_ds = synth_blobs(64, 3, 11);
    Dataset test_ds = synth_blobs(16, 3, 12);

    TrainConfig cfg = tiny_config(3);
    cfg.batch_size = 64;  // full batch: curve[e] is the loss before update e
    cfg.lr = 1e-4;
    cfg.weight_decay = 0.0;
    cfg.lambda = 0.0;
    cfg.epochs = 2;
    RunResult res = train(cfg, train_ds, test_ds);
    REQUIRE(res.train_loss_curve.size() == 2);
    CHECK(res.train_loss_curve[1] < res.train_loss_curve[0]);
}

TEST_CASE("criterion l2 equals extra weight decay on conv layers for one step") {
    Dataset train_ds = synth_blobs(64, 3, 21);
    Dataset test_ds = synth_blobs(16, 3, 22);

    const double lam = 5e-4, wd = 1e-3;

    TrainConfig a = tiny_config(3);
    a.batch_size = 64;
    a.epochs = 1;
    a.criterion.id = CriterionId::l2;
    a.lambda = lam;
    a.weight_decay = wd;
    RunResult ra = train(a, train_ds, test_ds);

    TrainConfig b = a;
    b.lambda = 0.0;
    b.weight_decay = wd + 2.0 * lam;  // d/dw lam*||w||^2 = 2*lam*w
    RunResult rb = train(b, train_ds, test_ds);

    for (std::size_t p = 0; p < ra.final_weights.size(); ++p) {
        const WeightTensor& wa = ra.final_weights[p];
        const WeightTensor& wb = rb.final_weights[p];
        if (wa.kind != LayerParamKind::conv) continue;  // fc got the decay too in run b
        for (std::size_t i = 0; i < wa.size(); ++i)
            CHECK(std::abs(wa.data[i] - wb.data[i]) <= 1e-12);
    }
}

TEST_CASE("objective accounting ties the three curves together") {
    Dataset train_ds = synth_blobs(96, 3, 31);
    Dataset test_ds = synth_blobs(32, 3, 32);

    TrainConfig cfg = tiny_config(3);
    cfg.criterion.id = CriterionId::gl12;
    cfg.criterion.grouping = Grouping::feature_wise;
    cfg.lambda = 1e-3;
    cfg.epochs = 3;
    RunResult res = train(cfg, train_ds, test_ds);

    for (std::size_t e = 0; e < res.objective_curve.size(); ++e) {
        const double want = res.train_loss_curve[e] + cfg.lambda * res.penalty_curve[e];
        CHECK(std::abs(res.objective_curve[e] - want) <= 1e-10);
    }
    // the last penalty sample is measured on the final weights
    const double finalR = regularization_total(cfg.criterion, conv_tensors(res.final_weights));
    CHECK(std::abs(res.penalty_curve.back() - finalR) <=
          1e-12 * std::max(1.0, std::abs(finalR)));
}

TEST_CASE("biases never receive criterion gradients") {
    Dataset train_ds = synth_blobs(64, 3, 41);
    Dataset test_ds = synth_blobs(16, 3, 42);

    TrainConfig a = tiny_config(3);
    a.batch_size = 64;  // one step: weight drift cannot feed back into biases
    a.epochs = 1;
    a.criterion.id = CriterionId::gl;
    a.criterion.grouping = Grouping::feature_wise;
    a.lambda = 0.0;
    RunResult ra = train(a, train_ds, test_ds);

    TrainConfig b = a;
    b.lambda = 0.5;
    RunResult rb = train(b, train_ds, test_ds);

    Network net = make_simple_cnn({1, 28, 28}, a.conv_channels, a.fc_widths, a.kernel);
    // conv weights must differ (the criterion acted), biases must match exactly
    bool conv_differs = false;
    REQUIRE(ra.final_biases.size() == rb.final_biases.size());
    for (std::size_t p = 0; p < ra.final_weights.size(); ++p) {
        if (ra.final_weights[p].kind == LayerParamKind::conv &&
            ra.final_weights[p].data != rb.final_weights[p].data)
            conv_differs = true;
        CHECK(ra.final_biases[p] == rb.final_biases[p]);
    }
    CHECK(conv_differs);
}

TEST_CASE("the same seed reproduces the run bit for bit") {
    Dataset train_ds = synth_blobs(128, 4, 51);
    Dataset test_ds = synth_blobs(32, 4, 52);

    TrainConfig cfg = tiny_config(4);
    cfg.criterion.id = CriterionId::sgl;
    cfg.lambda = 1e-4;
    RunResult a = train(cfg, train_ds, test_ds);
    RunResult b = train(cfg, train_ds, test_ds);

    CHECK(a.test_accuracy == b.test_accuracy);
    CHECK(a.train_loss_curve == b.train_loss_curve);
    for (std::size_t p = 0; p < a.final_weights.size(); ++p)
        CHECK(a.final_weights[p].data == b.final_weights[p].data);
}

TEST_CASE("training rejects invalid configurations") {
    Dataset train_ds = synth_blobs(32, 3, 61);
    Dataset test_ds = synth_blobs(16, 3, 62);

    TrainConfig cfg = tiny_config(3);
    SUBCASE("negative lr") {
        cfg.lr = -0.1;
        CHECK_THROWS_AS(train(cfg, train_ds, test_ds), config_error);
    }
    SUBCASE("momentum out of range") {
        cfg.momentum = 1.0;
        CHECK_THROWS_AS(train(cfg, train_ds, test_ds), config_error);
    }
    SUBCASE("batch size below one") {
        cfg.batch_size = 0;
        CHECK_THROWS_AS(train(cfg, train_ds, test_ds), config_error);
    }
    SUBCASE("negative lambda") {
        cfg.lambda = -1.0;
        CHECK_THROWS_AS(train(cfg, train_ds, test_ds), config_error);
    }
    SUBCASE("class count mismatch") {
        cfg.fc_widths = {32, 7};  // labels run 0..2 but the head has 7 outputs: fine
        cfg.fc_widths = {32, 2};  // labels 0..2 overflow a 2-way head
        CHECK_THROWS_AS(train(cfg, train_ds, test_ds), config_error);
    }
}

TEST_CASE("grid search: a {0} grid is a single baseline run") {
    Dataset train_ds = synth_blobs(96, 3, 71);
    Dataset test_ds = synth_blobs(32, 3, 72);

    TrainConfig cfg = tiny_config(3);
    GridResult gr = grid_search(cfg, {0.0}, train_ds, test_ds, 1);
    REQUIRE(gr.entries.size() == 1);
    CHECK(gr.best_index == 0);
    CHECK(gr.entries[0].ok);
    CHECK(gr.entries[0].lambda == 0.0);

    // the entry is the same run train() would produce
    RunResult direct = train(cfg, train_ds, test_ds);
    CHECK(gr.entries[0].result.test_accuracy == direct.test_accuracy);
}

TEST_CASE("grid search orders entries by lambda and regularization raises sparsity") {
    Dataset train_ds = synth_blobs(192, 3, 81);
    Dataset test_ds = synth_blobs(48, 3, 82);

    TrainConfig cfg = tiny_config(3);
    cfg.epochs = 4;
    cfg.criterion.id = CriterionId::gl12;
    cfg.criterion.grouping = Grouping::feature_wise;

    GridResult gr = grid_search(cfg, {1e-2, 1e-6}, train_ds, test_ds, 1);
    REQUIRE(gr.entries.size() == 2);
    CHECK(gr.entries[0].lambda == 1e-6);  // ascending
    CHECK(gr.entries[1].lambda == 1e-2);
    REQUIRE(gr.entries[0].ok);
    REQUIRE(gr.entries[1].ok);
    CHECK(gr.entries[1].result.sparsity.overall_sparsity >=
          gr.entries[0].result.sparsity.overall_sparsity);
    CHECK(gr.best_index >= 0);
}

TEST_CASE("a diverging lambda is isolated inside its grid entry") {
    Dataset train_ds = synth_blobs(128, 3, 91);
    Dataset test_ds = synth_blobs(32, 3, 92);

    TrainConfig cfg = tiny_config(3);
    cfg.epochs = 2;
    cfg.criterion.id = CriterionId::es;
    cfg.criterion.grouping = Grouping::feature_wise;

    GridResult gr = grid_search(cfg, {0.0, 1e100}, train_ds, test_ds, 1);
    REQUIRE(gr.entries.size() == 2);
    CHECK(gr.entries[0].ok);
    CHECK_FALSE(gr.entries[1].ok);
    CHECK(gr.entries[1].error.find("lambda") != std::string::npos);
    CHECK(gr.best_index == 0);
}

TEST_CASE("training under a huge lambda reports a numeric error naming lambda") {
    Dataset train_ds = synth_blobs(128, 3, 93);
    Dataset test_ds = synth_blobs(32, 3, 94);

    TrainConfig cfg = tiny_config(3);
    cfg.epochs = 4;
    cfg.criterion.id = CriterionId::es;
    cfg.lambda = 1e100;
    try {
        train(cfg, train_ds, test_ds);
        FAIL("expected numeric_error");
    } catch (const numeric_error& e) {
        CHECK(std::string(e.what()).find("lambda") != std::string::npos);
    }
}

TEST_CASE("every criterion id trains for an epoch without incident") {
    Dataset train_ds = synth_blobs(64, 3, 95);
    Dataset test_ds = synth_blobs(16, 3, 96);

    for (CriterionId id : all_criterion_ids()) {
        CAPTURE(to_string(id));
        TrainConfig cfg = tiny_config(3);
        cfg.epochs = 1;
        cfg.criterion.id = id;
        cfg.lambda = 1e-4;
        RunResult res = train(cfg, train_ds, test_ds);
        CHECK(res.train_loss_curve.size() == 1);
        CHECK(std::isfinite(res.test_accuracy));
    }
}

TEST_CASE("regularization_total covers the OICSR chain accounting") {
    auto g = testutil::rng(1);
    std::vector<WeightTensor> ws;
    ws.emplace_back(3, 1, 3, 3, 0, LayerParamKind::conv);
    ws.emplace_back(4, 3, 3, 3, 1, LayerParamKind::conv);
    for (auto& w : ws) testutil::fill_signed_away_from_zero(w.data, g, 0.1, 1.0);

    CriterionSpec spec;
    spec.id = CriterionId::oicsr_gl;
    spec.alpha = 0.5;

    const std::vector<const WeightTensor*> convs = conv_tensors(ws);
    const double total = regularization_total(spec, convs);

    // manual: pair(w0, w1) group part + solo(w1) group part + both L1 terms once
    CriterionSpec a1 = spec;
    a1.alpha = 1.0;
    double l1 = 0.0;
    for (const auto* w : convs)
        for (double v : w->data) l1 += std::abs(v);
    const double want = spec.alpha * (penalty_pair(a1, *convs[0], convs[1]) +
                                      penalty_pair(a1, *convs[1], nullptr)) +
                        (1.0 - spec.alpha) * l1;
    CHECK(total == doctest::Approx(want).epsilon(1e-12));
}
