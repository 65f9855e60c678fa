// Timing comparison between the OpenMP kernels and the serial reference
// implementations (conv forward, criterion penalties).

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "naive.hpp"
#include "sreg/layers.hpp"
#include "sreg/threads.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void fill_random(std::vector<double>& v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& x : v) x = dist(rng);
}

void bench_conv(int batch, int reps) {
    const int ic = 16, oc = 32, hw = 14, k = 5, pad = 2;
    sreg::Tensor4 in(batch, ic, hw, hw);
    sreg::WeightTensor w(oc, ic, k, k);
    std::vector<double> bias(oc, 0.1);
    fill_random(in.data, 1);
    fill_random(w.data, 2);

    const double flops = 2.0 * batch * oc * ic * hw * hw * k * k;

    sreg::Tensor4 fast = sreg::conv2d_forward(in, w, bias, 1, pad);
    sreg::Tensor4 ref = sregref::conv2d_forward_naive(in, w, bias, 1, pad);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i)
        max_diff = std::max(max_diff, std::fabs(fast.data[i] - ref.data[i]));

    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) fast = sreg::conv2d_forward(in, w, bias, 1, pad);
    const double t_fast = seconds_since(t0) / reps;

    const int ref_reps = std::max(1, reps / 8);
    t0 = Clock::now();
    for (int r = 0; r < ref_reps; ++r) ref = sregref::conv2d_forward_naive(in, w, bias, 1, pad);
    const double t_ref = seconds_since(t0) / ref_reps;

    std::printf("conv2d forward  %dx%dx%dx%d k=%d pad=%d (%.2f GFLOP)\n", batch, ic, hw, hw, k,
                pad, flops * 1e-9);
    std::printf("  openmp   %8.2f ms  %7.2f GFLOP/s\n", t_fast * 1e3, flops / t_fast * 1e-9);
    std::printf("  serial   %8.2f ms  %7.2f GFLOP/s\n", t_ref * 1e3, flops / t_ref * 1e-9);
    std::printf("  speedup  %8.2fx    max |diff| %.3g\n\n", t_ref / t_fast, max_diff);
}

void bench_penalty(int reps) {
    sreg::WeightTensor w(32, 16, 5, 5);
    fill_random(w.data, 3);

    const sreg::CriterionId ids[] = {sreg::CriterionId::gl, sreg::CriterionId::es,
                                     sreg::CriterionId::hsq_gl12, sreg::CriterionId::oicsr_gl};
    std::printf("penalty on 32x16x5x5 (%d evals each)\n", reps);
    for (sreg::CriterionId id : ids) {
        sreg::CriterionSpec spec;
        spec.id = id;
        volatile double sink = 0.0;

        auto t0 = Clock::now();
        for (int r = 0; r < reps; ++r) sink = sreg::penalty(spec, w);
        const double t_fast = seconds_since(t0) / reps;

        t0 = Clock::now();
        for (int r = 0; r < reps; ++r) sink = sregref::penalty_naive(spec, w);
        const double t_ref = seconds_since(t0) / reps;
        (void)sink;

        const double rel = std::fabs(sreg::penalty(spec, w) - sregref::penalty_naive(spec, w)) /
                           sregref::penalty_naive(spec, w);
        std::printf("  %-11s optimized %8.1f us  naive %8.1f us  speedup %5.2fx  rel err %.2g\n",
                    sreg::to_string(id).c_str(), t_fast * 1e6, t_ref * 1e6, t_ref / t_fast, rel);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel benchmark: OpenMP vs serial reference"};
    int batch = 64, reps = 20, penalty_reps = 2000, threads = 0;
    app.add_option("--batch", batch, "conv batch size");
    app.add_option("--reps", reps, "conv repetitions");
    app.add_option("--penalty-reps", penalty_reps, "penalty repetitions");
    app.add_option("--threads", threads, "kernel threads (0 = default)");
    CLI11_PARSE(app, argc, argv);

    if (threads > 0) sreg::set_threads(threads);
    std::printf("threads: %d\n\n", sreg::max_threads());
    bench_conv(batch, reps);
    bench_penalty(penalty_reps);
    return 0;
}
