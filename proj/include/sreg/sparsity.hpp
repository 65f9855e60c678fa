#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sreg/tensor.hpp"

namespace sreg {

struct LayerSparsity {
    int layer_id = -1;
    LayerParamKind kind = LayerParamKind::conv;
    int oc = 0, ic = 0, kh = 0, kw = 0;
    std::int64_t zeros = 0;
    std::int64_t weights = 0;
    double sparsity = 0.0;  // zeros / weights
    int dead_filters = 0;   // (i,j) filters with every entry below tau
    int dead_out = 0;       // out-channel slices entirely below tau
    int dead_in = 0;        // in-channel slices entirely below tau
};

// The paper's sparsity metric: fraction of conv weights with |w| < tau.
struct SparsityReport {
    double tau = 1e-3;
    std::int64_t zeros = 0;
    std::int64_t weights = 0;
    double overall_sparsity = 0.0;
    std::vector<LayerSparsity> per_layer;  // conv layers only
};

// Counts over conv tensors only; fc tensors in `weights` are ignored.
SparsityReport sparsity_report(const std::vector<WeightTensor>& weights, double tau);

// Sets every entry with |w| < tau to exactly 0. Idempotent.
WeightTensor prune(const WeightTensor& w, double tau);
std::vector<WeightTensor> prune(const std::vector<WeightTensor>& weights, double tau);

// CSV rows: layer_id,kind,oc,ic,kh,kw,sparsity,dead_filters,dead_out,dead_in
void write_report_csv(std::ostream& os, const SparsityReport& report);
std::string report_csv(const SparsityReport& report);

}  // namespace sreg
