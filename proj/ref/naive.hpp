#pragma once

// Serial reference implementations kept for testing: a brute-force direct
// convolution and literal transcriptions of the penalty formulas. These share
// no code with the optimized kernels beyond the data types.

#include "sreg/criteria.hpp"
#include "sreg/tensor.hpp"

namespace sregref {

// Six-nested-loop direct cross-correlation with zero padding.
sreg::Tensor4 conv2d_forward_naive(const sreg::Tensor4& in, const sreg::WeightTensor& w,
                                   const std::vector<double>& bias, int stride, int padding);

// Penalty value computed by transcribing each criterion's formula over the
// group partitions from group_index_map (hierarchical forms use the written
// i/j/h/w sums directly).
double penalty_naive(const sreg::CriterionSpec& spec, const sreg::WeightTensor& w);

// OICSR pair form; w_next == nullptr gives the final-layer form.
double penalty_pair_naive(const sreg::CriterionSpec& spec, const sreg::WeightTensor& w_l,
                          const sreg::WeightTensor* w_next);

// Independent sparsity counters (flat scans, one pass per question).
struct NaiveSparsity {
    long long zeros = 0;
    long long weights = 0;
    int dead_filters = 0;
    int dead_out = 0;
    int dead_in = 0;
};
NaiveSparsity sparsity_naive(const sreg::WeightTensor& w, double tau);

}  // namespace sregref
