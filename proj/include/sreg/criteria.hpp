#pragma once

#include <string>
#include <vector>

#include "sreg/tensor.hpp"

namespace sreg {

// The 17 sparse regularization criteria from the comparison study.
enum class CriterionId {
    l2,
    l1,
    gl,
    es,
    gl12,
    sgl,
    sgl12,
    cges,
    oicsr_gl,
    hsqrt_gl,
    hsq_gl,
    hsqrt_es,
    hsq_es,
    hsqrt_gl12,
    hsq_gl12,
    shsqrt_gl12,
    shsq_gl12,
};

// Grouping of a conv weight tensor (oc, ic, kh, kw) for the non-hierarchical
// group criteria: by (out,in) filter, by out-channel, or by in-channel.
enum class Grouping { filter_wise, neuron_wise, feature_wise };

// Outer axis of the two-level hierarchy: feature_based sums filters over
// out-channels inside each in-channel group (Eqs. as written in the paper);
// neuron_based mirrors the roles.
enum class HierAxis { feature_based, neuron_based };

struct CriterionSpec {
    CriterionId id = CriterionId::l2;
    Grouping grouping = Grouping::feature_wise;  // ignored by hierarchical ids
    HierAxis hier_axis = HierAxis::feature_based;
    double alpha = 0.5;  // L1 mixing weight of the combined forms
    double m = 0.8;      // CGES mixing weight
    double eps = 1e-12;  // denominator guard for subgradients
};

CriterionId parse_criterion_id(const std::string& s);
std::string to_string(CriterionId id);
Grouping parse_grouping(const std::string& s);
std::string to_string(Grouping g);
HierAxis parse_hier_axis(const std::string& s);
std::string to_string(HierAxis a);

const std::vector<CriterionId>& all_criterion_ids();
bool is_hierarchical(CriterionId id);
// OICSR couples a layer with its successor; the trainer wires it through the
// chain functions below instead of the per-tensor ops.
bool is_pairwise(CriterionId id);

// R(W) for one tensor. For oicsr_gl this is the solo (no-successor) form.
double penalty(const CriterionSpec& spec, const WeightTensor& w);

// Accumulates scale * dR/dw into grad (length w.size()). sign(0) = 0; every
// norm in a denominator is guarded as max(value, spec.eps).
void add_subgradient(const CriterionSpec& spec, const WeightTensor& w, double scale,
                     std::vector<double>& grad);
std::vector<double> subgradient(const CriterionSpec& spec, const WeightTensor& w);

// OICSR-GL over a layer pair: out-channel slices of w_l couple with the
// matching in-channel slices of w_next. w_next == nullptr selects the
// final-layer form (successor norm dropped).
double penalty_pair(const CriterionSpec& spec, const WeightTensor& w_l,
                    const WeightTensor* w_next);
void add_subgradient_pair(const CriterionSpec& spec, const WeightTensor& w_l,
                          const WeightTensor* w_next, double scale, std::vector<double>& grad_l,
                          std::vector<double>* grad_next);

// OICSR over the full conv chain with each tensor's L1 term counted once:
//   sum_l alpha * group_term(l anchored) + (1 - alpha) * sum_l ||w_l||_1
// Returns the per-layer shares (group term anchored at l plus l's own L1).
std::vector<double> oicsr_chain_penalties(const CriterionSpec& spec,
                                          const std::vector<const WeightTensor*>& convs);
void oicsr_chain_add_subgradient(const CriterionSpec& spec,
                                 const std::vector<const WeightTensor*>& convs, double scale,
                                 const std::vector<std::vector<double>*>& grads);

// Partition of flat indices of `shape` under a grouping; groups are disjoint
// and cover every index.
std::vector<std::vector<int>> group_index_map(Grouping g, const std::array<int, 4>& shape);

}  // namespace sreg
