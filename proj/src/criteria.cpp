#include "sreg/criteria.hpp"

#include <cmath>

#include "sreg/errors.hpp"

namespace sreg {

namespace {

struct IdName {
    CriterionId id;
    const char* name;
};

constexpr IdName id_names[] = {
    {CriterionId::l2, "l2"},
    {CriterionId::l1, "l1"},
    {CriterionId::gl, "gl"},
    {CriterionId::es, "es"},
    {CriterionId::gl12, "gl12"},
    {CriterionId::sgl, "sgl"},
    {CriterionId::sgl12, "sgl12"},
    {CriterionId::cges, "cges"},
    {CriterionId::oicsr_gl, "oicsr-gl"},
    {CriterionId::hsqrt_gl, "hsqrt-gl"},
    {CriterionId::hsq_gl, "hsq-gl"},
    {CriterionId::hsqrt_es, "hsqrt-es"},
    {CriterionId::hsq_es, "hsq-es"},
    {CriterionId::hsqrt_gl12, "hsqrt-gl12"},
    {CriterionId::hsq_gl12, "hsq-gl12"},
    {CriterionId::shsqrt_gl12, "shsqrt-gl12"},
    {CriterionId::shsq_gl12, "shsq-gl12"},
};

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

int group_count(Grouping g, const WeightTensor& w) {
    switch (g) {
        case Grouping::filter_wise: return w.oc() * w.ic();
        case Grouping::neuron_wise: return w.oc();
        case Grouping::feature_wise: return w.ic();
    }
    return 0;
}

// group id of filter f = o * ic + c; every group is a union of whole filters,
// each contiguous in the (o, c, h, w) layout
inline int group_of_filter(Grouping g, const WeightTensor& w, int f) {
    switch (g) {
        case Grouping::filter_wise: return f;
        case Grouping::neuron_wise: return f / w.ic();
        case Grouping::feature_wise: return f % w.ic();
    }
    return 0;
}

struct GroupSums {
    std::vector<double> l1;  // sum_i |w_i| per group
    std::vector<double> sq;  // sum_i w_i^2 per group
};

GroupSums group_sums(const WeightTensor& w, Grouping g) {
    GroupSums s;
    s.l1.assign(group_count(g, w), 0.0);
    s.sq.assign(s.l1.size(), 0.0);
    const int nf = w.oc() * w.ic(), fs = w.filter_len();
    for (int f = 0; f < nf; ++f) {
        const double* p = w.data.data() + static_cast<std::size_t>(f) * fs;
        double a = 0.0, b = 0.0;
        for (int t = 0; t < fs; ++t) {
            a += std::fabs(p[t]);
            b += p[t] * p[t];
        }
        const int gi = group_of_filter(g, w, f);
        s.l1[gi] += a;
        s.sq[gi] += b;
    }
    return s;
}

double l1_all(const WeightTensor& w) {
    double s = 0.0;
    for (double v : w.data) s += std::fabs(v);
    return s;
}

double sq_all(const WeightTensor& w) {
    double s = 0.0;
    for (double v : w.data) s += v * v;
    return s;
}

// ---- plain group criteria ----------------------------------------------------

double gl_penalty(const WeightTensor& w, Grouping g) {
    GroupSums s = group_sums(w, g);
    double r = 0.0;
    for (double sq : s.sq) r += std::sqrt(sq);
    return r;
}

double es_penalty(const WeightTensor& w, Grouping g) {
    GroupSums s = group_sums(w, g);
    double r = 0.0;
    for (double l1 : s.l1) r += l1 * l1;
    return 0.5 * r;
}

double gl12_penalty(const WeightTensor& w, Grouping g) {
    GroupSums s = group_sums(w, g);
    double r = 0.0;
    for (double l1 : s.l1) r += std::sqrt(l1);
    return r;
}

void gl_subgrad(const WeightTensor& w, Grouping g, double eps, double scale,
                std::vector<double>& grad) {
    GroupSums s = group_sums(w, g);
    const int nf = w.oc() * w.ic(), fs = w.filter_len();
    for (int f = 0; f < nf; ++f) {
        const double m = scale / std::max(std::sqrt(s.sq[group_of_filter(g, w, f)]), eps);
        const double* p = w.data.data() + static_cast<std::size_t>(f) * fs;
        double* q = grad.data() + static_cast<std::size_t>(f) * fs;
        for (int t = 0; t < fs; ++t) q[t] += m * p[t];
    }
}

void es_subgrad(const WeightTensor& w, Grouping g, double scale, std::vector<double>& grad) {
    GroupSums s = group_sums(w, g);
    const int nf = w.oc() * w.ic(), fs = w.filter_len();
    for (int f = 0; f < nf; ++f) {
        const double m = scale * s.l1[group_of_filter(g, w, f)];
        const double* p = w.data.data() + static_cast<std::size_t>(f) * fs;
        double* q = grad.data() + static_cast<std::size_t>(f) * fs;
        for (int t = 0; t < fs; ++t) q[t] += m * sign(p[t]);
    }
}

void gl12_subgrad(const WeightTensor& w, Grouping g, double eps, double scale,
                  std::vector<double>& grad) {
    GroupSums s = group_sums(w, g);
    const int nf = w.oc() * w.ic(), fs = w.filter_len();
    for (int f = 0; f < nf; ++f) {
        const double m =
            scale / (2.0 * std::sqrt(std::max(s.l1[group_of_filter(g, w, f)], eps)));
        const double* p = w.data.data() + static_cast<std::size_t>(f) * fs;
        double* q = grad.data() + static_cast<std::size_t>(f) * fs;
        for (int t = 0; t < fs; ++t) q[t] += m * sign(p[t]);
    }
}

void l1_subgrad(const WeightTensor& w, double scale, std::vector<double>& grad) {
    for (std::size_t i = 0; i < w.size(); ++i) grad[i] += scale * sign(w.data[i]);
}

void l2_subgrad(const WeightTensor& w, double scale, std::vector<double>& grad) {
    for (std::size_t i = 0; i < w.size(); ++i) grad[i] += scale * 2.0 * w.data[i];
}

// ---- hierarchical criteria ----------------------------------------------------

enum class HierFamily { gl, es, gl12 };

// Two-level penalty: R = sum_outer F(S), S = sum_inner a(filter), with
// F = sqrt (HSQRT) or F = square (HSQ), and a per family:
//   gl: ||f||_2     es: ||f||_1^2     gl12: sqrt(||f||_1)
// per-filter base statistic: ||f||_2 for the gl family, ||f||_1 otherwise
std::vector<double> filter_base(const WeightTensor& w, HierFamily fam) {
    const int nf = w.oc() * w.ic(), fs = w.filter_len();
    std::vector<double> base(nf);
    for (int f = 0; f < nf; ++f) {
        const double* p = w.data.data() + static_cast<std::size_t>(f) * fs;
        double s = 0.0;
        if (fam == HierFamily::gl) {
            for (int t = 0; t < fs; ++t) s += p[t] * p[t];
            base[f] = std::sqrt(s);
        } else {
            for (int t = 0; t < fs; ++t) s += std::fabs(p[t]);
            base[f] = s;
        }
    }
    return base;
}

// aggregate a_f fed into the outer sums
inline double aggregate_of(double base, HierFamily fam) {
    switch (fam) {
        case HierFamily::gl: return base;
        case HierFamily::es: return base * base;
        case HierFamily::gl12: return std::sqrt(base);
    }
    return 0.0;
}

double hier_penalty(const WeightTensor& w, HierAxis axis, HierFamily fam, bool square) {
    const std::vector<double> base = filter_base(w, fam);
    const int oc = w.oc(), ic = w.ic();
    const int n_outer = axis == HierAxis::feature_based ? ic : oc;
    const int n_inner = axis == HierAxis::feature_based ? oc : ic;
    double r = 0.0;
    for (int j = 0; j < n_outer; ++j) {
        double s = 0.0;
        for (int i = 0; i < n_inner; ++i) {
            const int f = axis == HierAxis::feature_based ? i * ic + j : j * ic + i;
            s += aggregate_of(base[f], fam);
        }
        r += square ? s * s : std::sqrt(s);
    }
    return r;
}

void hier_subgrad(const WeightTensor& w, HierAxis axis, HierFamily fam, bool square, double eps,
                  double scale, std::vector<double>& grad) {
    const std::vector<double> base = filter_base(w, fam);
    const int oc = w.oc(), ic = w.ic();
    const int nf = oc * ic, fs = w.filter_len();

    // outer sums S per outer group, then dF/dS per filter
    std::vector<double> outer(axis == HierAxis::feature_based ? ic : oc, 0.0);
    for (int f = 0; f < nf; ++f) {
        const int j = axis == HierAxis::feature_based ? f % ic : f / ic;
        outer[j] += aggregate_of(base[f], fam);
    }
    for (int f = 0; f < nf; ++f) {
        const int j = axis == HierAxis::feature_based ? f % ic : f / ic;
        const double S = outer[j];
        const double dF = square ? 2.0 * S : 1.0 / (2.0 * std::sqrt(std::max(S, eps)));
        const double* p = w.data.data() + static_cast<std::size_t>(f) * fs;
        double* gp = grad.data() + static_cast<std::size_t>(f) * fs;
        switch (fam) {
            case HierFamily::gl: {
                const double inv = 1.0 / std::max(base[f], eps);
                for (int t = 0; t < fs; ++t) gp[t] += scale * dF * p[t] * inv;
                break;
            }
            case HierFamily::es: {
                const double k = 2.0 * base[f];
                for (int t = 0; t < fs; ++t) gp[t] += scale * dF * k * sign(p[t]);
                break;
            }
            case HierFamily::gl12: {
                const double inv = 1.0 / (2.0 * std::sqrt(std::max(base[f], eps)));
                for (int t = 0; t < fs; ++t) gp[t] += scale * dF * inv * sign(p[t]);
                break;
            }
        }
    }
}

// ---- OICSR helpers -------------------------------------------------------------

// squared L2 norms of the out-channel slices (neuron groups) of w
std::vector<double> out_slice_sq(const WeightTensor& w) {
    std::vector<double> s(w.oc(), 0.0);
    const std::size_t stride = static_cast<std::size_t>(w.ic()) * w.filter_len();
    for (int o = 0; o < w.oc(); ++o) {
        const double* p = w.data.data() + o * stride;
        double acc = 0.0;
        for (std::size_t t = 0; t < stride; ++t) acc += p[t] * p[t];
        s[o] = acc;
    }
    return s;
}

// squared L2 norms of the in-channel slices (feature groups) of w
std::vector<double> in_slice_sq(const WeightTensor& w) {
    std::vector<double> s(w.ic(), 0.0);
    const int fs = w.filter_len();
    for (std::size_t i = 0; i < w.size(); ++i) {
        const int c = static_cast<int>((i / fs) % w.ic());
        s[c] += w.data[i] * w.data[i];
    }
    return s;
}

}  // namespace

// ---- public API ---------------------------------------------------------------

CriterionId parse_criterion_id(const std::string& s) {
    for (const auto& e : id_names)
        if (s == e.name) return e.id;
    std::string valid;
    for (const auto& e : id_names) {
        if (!valid.empty()) valid += ", ";
        valid += e.name;
    }
    throw config_error("unknown criterion id '" + s + "' (valid: " + valid + ")");
}

std::string to_string(CriterionId id) {
    for (const auto& e : id_names)
        if (id == e.id) return e.name;
    throw config_error("unknown criterion id");
}

Grouping parse_grouping(const std::string& s) {
    if (s == "filter_wise") return Grouping::filter_wise;
    if (s == "neuron_wise") return Grouping::neuron_wise;
    if (s == "feature_wise") return Grouping::feature_wise;
    throw config_error("unknown grouping '" + s +
                       "' (valid: filter_wise, neuron_wise, feature_wise)");
}

std::string to_string(Grouping g) {
    switch (g) {
        case Grouping::filter_wise: return "filter_wise";
        case Grouping::neuron_wise: return "neuron_wise";
        case Grouping::feature_wise: return "feature_wise";
    }
    return "?";
}

HierAxis parse_hier_axis(const std::string& s) {
    if (s == "feature_based") return HierAxis::feature_based;
    if (s == "neuron_based") return HierAxis::neuron_based;
    throw config_error("unknown hier_axis '" + s + "' (valid: feature_based, neuron_based)");
}

std::string to_string(HierAxis a) {
    return a == HierAxis::feature_based ? "feature_based" : "neuron_based";
}

const std::vector<CriterionId>& all_criterion_ids() {
    static const std::vector<CriterionId> ids = [] {
        std::vector<CriterionId> v;
        for (const auto& e : id_names) v.push_back(e.id);
        return v;
    }();
    return ids;
}

bool is_hierarchical(CriterionId id) {
    switch (id) {
        case CriterionId::hsqrt_gl:
        case CriterionId::hsq_gl:
        case CriterionId::hsqrt_es:
        case CriterionId::hsq_es:
        case CriterionId::hsqrt_gl12:
        case CriterionId::hsq_gl12:
        case CriterionId::shsqrt_gl12:
        case CriterionId::shsq_gl12:
            return true;
        default:
            return false;
    }
}

bool is_pairwise(CriterionId id) { return id == CriterionId::oicsr_gl; }

double penalty(const CriterionSpec& spec, const WeightTensor& w) {
    if (w.size() == 0) throw config_error("penalty: empty tensor");
    switch (spec.id) {
        case CriterionId::l2: return sq_all(w);
        case CriterionId::l1: return l1_all(w);
        case CriterionId::gl: return gl_penalty(w, spec.grouping);
        case CriterionId::es: return es_penalty(w, spec.grouping);
        case CriterionId::gl12: return gl12_penalty(w, spec.grouping);
        case CriterionId::sgl:
            return spec.alpha * gl_penalty(w, spec.grouping) + (1.0 - spec.alpha) * l1_all(w);
        case CriterionId::sgl12:
            return spec.alpha * gl12_penalty(w, spec.grouping) + (1.0 - spec.alpha) * l1_all(w);
        case CriterionId::cges:
            return (1.0 - spec.m) * gl_penalty(w, spec.grouping) +
                   spec.m * es_penalty(w, spec.grouping);
        case CriterionId::oicsr_gl: return penalty_pair(spec, w, nullptr);
        case CriterionId::hsqrt_gl:
            return hier_penalty(w, spec.hier_axis, HierFamily::gl, false);
        case CriterionId::hsq_gl: return hier_penalty(w, spec.hier_axis, HierFamily::gl, true);
        case CriterionId::hsqrt_es:
            return hier_penalty(w, spec.hier_axis, HierFamily::es, false);
        case CriterionId::hsq_es: return hier_penalty(w, spec.hier_axis, HierFamily::es, true);
        case CriterionId::hsqrt_gl12:
            return hier_penalty(w, spec.hier_axis, HierFamily::gl12, false);
        case CriterionId::hsq_gl12:
            return hier_penalty(w, spec.hier_axis, HierFamily::gl12, true);
        case CriterionId::shsqrt_gl12:
            return spec.alpha * hier_penalty(w, spec.hier_axis, HierFamily::gl12, false) +
                   (1.0 - spec.alpha) * l1_all(w);
        case CriterionId::shsq_gl12:
            return spec.alpha * hier_penalty(w, spec.hier_axis, HierFamily::gl12, true) +
                   (1.0 - spec.alpha) * l1_all(w);
    }
    throw config_error("unknown criterion id");
}

void add_subgradient(const CriterionSpec& spec, const WeightTensor& w, double scale,
                     std::vector<double>& grad) {
    if (grad.size() != w.size())
        throw usage_error("add_subgradient: gradient buffer size mismatch");
    const double eps = spec.eps;
    switch (spec.id) {
        case CriterionId::l2: l2_subgrad(w, scale, grad); return;
        case CriterionId::l1: l1_subgrad(w, scale, grad); return;
        case CriterionId::gl: gl_subgrad(w, spec.grouping, eps, scale, grad); return;
        case CriterionId::es: es_subgrad(w, spec.grouping, scale, grad); return;
        case CriterionId::gl12: gl12_subgrad(w, spec.grouping, eps, scale, grad); return;
        case CriterionId::sgl:
            gl_subgrad(w, spec.grouping, eps, scale * spec.alpha, grad);
            l1_subgrad(w, scale * (1.0 - spec.alpha), grad);
            return;
        case CriterionId::sgl12:
            gl12_subgrad(w, spec.grouping, eps, scale * spec.alpha, grad);
            l1_subgrad(w, scale * (1.0 - spec.alpha), grad);
            return;
        case CriterionId::cges:
            gl_subgrad(w, spec.grouping, eps, scale * (1.0 - spec.m), grad);
            es_subgrad(w, spec.grouping, scale * spec.m, grad);
            return;
        case CriterionId::oicsr_gl:
            add_subgradient_pair(spec, w, nullptr, scale, grad, nullptr);
            return;
        case CriterionId::hsqrt_gl:
            hier_subgrad(w, spec.hier_axis, HierFamily::gl, false, eps, scale, grad);
            return;
        case CriterionId::hsq_gl:
            hier_subgrad(w, spec.hier_axis, HierFamily::gl, true, eps, scale, grad);
            return;
        case CriterionId::hsqrt_es:
            hier_subgrad(w, spec.hier_axis, HierFamily::es, false, eps, scale, grad);
            return;
        case CriterionId::hsq_es:
            hier_subgrad(w, spec.hier_axis, HierFamily::es, true, eps, scale, grad);
            return;
        case CriterionId::hsqrt_gl12:
            hier_subgrad(w, spec.hier_axis, HierFamily::gl12, false, eps, scale, grad);
            return;
        case CriterionId::hsq_gl12:
            hier_subgrad(w, spec.hier_axis, HierFamily::gl12, true, eps, scale, grad);
            return;
        case CriterionId::shsqrt_gl12:
            hier_subgrad(w, spec.hier_axis, HierFamily::gl12, false, eps, scale * spec.alpha, grad);
            l1_subgrad(w, scale * (1.0 - spec.alpha), grad);
            return;
        case CriterionId::shsq_gl12:
            hier_subgrad(w, spec.hier_axis, HierFamily::gl12, true, eps, scale * spec.alpha, grad);
            l1_subgrad(w, scale * (1.0 - spec.alpha), grad);
            return;
    }
    throw config_error("unknown criterion id");
}

std::vector<double> subgradient(const CriterionSpec& spec, const WeightTensor& w) {
    std::vector<double> g(w.size(), 0.0);
    add_subgradient(spec, w, 1.0, g);
    return g;
}

double penalty_pair(const CriterionSpec& spec, const WeightTensor& w_l,
                    const WeightTensor* w_next) {
    if (spec.id != CriterionId::oicsr_gl)
        throw config_error("penalty_pair is defined for oicsr-gl only");
    if (w_next && w_next->ic() != w_l.oc())
        throw config_error("oicsr-gl: w_l out-channels " + std::to_string(w_l.oc()) +
                           " != w_next in-channels " + std::to_string(w_next->ic()));
    const std::vector<double> a = out_slice_sq(w_l);
    std::vector<double> b;
    if (w_next) b = in_slice_sq(*w_next);
    double group = 0.0;
    for (int c = 0; c < w_l.oc(); ++c) group += std::sqrt(a[c] + (w_next ? b[c] : 0.0));
    double l1 = l1_all(w_l) + (w_next ? l1_all(*w_next) : 0.0);
    return spec.alpha * group + (1.0 - spec.alpha) * l1;
}

void add_subgradient_pair(const CriterionSpec& spec, const WeightTensor& w_l,
                          const WeightTensor* w_next, double scale, std::vector<double>& grad_l,
                          std::vector<double>* grad_next) {
    if (spec.id != CriterionId::oicsr_gl)
        throw config_error("add_subgradient_pair is defined for oicsr-gl only");
    if (w_next && w_next->ic() != w_l.oc())
        throw config_error("oicsr-gl: channel mismatch between pair tensors");
    if (grad_l.size() != w_l.size())
        throw usage_error("add_subgradient_pair: grad_l size mismatch");
    if (w_next && (!grad_next || grad_next->size() != w_next->size()))
        throw usage_error("add_subgradient_pair: grad_next size mismatch");

    const std::vector<double> a = out_slice_sq(w_l);
    std::vector<double> b;
    if (w_next) b = in_slice_sq(*w_next);
    std::vector<double> inv(w_l.oc());
    for (int c = 0; c < w_l.oc(); ++c)
        inv[c] = 1.0 / std::max(std::sqrt(a[c] + (w_next ? b[c] : 0.0)), spec.eps);

    const std::size_t stride = static_cast<std::size_t>(w_l.ic()) * w_l.filter_len();
    for (std::size_t i = 0; i < w_l.size(); ++i) {
        const int c = static_cast<int>(i / stride);
        grad_l[i] += scale * (spec.alpha * w_l.data[i] * inv[c] +
                              (1.0 - spec.alpha) * sign(w_l.data[i]));
    }
    if (w_next) {
        const int fs = w_next->filter_len();
        for (std::size_t i = 0; i < w_next->size(); ++i) {
            const int c = static_cast<int>((i / fs) % w_next->ic());
            (*grad_next)[i] += scale * (spec.alpha * w_next->data[i] * inv[c] +
                                        (1.0 - spec.alpha) * sign(w_next->data[i]));
        }
    }
}

std::vector<double> oicsr_chain_penalties(const CriterionSpec& spec,
                                          const std::vector<const WeightTensor*>& convs) {
    if (spec.id != CriterionId::oicsr_gl)
        throw config_error("oicsr_chain_penalties is defined for oicsr-gl only");
    std::vector<double> shares(convs.size(), 0.0);
    for (std::size_t l = 0; l < convs.size(); ++l) {
        const WeightTensor* next = l + 1 < convs.size() ? convs[l + 1] : nullptr;
        if (next && next->ic() != convs[l]->oc())
            throw config_error("oicsr-gl: conv chain channel mismatch at layer " +
                               std::to_string(l));
        const std::vector<double> a = out_slice_sq(*convs[l]);
        std::vector<double> b;
        if (next) b = in_slice_sq(*next);
        double group = 0.0;
        for (int c = 0; c < convs[l]->oc(); ++c) group += std::sqrt(a[c] + (next ? b[c] : 0.0));
        shares[l] = spec.alpha * group + (1.0 - spec.alpha) * l1_all(*convs[l]);
    }
    return shares;
}

void oicsr_chain_add_subgradient(const CriterionSpec& spec,
                                 const std::vector<const WeightTensor*>& convs, double scale,
                                 const std::vector<std::vector<double>*>& grads) {
    if (spec.id != CriterionId::oicsr_gl)
        throw config_error("oicsr_chain_add_subgradient is defined for oicsr-gl only");
    if (grads.size() != convs.size())
        throw usage_error("oicsr chain: gradient buffer count mismatch");
    for (std::size_t l = 0; l < convs.size(); ++l) {
        const WeightTensor& w = *convs[l];
        const WeightTensor* next = l + 1 < convs.size() ? convs[l + 1] : nullptr;
        if (next && next->ic() != w.oc())
            throw config_error("oicsr-gl: conv chain channel mismatch at layer " +
                               std::to_string(l));
        std::vector<double>& gl = *grads[l];
        if (gl.size() != w.size()) throw usage_error("oicsr chain: grad size mismatch");

        const std::vector<double> a = out_slice_sq(w);
        std::vector<double> b;
        if (next) b = in_slice_sq(*next);
        std::vector<double> inv(w.oc());
        for (int c = 0; c < w.oc(); ++c)
            inv[c] = 1.0 / std::max(std::sqrt(a[c] + (next ? b[c] : 0.0)), spec.eps);

        // group term touches both tensors of the pair; L1 term only this one
        const std::size_t stride = static_cast<std::size_t>(w.ic()) * w.filter_len();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const int c = static_cast<int>(i / stride);
            gl[i] += scale * (spec.alpha * w.data[i] * inv[c] +
                              (1.0 - spec.alpha) * sign(w.data[i]));
        }
        if (next) {
            std::vector<double>& gn = *grads[l + 1];
            if (gn.size() != next->size()) throw usage_error("oicsr chain: grad size mismatch");
            const int fs = next->filter_len();
            for (std::size_t i = 0; i < next->size(); ++i) {
                const int c = static_cast<int>((i / fs) % next->ic());
                gn[i] += scale * spec.alpha * next->data[i] * inv[c];
            }
        }
    }
}

std::vector<std::vector<int>> group_index_map(Grouping g, const std::array<int, 4>& shape) {
    const int oc = shape[0], ic = shape[1], kh = shape[2], kw = shape[3];
    if (oc < 1 || ic < 1 || kh < 1 || kw < 1)
        throw config_error("group_index_map: all dimensions must be >= 1");
    const int fs = kh * kw;
    int n_groups = 0;
    switch (g) {
        case Grouping::filter_wise: n_groups = oc * ic; break;
        case Grouping::neuron_wise: n_groups = oc; break;
        case Grouping::feature_wise: n_groups = ic; break;
    }
    std::vector<std::vector<int>> groups(n_groups);
    const int total = oc * ic * fs;
    for (int idx = 0; idx < total; ++idx) {
        int gi = 0;
        switch (g) {
            case Grouping::filter_wise: gi = idx / fs; break;
            case Grouping::neuron_wise: gi = idx / (ic * fs); break;
            case Grouping::feature_wise: gi = (idx / fs) % ic; break;
        }
        groups[gi].push_back(idx);
    }
    return groups;
}

}  // namespace sreg
