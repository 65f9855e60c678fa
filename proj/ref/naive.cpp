#include "naive.hpp"

#include <cmath>

#include "sreg/errors.hpp"

namespace sregref {

using sreg::CriterionId;
using sreg::CriterionSpec;
using sreg::Grouping;
using sreg::HierAxis;
using sreg::Tensor4;
using sreg::WeightTensor;

Tensor4 conv2d_forward_naive(const Tensor4& in, const WeightTensor& w,
                             const std::vector<double>& bias, int stride, int padding) {
    const int oh = (in.h() + 2 * padding - w.kh()) / stride + 1;
    const int ow = (in.w() + 2 * padding - w.kw()) / stride + 1;
    Tensor4 out(in.n(), w.oc(), oh, ow);
    for (int b = 0; b < in.n(); ++b)
        for (int o = 0; o < w.oc(); ++o)
            for (int y = 0; y < oh; ++y)
                for (int x = 0; x < ow; ++x) {
                    double acc = bias.empty() ? 0.0 : bias[o];
                    for (int c = 0; c < in.c(); ++c)
                        for (int kh = 0; kh < w.kh(); ++kh)
                            for (int kw = 0; kw < w.kw(); ++kw) {
                                const int iy = y * stride + kh - padding;
                                const int ix = x * stride + kw - padding;
                                if (iy < 0 || iy >= in.h() || ix < 0 || ix >= in.w()) continue;
                                acc += w.at(o, c, kh, kw) * in.at(b, c, iy, ix);
                            }
                    out.at(b, o, y, x) = acc;
                }
    return out;
}

namespace {

double group_l2(const WeightTensor& w, const std::vector<int>& g) {
    double s = 0.0;
    for (int i : g) s += w.data[i] * w.data[i];
    return std::sqrt(s);
}

double group_l1(const WeightTensor& w, const std::vector<int>& g) {
    double s = 0.0;
    for (int i : g) s += std::fabs(w.data[i]);
    return s;
}

double gl_naive(const WeightTensor& w, Grouping g) {
    double r = 0.0;
    for (const auto& grp : sreg::group_index_map(g, w.shape)) r += group_l2(w, grp);
    return r;
}

double es_naive(const WeightTensor& w, Grouping g) {
    double r = 0.0;
    for (const auto& grp : sreg::group_index_map(g, w.shape)) {
        const double l1 = group_l1(w, grp);
        r += l1 * l1;
    }
    return 0.5 * r;
}

double gl12_naive(const WeightTensor& w, Grouping g) {
    double r = 0.0;
    for (const auto& grp : sreg::group_index_map(g, w.shape)) r += std::sqrt(group_l1(w, grp));
    return r;
}

double l1_naive(const WeightTensor& w) {
    double r = 0.0;
    for (double v : w.data) r += std::fabs(v);
    return r;
}

double l2_naive(const WeightTensor& w) {
    double r = 0.0;
    for (double v : w.data) r += v * v;
    return r;
}

// per-filter inner sums written out as in Eqs. 9-14
double filter_l2(const WeightTensor& w, int i, int j) {
    double s = 0.0;
    for (int h = 0; h < w.kh(); ++h)
        for (int x = 0; x < w.kw(); ++x) s += w.at(i, j, h, x) * w.at(i, j, h, x);
    return std::sqrt(s);
}

double filter_l1(const WeightTensor& w, int i, int j) {
    double s = 0.0;
    for (int h = 0; h < w.kh(); ++h)
        for (int x = 0; x < w.kw(); ++x) s += std::fabs(w.at(i, j, h, x));
    return s;
}

enum class Fam { gl, es, gl12 };

double hier_naive(const WeightTensor& w, HierAxis axis, Fam fam, bool square) {
    const bool feat = axis == HierAxis::feature_based;
    const int n_outer = feat ? w.ic() : w.oc();
    const int n_inner = feat ? w.oc() : w.ic();
    double r = 0.0;
    for (int j = 0; j < n_outer; ++j) {
        double s = 0.0;
        for (int i = 0; i < n_inner; ++i) {
            const int oc_i = feat ? i : j;
            const int ic_j = feat ? j : i;
            switch (fam) {
                case Fam::gl: s += filter_l2(w, oc_i, ic_j); break;
                case Fam::es: {
                    const double l1 = filter_l1(w, oc_i, ic_j);
                    s += l1 * l1;
                    break;
                }
                case Fam::gl12: s += std::sqrt(filter_l1(w, oc_i, ic_j)); break;
            }
        }
        r += square ? s * s : std::sqrt(s);
    }
    return r;
}

}  // namespace

double penalty_naive(const CriterionSpec& spec, const WeightTensor& w) {
    switch (spec.id) {
        case CriterionId::l2: return l2_naive(w);
        case CriterionId::l1: return l1_naive(w);
        case CriterionId::gl: return gl_naive(w, spec.grouping);
        case CriterionId::es: return es_naive(w, spec.grouping);
        case CriterionId::gl12: return gl12_naive(w, spec.grouping);
        case CriterionId::sgl:
            return spec.alpha * gl_naive(w, spec.grouping) + (1.0 - spec.alpha) * l1_naive(w);
        case CriterionId::sgl12:
            return spec.alpha * gl12_naive(w, spec.grouping) + (1.0 - spec.alpha) * l1_naive(w);
        case CriterionId::cges:
            return (1.0 - spec.m) * gl_naive(w, spec.grouping) + spec.m * es_naive(w, spec.grouping);
        case CriterionId::oicsr_gl: return penalty_pair_naive(spec, w, nullptr);
        case CriterionId::hsqrt_gl: return hier_naive(w, spec.hier_axis, Fam::gl, false);
        case CriterionId::hsq_gl: return hier_naive(w, spec.hier_axis, Fam::gl, true);
        case CriterionId::hsqrt_es: return hier_naive(w, spec.hier_axis, Fam::es, false);
        case CriterionId::hsq_es: return hier_naive(w, spec.hier_axis, Fam::es, true);
        case CriterionId::hsqrt_gl12: return hier_naive(w, spec.hier_axis, Fam::gl12, false);
        case CriterionId::hsq_gl12: return hier_naive(w, spec.hier_axis, Fam::gl12, true);
        case CriterionId::shsqrt_gl12:
            return spec.alpha * hier_naive(w, spec.hier_axis, Fam::gl12, false) +
                   (1.0 - spec.alpha) * l1_naive(w);
        case CriterionId::shsq_gl12:
            return spec.alpha * hier_naive(w, spec.hier_axis, Fam::gl12, true) +
                   (1.0 - spec.alpha) * l1_naive(w);
    }
    throw sreg::config_error("penalty_naive: unknown criterion id");
}

double penalty_pair_naive(const CriterionSpec& spec, const WeightTensor& w_l,
                          const WeightTensor* w_next) {
    double group = 0.0;
    for (int c = 0; c < w_l.oc(); ++c) {
        double s = 0.0;
        for (int j = 0; j < w_l.ic(); ++j)
            for (int h = 0; h < w_l.kh(); ++h)
                for (int x = 0; x < w_l.kw(); ++x) s += w_l.at(c, j, h, x) * w_l.at(c, j, h, x);
        if (w_next)
            for (int o = 0; o < w_next->oc(); ++o)
                for (int h = 0; h < w_next->kh(); ++h)
                    for (int x = 0; x < w_next->kw(); ++x)
                        s += w_next->at(o, c, h, x) * w_next->at(o, c, h, x);
        group += std::sqrt(s);
    }
    double l1 = l1_naive(w_l) + (w_next ? l1_naive(*w_next) : 0.0);
    return spec.alpha * group + (1.0 - spec.alpha) * l1;
}

NaiveSparsity sparsity_naive(const WeightTensor& w, double tau) {
    NaiveSparsity s;
    s.weights = static_cast<long long>(w.size());
    for (double v : w.data)
        if (std::fabs(v) < tau) ++s.zeros;
    for (int i = 0; i < w.oc(); ++i)
        for (int j = 0; j < w.ic(); ++j) {
            bool dead = true;
            for (int h = 0; h < w.kh() && dead; ++h)
                for (int x = 0; x < w.kw() && dead; ++x)
                    if (std::fabs(w.at(i, j, h, x)) >= tau) dead = false;
            if (dead) ++s.dead_filters;
        }
    for (int i = 0; i < w.oc(); ++i) {
        bool dead = true;
        for (int j = 0; j < w.ic() && dead; ++j)
            for (int h = 0; h < w.kh() && dead; ++h)
                for (int x = 0; x < w.kw() && dead; ++x)
                    if (std::fabs(w.at(i, j, h, x)) >= tau) dead = false;
        if (dead) ++s.dead_out;
    }
    for (int j = 0; j < w.ic(); ++j) {
        bool dead = true;
        for (int i = 0; i < w.oc() && dead; ++i)
            for (int h = 0; h < w.kh() && dead; ++h)
                for (int x = 0; x < w.kw() && dead; ++x)
                    if (std::fabs(w.at(i, j, h, x)) >= tau) dead = false;
        if (dead) ++s.dead_in;
    }
    return s;
}

}  // namespace sregref
