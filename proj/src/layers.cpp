#include "sreg/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sreg {

std::string to_string(LayerKind k) {
    switch (k) {
        case LayerKind::conv: return "conv";
        case LayerKind::maxpool: return "maxpool";
        case LayerKind::relu: return "relu";
        case LayerKind::flatten: return "flatten";
        case LayerKind::fc: return "fc";
    }
    return "?";
}

std::string to_string(LayerParamKind k) {
    return k == LayerParamKind::conv ? "conv" : "fc";
}

int Network::num_classes() const {
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        if (it->kind == LayerKind::fc) return it->out_channels;
    throw config_error("network has no fc output layer");
}

Network make_simple_cnn(std::array<int, 3> input_shape, const std::vector<int>& conv_channels,
                        const std::vector<int>& fc_widths, int kernel) {
    if (fc_widths.empty()) throw config_error("arch needs at least one fc width");
    if (kernel < 1 || kernel % 2 == 0)
        throw config_error("arch kernel size must be odd and >= 1");
    Network net;
    net.input_shape = input_shape;
    int h = input_shape[1], w = input_shape[2];
    for (int oc : conv_channels) {
        if (oc < 1) throw config_error("conv channel count must be >= 1");
        net.layers.push_back({LayerKind::conv, oc, kernel, 1, kernel / 2, 2, true});
        net.layers.push_back({LayerKind::relu});
        net.layers.push_back({LayerKind::maxpool, 0, 0, 1, 0, 2, false});
        h = h / 2;
        w = w / 2;
        if (h < 1 || w < 1) throw config_error("too many pooling stages for the input size");
    }
    net.layers.push_back({LayerKind::flatten});
    for (std::size_t i = 0; i < fc_widths.size(); ++i) {
        if (fc_widths[i] < 1) throw config_error("fc width must be >= 1");
        net.layers.push_back({LayerKind::fc, fc_widths[i], 0, 1, 0, 2, true});
        if (i + 1 < fc_widths.size()) net.layers.push_back({LayerKind::relu});
    }

    // allocate parameters
    net.param_index.assign(net.layers.size(), -1);
    int in_c = input_shape[0];
    int flat = 0;
    h = input_shape[1];
    w = input_shape[2];
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LayerSpec& spec = net.layers[l];
        switch (spec.kind) {
            case LayerKind::conv:
                net.param_index[l] = static_cast<int>(net.params.size());
                net.params.emplace_back(spec.out_channels, in_c, spec.kernel, spec.kernel,
                                        static_cast<int>(l), LayerParamKind::conv);
                net.biases.emplace_back(spec.out_channels, 0.0);
                in_c = spec.out_channels;
                break;
            case LayerKind::maxpool:
                h /= spec.pool;
                w /= spec.pool;
                break;
            case LayerKind::flatten:
                flat = in_c * h * w;
                break;
            case LayerKind::fc:
                net.param_index[l] = static_cast<int>(net.params.size());
                net.params.emplace_back(spec.out_channels, flat, 1, 1, static_cast<int>(l),
                                        LayerParamKind::fc);
                net.biases.emplace_back(spec.out_channels, 0.0);
                flat = spec.out_channels;
                break;
            case LayerKind::relu:
                break;
        }
    }
    return net;
}

void init_params(Network& net, std::uint64_t seed) {
    for (std::size_t p = 0; p < net.params.size(); ++p) {
        WeightTensor& w = net.params[p];
        double fan_in, fan_out;
        if (w.kind == LayerParamKind::conv) {
            fan_in = static_cast<double>(w.ic()) * w.kh() * w.kw();
            fan_out = static_cast<double>(w.oc()) * w.kh() * w.kw();
        } else {
            fan_in = w.ic();
            fan_out = w.oc();
        }
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::mt19937_64 rng(derive_seed(seed, p));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& v : w.data) v = dist(rng);
        std::fill(net.biases[p].begin(), net.biases[p].end(), 0.0);
    }
}

// ---- conv ------------------------------------------------------------------

namespace {

// correlate one padded input plane with one kernel row, accumulating into a
// padded dst; row widths are multiples of 8 so the loop vectorizes cleanly
template <int K>
void corr_rows_fixed(const double* src, int pw, const double* ker_row, int kh, double* dst,
                     int oh, int owp) {
    for (int y = 0; y < oh; ++y) {
        const double* row = src + static_cast<std::size_t>(y + kh) * pw;
        double* drow = dst + static_cast<std::size_t>(y) * owp;
        for (int x = 0; x < owp; ++x) {
            double acc = 0.0;
            for (int t = 0; t < K; ++t) acc += ker_row[t] * row[x + t];
            drow[x] += acc;
        }
    }
}

void corr_rows_generic(const double* src, int pw, const double* ker_row, int kh, int k,
                       double* dst, int oh, int owp) {
    for (int y = 0; y < oh; ++y) {
        const double* row = src + static_cast<std::size_t>(y + kh) * pw;
        double* drow = dst + static_cast<std::size_t>(y) * owp;
        for (int x = 0; x < owp; ++x) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += ker_row[t] * row[x + t];
            drow[x] += acc;
        }
    }
}

int round_up8(int v) { return (v + 7) & ~7; }

// zero-padded copy: `pad` border rows/columns plus extra zero columns on the
// right so every row is `pw` wide
Tensor4 pad_input_rows(const Tensor4& in, int pad, int pw) {
    Tensor4 out(in.n(), in.c(), in.h() + 2 * pad, pw);
#pragma omp parallel for schedule(static)
    for (int bc = 0; bc < in.n() * in.c(); ++bc) {
        const int b = bc / in.c(), c = bc % in.c();
        const double* src = in.plane(b, c);
        double* dst = out.plane(b, c);
        for (int y = 0; y < in.h(); ++y)
            std::copy(src + static_cast<std::size_t>(y) * in.w(),
                      src + static_cast<std::size_t>(y + 1) * in.w(),
                      dst + static_cast<std::size_t>(y + pad) * pw + pad);
    }
    return out;
}

// grad_out with rows zero-extended to owp
Tensor4 pad_rows(const Tensor4& g, int owp) {
    Tensor4 out(g.n(), g.c(), g.h(), owp);
#pragma omp parallel for schedule(static)
    for (int bc = 0; bc < g.n() * g.c(); ++bc) {
        const int b = bc / g.c(), c = bc % g.c();
        const double* src = g.plane(b, c);
        double* dst = out.plane(b, c);
        for (int y = 0; y < g.h(); ++y)
            std::copy(src + static_cast<std::size_t>(y) * g.w(),
                      src + static_cast<std::size_t>(y + 1) * g.w(),
                      dst + static_cast<std::size_t>(y) * owp);
    }
    return out;
}

int conv_out_dim(int in, int pad, int k, int stride) {
    return (in + 2 * pad - k) / stride + 1;
}

}  // namespace

Tensor4 conv2d_forward(const Tensor4& in, const WeightTensor& w, const std::vector<double>& bias,
                       int stride, int padding) {
    if (stride < 1 || padding < 0) throw config_error("conv: stride must be >= 1, padding >= 0");
    if (in.c() != w.ic())
        throw config_error("conv: input channels " + std::to_string(in.c()) +
                           " != weight in-channels " + std::to_string(w.ic()));
    if (!bias.empty() && static_cast<int>(bias.size()) != w.oc())
        throw config_error("conv: bias length != out-channels");
    const int k = w.kh();
    if (w.kw() != k) throw config_error("conv: only square kernels are supported");
    const int oh = conv_out_dim(in.h(), padding, k, stride);
    const int ow = conv_out_dim(in.w(), padding, k, stride);
    if (oh < 1 || ow < 1) throw config_error("conv: kernel larger than padded input");

    Tensor4 out(in.n(), w.oc(), oh, ow);

    if (stride == 1) {
        // rows padded to a multiple of 8; extra columns are zero and the
        // results computed there are cropped
        const int owp = round_up8(ow);
        const int pw = std::max(in.w() + 2 * padding, owp + k - 1);
        const Tensor4 padded = pad_input_rows(in, padding, pw);

#pragma omp parallel for schedule(static)
        for (int bo = 0; bo < in.n() * w.oc(); ++bo) {
            const int b = bo / w.oc(), o = bo % w.oc();
            std::vector<double> scratch(static_cast<std::size_t>(oh) * owp, 0.0);
            for (int c = 0; c < w.ic(); ++c) {
                const double* src = padded.plane(b, c);
                const double* ker = w.filter(o, c);
                for (int kh = 0; kh < k; ++kh) {
                    const double* ker_row = ker + static_cast<std::size_t>(kh) * k;
                    switch (k) {
                        case 1: corr_rows_fixed<1>(src, pw, ker_row, kh, scratch.data(), oh, owp); break;
                        case 3: corr_rows_fixed<3>(src, pw, ker_row, kh, scratch.data(), oh, owp); break;
                        case 5: corr_rows_fixed<5>(src, pw, ker_row, kh, scratch.data(), oh, owp); break;
                        case 7: corr_rows_fixed<7>(src, pw, ker_row, kh, scratch.data(), oh, owp); break;
                        default: corr_rows_generic(src, pw, ker_row, kh, k, scratch.data(), oh, owp); break;
                    }
                }
            }
            double* dst = out.plane(b, o);
            const double b0 = bias.empty() ? 0.0 : bias[o];
            for (int y = 0; y < oh; ++y)
                for (int x = 0; x < ow; ++x)
                    dst[static_cast<std::size_t>(y) * ow + x] =
                        scratch[static_cast<std::size_t>(y) * owp + x] + b0;
        }
        return out;
    }

    const int pw = in.w() + 2 * padding;
    const Tensor4 padded = pad_input_rows(in, padding, pw);
#pragma omp parallel for schedule(static)
    for (int bo = 0; bo < in.n() * w.oc(); ++bo) {
        const int b = bo / w.oc(), o = bo % w.oc();
        double* dst = out.plane(b, o);
        std::fill(dst, dst + static_cast<std::size_t>(oh) * ow, bias.empty() ? 0.0 : bias[o]);
        for (int c = 0; c < w.ic(); ++c) {
            const double* src = padded.plane(b, c);
            const double* ker = w.filter(o, c);
            for (int y = 0; y < oh; ++y)
                for (int x = 0; x < ow; ++x) {
                    double acc = 0.0;
                    for (int kh = 0; kh < k; ++kh)
                        for (int kw = 0; kw < k; ++kw)
                            acc += ker[kh * k + kw] *
                                   src[static_cast<std::size_t>(y * stride + kh) * pw +
                                       (x * stride + kw)];
                    dst[static_cast<std::size_t>(y) * ow + x] += acc;
                }
        }
    }
    return out;
}

void conv2d_backward(const Tensor4& grad_out, const Tensor4& input, const WeightTensor& w,
                     int stride, int padding, Tensor4& grad_in, std::vector<double>& grad_w,
                     std::vector<double>& grad_b) {
    const int k = w.kh();
    const int n = input.n(), ic = w.ic(), oc = w.oc();
    const int oh = grad_out.h(), ow = grad_out.w();
    if (grad_out.n() != n || grad_out.c() != oc ||
        oh != conv_out_dim(input.h(), padding, k, stride) ||
        ow != conv_out_dim(input.w(), padding, k, stride))
        throw usage_error("conv backward: grad_out does not match the cached forward shapes");

    grad_w.assign(w.size(), 0.0);
    grad_b.assign(oc, 0.0);

    // Stride 1: zero-extend grad_out rows to the padded-input row width pw.
    // Each kernel tap then reduces to ONE contiguous dot/axpy of length
    // (oh-1)*pw + ow against the padded input plane -- the pad columns are
    // zero, so the cross-row spill terms vanish, and pw >= ow + k - 1 keeps
    // the shifted tail inside the plane.
    const bool fast = stride == 1;
    const int owp = fast ? round_up8(ow) : ow;
    const int pw = fast ? std::max(input.w() + 2 * padding, owp + k - 1)
                        : input.w() + 2 * padding;
    const Tensor4 padded = pad_input_rows(input, padding, pw);
    const Tensor4 gpadded = fast && pw != ow ? pad_rows(grad_out, pw) : Tensor4();
    const Tensor4& g_ext = fast && pw != ow ? gpadded : grad_out;
    const std::int64_t flat =
        fast ? static_cast<std::int64_t>(oh - 1) * pw + ow : 0;

#pragma omp parallel for schedule(static)
    for (int o = 0; o < oc; ++o) {
        double acc = 0.0;
        for (int b = 0; b < n; ++b) {
            const double* g = grad_out.plane(b, o);
            for (int i = 0; i < oh * ow; ++i) acc += g[i];
        }
        grad_b[o] = acc;
    }

#pragma omp parallel for schedule(static)
    for (int ocic = 0; ocic < oc * ic; ++ocic) {
        const int o = ocic / ic, c = ocic % ic;
        double* gw = grad_w.data() + w.index(o, c, 0, 0);
        for (int b = 0; b < n; ++b) {
            const double* g = g_ext.plane(b, o);
            const double* src = padded.plane(b, c);
            for (int kh = 0; kh < k; ++kh)
                for (int kw = 0; kw < k; ++kw) {
                    double acc = 0.0;
                    if (fast) {
                        const double* s2 = src + static_cast<std::size_t>(kh) * pw + kw;
#pragma omp simd reduction(+ : acc)
                        for (std::int64_t i = 0; i < flat; ++i) acc += g[i] * s2[i];
                    } else {
                        for (int y = 0; y < oh; ++y) {
                            const double* grow = g + static_cast<std::size_t>(y) * ow;
                            const double* srow =
                                src + static_cast<std::size_t>(y * stride + kh) * pw + kw;
#pragma omp simd reduction(+ : acc)
                            for (int x = 0; x < ow; ++x) acc += grow[x] * srow[x * stride];
                        }
                    }
                    gw[kh * k + kw] += acc;
                }
        }
    }

    grad_in = Tensor4(n, ic, input.h(), input.w());
    const int ph = input.h() + 2 * padding;
#pragma omp parallel for schedule(static)
    for (int bc = 0; bc < n * ic; ++bc) {
        const int b = bc / ic, c = bc % ic;
        std::vector<double> gpad(static_cast<std::size_t>(ph) * pw, 0.0);
        for (int o = 0; o < oc; ++o) {
            const double* g = g_ext.plane(b, o);
            const double* ker = w.filter(o, c);
            for (int kh = 0; kh < k; ++kh)
                for (int kw = 0; kw < k; ++kw) {
                    const double kv = ker[kh * k + kw];
                    if (fast) {
                        double* p2 = gpad.data() + static_cast<std::size_t>(kh) * pw + kw;
#pragma omp simd
                        for (std::int64_t i = 0; i < flat; ++i) p2[i] += kv * g[i];
                    } else {
                        for (int y = 0; y < oh; ++y) {
                            const double* grow = g + static_cast<std::size_t>(y) * ow;
                            double* prow =
                                gpad.data() + static_cast<std::size_t>(y * stride + kh) * pw + kw;
                            for (int x = 0; x < ow; ++x) prow[x * stride] += kv * grow[x];
                        }
                    }
                }
        }
        double* dst = grad_in.plane(b, c);
        for (int y = 0; y < input.h(); ++y)
            for (int x = 0; x < input.w(); ++x)
                dst[static_cast<std::size_t>(y) * input.w() + x] =
                    gpad[static_cast<std::size_t>(y + padding) * pw + (x + padding)];
    }
}

// ---- relu / maxpool / fc -----------------------------------------------------

Tensor4 relu_forward(const Tensor4& in) {
    Tensor4 out = in;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(out.size()); ++i) {
        // NaN must pass through, or a mid-network divergence gets laundered
        // into zeros and the non-finite-loss detector never fires
        const double v = out.data[i];
        out.data[i] = v > 0.0 ? v : (v == v ? 0.0 : v);
    }
    return out;
}

Tensor4 relu_backward(const Tensor4& grad_out, const Tensor4& out) {
    Tensor4 gin = grad_out;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(gin.size()); ++i)
        if (out.data[i] <= 0.0) gin.data[i] = 0.0;
    return gin;
}

Tensor4 maxpool_forward(const Tensor4& in, int window, std::vector<std::int32_t>& argmax) {
    if (window < 1) throw config_error("maxpool: window must be >= 1");
    const int oh = in.h() / window, ow = in.w() / window;
    if (oh < 1 || ow < 1) throw config_error("maxpool: window larger than input");
    Tensor4 out(in.n(), in.c(), oh, ow);
    argmax.assign(out.size(), 0);
#pragma omp parallel for schedule(static)
    for (int bc = 0; bc < in.n() * in.c(); ++bc) {
        const int b = bc / in.c(), c = bc % in.c();
        const double* src = in.plane(b, c);
        double* dst = out.plane(b, c);
        std::int32_t* am = argmax.data() + out.index(b, c, 0, 0);
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                double best = -std::numeric_limits<double>::infinity();
                std::int32_t best_idx = 0;
                for (int dy = 0; dy < window; ++dy)
                    for (int dx = 0; dx < window; ++dx) {
                        const int iy = y * window + dy, ix = x * window + dx;
                        const double v = src[static_cast<std::size_t>(iy) * in.w() + ix];
                        if (v > best) {
                            best = v;
                            best_idx = static_cast<std::int32_t>(iy * in.w() + ix);
                        }
                    }
                dst[static_cast<std::size_t>(y) * ow + x] = best;
                am[static_cast<std::size_t>(y) * ow + x] = best_idx;
            }
    }
    return out;
}

Tensor4 maxpool_backward(const Tensor4& grad_out, const std::array<int, 4>& in_dims, int window,
                         const std::vector<std::int32_t>& argmax) {
    if (argmax.size() != grad_out.size())
        throw usage_error("maxpool backward: argmax cache does not match grad_out");
    (void)window;
    Tensor4 gin(in_dims[0], in_dims[1], in_dims[2], in_dims[3]);
#pragma omp parallel for schedule(static)
    for (int bc = 0; bc < grad_out.n() * grad_out.c(); ++bc) {
        const int b = bc / grad_out.c(), c = bc % grad_out.c();
        const double* g = grad_out.plane(b, c);
        const std::int32_t* am = argmax.data() + grad_out.index(b, c, 0, 0);
        double* dst = gin.plane(b, c);
        for (int i = 0; i < grad_out.h() * grad_out.w(); ++i) dst[am[i]] += g[i];
    }
    return gin;
}

Tensor4 fc_forward(const Tensor4& in, const WeightTensor& w, const std::vector<double>& bias) {
    const int d = in.c() * in.h() * in.w();
    if (d != w.ic())
        throw config_error("fc: input width " + std::to_string(d) + " != weight in-dim " +
                           std::to_string(w.ic()));
    Tensor4 out(in.n(), w.oc(), 1, 1);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < in.n(); ++b) {
        const double* x = in.data.data() + static_cast<std::size_t>(b) * d;
        double* y = out.data.data() + static_cast<std::size_t>(b) * w.oc();
        for (int o = 0; o < w.oc(); ++o) {
            const double* row = w.data.data() + static_cast<std::size_t>(o) * d;
            double acc = bias.empty() ? 0.0 : bias[o];
#pragma omp simd reduction(+ : acc)
            for (int i = 0; i < d; ++i) acc += row[i] * x[i];
            y[o] = acc;
        }
    }
    return out;
}

void fc_backward(const Tensor4& grad_out, const Tensor4& in, const WeightTensor& w,
                 Tensor4& grad_in, std::vector<double>& grad_w, std::vector<double>& grad_b) {
    const int n = in.n(), d = w.ic(), oc = w.oc();
    if (grad_out.n() != n || grad_out.c() != oc)
        throw usage_error("fc backward: grad_out does not match the cached forward shapes");
    grad_w.assign(w.size(), 0.0);
    grad_b.assign(oc, 0.0);
#pragma omp parallel for schedule(static)
    for (int o = 0; o < oc; ++o) {
        double* gw = grad_w.data() + static_cast<std::size_t>(o) * d;
        double gb = 0.0;
        for (int b = 0; b < n; ++b) {
            const double g = grad_out.data[static_cast<std::size_t>(b) * oc + o];
            gb += g;
            const double* x = in.data.data() + static_cast<std::size_t>(b) * d;
            for (int i = 0; i < d; ++i) gw[i] += g * x[i];
        }
        grad_b[o] = gb;
    }
    grad_in = Tensor4(n, in.c(), in.h(), in.w());
#pragma omp parallel for schedule(static)
    for (int b = 0; b < n; ++b) {
        const double* g = grad_out.data.data() + static_cast<std::size_t>(b) * oc;
        double* gx = grad_in.data.data() + static_cast<std::size_t>(b) * d;
        for (int o = 0; o < oc; ++o) {
            const double* row = w.data.data() + static_cast<std::size_t>(o) * d;
            const double gv = g[o];
            for (int i = 0; i < d; ++i) gx[i] += gv * row[i];
        }
    }
}

double softmax_cross_entropy(const Tensor4& logits, const std::vector<int>& labels,
                             Tensor4* grad_logits) {
    const int n = logits.n();
    const int K = logits.c() * logits.h() * logits.w();
    if (static_cast<int>(labels.size()) != n)
        throw config_error("loss: label count != batch size");
    for (int b = 0; b < n; ++b)
        if (labels[b] < 0 || labels[b] >= K)
            throw config_error("loss: label " + std::to_string(labels[b]) +
                               " outside [0, " + std::to_string(K) + ")");
    if (grad_logits) *grad_logits = Tensor4(logits.n(), logits.c(), logits.h(), logits.w());

    std::vector<double> per_sample(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < n; ++b) {
        const double* z = logits.data.data() + static_cast<std::size_t>(b) * K;
        double m = z[0];
        for (int j = 1; j < K; ++j) m = std::max(m, z[j]);
        double denom = 0.0;
        for (int j = 0; j < K; ++j) denom += std::exp(z[j] - m);
        per_sample[b] = -(z[labels[b]] - m) + std::log(denom);
        if (grad_logits) {
            double* g = grad_logits->data.data() + static_cast<std::size_t>(b) * K;
            for (int j = 0; j < K; ++j) {
                const double p = std::exp(z[j] - m) / denom;
                g[j] = (p - (j == labels[b] ? 1.0 : 0.0)) / n;
            }
        }
    }
    double total = 0.0;  // serial sum keeps the result independent of thread count
    for (int b = 0; b < n; ++b) total += per_sample[b];
    return total / n;
}

// ---- network-level ----------------------------------------------------------

namespace {

bool all_finite(const Tensor4& t) {
    for (double v : t.data)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor4 run_layer(const Network& net, std::size_t l, const Tensor4& in, ForwardCache* cache) {
    const LayerSpec& spec = net.layers[l];
    switch (spec.kind) {
        case LayerKind::conv: {
            const int p = net.param_index[l];
            return conv2d_forward(in, net.params[p], net.biases[p], spec.stride, spec.padding);
        }
        case LayerKind::relu:
            return relu_forward(in);
        case LayerKind::maxpool: {
            std::vector<std::int32_t> argmax;
            Tensor4 out = maxpool_forward(in, spec.pool, argmax);
            if (cache) cache->pool_argmax[l] = std::move(argmax);
            return out;
        }
        case LayerKind::flatten: {
            Tensor4 out = in;
            out.dims = {in.n(), in.c() * in.h() * in.w(), 1, 1};
            return out;
        }
        case LayerKind::fc: {
            const int p = net.param_index[l];
            return fc_forward(in, net.params[p], net.biases[p]);
        }
    }
    throw config_error("unknown layer kind");
}

Tensor4 run_stack(const Network& net, const Tensor4& images, ForwardCache* cache) {
    if (images.c() != net.input_shape[0] || images.h() != net.input_shape[1] ||
        images.w() != net.input_shape[2])
        throw config_error("input images do not match the network input shape");
    Tensor4 cur = images;
    if (cache) {
        cache->acts.clear();
        cache->acts.reserve(net.layers.size() + 1);
        cache->pool_argmax.assign(net.layers.size(), {});
        cache->acts.push_back(cur);
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        cur = run_layer(net, l, cur, cache);
        if (cache) cache->acts.push_back(cur);
    }
    return cur;
}

}  // namespace

double forward_loss(const Network& net, const Batch& batch, ForwardCache& cache) {
    cache.valid = false;
    Tensor4 logits = run_stack(net, batch.inputs, &cache);
    double loss = softmax_cross_entropy(logits, batch.labels, nullptr);
    if (!std::isfinite(loss)) {
        // attribute the divergence to the first layer that went non-finite
        for (std::size_t l = 1; l < cache.acts.size(); ++l)
            if (!all_finite(cache.acts[l]))
                throw numeric_error("non-finite activations at layer " + std::to_string(l - 1) +
                                        " (" + to_string(net.layers[l - 1].kind) + ")",
                                    static_cast<int>(l - 1));
        throw numeric_error("non-finite loss");
    }
    cache.valid = true;
    return loss;
}

Gradients zero_gradients(const Network& net) {
    Gradients g;
    g.weights.resize(net.params.size());
    g.biases.resize(net.params.size());
    for (std::size_t p = 0; p < net.params.size(); ++p) {
        g.weights[p].assign(net.params[p].size(), 0.0);
        g.biases[p].assign(net.biases[p].size(), 0.0);
    }
    return g;
}

Gradients backward(const Network& net, const ForwardCache& cache, const std::vector<int>& labels) {
    if (!cache.valid || cache.acts.size() != net.layers.size() + 1)
        throw usage_error("backward requires the cache of a completed forward_loss");
    Gradients grads = zero_gradients(net);

    Tensor4 grad;
    softmax_cross_entropy(cache.acts.back(), labels, &grad);

    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const LayerSpec& spec = net.layers[li];
        const Tensor4& in = cache.acts[li];
        const Tensor4& out = cache.acts[li + 1];
        switch (spec.kind) {
            case LayerKind::conv: {
                const int p = net.param_index[li];
                Tensor4 gin;
                conv2d_backward(grad, in, net.params[p], spec.stride, spec.padding, gin,
                                grads.weights[p], grads.biases[p]);
                grad = std::move(gin);
                break;
            }
            case LayerKind::relu:
                grad = relu_backward(grad, out);
                break;
            case LayerKind::maxpool:
                grad = maxpool_backward(grad, in.dims, spec.pool, cache.pool_argmax[li]);
                break;
            case LayerKind::flatten:
                grad.dims = in.dims;
                break;
            case LayerKind::fc: {
                const int p = net.param_index[li];
                Tensor4 gin;
                fc_backward(grad, in, net.params[p], gin, grads.weights[p], grads.biases[p]);
                grad = std::move(gin);
                break;
            }
        }
    }
    return grads;
}

Tensor4 forward_logits(const Network& net, const Tensor4& images) {
    return run_stack(net, images, nullptr);
}

std::vector<int> predict(const Network& net, const Tensor4& images, int eval_batch) {
    const int n = images.n();
    const int plane = images.c() * images.h() * images.w();
    std::vector<int> out(n, 0);
    for (int start = 0; start < n; start += eval_batch) {
        const int m = std::min(eval_batch, n - start);
        Tensor4 chunk(m, images.c(), images.h(), images.w());
        std::copy(images.data.begin() + static_cast<std::size_t>(start) * plane,
                  images.data.begin() + static_cast<std::size_t>(start + m) * plane,
                  chunk.data.begin());
        Tensor4 logits = forward_logits(net, chunk);
        const int K = logits.c();
        for (int b = 0; b < m; ++b) {
            const double* z = logits.data.data() + static_cast<std::size_t>(b) * K;
            out[start + b] = static_cast<int>(std::max_element(z, z + K) - z);
        }
    }
    return out;
}

}  // namespace sreg
