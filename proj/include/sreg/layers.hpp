#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sreg/tensor.hpp"

namespace sreg {

enum class LayerKind { conv, maxpool, relu, flatten, fc };

std::string to_string(LayerKind k);

struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    int out_channels = 0;  // conv, fc
    int kernel = 0;        // conv
    int stride = 1;        // conv
    int padding = 0;       // conv
    int pool = 2;          // maxpool window == stride
    bool has_bias = true;  // conv, fc
};

// A plain feed-forward stack. Conv and fc layers own one WeightTensor and
// one bias vector each; params/biases are indexed by param_index[layer].
struct Network {
    std::array<int, 3> input_shape{1, 28, 28};  // c, h, w
    std::vector<LayerSpec> layers;
    std::vector<WeightTensor> params;
    std::vector<std::vector<double>> biases;
    std::vector<int> param_index;  // -1 for layers without parameters

    int num_classes() const;
};

// conv(k, stride 1, pad k/2) + relu + 2x2 maxpool per conv width, then
// flatten and fc widths (relu between fc layers, none after the last).
Network make_simple_cnn(std::array<int, 3> input_shape, const std::vector<int>& conv_channels,
                        const std::vector<int>& fc_widths, int kernel);

// Uniform(-sqrt(6/(fan_in+fan_out)), +...) weights, zero biases.
void init_params(Network& net, std::uint64_t seed);

struct ForwardCache {
    std::vector<Tensor4> acts;  // acts[0] = input, acts[l+1] = output of layer l
    std::vector<std::vector<std::int32_t>> pool_argmax;  // per layer; used by maxpool
    bool valid = false;
};

struct Gradients {
    std::vector<std::vector<double>> weights;  // parallel to Network::params
    std::vector<std::vector<double>> biases;
};

// ---- kernels -------------------------------------------------------------

// Cross-correlation (no kernel flip). Output spatial dims are
// floor((in + 2*pad - k)/stride) + 1.
Tensor4 conv2d_forward(const Tensor4& in, const WeightTensor& w, const std::vector<double>& bias,
                       int stride, int padding);

void conv2d_backward(const Tensor4& grad_out, const Tensor4& input, const WeightTensor& w,
                     int stride, int padding, Tensor4& grad_in, std::vector<double>& grad_w,
                     std::vector<double>& grad_b);

Tensor4 relu_forward(const Tensor4& in);
Tensor4 relu_backward(const Tensor4& grad_out, const Tensor4& out);

Tensor4 maxpool_forward(const Tensor4& in, int window, std::vector<std::int32_t>& argmax);
Tensor4 maxpool_backward(const Tensor4& grad_out, const std::array<int, 4>& in_dims, int window,
                         const std::vector<std::int32_t>& argmax);

Tensor4 fc_forward(const Tensor4& in, const WeightTensor& w, const std::vector<double>& bias);
void fc_backward(const Tensor4& grad_out, const Tensor4& in, const WeightTensor& w,
                 Tensor4& grad_in, std::vector<double>& grad_w, std::vector<double>& grad_b);

// Mean over the batch of -log softmax(logits)[label]. grad_logits may be
// null when only the value is needed.
double softmax_cross_entropy(const Tensor4& logits, const std::vector<int>& labels,
                             Tensor4* grad_logits);

// ---- network-level passes ------------------------------------------------

// Runs the stack and fills the cache. Throws numeric_error with the layer
// index if activations go non-finite.
double forward_loss(const Network& net, const Batch& batch, ForwardCache& cache);

// Gradients of the mean cross-entropy loss w.r.t. every parameter.
// Requires the cache of a prior forward_loss on the same batch.
Gradients backward(const Network& net, const ForwardCache& cache, const std::vector<int>& labels);

Gradients zero_gradients(const Network& net);

// Logits for a batch of images (no loss, no label checks).
Tensor4 forward_logits(const Network& net, const Tensor4& images);

// Argmax class per image, evaluated in chunks of eval_batch.
std::vector<int> predict(const Network& net, const Tensor4& images, int eval_batch = 256);

}  // namespace sreg
