#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sreg/errors.hpp"

namespace sreg {

// Dense row-major 4-d array of doubles, (n, c, h, w).
struct Tensor4 {
    std::array<int, 4> dims{0, 0, 0, 0};
    std::vector<double> data;

    Tensor4() = default;
    Tensor4(int n, int c, int h, int w)
        : dims{n, c, h, w}, data(static_cast<std::size_t>(n) * c * h * w, 0.0) {}

    int n() const { return dims[0]; }
    int c() const { return dims[1]; }
    int h() const { return dims[2]; }
    int w() const { return dims[3]; }

    std::size_t size() const { return data.size(); }

    std::size_t index(int n_, int c_, int h_, int w_) const {
        return ((static_cast<std::size_t>(n_) * dims[1] + c_) * dims[2] + h_) * dims[3] + w_;
    }
    double& at(int n_, int c_, int h_, int w_) { return data[index(n_, c_, h_, w_)]; }
    double at(int n_, int c_, int h_, int w_) const { return data[index(n_, c_, h_, w_)]; }

    // pointer to the (n, c) plane
    double* plane(int n_, int c_) { return data.data() + index(n_, c_, 0, 0); }
    const double* plane(int n_, int c_) const { return data.data() + index(n_, c_, 0, 0); }
};

enum class LayerParamKind { conv, fc };

std::string to_string(LayerParamKind k);

// One layer's weight tensor. Shape is (oc, ic, kh, kw); fully connected
// weights are stored with kh = kw = 1 so every consumer can use the 4-d view.
struct WeightTensor {
    std::vector<double> data;
    std::array<int, 4> shape{0, 0, 0, 0};  // oc, ic, kh, kw
    int layer_id = -1;
    LayerParamKind kind = LayerParamKind::conv;

    WeightTensor() = default;
    WeightTensor(int oc, int ic, int kh, int kw, int layer = -1,
                 LayerParamKind k = LayerParamKind::conv)
        : data(static_cast<std::size_t>(oc) * ic * kh * kw, 0.0),
          shape{oc, ic, kh, kw},
          layer_id(layer),
          kind(k) {
        if (oc < 1 || ic < 1 || kh < 1 || kw < 1)
            throw config_error("WeightTensor: all dimensions must be >= 1");
    }

    int oc() const { return shape[0]; }
    int ic() const { return shape[1]; }
    int kh() const { return shape[2]; }
    int kw() const { return shape[3]; }
    std::size_t size() const { return data.size(); }
    int filter_len() const { return shape[2] * shape[3]; }

    std::size_t index(int i, int j, int h, int w) const {
        return ((static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + h) * shape[3] + w;
    }
    double& at(int i, int j, int h, int w) { return data[index(i, j, h, w)]; }
    double at(int i, int j, int h, int w) const { return data[index(i, j, h, w)]; }

    const double* filter(int i, int j) const { return data.data() + index(i, j, 0, 0); }
    double* filter(int i, int j) { return data.data() + index(i, j, 0, 0); }
};

// A mini-batch: images (n, c, h, w) and one class label per image.
struct Batch {
    Tensor4 inputs;
    std::vector<int> labels;

    int size() const { return inputs.n(); }
};

// splitmix64; used to derive independent per-component seeds from the one
// config seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

}  // namespace sreg
