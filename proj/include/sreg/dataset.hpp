#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "sreg/tensor.hpp"

namespace sreg {

// An immutable image classification dataset: pixels scaled to [0,1],
// one integer label in [0,10) per image.
struct Dataset {
    Tensor4 images;  // (n, 1, h, w)
    std::vector<int> labels;
    std::string name;

    int n() const { return images.n(); }
};

// Loads an IDX image/label file pair (gzip-compressed files are detected by
// their 0x1f 0x8b magic and inflated transparently). Throws data_error on
// bad magic, truncation, or image/label count mismatch.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writes the dataset back out as raw IDX files (pixels as round(p*255)).
// Reloading the written pair yields bit-identical arrays.
void save_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path);

// Loads train/test splits from a directory holding the four standard MNIST
// file names (train-images-idx3-ubyte, ... , optionally with .gz).
std::pair<Dataset, Dataset> load_dataset_dir(const std::string& dir, const std::string& name);

// Deterministic class-stratified sample of n_train images (each class count
// within +-1 of n_train / #classes). n_train == ds.n returns ds unchanged.
Dataset subset(const Dataset& ds, int n_train, std::uint64_t seed);

// Synthetic Gaussian-blob images, one blob position per class; linearly
// separable by a small CNN within a few epochs. Labels cycle 0..K-1.
Dataset synth_blobs(int n, int K, std::uint64_t seed);

}  // namespace sreg
