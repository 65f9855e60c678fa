#pragma once

#include <stdexcept>
#include <string>

namespace sreg {

// Bad configuration: unknown criterion id, shape mismatch, invalid option.
// The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or malformed input data (IDX files, checkpoints). Exit code 3.
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric divergence during training or evaluation. Exit code 4.
// layer_index is the offending layer when known, -1 otherwise.
struct numeric_error : std::runtime_error {
    int layer_index = -1;
    explicit numeric_error(const std::string& msg, int layer = -1)
        : std::runtime_error(msg), layer_index(layer) {}
};

// API misuse (e.g. backward without a matching forward cache).
struct usage_error : std::logic_error {
    explicit usage_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace sreg
