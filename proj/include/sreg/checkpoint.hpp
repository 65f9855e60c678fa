#pragma once

#include <string>
#include <vector>

#include "sreg/tensor.hpp"

namespace sreg {

// Versioned binary weight checkpoint:
//   magic "SREG", u32 version, u32 tensor count, then per tensor
//   i32 layer_id, u8 kind (0 = conv, 1 = fc), 4 x u32 shape, and
//   oc*ic*kh*kw little-endian 64-bit reals.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const std::vector<WeightTensor>& weights);
void save_checkpoint(const std::string& path, const std::vector<WeightTensor>& weights);

// Validates magic, version, and sizes; throws data_error on any mismatch.
std::vector<WeightTensor> load_checkpoint(const std::string& path);

}  // namespace sreg
