#pragma once

#include <string>

#include "sreg/tensor.hpp"

namespace sreg {

// Renders a conv tensor as a binary PGM (P5) grid: one kh x kw tile per
// (out, in) filter (rows = out-channels, cols = in-channels), each tile
// min-max normalized to 0..255 on its own, constant/all-zero tiles drawn
// mid-gray (128), tiles separated and surrounded by a 1-pixel black border.
// Deterministic bytes for a fixed tensor.
std::string filter_grid_pgm(const WeightTensor& w);

// Writes filter_grid_pgm(w) to path atomically. Errors on non-conv tensors.
void export_filter_grid(const WeightTensor& w, const std::string& path);

}  // namespace sreg
