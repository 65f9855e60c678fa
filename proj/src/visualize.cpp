#include "sreg/visualize.hpp"

#include <algorithm>
#include <cmath>

#include "sreg/errors.hpp"
#include "sreg/io_util.hpp"

namespace sreg {

std::string filter_grid_pgm(const WeightTensor& w) {
    if (w.kind != LayerParamKind::conv)
        throw config_error("filter grid export requires a conv layer");
    const int rows = w.oc(), cols = w.ic(), kh = w.kh(), kw = w.kw();
    const int height = rows * kh + rows + 1;
    const int width = cols * kw + cols + 1;

    std::vector<unsigned char> px(static_cast<std::size_t>(height) * width, 0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double* f = w.filter(i, j);
            double lo = f[0], hi = f[0];
            for (int t = 1; t < kh * kw; ++t) {
                lo = std::min(lo, f[t]);
                hi = std::max(hi, f[t]);
            }
            const int y0 = 1 + i * (kh + 1), x0 = 1 + j * (kw + 1);
            for (int y = 0; y < kh; ++y)
                for (int x = 0; x < kw; ++x) {
                    unsigned char v = 128;
                    if (hi > lo)
                        v = static_cast<unsigned char>(
                            std::lround((f[y * kw + x] - lo) / (hi - lo) * 255.0));
                    px[static_cast<std::size_t>(y0 + y) * width + (x0 + x)] = v;
                }
        }

    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(px.data()), px.size());
    return out;
}

void export_filter_grid(const WeightTensor& w, const std::string& path) {
    atomic_write(path, filter_grid_pgm(w));
}

}  // namespace sreg
