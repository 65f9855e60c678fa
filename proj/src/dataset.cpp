#include "sreg/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "sreg/errors.hpp"

namespace sreg {

namespace {

// Reads a whole file, inflating gzip transparently (gzread passes plain
// files through unchanged, so one path covers both).
std::vector<unsigned char> read_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw data_error("no such file: " + path);
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw data_error("cannot open " + path);
    std::vector<unsigned char> out;
    unsigned char buf[1 << 16];
    int got;
    while ((got = gzread(f, buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + got);
    bool ok = got == 0;
    if (!ok) {
        int errnum = 0;
        gzerror(f, &errnum);
        gzclose(f);
        throw data_error("read error in " + path +
                         (errnum == Z_BUF_ERROR ? " (truncated gzip stream)" : ""));
    }
    gzclose(f);
    return out;
}

std::uint32_t read_u32_be(const std::vector<unsigned char>& b, std::size_t off,
                          const std::string& path) {
    if (off + 4 > b.size()) throw data_error("truncated IDX header in " + path);
    return (static_cast<std::uint32_t>(b[off]) << 24) | (static_cast<std::uint32_t>(b[off + 1]) << 16) |
           (static_cast<std::uint32_t>(b[off + 2]) << 8) | static_cast<std::uint32_t>(b[off + 3]);
}

void write_u32_be(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

std::string pick_existing(const std::string& dir, const std::string& base) {
    const std::string plain = dir + "/" + base;
    if (std::filesystem::exists(plain)) return plain;
    if (std::filesystem::exists(plain + ".gz")) return plain + ".gz";
    throw data_error("dataset file not found: " + plain + "[.gz]");
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const std::vector<unsigned char> ib = read_file(images_path);
    const std::vector<unsigned char> lb = read_file(labels_path);

    if (read_u32_be(ib, 0, images_path) != 0x00000803u)
        throw data_error("bad IDX magic in " + images_path + " (want 0x00000803)");
    const std::uint32_t n = read_u32_be(ib, 4, images_path);
    const std::uint32_t h = read_u32_be(ib, 8, images_path);
    const std::uint32_t w = read_u32_be(ib, 12, images_path);
    if (ib.size() != 16 + static_cast<std::size_t>(n) * h * w)
        throw data_error("truncated image data in " + images_path);

    if (read_u32_be(lb, 0, labels_path) != 0x00000801u)
        throw data_error("bad IDX magic in " + labels_path + " (want 0x00000801)");
    const std::uint32_t ln = read_u32_be(lb, 4, labels_path);
    if (lb.size() != 8 + static_cast<std::size_t>(ln))
        throw data_error("truncated label data in " + labels_path);
    if (ln != n)
        throw data_error("image/label count mismatch: " + std::to_string(n) + " images vs " +
                         std::to_string(ln) + " labels");

    Dataset ds;
    ds.images = Tensor4(static_cast<int>(n), 1, static_cast<int>(h), static_cast<int>(w));
    ds.labels.resize(n);
    for (std::size_t i = 0; i < ds.images.size(); ++i)
        ds.images.data[i] = ib[16 + i] / 255.0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const int label = lb[8 + i];
        if (label < 0 || label >= 10)
            throw data_error("label " + std::to_string(label) + " outside [0,10) in " +
                             labels_path);
        ds.labels[i] = label;
    }
    return ds;
}

void save_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path) {
    std::ofstream fi(images_path, std::ios::binary);
    if (!fi) throw data_error("cannot write " + images_path);
    write_u32_be(fi, 0x00000803u);
    write_u32_be(fi, static_cast<std::uint32_t>(ds.n()));
    write_u32_be(fi, static_cast<std::uint32_t>(ds.images.h()));
    write_u32_be(fi, static_cast<std::uint32_t>(ds.images.w()));
    std::vector<unsigned char> px(ds.images.size());
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = static_cast<unsigned char>(std::lround(ds.images.data[i] * 255.0));
    fi.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (!fi) throw data_error("write failed for " + images_path);

    std::ofstream fl(labels_path, std::ios::binary);
    if (!fl) throw data_error("cannot write " + labels_path);
    write_u32_be(fl, 0x00000801u);
    write_u32_be(fl, static_cast<std::uint32_t>(ds.labels.size()));
    for (int l : ds.labels) fl.put(static_cast<char>(l));
    if (!fl) throw data_error("write failed for " + labels_path);
}

std::pair<Dataset, Dataset> load_dataset_dir(const std::string& dir, const std::string& name) {
    Dataset train = load_idx(pick_existing(dir, "train-images-idx3-ubyte"),
                             pick_existing(dir, "train-labels-idx1-ubyte"));
    Dataset test = load_idx(pick_existing(dir, "t10k-images-idx3-ubyte"),
                            pick_existing(dir, "t10k-labels-idx1-ubyte"));
    train.name = name + "-train";
    test.name = name + "-test";
    return {std::move(train), std::move(test)};
}

Dataset subset(const Dataset& ds, int n_train, std::uint64_t seed) {
    if (n_train > ds.n())
        throw config_error("subset: requested " + std::to_string(n_train) + " of " +
                           std::to_string(ds.n()) + " images");
    if (n_train < 0) throw config_error("subset: negative size");
    if (n_train == ds.n()) return ds;

    // indices per class, each shuffled with its own derived stream
    std::array<std::vector<int>, 10> by_class;
    for (int i = 0; i < ds.n(); ++i) by_class[ds.labels[i]].push_back(i);
    int n_classes = 0;
    for (const auto& v : by_class)
        if (!v.empty()) ++n_classes;

    std::vector<int> picked;
    picked.reserve(n_train);
    if (n_classes > 0) {
        for (int c = 0; c < 10; ++c) {
            if (by_class[c].empty()) continue;
            std::mt19937_64 rng(derive_seed(seed, 100 + c));
            std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
        }
        // per-class quota, remainder to the lowest class ids; spill over when
        // a class runs short
        std::array<int, 10> quota{};
        int base = n_train / n_classes, rem = n_train % n_classes, seen = 0;
        for (int c = 0; c < 10; ++c) {
            if (by_class[c].empty()) continue;
            quota[c] = base + (seen < rem ? 1 : 0);
            ++seen;
        }
        int total = 0;
        for (int c = 0; c < 10; ++c) {
            quota[c] = std::min(quota[c], static_cast<int>(by_class[c].size()));
            total += quota[c];
        }
        while (total < n_train) {
            bool grew = false;
            for (int c = 0; c < 10 && total < n_train; ++c)
                if (quota[c] < static_cast<int>(by_class[c].size())) {
                    ++quota[c];
                    ++total;
                    grew = true;
                }
            if (!grew) break;
        }
        for (int c = 0; c < 10; ++c)
            picked.insert(picked.end(), by_class[c].begin(), by_class[c].begin() + quota[c]);
    }
    std::sort(picked.begin(), picked.end());  // keep original relative order

    Dataset out;
    out.name = ds.name;
    out.images = Tensor4(static_cast<int>(picked.size()), ds.images.c(), ds.images.h(),
                         ds.images.w());
    out.labels.resize(picked.size());
    const std::size_t plane = ds.images.size() / std::max(ds.n(), 1);
    for (std::size_t i = 0; i < picked.size(); ++i) {
        std::copy(ds.images.data.begin() + picked[i] * plane,
                  ds.images.data.begin() + (picked[i] + 1) * plane,
                  out.images.data.begin() + i * plane);
        out.labels[i] = ds.labels[picked[i]];
    }
    return out;
}

Dataset synth_blobs(int n, int K, std::uint64_t seed) {
    if (n < 1 || K < 2 || K > 10) throw config_error("synth_blobs: need n >= 1, K in [2,10]");
    const int H = 28, W = 28;
    Dataset ds;
    ds.name = "synth";
    ds.images = Tensor4(n, 1, H, W);
    ds.labels.resize(n);

    // one blob center per class on a circle around the image center
    std::array<double, 10> cys{}, cxs{};
    for (int k = 0; k < K; ++k) {
        const double ang = 2.0 * M_PI * k / K;
        cys[k] = H / 2.0 + 8.0 * std::sin(ang);
        cxs[k] = W / 2.0 + 8.0 * std::cos(ang);
    }

    std::mt19937_64 rng(derive_seed(seed, 7));
    std::uniform_real_distribution<double> jitter(-1.5, 1.5);
    std::uniform_real_distribution<double> amp(0.8, 1.0);
    const double sigma2 = 2.0 * 2.5 * 2.5;
    for (int i = 0; i < n; ++i) {
        const int k = i % K;
        ds.labels[i] = k;
        const double cy = cys[k] + jitter(rng), cx = cxs[k] + jitter(rng);
        const double a = amp(rng);
        double* img = ds.images.plane(i, 0);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
                img[static_cast<std::size_t>(y) * W + x] =
                    std::min(1.0, a * std::exp(-d2 / sigma2));
            }
    }
    return ds;
}

}  // namespace sreg
