#include "sreg/checkpoint.hpp"

#include <cstring>

#include "sreg/errors.hpp"
#include "sreg/io_util.hpp"

namespace sreg {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    std::size_t off = 0;
    const std::string& path;

    void need(std::size_t n) const {
        if (off + n > buf.size()) throw data_error("truncated checkpoint: " + path);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
        off += 4;
        return v;
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[off++]);
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
        off += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

}  // namespace

std::string encode_checkpoint(const std::vector<WeightTensor>& weights) {
    std::string out = "SREG";
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(weights.size()));
    for (const WeightTensor& w : weights) {
        put_u32(out, static_cast<std::uint32_t>(w.layer_id));
        out.push_back(w.kind == LayerParamKind::conv ? 0 : 1);
        for (int d : w.shape) put_u32(out, static_cast<std::uint32_t>(d));
        for (double v : w.data) put_f64(out, v);
    }
    return out;
}

void save_checkpoint(const std::string& path, const std::vector<WeightTensor>& weights) {
    atomic_write(path, encode_checkpoint(weights));
}

std::vector<WeightTensor> load_checkpoint(const std::string& path) {
    const std::string buf = read_text_file(path);
    Reader r{buf, 0, path};
    r.need(4);
    if (buf.compare(0, 4, "SREG") != 0)
        throw data_error("bad checkpoint magic in " + path + " (want \"SREG\")");
    r.off = 4;
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw data_error("unsupported checkpoint version " + std::to_string(version) + " in " +
                         path);
    const std::uint32_t count = r.u32();
    std::vector<WeightTensor> weights;
    weights.reserve(count);
    for (std::uint32_t t = 0; t < count; ++t) {
        const int layer_id = static_cast<int>(r.u32());
        const std::uint8_t kind = r.u8();
        if (kind > 1) throw data_error("bad tensor kind in " + path);
        int shape[4];
        for (int& d : shape) {
            d = static_cast<int>(r.u32());
            if (d < 1 || d > (1 << 20)) throw data_error("bad tensor shape in " + path);
        }
        WeightTensor w(shape[0], shape[1], shape[2], shape[3], layer_id,
                       kind == 0 ? LayerParamKind::conv : LayerParamKind::fc);
        for (double& v : w.data) v = r.f64();
        weights.push_back(std::move(w));
    }
    if (r.off != buf.size()) throw data_error("trailing bytes in checkpoint " + path);
    return weights;
}

}  // namespace sreg
