#include "sreg/sparsity.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "sreg/errors.hpp"

namespace sreg {

SparsityReport sparsity_report(const std::vector<WeightTensor>& weights, double tau) {
    if (!(tau > 0.0)) throw config_error("sparsity_report: tau must be > 0");
    SparsityReport rep;
    rep.tau = tau;
    for (const WeightTensor& w : weights) {
        if (w.kind != LayerParamKind::conv) continue;
        LayerSparsity ls;
        ls.layer_id = w.layer_id;
        ls.kind = w.kind;
        ls.oc = w.oc();
        ls.ic = w.ic();
        ls.kh = w.kh();
        ls.kw = w.kw();
        ls.weights = static_cast<std::int64_t>(w.size());

        std::vector<char> live_out(w.oc(), 0), live_in(w.ic(), 0);
        for (int i = 0; i < w.oc(); ++i)
            for (int j = 0; j < w.ic(); ++j) {
                bool filter_live = false;
                for (int t = 0; t < w.filter_len(); ++t) {
                    const double v = w.data[w.index(i, j, 0, 0) + t];
                    if (std::fabs(v) < tau)
                        ++ls.zeros;
                    else
                        filter_live = true;
                }
                if (!filter_live) ++ls.dead_filters;
                live_out[i] |= filter_live;
                live_in[j] |= filter_live;
            }
        for (char v : live_out)
            if (!v) ++ls.dead_out;
        for (char v : live_in)
            if (!v) ++ls.dead_in;
        ls.sparsity = static_cast<double>(ls.zeros) / static_cast<double>(ls.weights);
        rep.zeros += ls.zeros;
        rep.weights += ls.weights;
        rep.per_layer.push_back(ls);
    }
    rep.overall_sparsity =
        rep.weights > 0 ? static_cast<double>(rep.zeros) / static_cast<double>(rep.weights) : 0.0;
    return rep;
}

WeightTensor prune(const WeightTensor& w, double tau) {
    WeightTensor out = w;
    for (double& v : out.data)
        if (std::fabs(v) < tau) v = 0.0;
    return out;
}

std::vector<WeightTensor> prune(const std::vector<WeightTensor>& weights, double tau) {
    std::vector<WeightTensor> out;
    out.reserve(weights.size());
    for (const WeightTensor& w : weights) out.push_back(prune(w, tau));
    return out;
}

void write_report_csv(std::ostream& os, const SparsityReport& report) {
    os << "layer_id,kind,oc,ic,kh,kw,sparsity,dead_filters,dead_out,dead_in\n";
    std::ostringstream num;
    for (const LayerSparsity& ls : report.per_layer) {
        num.str("");
        num.precision(17);
        num << ls.sparsity;
        os << ls.layer_id << ',' << to_string(ls.kind) << ',' << ls.oc << ',' << ls.ic << ','
           << ls.kh << ',' << ls.kw << ',' << num.str() << ',' << ls.dead_filters << ','
           << ls.dead_out << ',' << ls.dead_in << '\n';
    }
}

std::string report_csv(const SparsityReport& report) {
    std::ostringstream os;
    write_report_csv(os, report);
    return os.str();
}

}  // namespace sreg
