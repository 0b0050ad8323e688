#include "bismarck/ordering.hpp"

#include <cmath>
#include <numeric>

#include "bismarck/rng.hpp"

namespace bismarck {

const char* order_name(OrderKind k) {
    switch (k) {
        case OrderKind::Clustered: return "clustered";
        case OrderKind::ShuffleOnce: return "shuffle-once";
        case OrderKind::ShuffleAlways: return "shuffle-always";
    }
    return "?";
}

std::optional<OrderKind> order_from_name(const std::string& name) {
    if (name == "clustered") return OrderKind::Clustered;
    if (name == "shuffle-once") return OrderKind::ShuffleOnce;
    if (name == "shuffle-always") return OrderKind::ShuffleAlways;
    return std::nullopt;
}

std::vector<std::uint32_t> permute(const OrderingStrategy& strategy, std::uint32_t epoch,
                                   std::size_t n) {
    if (n == 0) throw DataError("cannot permute an empty dataset");
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    switch (strategy.kind) {
        case OrderKind::Clustered:
            break;
        case OrderKind::ShuffleOnce: {
            Rng rng(mix_seed(strategy.seed, 0));
            rng.shuffle(perm);
            break;
        }
        case OrderKind::ShuffleAlways: {
            Rng rng(mix_seed(strategy.seed, 1 + static_cast<std::uint64_t>(epoch)));
            rng.shuffle(perm);
            break;
        }
    }
    return perm;
}

Dataset gen_catx(std::size_t n) {
    if (n == 0) throw DataError("gen_catx needs n >= 1");
    Dataset ds(DataFormat::DenseCsv);
    Example e;
    e.kind = ExampleKind::Dense;
    e.values = {1.0};
    for (std::size_t i = 0; i < 2 * n; ++i) {
        e.label = i < n ? 1.0 : -1.0;
        ds.append(e);
    }
    ds.finalize();
    return ds;
}

double catx_closed_form(double w0, double alpha, const std::vector<double>& labels,
                        std::size_t k) {
    if (k > labels.size()) throw DataError("k exceeds the label sequence length");
    const double decay = 1.0 - alpha;
    // Power table up to k-1; the j-th summand carries (1-alpha)^(k-1-j).
    std::vector<double> powers(k > 0 ? k : 1, 1.0);
    for (std::size_t p = 1; p < powers.size(); ++p) powers[p] = powers[p - 1] * decay;
    double acc = std::pow(decay, static_cast<double>(k)) * w0;
    for (std::size_t j = 0; j < k; ++j) acc += alpha * powers[k - 1 - j] * labels[j];
    return acc;
}

}  // namespace bismarck
