#include "bismarck/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bismarck/rng.hpp"

namespace bismarck {

namespace {

double gaussian(Rng& rng) {
    // Box-Muller; u1 in (0,1].
    const double u1 = 1.0 - rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

std::vector<double> planted_separator(std::uint32_t dim, Rng& rng) {
    std::vector<double> w(dim);
    for (double& v : w) v = gaussian(rng);
    return w;
}

void emit_clustered(Dataset& ds, std::vector<Example>& pos, std::vector<Example>& neg,
                    bool clustered, Rng& rng) {
    if (!clustered) {
        std::vector<Example> all;
        all.reserve(pos.size() + neg.size());
        for (auto& e : pos) all.push_back(std::move(e));
        for (auto& e : neg) all.push_back(std::move(e));
        rng.shuffle(all);
        for (const auto& e : all) ds.append(e);
        return;
    }
    for (const auto& e : pos) ds.append(e);
    for (const auto& e : neg) ds.append(e);
}

}  // namespace

Dataset gen_dense_classify(const ClassifySpec& spec) {
    Rng rng(mix_seed(spec.seed, 0x44454e53ULL));
    const std::vector<double> w = planted_separator(spec.dim, rng);
    std::vector<Example> pos, neg;
    for (std::size_t i = 0; i < spec.count; ++i) {
        Example e;
        e.kind = ExampleKind::Dense;
        e.values.resize(spec.dim);
        double score = 0.0;
        for (std::uint32_t j = 0; j < spec.dim; ++j) {
            e.values[j] = gaussian(rng);
            score += w[j] * e.values[j];
        }
        double y = score >= 0.0 ? 1.0 : -1.0;
        if (rng.next_double() < spec.flip_prob) y = -y;
        e.label = y;
        (y > 0 ? pos : neg).push_back(std::move(e));
    }
    Dataset ds(DataFormat::DenseCsv);
    ds.declare_dim(spec.dim);
    emit_clustered(ds, pos, neg, spec.clustered, rng);
    ds.finalize();
    return ds;
}

Dataset gen_sparse_classify(const ClassifySpec& spec) {
    if (spec.nnz == 0 || spec.nnz > spec.dim) throw DataError("nnz must be in [1, dim]");
    Rng rng(mix_seed(spec.seed, 0x53505253ULL));
    const std::vector<double> w = planted_separator(spec.dim, rng);
    std::vector<Example> pos, neg;
    std::vector<std::uint32_t> idx(spec.nnz);
    for (std::size_t i = 0; i < spec.count; ++i) {
        // Distinct sorted indices by rejection.
        for (std::uint32_t t = 0; t < spec.nnz; ++t) {
            for (;;) {
                const auto cand = static_cast<std::uint32_t>(rng.below(spec.dim));
                bool dup = false;
                for (std::uint32_t u = 0; u < t; ++u) dup |= idx[u] == cand;
                if (!dup) {
                    idx[t] = cand;
                    break;
                }
            }
        }
        std::sort(idx.begin(), idx.begin() + spec.nnz);
        Example e;
        e.kind = ExampleKind::Sparse;
        e.indices.assign(idx.begin(), idx.end());
        e.values.resize(spec.nnz);
        double score = 0.0;
        for (std::uint32_t t = 0; t < spec.nnz; ++t) {
            e.values[t] = gaussian(rng);
            score += w[idx[t]] * e.values[t];
        }
        double y = score >= 0.0 ? 1.0 : -1.0;
        if (rng.next_double() < spec.flip_prob) y = -y;
        e.label = y;
        (y > 0 ? pos : neg).push_back(std::move(e));
    }
    Dataset ds(DataFormat::SparseIndexed);
    ds.declare_dim(spec.dim);
    emit_clustered(ds, pos, neg, spec.clustered, rng);
    ds.finalize();
    return ds;
}

Dataset gen_rank_one_matrix(std::uint32_t rows, std::uint32_t cols, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x4d415431ULL));
    std::vector<double> l(rows), r(cols);
    for (double& v : l) v = rng.uniform(0.5, 1.5);
    for (double& v : r) v = rng.uniform(0.5, 1.5);
    Dataset ds(DataFormat::MatrixTriples);
    ds.declare_shape(rows, cols);
    Example e;
    e.kind = ExampleKind::MatrixCell;
    for (std::uint32_t i = 0; i < rows; ++i) {
        for (std::uint32_t j = 0; j < cols; ++j) {
            e.row = i;
            e.col = j;
            e.label = l[i] * r[j];
            ds.append(e);
        }
    }
    ds.finalize();
    return ds;
}

}  // namespace bismarck
