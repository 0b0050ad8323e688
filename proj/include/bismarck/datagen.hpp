#pragma once

#include <cstdint>

#include "bismarck/dataset.hpp"

namespace bismarck {

// Seeded synthetic datasets for the benchmark suites and tests. All are
// deterministic in (parameters, seed).

struct ClassifySpec {
    std::size_t count = 1000;
    std::uint32_t dim = 50;
    std::uint32_t nnz = 10;      // sparse only: nonzeros per example
    double flip_prob = 0.1;      // label noise, keeps the optimum bounded
    std::uint64_t seed = 1;
    bool clustered = true;       // emit all +1 examples before all -1
};

/// Linear-separator data with noisy labels, dense features ~ N(0,1).
Dataset gen_dense_classify(const ClassifySpec& spec);

/// Same with `nnz` nonzero coordinates per example.
Dataset gen_sparse_classify(const ClassifySpec& spec);

/// Every cell of the rank-1 matrix L0 * R0^T, factors uniform in [0.5, 1.5].
Dataset gen_rank_one_matrix(std::uint32_t rows, std::uint32_t cols, std::uint64_t seed);

}  // namespace bismarck
