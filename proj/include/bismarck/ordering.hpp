#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bismarck/dataset.hpp"

namespace bismarck {

enum class OrderKind : std::uint8_t { Clustered, ShuffleOnce, ShuffleAlways };

const char* order_name(OrderKind k);
std::optional<OrderKind> order_from_name(const std::string& name);

// Given (kind, seed, N), the permutation sequence is fully deterministic:
// Clustered is the identity (stored order) for every epoch, ShuffleOnce is
// one seeded Fisher-Yates permutation reused each epoch, ShuffleAlways
// reseeds per epoch with mix_seed(seed, epoch).
struct OrderingStrategy {
    OrderKind kind = OrderKind::ShuffleOnce;
    std::uint64_t seed = 0;
};

/// Permutation of [0, N) for the given epoch (0-based).
std::vector<std::uint32_t> permute(const OrderingStrategy& strategy, std::uint32_t epoch,
                                   std::size_t n);

/// The 1-D pathological-ordering dataset: 2n dense examples, every feature
/// 1.0, first n labels +1 and last n labels -1, in that clustered order.
Dataset gen_catx(std::size_t n);

/// Exact k-th iterate of the constant-step 1-D least-squares recurrence
/// w <- w - alpha*(w - y):
///   w_k = (1-alpha)^k w0 + alpha * sum_{j<k} (1-alpha)^(k-1-j) y_j,
/// with labels already in processing order. Evaluated as the literal sum,
/// independent of the engine's recurrence.
double catx_closed_form(double w0, double alpha, const std::vector<double>& labels,
                        std::size_t k);

}  // namespace bismarck
