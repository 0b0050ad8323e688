#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bismarck/rng.hpp"
#include "bismarck/train.hpp"

namespace bismarck {

// RNG stream tags (mix_seed(seed, tag)); fixed so recorded runs replay.
inline constexpr std::uint64_t kSubsampleRngStream = 0x53554253ULL;
inline constexpr std::uint64_t kMrsRngStream = 0x4d525341ULL;

// Single-pass uniform without-replacement sample of fixed capacity. After N
// offers each offered item sits in the reservoir with probability
// capacity/N. Single-writer.
template <typename T>
class Reservoir {
public:
    explicit Reservoir(std::size_t capacity) : capacity_(capacity) {}

    /// Offers one item. While filling, the item is stored and nothing is
    /// returned. Once full, a slot s is drawn uniformly from [0, m+k) with
    /// k = seen - m + 1: if s < m the newcomer replaces slot s and the
    /// displaced occupant is returned; otherwise the newcomer itself is
    /// returned. Exactly one of {stored, returned} happens per offer.
    std::optional<T> offer(const T& item, Rng& rng) {
        ++seen_;
        if (slots_.size() < capacity_) {
            slots_.push_back(item);
            return std::nullopt;
        }
        const std::uint64_t k = seen_ - capacity_;  // seen_ already counts this offer
        const std::uint64_t s = rng.below(capacity_ + k);
        if (s < capacity_) {
            T displaced = slots_[static_cast<std::size_t>(s)];
            slots_[static_cast<std::size_t>(s)] = item;
            return displaced;
        }
        return item;
    }

    const std::vector<T>& slots() const { return slots_; }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t seen() const { return seen_; }

    void reset() {
        slots_.clear();
        seen_ = 0;
    }

private:
    std::size_t capacity_;
    std::vector<T> slots_;
    std::uint64_t seen_ = 0;
};

/// One pass fills a reservoir of `buffer` tuples, then epochs run over the
/// reservoir contents only. The logged objective is still evaluated over the
/// full dataset. time_budget_s == 0 means unlimited.
TrainResult subsample_train(const Dataset& data, std::size_t buffer, const TaskSpec& task,
                            const StepSizeSchedule& schedule, const ConvergencePolicy& policy,
                            std::uint64_t seed, double time_budget_s = 0.0,
                            std::optional<double> target_objective = std::nullopt);

/// Multiplexed reservoir sampling: an I/O worker streams the dataset in
/// stored order, reservoir-samples into the filling buffer and takes a
/// gradient step on every dropped example; a Memory worker concurrently
/// loops over the other (previously filled) buffer. Both update one shared
/// model under the NoLock contract. Buffers swap roles between passes; the
/// Memory worker idles during the first pass and is paused (signalled
/// through a polled flag) around the objective evaluation and the swap.
/// `memory_worker = false` runs the I/O side alone, which makes the
/// trajectory a deterministic fold over the dropped sequence.
TrainResult mrs_train(const Dataset& data, std::size_t buffer, const TaskSpec& task,
                      const StepSizeSchedule& schedule, const ConvergencePolicy& policy,
                      std::uint64_t seed, double time_budget_s = 0.0, bool memory_worker = true,
                      std::optional<double> target_objective = std::nullopt);

}  // namespace bismarck
