#ifndef SHB_SAMPLING_HPP
#define SHB_SAMPLING_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "shb/common.hpp"

namespace shb {

// Uniform without-replacement mini-batches, independent across iterations,
// from one seeded stream. Batches come back sorted ascending so downstream
// accumulation order is fixed. Per-run object; not shared across runs.
class MinibatchSampler {
 public:
  MinibatchSampler(int n, int batch_size, std::uint64_t stream_seed)
      : n_(n), batch_size_(batch_size), rng_(stream_seed),
        pool_(static_cast<std::size_t>(n)) {
    if (batch_size < 1 || batch_size > n)
      throw config_error("batch size must lie in [1, n]");
    for (int i = 0; i < n; ++i) pool_[static_cast<std::size_t>(i)] = i;
  }

  // The full batch is deterministic; the RNG is consumed only when B < n.
  std::vector<int> next() {
    if (batch_size_ == n_) return pool_;
    for (int k = 0; k < batch_size_; ++k) {
      std::uniform_int_distribution<int> pick(k, n_ - 1);
      std::swap(pool_[static_cast<std::size_t>(k)],
                pool_[static_cast<std::size_t>(pick(rng_))]);
    }
    std::vector<int> batch(pool_.begin(), pool_.begin() + batch_size_);
    std::sort(batch.begin(), batch.end());
    return batch;
  }

 private:
  int n_;
  int batch_size_;
  std::mt19937_64 rng_;
  std::vector<int> pool_;
};

}  // namespace shb

#endif  // SHB_SAMPLING_HPP
