#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/measures.hpp"
#include "gridplan/rng.hpp"

namespace gridplan {

/// Lazily produces every Hamming-distance-1 neighbor of a candidate in a
/// seeded random order. Adding or removing a measure is one step; replacing
/// one is two consecutive steps.
class NeighborStream {
 public:
  NeighborStream(Candidate base, Rng& rng) : base_(std::move(base)), order_(rng.permutation(base_.size())) {}

  std::size_t size() const { return order_.size(); }

  /// Next neighbor and the flipped bit, or nullopt when the sweep is complete.
  std::optional<std::pair<Candidate, std::size_t>> next() {
    if (pos_ >= order_.size()) return std::nullopt;
    const std::size_t bit = order_[pos_++];
    Candidate c = base_;
    c.flip(bit);
    return std::pair{std::move(c), bit};
  }

 private:
  Candidate base_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

inline NeighborStream single_bit_neighbors(const Candidate& c, Rng& rng) { return NeighborStream(c, rng); }

/// Flips exactly `k` distinct, uniformly chosen bits.
inline Candidate perturb(const Candidate& c, std::size_t k, Rng& rng) {
  if (k < 1 || k > c.size())
    throw DomainError("perturbation size " + std::to_string(k) + " outside [1, " + std::to_string(c.size()) + "]");
  Candidate out = c;
  for (auto bit : rng.sample(c.size(), k)) out.flip(bit);
  return out;
}

}  // namespace gridplan
