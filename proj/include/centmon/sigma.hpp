#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "centmon/base.hpp"

namespace centmon {

using Triple = std::array<Element, 3>;

/// Canonical index of the injective triples over {0,...,k-1}, ordered
/// lexicographically.  A ternary operation satisfying the majority law (or
/// the left-absorption laws) is free exactly on these triples, so all
/// serialised value strings follow this order.
class SigmaIndex {
 public:
  explicit SigmaIndex(int k) : k_(k) {
    check_carrier(k);
    pos_.fill(-1);
    for (int x = 0; x < k; ++x)
      for (int y = 0; y < k; ++y)
        for (int z = 0; z < k; ++z) {
          if (x == y || y == z || x == z) continue;
          pos_[flat(x, y, z)] = static_cast<std::int8_t>(triples_.size());
          triples_.push_back({static_cast<Element>(x), static_cast<Element>(y),
                              static_cast<Element>(z)});
        }
  }

  static const SigmaIndex& of(int k) {
    static const SigmaIndex s3(3), s4(4);
    check_carrier(k);
    return k == 3 ? s3 : s4;
  }

  int k() const { return k_; }
  int size() const { return static_cast<int>(triples_.size()); }
  const Triple& triple(int i) const { return triples_[i]; }

  /// Index of (x,y,z) in the canonical order, or -1 when the triple has a
  /// repeated entry.
  int index(int x, int y, int z) const { return pos_[flat(x, y, z)]; }
  int index(const Triple& t) const { return index(t[0], t[1], t[2]); }

 private:
  int flat(int x, int y, int z) const { return (x * k_ + y) * k_ + z; }

  int k_;
  std::vector<Triple> triples_;
  std::array<std::int8_t, kMaxCarrier * kMaxCarrier * kMaxCarrier> pos_;
};

}  // namespace centmon
