#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

#include "centmon/base.hpp"
#include "centmon/unary.hpp"

namespace centmon {

/// Set of unary operations as a bit vector indexed by unary code.  Intents of
/// the commutation context are monoids: composition-closed and containing the
/// identity; centralisers of idempotent operations also contain all
/// constants.
struct Monoid {
  std::uint8_t k = 4;
  std::array<std::uint64_t, kMaxUnary / 64> w{};

  static Monoid empty(int k) {
    check_carrier(k);
    Monoid m;
    m.k = static_cast<std::uint8_t>(k);
    return m;
  }

  static Monoid from_codes(int k, const std::vector<int>& codes) {
    Monoid m = empty(k);
    for (int c : codes) m.add(c);
    return m;
  }

  int universe_size() const { return num_unary(k); }

  bool test(int code) const { return (w[code >> 6] >> (code & 63)) & 1; }

  void add(int code) {
    if (code < 0 || code >= universe_size())
      throw std::out_of_range("unary code out of range");
    w[code >> 6] |= std::uint64_t{1} << (code & 63);
  }

  int count() const {
    int n = 0;
    for (auto x : w) n += std::popcount(x);
    return n;
  }

  std::vector<int> codes() const {
    std::vector<int> out;
    for (int c = 0; c < universe_size(); ++c)
      if (test(c)) out.push_back(c);
    return out;
  }

  bool contains(const Monoid& other) const {
    for (std::size_t i = 0; i < w.size(); ++i)
      if ((other.w[i] & ~w[i]) != 0) return false;
    return true;
  }

  bool contains_identity() const { return test(UnaryOp::identity(k).code()); }

  bool contains_all_constants() const {
    for (int a = 0; a < k; ++a)
      if (!test(UnaryOp::constant(k, a).code())) return false;
    return true;
  }

  bool is_composition_closed() const {
    const auto cs = codes();
    for (int a : cs)
      for (int b : cs) {
        const UnaryOp comp =
            compose(UnaryOp::from_code(k, a), UnaryOp::from_code(k, b));
        if (!test(comp.code())) return false;
      }
    return true;
  }

  auto operator<=>(const Monoid&) const = default;
};

/// Image of a monoid under conjugation by p: member codes are remapped to the
/// codes of their conjugates.
inline Monoid conjugate(const Monoid& m, const Permutation& p) {
  check_same_carrier(m.k, p.k());
  Monoid out = Monoid::empty(m.k);
  for (int c = 0; c < m.universe_size(); ++c)
    if (m.test(c))
      out.add(conjugate(UnaryOp::from_code(m.k, c), p).code());
  return out;
}

}  // namespace centmon
