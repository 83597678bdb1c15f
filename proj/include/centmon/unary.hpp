#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "centmon/base.hpp"

namespace centmon {

/// Self-map of {0,...,k-1}.  Every unary operation has a canonical integer
/// code n = sum_j table[j] * k^(k-1-j), i.e. the value tuple read as a
/// base-k numeral, most significant digit first.
struct UnaryOp {
  std::uint8_t k = 4;
  std::array<Element, kMaxCarrier> tab{};

  constexpr Element operator()(int x) const { return tab[x]; }

  static UnaryOp identity(int k) {
    check_carrier(k);
    UnaryOp s;
    s.k = static_cast<std::uint8_t>(k);
    for (int i = 0; i < k; ++i) s.tab[i] = static_cast<Element>(i);
    return s;
  }

  static UnaryOp constant(int k, int a) {
    check_carrier(k);
    if (a < 0 || a >= k) throw std::out_of_range("constant value out of carrier");
    UnaryOp s;
    s.k = static_cast<std::uint8_t>(k);
    for (int i = 0; i < k; ++i) s.tab[i] = static_cast<Element>(a);
    return s;
  }

  static UnaryOp from_values(int k, std::initializer_list<int> vals) {
    check_carrier(k);
    UnaryOp s;
    s.k = static_cast<std::uint8_t>(k);
    int i = 0;
    for (int v : vals) {
      if (v < 0 || v >= k) throw std::out_of_range("table value out of carrier");
      s.tab[i++] = static_cast<Element>(v);
    }
    if (i != k) throw std::out_of_range("table length does not match carrier");
    return s;
  }

  static UnaryOp from_code(int k, unsigned code) {
    check_carrier(k);
    const unsigned limit = static_cast<unsigned>(ipow(k, k));
    if (code >= limit)
      throw std::out_of_range("unary code " + std::to_string(code) +
                              " not in [0, " + std::to_string(limit) + ")");
    UnaryOp s;
    s.k = static_cast<std::uint8_t>(k);
    for (int j = k - 1; j >= 0; --j) {
      s.tab[j] = static_cast<Element>(code % k);
      code /= k;
    }
    return s;
  }

  unsigned code() const {
    unsigned n = 0;
    for (int j = 0; j < k; ++j) n = n * k + tab[j];
    return n;
  }

  int image_size() const {
    unsigned seen = 0;
    for (int j = 0; j < k; ++j) seen |= 1u << tab[j];
    return std::popcount(seen);
  }

  unsigned image_mask() const {
    unsigned seen = 0;
    for (int j = 0; j < k; ++j) seen |= 1u << tab[j];
    return seen;
  }

  /// Preimage of {a} as a bit mask over the carrier.
  unsigned preimage_mask(int a) const {
    unsigned m = 0;
    for (int j = 0; j < k; ++j)
      if (tab[j] == a) m |= 1u << j;
    return m;
  }

  bool is_permutation() const { return image_size() == k; }

  bool is_identity() const {
    for (int j = 0; j < k; ++j)
      if (tab[j] != j) return false;
    return true;
  }

  bool is_constant() const { return image_size() == 1; }

  int fixed_point_count() const {
    int n = 0;
    for (int j = 0; j < k; ++j)
      if (tab[j] == j) ++n;
    return n;
  }

  std::string values_string() const {
    std::string out = "(";
    for (int j = 0; j < k; ++j) {
      if (j) out += ',';
      out += static_cast<char>('0' + tab[j]);
    }
    out += ')';
    return out;
  }

  auto operator<=>(const UnaryOp&) const = default;
};

inline void check_same_carrier(int a, int b) {
  if (a != b)
    throw config_error("operands built over different carrier sizes (" +
                       std::to_string(a) + " vs " + std::to_string(b) + ")");
}

/// Left composition: (s . t)(x) = s(t(x)).
inline UnaryOp compose(const UnaryOp& s, const UnaryOp& t) {
  check_same_carrier(s.k, t.k);
  UnaryOp r;
  r.k = s.k;
  for (int j = 0; j < s.k; ++j) r.tab[j] = s.tab[t.tab[j]];
  return r;
}

inline int num_unary(int k) { return static_cast<int>(ipow(k, k)); }

/// Bijective unary operation.  Construction validates bijectivity.
struct Permutation {
  UnaryOp op;

  explicit Permutation(const UnaryOp& s) : op(s) {
    if (!s.is_permutation())
      throw std::invalid_argument("not a permutation: " + s.values_string());
  }

  Element operator()(int x) const { return op(x); }
  int k() const { return op.k; }

  Permutation inverse() const {
    UnaryOp r;
    r.k = op.k;
    for (int j = 0; j < op.k; ++j) r.tab[op.tab[j]] = static_cast<Element>(j);
    return Permutation(r);
  }

  int order() const {
    UnaryOp p = op;
    int n = 1;
    while (!p.is_identity()) {
      p = compose(p, op);
      ++n;
    }
    return n;
  }

  /// Sorted cycle lengths, fixed points included; e.g. (2,2) or (1,1,2).
  std::vector<int> cycle_type() const {
    std::vector<int> lens;
    std::array<bool, kMaxCarrier> seen{};
    for (int j = 0; j < op.k; ++j) {
      if (seen[j]) continue;
      int len = 0, x = j;
      do {
        seen[x] = true;
        x = op.tab[x];
        ++len;
      } while (x != j);
      lens.push_back(len);
    }
    std::sort(lens.begin(), lens.end());
    return lens;
  }

  auto operator<=>(const Permutation&) const = default;
};

/// All k! permutations, ordered by unary code.
inline std::vector<Permutation> all_permutations(int k) {
  check_carrier(k);
  std::vector<Permutation> out;
  for (int n = 0; n < num_unary(k); ++n) {
    UnaryOp s = UnaryOp::from_code(k, n);
    if (s.is_permutation()) out.emplace_back(s);
  }
  return out;
}

/// Conjugate of a unary operation: u^p = p . u . p^-1.
inline UnaryOp conjugate(const UnaryOp& u, const Permutation& p) {
  check_same_carrier(u.k, p.k());
  return compose(compose(p.op, u), p.inverse().op);
}

}  // namespace centmon
