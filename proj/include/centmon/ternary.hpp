#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "centmon/base.hpp"
#include "centmon/sigma.hpp"
#include "centmon/unary.hpp"

namespace centmon {

/// Ternary operation satisfying f(x,x,y) = f(x,y,x) = f(y,x,x) = x,
/// represented by its free values on the injective triples.
struct MajorityOp {
  std::uint8_t k = 4;
  std::array<Element, kMaxSigma> v{};

  int sigma_size() const { return SigmaIndex::of(k).size(); }

  /// Value on an arbitrary triple; repeated arguments resolve through the
  /// majority law without materialising the full table.
  Element value(int x, int y, int z) const {
    if (x == y || x == z) return static_cast<Element>(x);
    if (y == z) return static_cast<Element>(y);
    return v[SigmaIndex::of(k).index(x, y, z)];
  }
  Element value(const Triple& t) const { return value(t[0], t[1], t[2]); }

  std::string str() const {
    const int n = sigma_size();
    std::string out(n, '0');
    for (int i = 0; i < n; ++i) out[i] = static_cast<char>('0' + v[i]);
    return out;
  }

  static MajorityOp parse(int k, const std::string& digits) {
    check_carrier(k);
    MajorityOp f;
    f.k = static_cast<std::uint8_t>(k);
    const int n = f.sigma_size();
    if (static_cast<int>(digits.size()) != n)
      throw std::invalid_argument("expected " + std::to_string(n) +
                                  " digits, got " + std::to_string(digits.size()));
    for (int i = 0; i < n; ++i) {
      const int d = digits[i] - '0';
      if (d < 0 || d >= k)
        throw std::invalid_argument("digit out of carrier at position " +
                                    std::to_string(i));
      f.v[i] = static_cast<Element>(d);
    }
    return f;
  }

  auto operator<=>(const MajorityOp&) const = default;
};

/// Ternary operation satisfying f(x,y,x) = f(x,x,y) = x only: the common
/// generalisation of majority operations and semiprojections onto the first
/// coordinate.  Free values live on the injective triples plus the patterns
/// (a,b,b) with a != b.
struct LeftAbsorptiveOp {
  std::uint8_t k = 4;
  std::array<Element, kMaxSigma> v{};
  std::array<Element, kMaxCarrier*(kMaxCarrier - 1)> tail{};

  int sigma_size() const { return SigmaIndex::of(k).size(); }
  int tail_size() const { return k * (k - 1); }

  /// Index of the tail pattern (a,b,b), a != b, lexicographic on (a,b).
  int tail_index(int a, int b) const { return a * (k - 1) + (b > a ? b - 1 : b); }

  Element value(int x, int y, int z) const {
    if (x == y || x == z) return static_cast<Element>(x);
    if (y == z) return tail[tail_index(x, y)];
    return v[SigmaIndex::of(k).index(x, y, z)];
  }
  Element value(const Triple& t) const { return value(t[0], t[1], t[2]); }

  /// Majority completion: tail values (a,b,b) -> b.
  static LeftAbsorptiveOp majority_tails(const MajorityOp& f) {
    LeftAbsorptiveOp g;
    g.k = f.k;
    g.v = f.v;
    for (int a = 0; a < f.k; ++a)
      for (int b = 0; b < f.k; ++b)
        if (a != b) g.tail[g.tail_index(a, b)] = static_cast<Element>(b);
    return g;
  }

  /// Semiprojection completion onto the first coordinate: (a,b,b) -> a.
  static LeftAbsorptiveOp semiprojection_tails(const MajorityOp& f) {
    LeftAbsorptiveOp g;
    g.k = f.k;
    g.v = f.v;
    for (int a = 0; a < f.k; ++a)
      for (int b = 0; b < f.k; ++b)
        if (a != b) g.tail[g.tail_index(a, b)] = static_cast<Element>(a);
    return g;
  }

  bool is_majority() const {
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (a != b && tail[tail_index(a, b)] != b) return false;
    return true;
  }

  bool is_left_semiprojection() const {
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (a != b && tail[tail_index(a, b)] != a) return false;
    return true;
  }

  MajorityOp to_majority() const {
    if (!is_majority())
      throw std::invalid_argument("tail values violate the majority law");
    MajorityOp f;
    f.k = k;
    f.v = v;
    return f;
  }

  auto operator<=>(const LeftAbsorptiveOp&) const = default;
};

/// Finitary operation with an explicit full value table, row-major over
/// argument tuples (last argument varies fastest).
struct FinitaryOp {
  std::uint8_t k = 4;
  std::uint8_t arity = 1;
  std::vector<Element> table;

  static FinitaryOp make(int k, int arity) {
    check_carrier(k);
    if (arity < 1) throw std::invalid_argument("arity must be positive");
    FinitaryOp f;
    f.k = static_cast<std::uint8_t>(k);
    f.arity = static_cast<std::uint8_t>(arity);
    f.table.assign(ipow(k, arity), 0);
    return f;
  }

  std::size_t flat(const std::vector<int>& xs) const {
    std::size_t idx = 0;
    for (int x : xs) idx = idx * k + x;
    return idx;
  }

  Element at(int x, int y, int z) const { return table[(x * k + y) * k + z]; }
  Element& at(int x, int y, int z) { return table[(std::size_t)(x * k + y) * k + z]; }
};

inline FinitaryOp expand(const MajorityOp& f) {
  FinitaryOp out = FinitaryOp::make(f.k, 3);
  for (int x = 0; x < f.k; ++x)
    for (int y = 0; y < f.k; ++y)
      for (int z = 0; z < f.k; ++z) out.at(x, y, z) = f.value(x, y, z);
  return out;
}

inline FinitaryOp expand(const LeftAbsorptiveOp& f) {
  FinitaryOp out = FinitaryOp::make(f.k, 3);
  for (int x = 0; x < f.k; ++x)
    for (int y = 0; y < f.k; ++y)
      for (int z = 0; z < f.k; ++z) out.at(x, y, z) = f.value(x, y, z);
  return out;
}

namespace detail {
inline std::string tuple_str(int x, int y, int z) {
  return "(" + std::to_string(x) + "," + std::to_string(y) + "," +
         std::to_string(z) + ")";
}
}  // namespace detail

/// Inverse of expand for tables obeying the majority law; a violating table
/// raises an error naming the witnessing tuple.
inline MajorityOp restrict_to_majority(const FinitaryOp& f) {
  if (f.arity != 3) throw std::invalid_argument("majority restriction needs arity 3");
  MajorityOp out;
  out.k = f.k;
  const SigmaIndex& sig = SigmaIndex::of(f.k);
  for (int x = 0; x < f.k; ++x)
    for (int y = 0; y < f.k; ++y)
      for (int z = 0; z < f.k; ++z) {
        const int i = sig.index(x, y, z);
        if (i >= 0) {
          out.v[i] = f.at(x, y, z);
          continue;
        }
        const int expect = (x == y || x == z) ? x : y;
        if (f.at(x, y, z) != expect)
          throw error("majority law violated at " + detail::tuple_str(x, y, z));
      }
  return out;
}

inline LeftAbsorptiveOp restrict_to_left_absorptive(const FinitaryOp& f) {
  if (f.arity != 3) throw std::invalid_argument("restriction needs arity 3");
  LeftAbsorptiveOp out;
  out.k = f.k;
  const SigmaIndex& sig = SigmaIndex::of(f.k);
  for (int x = 0; x < f.k; ++x)
    for (int y = 0; y < f.k; ++y)
      for (int z = 0; z < f.k; ++z) {
        const int i = sig.index(x, y, z);
        if (i >= 0) {
          out.v[i] = f.at(x, y, z);
        } else if (x == y || x == z) {
          if (f.at(x, y, z) != x)
            throw error("left absorption violated at " + detail::tuple_str(x, y, z));
        } else {  // pattern (x,y,y), x != y
          out.tail[out.tail_index(x, y)] = f.at(x, y, z);
        }
      }
  return out;
}

/// Conjugate f^p with f^p(t) = p(f(p^-1 . t)); an action of the symmetric
/// group preserving all commutation structure.
inline MajorityOp conjugate(const MajorityOp& f, const Permutation& p) {
  check_same_carrier(f.k, p.k());
  const Permutation q = p.inverse();
  const SigmaIndex& sig = SigmaIndex::of(f.k);
  MajorityOp out;
  out.k = f.k;
  for (int i = 0; i < sig.size(); ++i) {
    const Triple& t = sig.triple(i);
    out.v[i] = p(f.value(q(t[0]), q(t[1]), q(t[2])));
  }
  return out;
}

}  // namespace centmon
