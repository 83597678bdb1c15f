#pragma once

#include <vector>

#include "centmon/base.hpp"
#include "centmon/monoid.hpp"
#include "centmon/sigma.hpp"
#include "centmon/ternary.hpp"
#include "centmon/unary.hpp"

namespace centmon {

/// Full-table commutation check: s(f(x)) = f(s . x) for every argument
/// tuple.  This is the oracle predicate the sigma-restricted routines are
/// validated against.
inline bool commutes(const FinitaryOp& f, const UnaryOp& s) {
  check_same_carrier(f.k, s.k);
  const int k = f.k;
  const std::size_t total = f.table.size();
  std::vector<int> xs(f.arity, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t mapped = 0;
    std::size_t rest = idx;
    // Decode idx digit by digit (most significant first) while building the
    // index of s . x.
    std::size_t scale = total / k;
    for (int i = 0; i < f.arity; ++i) {
      const int digit = static_cast<int>(rest / scale);
      rest %= scale;
      mapped = mapped * k + s(digit);
      if (i + 1 < f.arity) scale /= k;
    }
    if (s(f.table[idx]) != f.table[mapped]) return false;
  }
  return true;
}

/// Commutation of a majority operation with a unary map, checked on the
/// injective triples only; tuples s . x with a repetition resolve through
/// the majority law instead of a materialised table.
inline bool commutes_on_sigma(const MajorityOp& f, const UnaryOp& s) {
  check_same_carrier(f.k, s.k);
  const SigmaIndex& sig = SigmaIndex::of(f.k);
  for (int i = 0; i < sig.size(); ++i) {
    const Triple& t = sig.triple(i);
    if (s(f.v[i]) != f.value(s(t[0]), s(t[1]), s(t[2]))) return false;
  }
  return true;
}

/// All unary operations commuting with f.  Always contains the identity and
/// every constant, and is closed under composition.
inline Monoid unary_centraliser(const MajorityOp& f) {
  Monoid m = Monoid::empty(f.k);
  for (int c = 0; c < m.universe_size(); ++c)
    if (commutes_on_sigma(f, UnaryOp::from_code(f.k, c))) m.add(c);
  return m;
}

}  // namespace centmon
