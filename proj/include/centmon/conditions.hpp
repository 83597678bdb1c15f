#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "centmon/base.hpp"
#include "centmon/commutation.hpp"
#include "centmon/sigma.hpp"
#include "centmon/ternary.hpp"
#include "centmon/unary.hpp"

namespace centmon {

/// Clarified attribute classes of the commutation context on {0,1,2,3}.
/// Unary operations with the same commuting majority operations share a tag:
///   A1..A4  image-2 maps with a three-element preimage block (keyed by it),
///   A5..A7  image-2 maps with two two-element blocks (keyed by the kernel),
///   C1..C3  four-cycles (inverse pairs),
///   D1..D3  double transpositions,
///   E1..E4  three-cycles (inverse pairs, keyed by fixed point),
///   F1..F6  transpositions,
///   U(n)    the 144 maps with a three-element image, one class each,
/// and TRIVIAL for the identity and the constants, which commute with every
/// majority operation.
struct ConditionId {
  enum class Kind : std::uint8_t { A, C, D, E, F, U, Trivial };

  Kind kind = Kind::Trivial;
  int num = 0;  // 1-based within A/C/D/E/F; the unary code for U

  static ConditionId trivial() { return {}; }
  static ConditionId make(Kind kk, int n) { return {kk, n}; }

  bool is_trivial() const { return kind == Kind::Trivial; }

  std::string name() const {
    switch (kind) {
      case Kind::A: return "A" + std::to_string(num);
      case Kind::C: return "C" + std::to_string(num);
      case Kind::D: return "D" + std::to_string(num);
      case Kind::E: return "E" + std::to_string(num);
      case Kind::F: return "F" + std::to_string(num);
      case Kind::U: return "U" + std::to_string(num);
      case Kind::Trivial: return "TRIVIAL";
    }
    return "?";
  }

  static std::optional<ConditionId> parse(const std::string& text) {
    if (text == "TRIVIAL") return trivial();
    if (text.size() < 2) return std::nullopt;
    Kind kk;
    switch (text[0]) {
      case 'A': kk = Kind::A; break;
      case 'C': kk = Kind::C; break;
      case 'D': kk = Kind::D; break;
      case 'E': kk = Kind::E; break;
      case 'F': kk = Kind::F; break;
      case 'U': kk = Kind::U; break;
      default: return std::nullopt;
    }
    std::string digits = text.substr(1);
    // Accept U(26) as well as U26.
    if (kk == Kind::U && digits.size() >= 2 && digits.front() == '(' &&
        digits.back() == ')')
      digits = digits.substr(1, digits.size() - 2);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](char c) { return c >= '0' && c <= '9'; }))
      return std::nullopt;
    return make(kk, std::stoi(digits));
  }

  auto operator<=>(const ConditionId&) const = default;
};

/// Classify a unary operation on {0,1,2,3} into its attribute class.
inline ConditionId classify_unary(const UnaryOp& s) {
  if (s.k != 4) throw config_error("classification is defined for carrier size 4");
  const int img = s.image_size();
  if (img == 1 || s.is_identity()) return ConditionId::trivial();
  if (img == 3) return ConditionId::make(ConditionId::Kind::U, s.code());
  if (img == 2) {
    // Locate the larger preimage block.
    for (int a = 0; a < 4; ++a) {
      const unsigned pre = s.preimage_mask(a);
      const int sz = std::popcount(pre);
      if (sz == 3) {
        // Singleton preimage {b} determines the class: b = 0,1,2,3 -> A1..A4.
        const int b = std::countr_zero(~pre & 0xFu);
        return ConditionId::make(ConditionId::Kind::A, b + 1);
      }
      if (sz == 2 && (pre & 1u)) {
        // Kernel block containing 0: partner 1,2,3 -> A5,A6,A7.
        const int partner = std::countr_zero(pre & ~1u);
        return ConditionId::make(ConditionId::Kind::A, partner + 4);
      }
    }
  }
  // Permutation, not the identity.
  const Permutation p{s};
  const auto ct = p.cycle_type();
  if (ct == std::vector<int>{1, 1, 2}) {
    // Transposition keyed by its support {a,b}:
    // {0,1},{0,2},{0,3},{1,2},{1,3},{2,3} -> F1..F6.
    int a = -1, b = -1;
    for (int j = 0; j < 4; ++j)
      if (s(j) != j) (a < 0 ? a : b) = j;
    static constexpr int fnum[4][4] = {{0, 1, 2, 3}, {0, 0, 4, 5}, {0, 0, 0, 6}, {}};
    return ConditionId::make(ConditionId::Kind::F, fnum[a][b]);
  }
  if (ct == std::vector<int>{2, 2}) {
    // Double transposition keyed by the kernel-like pairing of 0.
    return ConditionId::make(ConditionId::Kind::D, s(0));  // s(0) in {1,2,3}
  }
  if (ct == std::vector<int>{1, 3}) {
    int fp = -1;
    for (int j = 0; j < 4; ++j)
      if (s(j) == j) fp = j;
    return ConditionId::make(ConditionId::Kind::E, 4 - fp);
  }
  // Four-cycle: the three inverse pairs C1..C3.
  switch (s.code()) {
    case 108: case 198: return ConditionId::make(ConditionId::Kind::C, 1);
    case 114: case 141: return ConditionId::make(ConditionId::Kind::C, 2);
    case 180: case 225: return ConditionId::make(ConditionId::Kind::C, 3);
  }
  throw error("unreachable: unclassified permutation " + s.values_string());
}

/// One clarified attribute class together with its compiled commutation
/// program over the injective triples: per-cell admissible values (when the
/// class member maps the triple onto one with a repetition) and equations
/// f(s . t) = s(f(t)) between cells (when the image stays injective).
struct ConditionClass {
  ConditionId id;
  std::vector<int> members;  // unary codes, ascending
  int rep = -1;              // least member, used to compile the program

  std::array<std::uint8_t, kMaxSigma> static_mask{};  // admissible-value bits
  struct Link {
    std::uint8_t from, to;  // cells: f.v[to] == s(f.v[from])
  };
  std::vector<Link> links;
  std::array<Element, kMaxCarrier> rep_tab{};

  /// Evaluate the class condition on a majority operation.
  bool holds(const MajorityOp& f) const {
    for (int i = 0; i < f.sigma_size(); ++i)
      if (!((static_mask[i] >> f.v[i]) & 1)) return false;
    for (const Link& ln : links)
      if (f.v[ln.to] != rep_tab[f.v[ln.from]]) return false;
    return true;
  }
};

namespace detail {

inline void compile_program(ConditionClass& cls, int k) {
  const SigmaIndex& sig = SigmaIndex::of(k);
  const UnaryOp s = UnaryOp::from_code(k, cls.rep);
  cls.rep_tab = s.tab;
  cls.static_mask.fill(static_cast<std::uint8_t>((1u << k) - 1));
  cls.links.clear();
  for (int i = 0; i < sig.size(); ++i) {
    const Triple& t = sig.triple(i);
    const int a = s(t[0]), b = s(t[1]), c = s(t[2]);
    const int j = sig.index(a, b, c);
    if (j < 0) {
      // Majority value of (a,b,c) with a repetition.
      const int maj = (a == b || a == c) ? a : b;
      std::uint8_t mask = 0;
      for (int v = 0; v < k; ++v)
        if (s(v) == maj) mask |= static_cast<std::uint8_t>(1u << v);
      cls.static_mask[i] &= mask;
    } else if (j == i) {
      // s fixes the triple entrywise: f(t) must be a fixed point of s.
      std::uint8_t mask = 0;
      for (int v = 0; v < k; ++v)
        if (s(v) == v) mask |= static_cast<std::uint8_t>(1u << v);
      cls.static_mask[i] &= mask;
    } else {
      cls.links.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)});
    }
  }
}

}  // namespace detail

/// The clarified attribute set on {0,1,2,3}: 167 classes in canonical order
/// A1..A7, C1..C3, D1..D3, E1..E4, F1..F6, then U(n) ascending by code.
/// Together with the five trivial maps the classes partition all 256 unary
/// operations.
class AttributeUniverse {
 public:
  AttributeUniverse() {
    class_of_code_.fill(-1);
    std::vector<std::pair<ConditionId, int>> tagged;
    for (int n = 0; n < num_unary(4); ++n) {
      const ConditionId id = classify_unary(UnaryOp::from_code(4, n));
      if (id.is_trivial())
        trivial_codes_.push_back(n);
      else
        tagged.emplace_back(id, n);
    }
    std::sort(tagged.begin(), tagged.end(), [](const auto& l, const auto& r) {
      return order_key(l.first) != order_key(r.first)
                 ? order_key(l.first) < order_key(r.first)
                 : l.second < r.second;
    });
    for (const auto& [id, code] : tagged) {
      if (classes_.empty() || !(classes_.back().id == id)) {
        classes_.push_back({});
        classes_.back().id = id;
        classes_.back().rep = code;
      }
      classes_.back().members.push_back(code);
      class_of_code_[code] = static_cast<std::int16_t>(classes_.size() - 1);
    }
    for (auto& cls : classes_) detail::compile_program(cls, 4);
  }

  static const AttributeUniverse& instance() {
    static const AttributeUniverse u;
    return u;
  }

  int size() const { return static_cast<int>(classes_.size()); }
  const ConditionClass& cls(int i) const { return classes_[i]; }
  const std::vector<int>& trivial_codes() const { return trivial_codes_; }

  /// Attribute index of a non-trivial unary code, -1 for trivial ones.
  int class_of_code(int code) const { return class_of_code_[code]; }

  int index_of(const ConditionId& id) const {
    for (int i = 0; i < size(); ++i)
      if (classes_[i].id == id) return i;
    return -1;
  }

  int index_of(const std::string& tag) const {
    const auto id = ConditionId::parse(tag);
    return id ? index_of(*id) : -1;
  }

  /// Conjugation permutes the attribute classes; returns the image index of
  /// each class under s -> s^p.
  std::vector<int> attribute_action(const Permutation& p) const {
    std::vector<int> act(size());
    for (int i = 0; i < size(); ++i) {
      const UnaryOp rep = UnaryOp::from_code(4, classes_[i].rep);
      act[i] = class_of_code_[conjugate(rep, p).code()];
    }
    return act;
  }

 private:
  static int order_key(const ConditionId& id) {
    using K = ConditionId::Kind;
    switch (id.kind) {
      case K::A: return 0 * 1000 + id.num;
      case K::C: return 1 * 1000 + id.num;
      case K::D: return 2 * 1000 + id.num;
      case K::E: return 3 * 1000 + id.num;
      case K::F: return 4 * 1000 + id.num;
      case K::U: return 5 * 1000 + id.num;
      case K::Trivial: return 9 * 1000;
    }
    return 9999;
  }

  std::vector<ConditionClass> classes_;
  std::array<std::int16_t, kMaxUnary> class_of_code_{};
  std::vector<int> trivial_codes_;
};

/// Evaluate a named condition on a majority operation.  The trivial tag is
/// rejected: it is not a condition but the absence of one.
inline bool condition_holds(const ConditionId& c, const MajorityOp& f) {
  if (c.is_trivial())
    throw std::invalid_argument("TRIVIAL is vacuous, not a condition");
  const AttributeUniverse& u = AttributeUniverse::instance();
  const int idx = u.index_of(c);
  if (idx < 0) throw std::invalid_argument("unknown condition " + c.name());
  return u.cls(idx).holds(f);
}

/// Commutation of a permutation with a left-absorptive operation, decided on
/// the free triples only (injective triples and the patterns (a,b,b)); the
/// remaining patterns are pinned by the absorption laws and permutations
/// preserve them.
inline bool general_condition_holds(const Permutation& p, const LeftAbsorptiveOp& g) {
  check_same_carrier(p.k(), g.k);
  const SigmaIndex& sig = SigmaIndex::of(g.k);
  for (int i = 0; i < sig.size(); ++i) {
    const Triple& t = sig.triple(i);
    if (g.value(p(t[0]), p(t[1]), p(t[2])) != p(g.value(t))) return false;
  }
  for (int a = 0; a < g.k; ++a)
    for (int b = 0; b < g.k; ++b) {
      if (a == b) continue;
      if (g.value(p(a), p(b), p(b)) != p(g.value(a, b, b))) return false;
    }
  return true;
}

/// Decomposition of a unary map with a three-element image, naming the
/// double-point and the roles of the remaining elements, and the orbits of
/// the free triples when the restriction to the image is a permutation.
struct ImageThreeAnalysis {
  UnaryOp s;
  Element alpha, beta, gamma, t;  // image values and the non-image element
  Element u, v, x, y;             // s(u) = s(v) = alpha, s(x) = beta, s(y) = gamma
  bool zeta_is_permutation = false;
  std::array<std::int8_t, kMaxCarrier> zeta{};  // restriction of s to its image
  std::array<std::int8_t, 3> xi{};              // index permutation, see below
  // When the restriction is a permutation: orbits of the six permutations of
  // (u,x,y) under t -> s . t, each starting from its lexicographically least
  // triple, ordered by those representatives.
  std::vector<std::vector<Triple>> orbits;
};

inline ImageThreeAnalysis analyze_image3(const UnaryOp& s) {
  if (s.k != 4) throw config_error("image-3 analysis is defined for carrier size 4");
  if (s.image_size() != 3)
    throw std::invalid_argument("image size is not 3: " + s.values_string());
  ImageThreeAnalysis a;
  a.s = s;
  const unsigned img = s.image_mask();

  int alpha = -1;
  for (int w = 0; w < 4; ++w)
    if (std::popcount(s.preimage_mask(w)) == 2) alpha = w;
  a.alpha = static_cast<Element>(alpha);
  const unsigned bmask = s.preimage_mask(alpha);

  a.zeta.fill(-1);
  for (int w = 0; w < 4; ++w)
    if ((img >> w) & 1) a.zeta[w] = static_cast<std::int8_t>(s(w));
  // The restriction fails to be a permutation of the image exactly when both
  // elements of the double preimage lie inside the image.
  a.zeta_is_permutation = (bmask & img) != bmask;

  const unsigned rest = ~bmask & 0xFu;  // the two singleton-preimage arguments
  if (a.zeta_is_permutation) {
    // u is the image member of the double preimage, v the outsider; x < y.
    a.u = static_cast<Element>(std::countr_zero(bmask & img));
    a.v = static_cast<Element>(std::countr_zero(bmask & ~img));
    a.x = static_cast<Element>(std::countr_zero(rest));
    a.y = static_cast<Element>(std::countr_zero(rest & (rest - 1)));
  } else {
    // Both u < v are image members; x is the image member among the
    // singleton-preimage arguments, y the non-image element.
    a.u = static_cast<Element>(std::countr_zero(bmask));
    a.v = static_cast<Element>(std::countr_zero(bmask & (bmask - 1)));
    a.x = static_cast<Element>(std::countr_zero(rest & img));
    a.y = static_cast<Element>(std::countr_zero(rest & ~img));
  }
  a.beta = s(a.x);
  a.gamma = s(a.y);
  a.t = static_cast<Element>(std::countr_zero(~img & 0xFu));

  const std::array<Element, 3> base = a.zeta_is_permutation
                                          ? std::array<Element, 3>{a.u, a.x, a.y}
                                          : std::array<Element, 3>{a.u, a.v, a.x};
  const std::array<Element, 3> abg{a.alpha, a.beta, a.gamma};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (base[j] == abg[i]) a.xi[i] = static_cast<std::int8_t>(j);

  if (a.zeta_is_permutation) {
    std::array<Element, 3> elems{a.u, a.x, a.y};
    std::sort(elems.begin(), elems.end());
    std::vector<Triple> sigma_prime;
    std::array<int, 3> perm{0, 1, 2};
    do {
      sigma_prime.push_back({elems[perm[0]], elems[perm[1]], elems[perm[2]]});
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(sigma_prime.begin(), sigma_prime.end());
    std::vector<bool> used(sigma_prime.size(), false);
    for (std::size_t i = 0; i < sigma_prime.size(); ++i) {
      if (used[i]) continue;
      std::vector<Triple> orbit;
      Triple cur = sigma_prime[i];
      do {
        orbit.push_back(cur);
        const auto it = std::find(sigma_prime.begin(), sigma_prime.end(), cur);
        used[it - sigma_prime.begin()] = true;
        cur = {s(cur[0]), s(cur[1]), s(cur[2])};
      } while (!(cur == sigma_prime[i]));
      a.orbits.push_back(std::move(orbit));
    }
  }
  return a;
}

}  // namespace centmon
