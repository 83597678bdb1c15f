#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "centmon/base.hpp"
#include "centmon/commutation.hpp"
#include "centmon/conditions.hpp"
#include "centmon/monoid.hpp"
#include "centmon/sigma.hpp"
#include "centmon/ternary.hpp"

namespace centmon {

/// Bit set over attribute-class indices (enough room for the 167 classes).
struct ConditionSet {
  std::array<std::uint64_t, 3> w{};

  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { w[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void clear(int i) { w[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  int count() const {
    return std::popcount(w[0]) + std::popcount(w[1]) + std::popcount(w[2]);
  }

  ConditionSet operator|(const ConditionSet& o) const {
    return {{w[0] | o.w[0], w[1] | o.w[1], w[2] | o.w[2]}};
  }
  ConditionSet operator&(const ConditionSet& o) const {
    return {{w[0] & o.w[0], w[1] & o.w[1], w[2] & o.w[2]}};
  }
  ConditionSet minus(const ConditionSet& o) const {
    return {{w[0] & ~o.w[0], w[1] & ~o.w[1], w[2] & ~o.w[2]}};
  }
  bool subset_of(const ConditionSet& o) const {
    return !(w[0] & ~o.w[0]) && !(w[1] & ~o.w[1]) && !(w[2] & ~o.w[2]);
  }
  bool empty() const { return !(w[0] | w[1] | w[2]); }

  std::vector<int> bits() const {
    std::vector<int> out;
    for (int word = 0; word < 3; ++word) {
      std::uint64_t x = w[word];
      while (x) {
        out.push_back(word * 64 + std::countr_zero(x));
        x &= x - 1;
      }
    }
    return out;
  }

  auto operator<=>(const ConditionSet&) const = default;
};

struct ConditionSetHash {
  std::size_t operator()(const ConditionSet& s) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t x : s.w) {
      x ^= x >> 33;
      x *= 0xff51afd7ed558ccdull;
      h = (h ^ x) * 0xc4ceb9fe1a85ec53ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Value-assignment program for the majority operations commuting with one
/// unary map: cells are the injective triples in canonical order; each cell
/// carries an admissible-value mask (tightened to arc consistency, so seed
/// values with an empty preimage are excluded before branching) and equations
/// against earlier cells.  Depth-first execution enumerates the commuting
/// operations exactly once, in lexicographic order of their value strings.
struct StagePlan {
  int k = 4;
  int stage_class = -1;  // universe index, -1 when built from a bare unary map
  std::array<Element, kMaxCarrier> s_tab{};
  std::array<std::uint8_t, kMaxCarrier> pre_mask{};  // preimage masks of s
  std::array<std::uint8_t, kMaxSigma> stat{};        // admissible values

  struct Dyn {
    std::uint8_t other;  // earlier cell
    bool forward;        // true: value = s(f[other]); false: s(value) = f[other]
  };
  std::array<std::vector<Dyn>, kMaxSigma> dyn;

  int sigma_size() const { return SigmaIndex::of(k).size(); }

  std::uint8_t allowed(int cell, const std::array<Element, kMaxSigma>& f) const {
    std::uint8_t m = stat[cell];
    for (const Dyn& d : dyn[cell])
      m &= d.forward ? static_cast<std::uint8_t>(1u << s_tab[f[d.other]])
                     : pre_mask[f[d.other]];
    return m;
  }

  /// Candidate count as the product of branch factors; exact only when the
  /// plan has no cross-cell equations (the image-2 classes).
  std::uint64_t static_space() const {
    std::uint64_t n = 1;
    for (int i = 0; i < sigma_size(); ++i) n *= std::popcount(stat[i]);
    return n;
  }
};

/// Compile the assignment program for the majority operations commuting with
/// s.  Equations are oriented toward the later cell; the image of a triple
/// under s either stays injective (equation) or resolves through the majority
/// law (static mask).
inline StagePlan build_plan(int k, const UnaryOp& s, int stage_class = -1) {
  check_same_carrier(k, s.k);
  const SigmaIndex& sig = SigmaIndex::of(k);
  StagePlan plan;
  plan.k = k;
  plan.stage_class = stage_class;
  plan.s_tab = s.tab;
  for (int v = 0; v < k; ++v)
    plan.pre_mask[v] = static_cast<std::uint8_t>(s.preimage_mask(v));
  plan.stat.fill(static_cast<std::uint8_t>((1u << k) - 1));

  std::vector<std::pair<int, int>> eqs;  // (from, to): f[to] = s(f[from])
  for (int i = 0; i < sig.size(); ++i) {
    const Triple& t = sig.triple(i);
    const int a = s(t[0]), b = s(t[1]), c = s(t[2]);
    const int j = sig.index(a, b, c);
    if (j < 0) {
      const int maj = (a == b || a == c) ? a : b;
      std::uint8_t m = 0;
      for (int v = 0; v < k; ++v)
        if (s(v) == maj) m |= static_cast<std::uint8_t>(1u << v);
      plan.stat[i] &= m;
    } else if (j == i) {
      std::uint8_t m = 0;
      for (int v = 0; v < k; ++v)
        if (s(v) == v) m |= static_cast<std::uint8_t>(1u << v);
      plan.stat[i] &= m;
    } else {
      eqs.emplace_back(i, j);
      if (j > i)
        plan.dyn[j].push_back({static_cast<std::uint8_t>(i), true});
      else
        plan.dyn[i].push_back({static_cast<std::uint8_t>(j), false});
    }
  }

  // Arc consistency over the equations.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [from, to] : eqs) {
      std::uint8_t img = 0, pre = 0;
      for (int v = 0; v < k; ++v) {
        if ((plan.stat[from] >> v) & 1) img |= static_cast<std::uint8_t>(1u << s(v));
        if ((plan.stat[to] >> v) & 1) pre |= plan.pre_mask[v];
      }
      if (plan.stat[to] & ~img) {
        plan.stat[to] &= img;
        changed = true;
      }
      if (plan.stat[from] & ~pre) {
        plan.stat[from] &= pre;
        changed = true;
      }
    }
  }

  return plan;
}

inline StagePlan build_plan(const AttributeUniverse& u, int class_index) {
  return build_plan(4, UnaryOp::from_code(4, u.cls(class_index).rep), class_index);
}

/// Stream every operation of a plan in lexicographic order.  The callback
/// may return false to stop early; the return value reports completion.
template <typename F>
bool enumerate_plan(const StagePlan& plan, F&& emit) {
  const int n = plan.sigma_size();
  std::array<Element, kMaxSigma> f{};
  std::array<std::uint8_t, kMaxSigma> rem{};
  int d = 0;
  rem[0] = plan.allowed(0, f);
  while (d >= 0) {
    if (!rem[d]) {
      --d;
      continue;
    }
    const int v = std::countr_zero(rem[d]);
    rem[d] &= static_cast<std::uint8_t>(rem[d] - 1);
    f[d] = static_cast<Element>(v);
    if (d == n - 1) {
      MajorityOp out;
      out.k = static_cast<std::uint8_t>(plan.k);
      std::copy_n(f.begin(), n, out.v.begin());
      if (!emit(out)) return false;
      continue;
    }
    ++d;
    rem[d] = plan.allowed(d, f);
  }
  return true;
}

inline std::uint64_t count_plan(const StagePlan& plan) {
  std::uint64_t n = 0;
  enumerate_plan(plan, [&](const MajorityOp&) {
    ++n;
    return true;
  });
  return n;
}

/// Commutation-status machinery for one stage: per-class admissible-value
/// kills folded into per-cell masks, and cross-cell equations bucketed at
/// their later cell.  Classes whose joint constraint system with the stage
/// has an empty arc-consistent domain are violated up front.
struct StageTracker {
  const AttributeUniverse* universe = nullptr;
  int own = -1;
  ConditionSet mask;       // all classes
  ConditionSet previolated;
  std::array<std::array<ConditionSet, kMaxCarrier>, kMaxSigma> kill{};

  struct Bin {
    std::uint16_t cls;
    std::uint8_t from, to;
    std::array<Element, kMaxCarrier> s;
  };
  std::array<std::vector<Bin>, kMaxSigma> buckets;
};

inline StageTracker build_tracker(const AttributeUniverse& u, const StagePlan& plan) {
  StageTracker tr;
  tr.universe = &u;
  tr.own = plan.stage_class;
  const int n = plan.sigma_size();
  for (int c = 0; c < u.size(); ++c) tr.mask.set(c);

  for (int c = 0; c < u.size(); ++c) {
    const ConditionClass& cls = u.cls(c);
    for (int i = 0; i < n; ++i)
      for (int v = 0; v < plan.k; ++v)
        if (!((cls.static_mask[i] >> v) & 1)) tr.kill[i][v].set(c);
    for (const auto& ln : cls.links)
      tr.buckets[std::max(ln.from, ln.to)].push_back(
          {static_cast<std::uint16_t>(c), ln.from, ln.to, cls.rep_tab});

    // Joint arc consistency of the stage plan with this class.
    std::array<std::uint8_t, kMaxSigma> dom{};
    for (int i = 0; i < n; ++i) dom[i] = plan.stat[i] & cls.static_mask[i];
    struct Eq {
      int from, to;
      std::array<Element, kMaxCarrier> tab;
    };
    std::vector<Eq> jeqs;
    for (int i = 0; i < n; ++i)
      for (const auto& dcon : plan.dyn[i]) {
        if (dcon.forward)
          jeqs.push_back({dcon.other, i, plan.s_tab});
        else
          jeqs.push_back({i, dcon.other, plan.s_tab});
      }
    for (const auto& ln : cls.links)
      jeqs.push_back({ln.from, ln.to, cls.rep_tab});

    bool changed = true;
    bool dead = false;
    while (changed && !dead) {
      changed = false;
      for (const Eq& e : jeqs) {
        std::uint8_t img = 0, pre = 0;
        for (int v = 0; v < plan.k; ++v) {
          if ((dom[e.from] >> v) & 1) img |= static_cast<std::uint8_t>(1u << e.tab[v]);
          if ((dom[e.to] >> v) & 1)
            for (int w = 0; w < plan.k; ++w)
              if (e.tab[w] == v) pre |= static_cast<std::uint8_t>(1u << w);
        }
        if (dom[e.to] & ~img) {
          dom[e.to] &= img;
          changed = true;
        }
        if (dom[e.from] & ~pre) {
          dom[e.from] &= pre;
          changed = true;
        }
      }
      for (int i = 0; i < n; ++i) dead |= dom[i] == 0;
    }
    if (dead) tr.previolated.set(c);
  }
  return tr;
}

struct StageStats {
  std::uint64_t nodes = 0;
  std::uint64_t candidates = 0;  // complete assignments reached or synthesised
  std::uint64_t pruned = 0;
  std::uint64_t suspensions = 0;
  double wall_ms = 0;
};

/// Resumable search state: the dedup table of centraliser rows found so far
/// plus the backtracking path to resume from.
struct StageSearchState {
  std::unordered_map<ConditionSet, std::string, ConditionSetHash> recorded;
  std::vector<Element> resume_path;  // empty on a fresh run
  bool completed = false;
  StageStats stats;
};

/// Depth-first enumeration of a stage's operations with on-the-fly object
/// clarification: one representative (the lexicographically least witness)
/// per distinct centraliser row.  Subtrees are cut once every centraliser
/// row they can still produce has been recorded; in particular, once every
/// non-stage class is violated the subtree collapses to the stage's minimal
/// row.  Runs at most `node_budget` further nodes, returning false on
/// suspension with the state primed for resumption.
inline bool run_stage_search(const StagePlan& plan, const StageTracker& tracker,
                             StageSearchState& state,
                             std::uint64_t node_budget = UINT64_MAX,
                             int subset_prune_limit = 4) {
  if (state.completed) return true;
  const int n = plan.sigma_size();
  std::array<Element, kMaxSigma> f{};
  std::array<std::uint8_t, kMaxSigma> rem{};
  std::array<ConditionSet, kMaxSigma + 1> violated{};
  violated[0] = tracker.previolated;

  std::vector<Element> seek = state.resume_path;
  bool seeking = !seek.empty();
  int d = 0;
  {
    std::uint8_t m = plan.allowed(0, f);
    if (seeking) m &= static_cast<std::uint8_t>(~((1u << seek[0]) - 1));
    rem[0] = m;
  }
  std::uint64_t used = 0;

  while (d >= 0) {
    if (!rem[d]) {
      seeking = false;
      --d;
      continue;
    }
    if (used >= node_budget) {
      // Suspend before testing the next pending value.
      state.resume_path.assign(f.begin(), f.begin() + d);
      state.resume_path.push_back(static_cast<Element>(std::countr_zero(rem[d])));
      state.stats.suspensions += 1;
      return false;
    }
    ++used;
    state.stats.nodes += 1;
    const int v = std::countr_zero(rem[d]);
    rem[d] &= static_cast<std::uint8_t>(rem[d] - 1);
    f[d] = static_cast<Element>(v);
    const bool on_seek = seeking && d < static_cast<int>(seek.size()) && seek[d] == v;
    if (!on_seek) seeking = false;

    ConditionSet vio = violated[d] | tracker.kill[d][v];
    for (const StageTracker::Bin& b : tracker.buckets[d])
      if (!vio.test(b.cls) && f[b.to] != b.s[f[b.from]]) vio.set(b.cls);

    if (d == n - 1) {
      state.stats.candidates += 1;
      ConditionSet row = tracker.mask.minus(vio);
      auto it = state.recorded.find(row);
      if (it == state.recorded.end()) {
        std::string rep(n, '0');
        for (int i = 0; i < n; ++i) rep[i] = static_cast<char>('0' + f[i]);
        state.recorded.emplace(row, std::move(rep));
      }
      continue;
    }

    ConditionSet alive = tracker.mask.minus(vio);
    if (tracker.own >= 0) alive.clear(tracker.own);
    const int alive_count = alive.count();
    if (alive_count == 0) {
      // Every completion below carries exactly the surviving row; once it is
      // recorded the subtree is redundant.  When it is not recorded yet we
      // descend: the first completion records it and the siblings prune.
      const ConditionSet row = tracker.mask.minus(vio);
      if (state.recorded.contains(row)) {
        state.stats.pruned += 1;
        continue;
      }
    } else if (alive_count <= subset_prune_limit) {
      const auto live_bits = alive.bits();
      const ConditionSet base = tracker.mask.minus(vio).minus(alive);
      bool all_known = true;
      for (unsigned sub = 0; sub < (1u << live_bits.size()) && all_known; ++sub) {
        ConditionSet row = base;
        for (std::size_t b = 0; b < live_bits.size(); ++b)
          if ((sub >> b) & 1) row.set(live_bits[b]);
        all_known = state.recorded.contains(row);
      }
      if (all_known) {
        state.stats.pruned += 1;
        continue;
      }
    }

    ++d;
    violated[d] = vio;
    std::uint8_t m = plan.allowed(d, f);
    if (seeking && d < static_cast<int>(seek.size()))
      m &= static_cast<std::uint8_t>(~((1u << seek[d]) - 1));
    rem[d] = m;
  }
  state.completed = true;
  state.resume_path.clear();
  return true;
}

/// Result of one stage: the distinct centraliser rows with their witnesses.
struct StageResult {
  int class_index = -1;
  std::string tag;
  std::vector<std::pair<ConditionSet, std::string>> monoids;  // sorted by row
  StageStats stats;
};

/// Expand a centraliser row over the attribute classes to the explicit set
/// of unary codes (trivial maps plus every member of each set class).
inline Monoid expand_row(const AttributeUniverse& u, const ConditionSet& row) {
  Monoid m = Monoid::empty(4);
  for (int code : u.trivial_codes()) m.add(code);
  for (int c : row.bits())
    for (int code : u.cls(c).members) m.add(code);
  return m;
}

/// Run one stage to completion and package the clarified monoid list.  Every
/// representative is re-checked against its directly computed centraliser,
/// which also certifies that class membership is all-or-none.
inline StageResult distinct_monoids(const AttributeUniverse& u, int class_index,
                                    StageSearchState* external_state = nullptr) {
  const StagePlan plan = build_plan(u, class_index);
  const StageTracker tracker = build_tracker(u, plan);
  StageSearchState local;
  StageSearchState& st = external_state ? *external_state : local;
  run_stage_search(plan, tracker, st);

  StageResult out;
  out.class_index = class_index;
  out.tag = u.cls(class_index).id.name();
  out.stats = st.stats;
  out.monoids.assign(st.recorded.begin(), st.recorded.end());
  std::sort(out.monoids.begin(), out.monoids.end());
  for (const auto& [row, rep] : out.monoids) {
    const MajorityOp f = MajorityOp::parse(4, rep);
    ConditionSet check;
    const Monoid direct = unary_centraliser(f);
    for (int c = 0; c < u.size(); ++c) {
      bool all = true, any = false;
      for (int code : u.cls(c).members) {
        const bool in = direct.test(code);
        all &= in;
        any |= in;
      }
      if (any != all)
        throw error("class " + u.cls(c).id.name() +
                    " split by centraliser of " + rep);
      if (all) check.set(c);
    }
    if (!(check == row))
      throw error("centraliser row mismatch for representative " + rep);
    if (!(expand_row(u, row) == direct))
      throw error("monoid expansion mismatch for representative " + rep);
  }
  return out;
}

inline StageResult distinct_monoids(const AttributeUniverse& u,
                                    const ConditionId& id) {
  const int idx = u.index_of(id);
  if (idx < 0)
    throw std::invalid_argument(id.is_trivial()
                                    ? "TRIVIAL has no enumeration stage"
                                    : "unknown condition " + id.name());
  return distinct_monoids(u, idx);
}

}  // namespace centmon
