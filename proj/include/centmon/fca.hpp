#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "centmon/base.hpp"

namespace centmon::fca {

/// Fixed-width bit vector for context rows, columns and derivations.
struct Bitset {
  int n = 0;
  std::vector<std::uint64_t> w;

  static Bitset zeros(int n) {
    Bitset b;
    b.n = n;
    b.w.assign((n + 63) / 64, 0);
    return b;
  }

  static Bitset ones(int n) {
    Bitset b = zeros(n);
    for (auto& x : b.w) x = ~std::uint64_t{0};
    b.trim();
    return b;
  }

  void trim() {
    if (n % 64) w.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  }

  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { w[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(int i) { w[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  int count() const {
    int c = 0;
    for (auto x : w) c += std::popcount(x);
    return c;
  }

  bool any() const {
    for (auto x : w)
      if (x) return true;
    return false;
  }

  bool subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] & ~o.w[i]) return false;
    return true;
  }

  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] &= o.w[i];
    return *this;
  }

  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
    return *this;
  }

  Bitset operator&(const Bitset& o) const {
    Bitset r = *this;
    r &= o;
    return r;
  }

  Bitset operator|(const Bitset& o) const {
    Bitset r = *this;
    r |= o;
    return r;
  }

  std::vector<int> bits() const {
    std::vector<int> out;
    for (std::size_t word = 0; word < w.size(); ++word) {
      std::uint64_t x = w[word];
      while (x) {
        out.push_back(static_cast<int>(word * 64) + std::countr_zero(x));
        x &= x - 1;
      }
    }
    return out;
  }

  auto operator<=>(const Bitset&) const = default;
};

/// Lectic order on attribute sets with attribute 0 most significant: A is
/// lectically below B when the smallest attribute where they differ belongs
/// to B.
inline bool lectic_less(const Bitset& a, const Bitset& b) {
  for (std::size_t i = 0; i < a.w.size(); ++i) {
    const std::uint64_t diff = a.w[i] ^ b.w[i];
    if (diff) return (b.w[i] >> std::countr_zero(diff)) & 1;
  }
  return false;
}

/// Object-attribute incidence table with labels.
struct FormalContext {
  std::vector<std::string> objects;
  std::vector<std::string> attributes;
  std::vector<Bitset> rows;  // one per object, width = |attributes|

  int object_count() const { return static_cast<int>(objects.size()); }
  int attribute_count() const { return static_cast<int>(attributes.size()); }

  bool incidence(int g, int m) const { return rows[g].test(m); }

  Bitset column(int m) const {
    Bitset c = Bitset::zeros(object_count());
    for (int g = 0; g < object_count(); ++g)
      if (rows[g].test(m)) c.set(g);
    return c;
  }

  FormalContext transposed() const {
    FormalContext t;
    t.objects = attributes;
    t.attributes = objects;
    t.rows.reserve(attributes.size());
    for (int m = 0; m < attribute_count(); ++m) t.rows.push_back(column(m));
    return t;
  }
};

enum class Side { Objects, Attributes };

/// Attributes common to a set of objects; the empty set derives to all
/// attributes.
inline Bitset derive_objects(const FormalContext& ctx, const Bitset& objs) {
  Bitset out = Bitset::ones(ctx.attribute_count());
  for (std::size_t word = 0; word < objs.w.size(); ++word) {
    std::uint64_t x = objs.w[word];
    while (x) {
      out &= ctx.rows[word * 64 + std::countr_zero(x)];
      x &= x - 1;
    }
  }
  return out;
}

/// Objects having every attribute of the set; the empty set derives to all
/// objects.
inline Bitset derive_attributes(const FormalContext& ctx, const Bitset& attrs) {
  Bitset out = Bitset::zeros(ctx.object_count());
  for (int g = 0; g < ctx.object_count(); ++g)
    if (attrs.subset_of(ctx.rows[g])) out.set(g);
  return out;
}

inline Bitset derive(const FormalContext& ctx, Side side, const Bitset& set) {
  if (side == Side::Objects) {
    if (set.n != ctx.object_count())
      throw std::invalid_argument("object set width mismatch");
    return derive_objects(ctx, set);
  }
  if (set.n != ctx.attribute_count())
    throw std::invalid_argument("attribute set width mismatch");
  return derive_attributes(ctx, set);
}

/// Galois closure on the attribute side.
inline Bitset closure(const FormalContext& ctx, const Bitset& attrs) {
  return derive_objects(ctx, derive_attributes(ctx, attrs));
}

struct ClarifyResult {
  FormalContext ctx;
  // One entry per kept label: the original labels it stands for (itself
  // first, in original order).
  std::vector<std::vector<std::string>> groups;
};

inline ClarifyResult clarify(const FormalContext& ctx, Side side) {
  if (side == Side::Attributes) {
    ClarifyResult t = clarify(ctx.transposed(), Side::Objects);
    t.ctx = t.ctx.transposed();
    return t;
  }
  ClarifyResult out;
  out.ctx.attributes = ctx.attributes;
  std::vector<int> rep_of;  // kept index per distinct row
  for (int g = 0; g < ctx.object_count(); ++g) {
    bool merged = false;
    for (std::size_t r = 0; r < rep_of.size(); ++r)
      if (ctx.rows[rep_of[r]] == ctx.rows[g]) {
        out.groups[r].push_back(ctx.objects[g]);
        merged = true;
        break;
      }
    if (!merged) {
      rep_of.push_back(g);
      out.ctx.objects.push_back(ctx.objects[g]);
      out.ctx.rows.push_back(ctx.rows[g]);
      out.groups.push_back({ctx.objects[g]});
    }
  }
  return out;
}

struct ReduceResult {
  FormalContext ctx;
  std::vector<std::string> removed;
};

/// Remove objects whose row is the intersection of the other rows strictly
/// containing it (the empty intersection counting as the full attribute
/// set).  Expects a context already clarified on that side.
inline ReduceResult reduce(const FormalContext& ctx, Side side) {
  if (side == Side::Attributes) {
    ReduceResult t = reduce(ctx.transposed(), Side::Objects);
    t.ctx = t.ctx.transposed();
    return t;
  }
  ReduceResult out;
  out.ctx.attributes = ctx.attributes;
  for (int g = 0; g < ctx.object_count(); ++g) {
    Bitset inter = Bitset::ones(ctx.attribute_count());
    for (int h = 0; h < ctx.object_count(); ++h) {
      if (h == g) continue;
      if (ctx.rows[g].subset_of(ctx.rows[h]) && !(ctx.rows[h] == ctx.rows[g]))
        inter &= ctx.rows[h];
    }
    if (inter == ctx.rows[g]) {
      out.removed.push_back(ctx.objects[g]);
    } else {
      out.ctx.objects.push_back(ctx.objects[g]);
      out.ctx.rows.push_back(ctx.rows[g]);
    }
  }
  return out;
}

/// Enumerate every intent exactly once in lectic order (Next Closure).  The
/// callback may return false to stop; the return value reports completion.
template <typename F>
bool next_closure_intents(const FormalContext& ctx, F&& emit) {
  const int m = ctx.attribute_count();
  std::vector<Bitset> columns;
  columns.reserve(m);
  for (int j = 0; j < m; ++j) columns.push_back(ctx.column(j));

  auto closure_of = [&](const Bitset& attrs) {
    Bitset extent = Bitset::ones(ctx.object_count());
    for (int j : attrs.bits()) extent &= columns[j];
    return derive_objects(ctx, extent);
  };

  Bitset a = closure_of(Bitset::zeros(m));
  while (true) {
    if (!emit(const_cast<const Bitset&>(a))) return false;
    if (a.count() == m) return true;
    bool advanced = false;
    for (int i = m - 1; i >= 0; --i) {
      if (a.test(i)) {
        a.reset(i);
        continue;
      }
      Bitset b = a;
      b.set(i);
      b = closure_of(b);
      // Candidate is valid when it adds nothing below i.
      bool ok = true;
      for (int j : b.bits()) {
        if (j >= i) break;
        if (!a.test(j)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        a = b;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw error("next-closure invariant violated");
  }
}

inline std::uint64_t count_intents(const FormalContext& ctx) {
  std::uint64_t n = 0;
  next_closure_intents(ctx, [&](const Bitset&) {
    ++n;
    return true;
  });
  return n;
}

inline std::vector<Bitset> all_intents(const FormalContext& ctx) {
  std::vector<Bitset> out;
  next_closure_intents(ctx, [&](const Bitset& b) {
    out.push_back(b);
    return true;
  });
  return out;
}

/// Intents maximal under inclusion apart from the full attribute set.  Every
/// proper intent lies inside some object row, so the maximal proper intents
/// are exactly the maximal non-full object rows.
inline std::vector<Bitset> maximal_proper_intents(const FormalContext& ctx) {
  const Bitset full = Bitset::ones(ctx.attribute_count());
  std::vector<Bitset> distinct;
  for (const Bitset& r : ctx.rows) {
    if (r == full) continue;
    if (std::find(distinct.begin(), distinct.end(), r) == distinct.end())
      distinct.push_back(r);
  }
  std::vector<Bitset> out;
  for (const Bitset& r : distinct) {
    bool dominated = false;
    for (const Bitset& s : distinct)
      if (!(s == r) && r.subset_of(s)) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), lectic_less);
  return out;
}

/// Burmeister .cxt reader: "B", blank, object count, attribute count, blank,
/// object names, attribute names, then one './X' row per object.
inline FormalContext read_cxt(std::istream& in) {
  int lineno = 0;
  auto next_line = [&](bool allow_eof = false) {
    std::string line;
    ++lineno;
    if (!std::getline(in, line)) {
      if (allow_eof) return std::string{};
      throw parse_error("unexpected end of file", lineno);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (next_line() != "B") throw parse_error("expected header 'B'", lineno);
  next_line();  // unnamed context
  const std::string gline = next_line();
  const std::string mline = next_line();
  int gcount = 0, mcount = 0;
  try {
    gcount = std::stoi(gline);
    mcount = std::stoi(mline);
  } catch (const std::exception&) {
    throw parse_error("malformed size line", lineno);
  }
  if (gcount < 0 || mcount < 0) throw parse_error("negative size", lineno);
  next_line();  // separator

  FormalContext ctx;
  for (int g = 0; g < gcount; ++g) ctx.objects.push_back(next_line());
  for (int m = 0; m < mcount; ++m) ctx.attributes.push_back(next_line());
  for (int g = 0; g < gcount; ++g) {
    const std::string line = next_line();
    if (static_cast<int>(line.size()) != mcount)
      throw parse_error("row length " + std::to_string(line.size()) +
                            " does not match attribute count " +
                            std::to_string(mcount),
                        lineno);
    Bitset row = Bitset::zeros(mcount);
    for (int m = 0; m < mcount; ++m) {
      if (line[m] == 'X')
        row.set(m);
      else if (line[m] != '.')
        throw parse_error(std::string("invalid incidence character '") +
                              line[m] + "'",
                          lineno);
    }
    ctx.rows.push_back(std::move(row));
  }
  // A trailing row would mean the object count line disagrees with the data.
  std::string extra = next_line(true);
  if (!extra.empty())
    throw parse_error("trailing content after incidence rows", lineno);
  return ctx;
}

inline FormalContext read_cxt(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open context file " + path);
  return read_cxt(in);
}

inline void write_cxt(const FormalContext& ctx, std::ostream& out) {
  out << "B\n\n"
      << ctx.object_count() << "\n"
      << ctx.attribute_count() << "\n\n";
  for (const auto& g : ctx.objects) out << g << "\n";
  for (const auto& m : ctx.attributes) out << m << "\n";
  for (const Bitset& row : ctx.rows) {
    std::string line(ctx.attribute_count(), '.');
    for (int m = 0; m < ctx.attribute_count(); ++m)
      if (row.test(m)) line[m] = 'X';
    out << line << "\n";
  }
}

inline void write_cxt(const FormalContext& ctx, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot open context file for writing " + path);
  write_cxt(ctx, out);
}

}  // namespace centmon::fca
