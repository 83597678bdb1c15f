#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "centmon/fca.hpp"

using namespace centmon;
using fca::Bitset;
using fca::FormalContext;

namespace {

FormalContext make_context(int objects, int attributes,
                           const std::vector<std::string>& rows) {
  FormalContext ctx;
  for (int g = 0; g < objects; ++g) ctx.objects.push_back("g" + std::to_string(g));
  for (int m = 0; m < attributes; ++m)
    ctx.attributes.push_back("m" + std::to_string(m));
  for (const auto& line : rows) {
    Bitset r = Bitset::zeros(attributes);
    for (int m = 0; m < attributes; ++m)
      if (line[m] == 'X') r.set(m);
    ctx.rows.push_back(r);
  }
  return ctx;
}

FormalContext random_context(int objects, int attributes, double density,
                             std::mt19937& rng) {
  std::bernoulli_distribution coin(density);
  std::vector<std::string> rows;
  for (int g = 0; g < objects; ++g) {
    std::string line(attributes, '.');
    for (int m = 0; m < attributes; ++m)
      if (coin(rng)) line[m] = 'X';
    rows.push_back(line);
  }
  return make_context(objects, attributes, rows);
}

// Independent oracle: the closure of an attribute set straight from the
// definition, over all subsets.
std::set<std::vector<int>> brute_force_intents(const FormalContext& ctx) {
  const int m = ctx.attribute_count();
  std::set<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> extent;
    for (int g = 0; g < ctx.object_count(); ++g) {
      bool all = true;
      for (int j = 0; j < m; ++j)
        if (((mask >> j) & 1) && !ctx.rows[g].test(j)) all = false;
      if (all) extent.push_back(g);
    }
    std::vector<int> intent;
    for (int j = 0; j < m; ++j) {
      bool common = true;
      for (int g : extent)
        if (!ctx.rows[g].test(j)) common = false;
      if (common) intent.push_back(j);
    }
    out.insert(intent);
  }
  return out;
}

const FormalContext kDiagonal = make_context(2, 2, {"X.", ".X"});

}  // namespace

TEST_CASE("derivation operators") {
  SECTION("empty object set derives to all attributes") {
    const Bitset none = Bitset::zeros(2);
    CHECK(fca::derive(kDiagonal, fca::Side::Objects, none) == Bitset::ones(2));
  }
  SECTION("diagonal singletons") {
    Bitset g0 = Bitset::zeros(2);
    g0.set(0);
    Bitset expect = Bitset::zeros(2);
    expect.set(0);
    CHECK(fca::derive(kDiagonal, fca::Side::Objects, g0) == expect);
  }
  SECTION("Galois connection laws on random contexts") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
      const FormalContext ctx = random_context(8, 10, 0.4, rng);
      std::uniform_int_distribution<int> bit(0, 9);
      Bitset a = Bitset::zeros(10), b = Bitset::zeros(10);
      for (int i = 0; i < 4; ++i) a.set(bit(rng));
      b = a;
      b.set(bit(rng));
      // Antitone: a inside b implies b' inside a'.
      CHECK(fca::derive_attributes(ctx, b).subset_of(fca::derive_attributes(ctx, a)));
      const Bitset closed = fca::closure(ctx, a);
      CHECK(a.subset_of(closed));
      CHECK(fca::closure(ctx, closed) == closed);
      CHECK(fca::derive_attributes(ctx, closed) == fca::derive_attributes(ctx, a));
    }
  }
  SECTION("width mismatch rejected") {
    CHECK_THROWS_AS(fca::derive(kDiagonal, fca::Side::Objects, Bitset::zeros(3)),
                    std::invalid_argument);
  }
}

TEST_CASE("closure examples") {
  CHECK(fca::closure(kDiagonal, Bitset::zeros(2)) == Bitset::zeros(2));
  CHECK(fca::closure(kDiagonal, Bitset::ones(2)) == Bitset::ones(2));
}

TEST_CASE("clarification") {
  SECTION("distinct rows unchanged") {
    const auto res = fca::clarify(kDiagonal, fca::Side::Objects);
    CHECK(res.ctx.object_count() == 2);
    CHECK(res.groups.size() == 2);
  }
  SECTION("duplicate rows merge and record the merge map") {
    const FormalContext ctx = make_context(4, 3, {"X.X", ".X.", "X.X", "X.X"});
    const auto res = fca::clarify(ctx, fca::Side::Objects);
    REQUIRE(res.ctx.object_count() == 2);
    CHECK(res.groups[0] == std::vector<std::string>{"g0", "g2", "g3"});
    CHECK(res.groups[1] == std::vector<std::string>{"g1"});
  }
  SECTION("attribute side merges identical columns") {
    const FormalContext ctx = make_context(3, 4, {"XX..", "XX.X", "..XX"});
    const auto res = fca::clarify(ctx, fca::Side::Attributes);
    CHECK(res.ctx.attribute_count() == 3);
  }
  SECTION("intent system is invariant") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      FormalContext ctx = random_context(6, 8, 0.5, rng);
      ctx.rows.push_back(ctx.rows[0]);
      ctx.objects.push_back("dup");
      const auto res = fca::clarify(ctx, fca::Side::Objects);
      CHECK(brute_force_intents(ctx) == brute_force_intents(res.ctx));
    }
  }
}

TEST_CASE("reduction") {
  SECTION("a row equal to the meet of two others is removed") {
    const FormalContext ctx = make_context(3, 4, {"XXX.", "XX.X", "XX.."});
    const auto res = fca::reduce(ctx, fca::Side::Objects);
    REQUIRE(res.removed == std::vector<std::string>{"g2"});
    CHECK(res.ctx.object_count() == 2);
  }
  SECTION("a full row is removed by the empty-intersection convention") {
    const FormalContext ctx = make_context(2, 3, {"XXX", "XX."});
    const auto res = fca::reduce(ctx, fca::Side::Objects);
    CHECK(res.removed == std::vector<std::string>{"g0"});
  }
  SECTION("closure system is preserved") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
      const FormalContext ctx = random_context(7, 9, 0.5, rng);
      const auto clar = fca::clarify(ctx, fca::Side::Objects);
      const auto red = fca::reduce(clar.ctx, fca::Side::Objects);
      CHECK(brute_force_intents(ctx) == brute_force_intents(red.ctx));
    }
  }
  SECTION("attribute reduction preserves the intent count") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const FormalContext ctx = random_context(7, 9, 0.5, rng);
      const auto clar = fca::clarify(ctx, fca::Side::Attributes);
      const auto red = fca::reduce(clar.ctx, fca::Side::Attributes);
      CHECK(brute_force_intents(ctx).size() == brute_force_intents(red.ctx).size());
    }
  }
}

TEST_CASE("next closure enumeration") {
  SECTION("diagonal context has four intents") {
    std::vector<Bitset> intents;
    fca::next_closure_intents(kDiagonal, [&](const Bitset& b) {
      intents.push_back(b);
      return true;
    });
    REQUIRE(intents.size() == 4);
  }
  SECTION("single object with a full row has one intent") {
    const FormalContext ctx = make_context(1, 3, {"XXX"});
    CHECK(fca::count_intents(ctx) == 1);
  }
  SECTION("matches exhaustive closure enumeration on random contexts") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 50; ++trial) {
      const FormalContext ctx =
          random_context(3 + trial % 8, 4 + trial % 9, 0.3 + 0.05 * (trial % 7), rng);
      const auto oracle = brute_force_intents(ctx);
      std::set<std::vector<int>> got;
      std::vector<Bitset> stream;
      fca::next_closure_intents(ctx, [&](const Bitset& b) {
        got.insert(b.bits());
        stream.push_back(b);
        return true;
      });
      REQUIRE(got == oracle);
      REQUIRE(stream.size() == oracle.size());
      for (std::size_t i = 1; i < stream.size(); ++i)
        CHECK(fca::lectic_less(stream[i - 1], stream[i]));
    }
  }
  SECTION("early stop is honoured") {
    int seen = 0;
    const bool completed = fca::next_closure_intents(kDiagonal, [&](const Bitset&) {
      return ++seen < 2;
    });
    CHECK_FALSE(completed);
    CHECK(seen == 2);
  }
}

TEST_CASE("maximal proper intents") {
  SECTION("diagonal yields the two singletons") {
    const auto out = fca::maximal_proper_intents(kDiagonal);
    REQUIRE(out.size() == 2);
    CHECK(out[0].count() == 1);
    CHECK(out[1].count() == 1);
  }
  SECTION("staircase yields exactly one") {
    const FormalContext chain = make_context(3, 3, {"X..", "XX.", "XXX"});
    const auto out = fca::maximal_proper_intents(chain);
    REQUIRE(out.size() == 1);
    CHECK(out[0].count() == 2);
  }
  SECTION("agrees with brute force on random contexts") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
      const FormalContext ctx = random_context(6, 8, 0.5, rng);
      const auto oracle = brute_force_intents(ctx);
      std::set<std::vector<int>> expect;
      for (const auto& intent : oracle) {
        if (static_cast<int>(intent.size()) == ctx.attribute_count()) continue;
        bool maximal = true;
        for (const auto& other : oracle) {
          if (other == intent ||
              static_cast<int>(other.size()) == ctx.attribute_count())
            continue;
          if (std::includes(other.begin(), other.end(), intent.begin(), intent.end()))
            maximal = false;
        }
        if (maximal) expect.insert(intent);
      }
      std::set<std::vector<int>> got;
      for (const auto& b : fca::maximal_proper_intents(ctx)) got.insert(b.bits());
      REQUIRE(got == expect);
    }
  }
}

TEST_CASE("context file round trips") {
  std::mt19937 rng(29);
  SECTION("write then read is the identity") {
    for (int trial = 0; trial < 10; ++trial) {
      const FormalContext ctx = random_context(5, 7, 0.5, rng);
      std::ostringstream out;
      fca::write_cxt(ctx, out);
      std::istringstream in(out.str());
      const FormalContext back = fca::read_cxt(in);
      CHECK(back.objects == ctx.objects);
      CHECK(back.attributes == ctx.attributes);
      CHECK(back.rows == ctx.rows);
    }
  }
  SECTION("expected layout") {
    std::ostringstream out;
    fca::write_cxt(kDiagonal, out);
    CHECK(out.str() == "B\n\n2\n2\n\ng0\ng1\nm0\nm1\nX.\n.X\n");
  }
  SECTION("parse errors carry line numbers") {
    {
      std::istringstream in("A\n\n1\n1\n\ng0\nm0\nX\n");
      CHECK_THROWS_MATCHES(fca::read_cxt(in), parse_error,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("line 1")));
    }
    {
      // Incidence rows may only contain '.' and 'X'.
      std::istringstream in("B\n\n1\n2\n\ng0\nm0\nm1\nXY\n");
      CHECK_THROWS_MATCHES(fca::read_cxt(in), parse_error,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("'Y'")));
    }
    {
      // Object count disagreeing with the number of rows.
      std::istringstream in("B\n\n2\n1\n\ng0\ng1\nm0\nX\n");
      CHECK_THROWS_AS(fca::read_cxt(in), parse_error);
    }
    {
      // Row longer than the attribute count.
      std::istringstream in("B\n\n1\n1\n\ng0\nm0\nXX\n");
      CHECK_THROWS_MATCHES(fca::read_cxt(in), parse_error,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("row length")));
    }
  }
}
