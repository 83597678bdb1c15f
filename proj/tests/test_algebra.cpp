#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "centmon/commutation.hpp"
#include "centmon/monoid.hpp"
#include "centmon/sigma.hpp"
#include "centmon/ternary.hpp"
#include "centmon/unary.hpp"

using namespace centmon;

namespace {

MajorityOp random_majority(int k, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, k - 1);
  MajorityOp f;
  f.k = static_cast<std::uint8_t>(k);
  for (int i = 0; i < f.sigma_size(); ++i) f.v[i] = static_cast<Element>(d(rng));
  return f;
}

UnaryOp random_unary(int k, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, num_unary(k) - 1);
  return UnaryOp::from_code(k, d(rng));
}

}  // namespace

TEST_CASE("unary code round trip") {
  SECTION("stated examples") {
    CHECK(UnaryOp::from_code(4, 26).values_string() == "(0,1,2,2)");
    CHECK(UnaryOp::from_code(4, 0).values_string() == "(0,0,0,0)");
    CHECK(UnaryOp::from_values(4, {0, 1, 2, 3}).code() == 27u);
  }
  SECTION("bijection over the whole range") {
    for (int k : {3, 4}) {
      std::set<unsigned> seen;
      for (int n = 0; n < num_unary(k); ++n) {
        const UnaryOp s = UnaryOp::from_code(k, n);
        CHECK(s.code() == static_cast<unsigned>(n));
        seen.insert(s.code());
      }
      CHECK(static_cast<int>(seen.size()) == num_unary(k));
    }
  }
  SECTION("digit formula") {
    const UnaryOp s = UnaryOp::from_code(4, 147);
    for (int j = 0; j < 4; ++j)
      CHECK(s.tab[j] == (147 / static_cast<int>(ipow(4, 3 - j))) % 4);
  }
  SECTION("out of range code") {
    CHECK_THROWS_AS(UnaryOp::from_code(4, 256), std::out_of_range);
    CHECK_THROWS_AS(UnaryOp::from_code(3, 27), std::out_of_range);
  }
}

TEST_CASE("unary composition") {
  const UnaryOp s = UnaryOp::from_code(4, 26);
  CHECK(compose(UnaryOp::identity(4), s) == s);
  CHECK(compose(s, UnaryOp::identity(4)) == s);
  CHECK(compose(UnaryOp::constant(4, 2), s) == UnaryOp::constant(4, 2));
  const UnaryOp invol = UnaryOp::from_values(4, {1, 0, 3, 2});
  CHECK(compose(invol, invol) == UnaryOp::identity(4));
  CHECK_THROWS_AS(compose(UnaryOp::identity(3), s), config_error);
  // Left composition: (s . t)(x) = s(t(x)).
  const UnaryOp t = UnaryOp::from_values(4, {3, 3, 0, 1});
  CHECK(compose(s, t).tab[0] == s(t(0)));
}

TEST_CASE("sigma index") {
  for (int k : {3, 4}) {
    const SigmaIndex& sig = SigmaIndex::of(k);
    CHECK(sig.size() == k * (k - 1) * (k - 2));
    for (int i = 0; i < sig.size(); ++i) {
      const Triple& t = sig.triple(i);
      CHECK(t[0] != t[1]);
      CHECK(t[1] != t[2]);
      CHECK(t[0] != t[2]);
      CHECK(sig.index(t) == i);
      if (i > 0) CHECK(sig.triple(i - 1) < t);
    }
    CHECK(sig.index(0, 0, 1) == -1);
  }
}

TEST_CASE("majority expansion and restriction") {
  std::mt19937 rng(7);
  const MajorityOp m = random_majority(4, rng);
  SECTION("majority law on repeated entries") {
    CHECK(m.value(1, 2, 2) == 2);
    for (int x = 0; x < 4; ++x) CHECK(m.value(x, x, x) == x);
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y) {
        CHECK(m.value(x, x, y) == x);
        CHECK(m.value(x, y, x) == x);
        CHECK(m.value(y, x, x) == x);
      }
  }
  SECTION("expand/restrict round trip") {
    const FinitaryOp full = expand(m);
    CHECK(restrict_to_majority(full) == m);
    const LeftAbsorptiveOp g = LeftAbsorptiveOp::semiprojection_tails(m);
    CHECK(g.value(1, 2, 2) == 1);
    const FinitaryOp gf = expand(g);
    CHECK(restrict_to_left_absorptive(gf) == g);
    CHECK(restrict_to_left_absorptive(expand(LeftAbsorptiveOp::majority_tails(m)))
              .is_majority());
  }
  SECTION("restriction rejects violating tables") {
    FinitaryOp full = expand(m);
    full.at(2, 2, 2) = 3;
    CHECK_THROWS_WITH(restrict_to_majority(full),
                      Catch::Matchers::ContainsSubstring("(2,2,2)"));
    FinitaryOp g = expand(LeftAbsorptiveOp::semiprojection_tails(m));
    g.at(1, 3, 1) = 0;
    CHECK_THROWS_WITH(restrict_to_left_absorptive(g),
                      Catch::Matchers::ContainsSubstring("(1,3,1)"));
  }
  SECTION("string round trip") {
    CHECK(MajorityOp::parse(4, m.str()) == m);
    CHECK(m.str().size() == 24);
    CHECK_THROWS_AS(MajorityOp::parse(4, "123"), std::invalid_argument);
    CHECK_THROWS_AS(MajorityOp::parse(4, std::string(24, '7')), std::invalid_argument);
  }
}

TEST_CASE("commutation basics") {
  std::mt19937 rng(11);
  const MajorityOp m = random_majority(4, rng);
  const FinitaryOp full = expand(m);
  SECTION("identity and constants always commute") {
    CHECK(commutes(full, UnaryOp::identity(4)));
    for (int a = 0; a < 4; ++a) CHECK(commutes(full, UnaryOp::constant(4, a)));
  }
  SECTION("semiprojection versus u_26") {
    // The left semiprojection sharing free values with a majority operation
    // commuting with u_26 never commutes with u_26 itself.
    const UnaryOp s = UnaryOp::from_code(4, 26);
    const SigmaIndex& sig = SigmaIndex::of(4);
    MajorityOp f;
    f.k = 4;
    for (int i = 0; i < sig.size(); ++i) {
      const Triple& t = sig.triple(i);
      const bool has23 = (t[0] == 2 || t[1] == 2 || t[2] == 2) &&
                         (t[0] == 3 || t[1] == 3 || t[2] == 3);
      f.v[i] = has23 ? 2 : 0;
    }
    REQUIRE(commutes_on_sigma(f, s));
    const LeftAbsorptiveOp g = LeftAbsorptiveOp::semiprojection_tails(f);
    CHECK_FALSE(commutes(expand(g), s));
    // The violation sits at (1,2,3): s(g(1,2,3)) = 2 but g(s.(1,2,3)) = 1.
    CHECK(s(g.value(1, 2, 3)) == 2);
    CHECK(g.value(1, 2, 2) == 1);
  }
}

TEST_CASE("sigma-restricted commutation equals the full-table oracle") {
  SECTION("exhaustively at carrier size 3") {
    int checked = 0;
    for (unsigned fc = 0; fc < ipow(3, 6); ++fc) {
      MajorityOp f;
      f.k = 3;
      unsigned rest = fc;
      for (int i = 0; i < 6; ++i) {
        f.v[i] = static_cast<Element>(rest % 3);
        rest /= 3;
      }
      const FinitaryOp full = expand(f);
      for (int n = 0; n < num_unary(3); ++n) {
        const UnaryOp s = UnaryOp::from_code(3, n);
        REQUIRE(commutes_on_sigma(f, s) == commutes(full, s));
        ++checked;
      }
    }
    CHECK(checked == 729 * 27);
  }
  SECTION("randomised at carrier size 4") {
    std::mt19937 rng(20240801);
    for (int trial = 0; trial < 10000; ++trial) {
      const MajorityOp f = random_majority(4, rng);
      const UnaryOp s = random_unary(4, rng);
      REQUIRE(commutes_on_sigma(f, s) == commutes(expand(f), s));
    }
  }
}

TEST_CASE("unary centraliser structure") {
  std::mt19937 rng(23);
  SECTION("always contains the trivial maps and is composition-closed") {
    for (int trial = 0; trial < 50; ++trial) {
      const MajorityOp f = random_majority(4, rng);
      const Monoid m = unary_centraliser(f);
      CHECK(m.contains_identity());
      CHECK(m.contains_all_constants());
      CHECK(m.is_composition_closed());
    }
  }
  SECTION("permutation members come in inverse pairs") {
    for (int trial = 0; trial < 50; ++trial) {
      const MajorityOp f = random_majority(4, rng);
      const Monoid m = unary_centraliser(f);
      for (const Permutation& p : all_permutations(4))
        CHECK(m.test(p.op.code()) == m.test(p.inverse().op.code()));
    }
  }
  SECTION("carrier size 3 centralisers match the full-table oracle") {
    for (unsigned fc = 0; fc < ipow(3, 6); ++fc) {
      MajorityOp f;
      f.k = 3;
      unsigned rest = fc;
      for (int i = 0; i < 6; ++i) {
        f.v[i] = static_cast<Element>(rest % 3);
        rest /= 3;
      }
      const FinitaryOp full = expand(f);
      const Monoid fast = unary_centraliser(f);
      Monoid slow = Monoid::empty(3);
      for (int n = 0; n < num_unary(3); ++n)
        if (commutes(full, UnaryOp::from_code(3, n))) slow.add(n);
      REQUIRE(fast == slow);
    }
  }
}

TEST_CASE("conjugation") {
  std::mt19937 rng(31);
  const auto perms = all_permutations(4);
  SECTION("action laws") {
    const MajorityOp f = random_majority(4, rng);
    const Permutation id{UnaryOp::identity(4)};
    CHECK(conjugate(f, id) == f);
    for (const Permutation& p : perms) {
      CHECK(conjugate(conjugate(f, p), p.inverse()) == f);
      for (const Permutation& q : perms) {
        const Permutation qp{compose(q.op, p.op)};
        CHECK(conjugate(conjugate(f, p), q) == conjugate(f, qp));
      }
    }
  }
  SECTION("centraliser of a conjugate is the conjugated centraliser") {
    for (int trial = 0; trial < 20; ++trial) {
      const MajorityOp f = random_majority(4, rng);
      const Monoid cf = unary_centraliser(f);
      for (const Permutation& p : perms) {
        CHECK(unary_centraliser(conjugate(f, p)) == conjugate(cf, p));
      }
    }
  }
  SECTION("non-permutation rejected") {
    CHECK_THROWS_AS(Permutation{UnaryOp::from_code(4, 26)}, std::invalid_argument);
  }
}

TEST_CASE("monoid bit vector") {
  Monoid m = Monoid::empty(4);
  m.add(27);
  m.add(0);
  CHECK(m.count() == 2);
  CHECK(m.test(27));
  CHECK_FALSE(m.test(26));
  CHECK_THROWS_AS(m.add(256), std::out_of_range);
  CHECK(m.codes() == std::vector<int>{0, 27});
  const Monoid trivial = Monoid::from_codes(4, {27, 0, 85, 170, 255});
  CHECK(trivial.contains_identity());
  CHECK(trivial.contains_all_constants());
  CHECK(trivial.is_composition_closed());
}
