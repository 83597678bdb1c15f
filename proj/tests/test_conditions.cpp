#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "centmon/conditions.hpp"

using namespace centmon;

namespace {

MajorityOp random_majority(std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, 3);
  MajorityOp f;
  f.k = 4;
  for (int i = 0; i < f.sigma_size(); ++i) f.v[i] = static_cast<Element>(d(rng));
  return f;
}

LeftAbsorptiveOp random_left_absorptive(std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, 3);
  LeftAbsorptiveOp g;
  g.k = 4;
  for (int i = 0; i < g.sigma_size(); ++i) g.v[i] = static_cast<Element>(d(rng));
  for (int i = 0; i < g.tail_size(); ++i) g.tail[i] = static_cast<Element>(d(rng));
  return g;
}

}  // namespace

TEST_CASE("classification of unary operations") {
  SECTION("stated examples") {
    CHECK(classify_unary(UnaryOp::from_values(4, {0, 1, 1, 1})).name() == "A1");
    CHECK(classify_unary(UnaryOp::from_values(4, {1, 0, 3, 2})).name() == "D1");
    CHECK(classify_unary(UnaryOp::from_values(4, {3, 0, 0, 1})).name() == "U193");
    CHECK(UnaryOp::from_values(4, {3, 0, 0, 1}).code() == 193u);
    CHECK(classify_unary(UnaryOp::from_values(4, {0, 1, 2, 3})).name() == "TRIVIAL");
    CHECK(classify_unary(UnaryOp::constant(4, 2)).name() == "TRIVIAL");
    CHECK(classify_unary(UnaryOp::from_values(4, {1, 2, 3, 0})).name() == "C1");
    CHECK(classify_unary(UnaryOp::from_values(4, {3, 0, 1, 2})).name() == "C1");
    CHECK(classify_unary(UnaryOp::from_values(4, {1, 2, 0, 3})).name() == "E1");
    CHECK(classify_unary(UnaryOp::from_values(4, {1, 0, 2, 3})).name() == "F1");
    CHECK(classify_unary(UnaryOp::from_values(4, {0, 0, 1, 1})).name() == "A5");
    CHECK(classify_unary(UnaryOp::from_code(4, 26)).name() == "U26");
  }
  SECTION("classification is total and class sizes match") {
    std::map<std::string, int> sizes;
    for (int n = 0; n < 256; ++n)
      ++sizes[classify_unary(UnaryOp::from_code(4, n)).name()];
    CHECK(sizes["TRIVIAL"] == 5);
    for (int i = 1; i <= 7; ++i) CHECK(sizes["A" + std::to_string(i)] == 12);
    for (int i = 1; i <= 3; ++i) CHECK(sizes["C" + std::to_string(i)] == 2);
    for (int i = 1; i <= 3; ++i) CHECK(sizes["D" + std::to_string(i)] == 1);
    for (int i = 1; i <= 4; ++i) CHECK(sizes["E" + std::to_string(i)] == 2);
    for (int i = 1; i <= 6; ++i) CHECK(sizes["F" + std::to_string(i)] == 1);
    int ucount = 0;
    for (const auto& [tag, n] : sizes)
      if (tag[0] == 'U') {
        CHECK(n == 1);
        ++ucount;
      }
    CHECK(ucount == 144);
    CHECK(sizes.size() == 1 + 7 + 3 + 3 + 4 + 6 + 144);
  }
  SECTION("inverse permutations share a class") {
    for (const Permutation& p : all_permutations(4)) {
      if (p.op.is_identity()) continue;
      CHECK(classify_unary(p.op) == classify_unary(p.inverse().op));
    }
  }
}

TEST_CASE("attribute universe") {
  const AttributeUniverse& u = AttributeUniverse::instance();
  SECTION("canonical order and counts") {
    CHECK(u.size() == 167);
    CHECK(u.cls(0).id.name() == "A1");
    CHECK(u.cls(6).id.name() == "A7");
    CHECK(u.cls(7).id.name() == "C1");
    CHECK(u.cls(10).id.name() == "D1");
    CHECK(u.cls(13).id.name() == "E1");
    CHECK(u.cls(17).id.name() == "F1");
    CHECK(u.cls(22).id.name() == "F6");
    CHECK(u.cls(23).id.kind == ConditionId::Kind::U);
    for (int i = 24; i < 167; ++i) CHECK(u.cls(i - 1).id.num < u.cls(i).id.num);
    CHECK(u.trivial_codes().size() == 5);
  }
  SECTION("members partition the non-trivial maps") {
    int total = 0;
    std::set<int> seen;
    for (int i = 0; i < u.size(); ++i) {
      total += static_cast<int>(u.cls(i).members.size());
      seen.insert(u.cls(i).members.begin(), u.cls(i).members.end());
      CHECK(u.cls(i).rep == u.cls(i).members.front());
    }
    CHECK(total == 251);
    CHECK(seen.size() == 251);
    int amembers = 0;
    for (int i = 0; i < 7; ++i) amembers += static_cast<int>(u.cls(i).members.size());
    CHECK(amembers == 84);
  }
  SECTION("tag lookup") {
    CHECK(u.index_of("A1") == 0);
    CHECK(u.index_of("F6") == 22);
    CHECK(u.index_of("U(26)") >= 23);
    CHECK(u.index_of("bogus") == -1);
  }
  SECTION("conjugation acts by permuting attributes") {
    for (const Permutation& p : all_permutations(4)) {
      const auto act = u.attribute_action(p);
      std::set<int> img(act.begin(), act.end());
      CHECK(static_cast<int>(img.size()) == u.size());
    }
  }
}

TEST_CASE("condition predicates") {
  std::mt19937 rng(5);
  SECTION("A1 examples") {
    MajorityOp f;
    f.k = 4;
    for (int i = 0; i < 24; ++i) f.v[i] = static_cast<Element>(1 + (i % 3));
    CHECK(condition_holds(*ConditionId::parse("A1"), f));
    f.v[SigmaIndex::of(4).index(0, 1, 2)] = 0;
    CHECK_FALSE(condition_holds(*ConditionId::parse("A1"), f));
  }
  SECTION("trivial tag is rejected") {
    MajorityOp f;
    f.k = 4;
    CHECK_THROWS_AS(condition_holds(ConditionId::trivial(), f), std::invalid_argument);
  }
  SECTION("D1 couples values across the swap") {
    // Any majority operation commuting with (01)(23) that takes value 2 on
    // (0,1,2) must take value 3 on (1,0,3).
    const SigmaIndex& sig = SigmaIndex::of(4);
    std::mt19937 local(99);
    int found = 0;
    for (int trial = 0; trial < 20000; ++trial) {
      MajorityOp f = random_majority(local);
      // Repair f to satisfy D1 by propagating over the swap.
      const UnaryOp s = UnaryOp::from_values(4, {1, 0, 3, 2});
      for (int i = 0; i < 24; ++i) {
        const Triple& t = sig.triple(i);
        const int j = sig.index(s(t[0]), s(t[1]), s(t[2]));
        if (j > i) f.v[j] = s(f.v[i]);
      }
      REQUIRE(condition_holds(*ConditionId::parse("D1"), f));
      if (f.v[sig.index(0, 1, 2)] == 2) {
        CHECK(f.v[sig.index(1, 0, 3)] == 3);
        ++found;
      }
    }
    CHECK(found > 0);
  }
  SECTION("agreement with member commutation on random operations") {
    const AttributeUniverse& u = AttributeUniverse::instance();
    for (int trial = 0; trial < 300; ++trial) {
      const MajorityOp f = random_majority(rng);
      for (int i = 0; i < u.size(); ++i) {
        bool all = true;
        for (int code : u.cls(i).members)
          if (!commutes_on_sigma(f, UnaryOp::from_code(4, code))) {
            all = false;
            break;
          }
        REQUIRE(u.cls(i).holds(f) == all);
      }
    }
  }
  SECTION("members of one class commute with the same majority operations") {
    const AttributeUniverse& u = AttributeUniverse::instance();
    for (int trial = 0; trial < 200; ++trial) {
      const MajorityOp f = random_majority(rng);
      for (int i = 0; i < u.size(); ++i) {
        const bool first =
            commutes_on_sigma(f, UnaryOp::from_code(4, u.cls(i).members[0]));
        for (std::size_t m = 1; m < u.cls(i).members.size(); ++m)
          REQUIRE(commutes_on_sigma(f, UnaryOp::from_code(4, u.cls(i).members[m])) ==
                  first);
      }
    }
  }
}

TEST_CASE("general left-absorptive conditions") {
  std::mt19937 rng(17);
  SECTION("projection onto the first coordinate commutes with everything") {
    MajorityOp base;
    base.k = 4;
    const SigmaIndex& sig = SigmaIndex::of(4);
    for (int i = 0; i < 24; ++i) base.v[i] = sig.triple(i)[0];
    const LeftAbsorptiveOp proj = LeftAbsorptiveOp::semiprojection_tails(base);
    for (const Permutation& p : all_permutations(4))
      CHECK(general_condition_holds(p, proj));
  }
  SECTION("randomised agreement with the full-table oracle per cycle type") {
    std::map<std::vector<int>, int> per_type;
    const auto perms = all_permutations(4);
    while (true) {
      bool done = true;
      for (const auto& p : perms)
        if (!p.op.is_identity() && per_type[p.cycle_type()] < 2600) done = false;
      if (done) break;
      const LeftAbsorptiveOp g = random_left_absorptive(rng);
      const FinitaryOp full = expand(g);
      for (const Permutation& p : perms) {
        if (p.op.is_identity()) continue;
        REQUIRE(general_condition_holds(p, g) == commutes(full, p.op));
        ++per_type[p.cycle_type()];
      }
    }
  }
  SECTION("majority specialisation matches the named conditions") {
    for (int trial = 0; trial < 500; ++trial) {
      const MajorityOp f = random_majority(rng);
      const LeftAbsorptiveOp g = LeftAbsorptiveOp::majority_tails(f);
      for (const Permutation& p : all_permutations(4)) {
        if (p.op.is_identity()) continue;
        const ConditionId c = classify_unary(p.op);
        REQUIRE(general_condition_holds(p, g) == condition_holds(c, f));
      }
    }
  }
}

TEST_CASE("image-3 analysis") {
  SECTION("worked example for (3,0,0,1)") {
    const UnaryOp s = UnaryOp::from_values(4, {3, 0, 0, 1});
    const ImageThreeAnalysis a = analyze_image3(s);
    CHECK(a.alpha == 0);
    CHECK(a.u == 1);
    CHECK(a.v == 2);
    CHECK(a.x == 0);
    CHECK(a.y == 3);
    CHECK(a.beta == 3);
    CHECK(a.gamma == 1);
    CHECK(a.zeta_is_permutation);
    // Restriction to the image is the cycle 0 -> 3 -> 1 -> 0.
    CHECK(a.zeta[0] == 3);
    CHECK(a.zeta[3] == 1);
    CHECK(a.zeta[1] == 0);
    CHECK(a.zeta[2] == -1);
    // Index permutation is the cycle 0 -> 1 -> 2 -> 0.
    CHECK(a.xi == std::array<std::int8_t, 3>{1, 2, 0});
    REQUIRE(a.orbits.size() == 2);
    CHECK(a.orbits[0].size() == 3);
    CHECK(a.orbits[1].size() == 3);
  }
  SECTION("non-permutation restriction") {
    // (1,0,0,2): double preimage {1,2} of 0; image {0,1,2} contains both.
    const UnaryOp s = UnaryOp::from_values(4, {1, 0, 0, 2});
    const ImageThreeAnalysis a = analyze_image3(s);
    CHECK_FALSE(a.zeta_is_permutation);
    CHECK(a.alpha == 0);
    CHECK(a.u == 1);
    CHECK(a.v == 2);
    CHECK(a.x == 0);  // image member among the singleton preimages
    CHECK(a.y == 3);  // outside the image
    CHECK(a.t == 3);
    CHECK(a.orbits.empty());
  }
  SECTION("orbit counts multiply out over all image-3 maps") {
    int analysed = 0;
    for (int n = 0; n < 256; ++n) {
      const UnaryOp s = UnaryOp::from_code(4, n);
      if (s.image_size() != 3) continue;
      const ImageThreeAnalysis a = analyze_image3(s);
      ++analysed;
      CHECK((a.s.preimage_mask(a.alpha) ==
             ((1u << a.u) | (1u << a.v))));
      CHECK(a.s(a.x) == a.beta);
      CHECK(a.s(a.y) == a.gamma);
      if (!a.zeta_is_permutation) continue;
      // 6/n orbits of size n, n the order of the restriction.
      int ord = 1;
      {
        std::array<std::int8_t, 4> z = a.zeta;
        auto is_id = [&] {
          for (int w = 0; w < 4; ++w)
            if (z[w] >= 0 && z[w] != w) return false;
          return true;
        };
        while (!is_id()) {
          std::array<std::int8_t, 4> nz = z;
          for (int w = 0; w < 4; ++w)
            if (z[w] >= 0) nz[w] = a.zeta[z[w]];
          z = nz;
          ++ord;
        }
      }
      CHECK(static_cast<int>(a.orbits.size()) == 6 / ord);
      for (const auto& orb : a.orbits) {
        CHECK(static_cast<int>(orb.size()) == ord);
        for (std::size_t i = 1; i < orb.size(); ++i) CHECK(orb[0] < orb[i]);
      }
    }
    CHECK(analysed == 144);
  }
  SECTION("wrong image size rejected") {
    CHECK_THROWS_AS(analyze_image3(UnaryOp::identity(4)), std::invalid_argument);
    CHECK_THROWS_AS(analyze_image3(UnaryOp::constant(4, 1)), std::invalid_argument);
  }
}
