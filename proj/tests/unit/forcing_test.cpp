#include <doctest.h>

#include <set>

#include "../support/naive_forcing.hpp"
#include "../support/oracles.hpp"
#include "idcalc/errors.hpp"
#include "idcalc/forcing.hpp"

using namespace idcalc;

namespace {

Identity triangle() { return Identity::from_blocks(make_domain(0, 3), {{LeafPair(0, 1), LeafPair(0, 2), LeafPair(1, 2)}}); }
Identity cross_pair() { return Identity::from_blocks(make_domain(1, 2), {{LeafPair(0, 2), LeafPair(1, 3)}}); }

Condition mono_triangle() { return Condition({0, 1, 2}, {0, 0, 0}); }

Condition random_condition(oracle::Gen& gen, const std::vector<int>& pts, int colors) {
  return Condition::from_function(pts, [&](int, int) { return gen.below(colors); });
}

std::vector<int> random_points(oracle::Gen& gen, int range, int k) { return gen.subset(range, k); }

Derivation leaf_derivation(const Condition& p) {
  // Case 1 chain from the empty condition: stage 1, 5, 9, ...
  Derivation d{0, Case0Witness{std::nullopt}, {}};
  Condition cur = empty_condition();
  int stage = 1;
  for (int x : p.universe()) {
    std::vector<int> u = cur.universe();
    u.push_back(x);
    Condition next = restrict(p, u);
    d = Derivation{stage, Case1Witness{cur, x}, {d}};
    cur = next;
    stage += 4;
  }
  return d;
}

struct TriangleWitness {
  std::vector<Condition> family;
  Sides sides;
};

TriangleWitness triangle_witness() {
  TriangleWitness w;
  w.family = {Condition({0, 1}, {0}), Condition({0, 2}, {0}), Condition({1, 2}, {0})};
  w.sides = {{{}, {}}, {{0}, {0}}, {{1}, {1}}, {{2}, {2}}, {{0, 1}, {0, 1}}, {{0, 2}, {0, 2}}, {{1, 2}, {1, 2}}};
  return w;
}

const GenerationBounds kSmall{{0, 1, 2}, 2, 2, 4};

}  // namespace

TEST_CASE("restrict and leq") {
  const Condition p({1, 4, 6}, {3, 5, 7});
  CHECK(restrict(p, p.universe()) == p);
  CHECK(restrict(p, {}) == empty_condition());
  CHECK(restrict(p, {4, 6}) == Condition({4, 6}, {7}));
  CHECK_THROWS_AS(restrict(p, {2}), InputError);
  CHECK(leq(p, p));
  CHECK(leq(empty_condition(), p));
  CHECK(leq(Condition({1, 6}, {5}), p));
  CHECK_FALSE(leq(Condition({1, 4, 6}, {3, 5, 8}), p));
  CHECK_FALSE(leq(p, Condition({1, 6}, {5})));
  CHECK(n_of(empty_condition()) == 0);
  CHECK(n_of(p) == 8);
}

TEST_CASE("extend_point color formula") {
  const Condition q = extend_point(Condition({0, 1}, {0}), 2);
  CHECK(q.color(0, 1) == 0);
  CHECK(q.color(0, 2) == 5);
  CHECK(q.color(1, 2) == 11);
  CHECK(extend_point(empty_condition(), 7) == Condition({7}, {}));
  CHECK_THROWS_AS(extend_point(q, 1), InputError);
}

TEST_CASE("extend_point adds only fresh distinct colors") {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pts = random_points(gen, 12, gen.between(0, 6));
    const Condition p = random_condition(gen, pts, 4);
    int alpha = gen.below(12);
    while (p.contains(alpha)) alpha = gen.below(12);
    const Condition q = extend_point(p, alpha);
    CHECK(leq(p, q));
    std::set<Color> seen;
    for (int x : p.universe()) {
      const Color c = q.color(std::min(x, alpha), std::max(x, alpha));
      CHECK(c >= n_of(p));
      CHECK(seen.insert(c).second);
    }
  }
}

TEST_CASE("free_amalgamate") {
  const TrivialGround g(10);
  const Condition p({0, 1, 2}, {1, 2, 1});
  CHECK(free_amalgamate(p, p, g) == p);

  const Condition a({0, 1}, {3}), b({2, 3}, {1});
  const Condition q = free_amalgamate(a, b, g);
  std::set<Color> cross;
  for (int x : {0, 1})
    for (int y : {2, 3}) {
      const Color c = q.color(x, y);
      CHECK(c >= std::max(n_of(a), n_of(b)));
      cross.insert(c);
    }
  CHECK(cross.size() == 4);
  CHECK(leq(a, q));
  CHECK(leq(b, q));

  CHECK_THROWS_AS(free_amalgamate(Condition({0, 1}, {0}), Condition({0, 1, 2}, {1, 0, 0}), g), IncompatibleError);
}

namespace {

// A small set whose level-0 closure adds a point, with that point.
std::optional<std::pair<PointSet, int>> leaking_set(const GroundModel& g) {
  for (unsigned mask = 1; mask < (1u << g.size()); ++mask) {
    if (__builtin_popcount(mask) > 3) continue;
    const auto a = oracle::points_of(mask, [&] {
      std::vector<int> all(static_cast<std::size_t>(g.size()));
      for (int i = 0; i < g.size(); ++i) all[static_cast<std::size_t>(i)] = i;
      return all;
    }());
    for (int z : g.closure(0, a))
      if (!std::binary_search(a.begin(), a.end(), z)) return std::make_pair(a, z);
  }
  return std::nullopt;
}

PointSet with(PointSet a, int x) {
  a.push_back(x);
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

TEST_CASE("free_amalgamate closure clause") {
  const auto g = GradedGround::build(10, {2, 5, 9}, 4);
  const auto leak = leaking_set(g);
  REQUIRE(leak.has_value());
  const auto& [a, z] = *leak;
  int y = 0;
  while (std::binary_search(a.begin(), a.end(), y) || y == z) ++y;
  auto uniform = [](const PointSet& u) { return Condition::from_function(u, [](int, int) { return 0; }); };

  // The leak lands in u2 only: (d) fails.
  try {
    free_amalgamate(uniform(with(a, y)), uniform(with(a, z)), g);
    FAIL("expected a closure violation");
  } catch (const ClauseViolation& e) {
    CHECK(e.clause() == "d");
  }
  // The leak lands in u1: allowed, except in strict mode.
  CHECK_NOTHROW(free_amalgamate(uniform(with(a, z)), uniform(a), g));
  CHECK_THROWS_AS(free_amalgamate(uniform(with(a, z)), uniform(a), g, true), ClauseViolation);
}

TEST_CASE("identity_amalgamate builds the monochromatic triangle") {
  const TrivialGround g(5);
  const Gamma gamma{triangle()};
  const auto w = triangle_witness();
  const Condition q = identity_amalgamate(triangle(), w.family, w.sides, gamma, g);
  CHECK(q == mono_triangle());
  const auto report = verify_case(q, Case3Witness{triangle(), w.family, w.sides}, gamma, g);
  CHECK(report.passed());
  CHECK(report.case_index == 3);
  for (const auto& c : report.clauses) CHECK_MESSAGE(c.ok, c.clause);

  CHECK_THROWS_AS(identity_amalgamate(triangle(), w.family, w.sides, Gamma{}, g), InputError);
  auto short_family = w.family;
  short_family.pop_back();
  CHECK_THROWS_AS(identity_amalgamate(triangle(), short_family, w.sides, gamma, g), InputError);
}

TEST_CASE("identity_amalgamate with a constant family returns it") {
  const TrivialGround g(5);
  const Condition p({0, 1}, {3});
  Sides sides;
  for (const auto& k : side_keys(triangle())) sides[k] = {0, 1};
  CHECK(identity_amalgamate(triangle(), {p, p, p}, sides, {triangle()}, g) == p);
}

TEST_CASE("identity_amalgamate reports the failing clause") {
  const TrivialGround g(5);
  const Gamma gamma{triangle()};
  auto w = triangle_witness();
  auto clause_of = [&](const std::vector<Condition>& fam, const Sides& sides) -> std::string {
    try {
      identity_amalgamate(triangle(), fam, sides, gamma, g);
    } catch (const ClauseViolation& e) {
      return e.clause();
    } catch (const IncompatibleError&) {
      return "compatible";
    }
    return "";
  };
  auto broken_g = w.sides;
  broken_g[{}] = {1};
  broken_g[{0}] = {0, 1};
  CHECK(clause_of(w.family, broken_g) == "g");

  auto broken_f = w.sides;
  broken_f[{0, 1}] = {0};
  CHECK(clause_of(w.family, broken_f) == "f");

  auto broken_d = w.sides;
  broken_d[{0}] = {0, 1};
  CHECK(clause_of(w.family, broken_d) == "d");
}

TEST_CASE("verify_case flags uncovered equalities in Case 2") {
  const TrivialGround g(5);
  const auto r = verify_case(mono_triangle(), Case2Witness{Condition({0, 1}, {0}), Condition({1, 2}, {0})}, {}, g);
  CHECK_FALSE(r.passed());
  bool c_failed = false;
  for (const auto& c : r.clauses) c_failed = c_failed || (c.clause == "c" && !c.ok);
  CHECK(c_failed);
}

TEST_CASE("verify_case consults the membership oracle") {
  const TrivialGround g(5);
  const Condition p({0, 1}, {0});
  const Case1Witness w{Condition({0}, {}), 1};
  CHECK(verify_case(p, w, {}, g).passed());
  CHECK_FALSE(verify_case(p, w, {}, g, [](const Condition&) { return false; }).passed());
}

TEST_CASE("verify_derivation") {
  const TrivialGround g(5);
  const Condition p({0, 1}, {0});
  const Derivation dp = leaf_derivation(p);
  CHECK(verify_derivation(p, dp, {}, g));

  Derivation bad = dp;
  bad.children[0].stage = bad.stage;
  CHECK_FALSE(verify_derivation(p, bad, {}, g));

  Derivation wrong_case = dp;
  wrong_case.stage = 6;
  CHECK_FALSE(verify_derivation(p, wrong_case, {}, g));

  const auto w = triangle_witness();
  std::vector<Derivation> kids;
  for (const auto& c : w.family) kids.push_back(leaf_derivation(c));
  const Derivation tri{11, Case3Witness{triangle(), w.family, w.sides}, kids};
  CHECK(verify_derivation(mono_triangle(), tri, {triangle()}, g));
  CHECK_FALSE(verify_derivation(mono_triangle(), tri, {}, g));
}

TEST_CASE("generate: depth 0 and the small census") {
  const TrivialGround g(3);
  const auto u0 = generate({}, g, {{0, 1, 2}, 2, 2, 0});
  CHECK(u0.size() == 1);
  CHECK(u0.contains(empty_condition()));

  const auto u = generate({}, g, kSmall);
  std::vector<std::size_t> per_stage;
  for (const auto& s : u.by_stage()) per_stage.push_back(s.size());
  while (per_stage.size() < 5) per_stage.push_back(0);
  CHECK(per_stage == std::vector<std::size_t>{1, 3, 6, 0, 0});
  CHECK(u.contains(Condition({0, 2}, {1})));
  for (const auto& p : u.conditions()) {
    const auto d = u.derivation(p);
    REQUIRE(d.has_value());
    CHECK(verify_derivation(p, *d, {}, g));
  }
}

TEST_CASE("generate agrees with a direct application of the rules") {
  const auto graded = GradedGround::build(4, {1, 2, 3}, 9);
  const TrivialGround trivial(4);
  struct Setup {
    Gamma gamma;
    const GroundModel* g;
    std::vector<int> pts;
    int colors, size, depth;
  };
  const std::vector<Setup> setups{
      {{}, &trivial, {0, 1, 2}, 2, 2, 4},
      {{}, &trivial, {0, 1, 2}, 2, 3, 8},
      {{triangle()}, &trivial, {0, 1, 2}, 2, 3, 8},
      {{cross_pair()}, &trivial, {0, 1, 2}, 2, 3, 8},
      {{triangle()}, &graded, {0, 1, 2, 3}, 2, 3, 8},
      {{triangle(), cross_pair()}, &graded, {0, 1, 2, 3}, 2, 3, 8},
      {{}, &trivial, {0, 1, 2, 3}, 2, 4, 8},
      {{}, &graded, {0, 1, 2, 3}, 2, 4, 8},
      {{triangle()}, &graded, {0, 1, 2, 3}, 2, 4, 8},
  };
  for (const auto& s : setups) {
    const auto lib = generate(s.gamma, *s.g, {s.pts, s.colors, s.size, s.depth});
    oracle::NaiveGeneration naive(s.gamma, *s.g, s.pts, s.colors, s.size);
    const auto expect = naive.run(s.depth);
    CHECK(lib.size() == expect.size());
    for (const auto& [p, stage] : expect) {
      const auto got = lib.stage_of(p);
      REQUIRE(got.has_value());
      CHECK(*got == stage);
    }
  }
}

TEST_CASE("generate: monochromatic triangle needs the triangle identity") {
  const TrivialGround g(3);
  const GenerationBounds b{{0, 1, 2}, 2, 3, 8};
  CHECK_FALSE(generate({}, g, b).contains(mono_triangle()));
  const auto with = generate({triangle()}, g, b);
  REQUIRE(with.contains(mono_triangle()));
  CHECK(*with.stage_of(mono_triangle()) % 4 == 3);
  CHECK(verify_derivation(mono_triangle(), *with.derivation(mono_triangle()), {triangle()}, g));

  CHECK_FALSE(member_bounded(mono_triangle(), {}, g, b).has_value());
  const auto d = member_bounded(mono_triangle(), {triangle()}, g, b);
  REQUIRE(d.has_value());
  CHECK(verify_derivation(mono_triangle(), *d, {triangle()}, g));
}

TEST_CASE("member_bounded finds injective conditions without gamma") {
  const TrivialGround g(4);
  const GenerationBounds b{{0, 1, 2, 3}, 6, 3, 12};
  const auto u = generate({}, g, b);
  oracle::Gen gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = gen.subset(4, gen.between(0, 3));
    std::vector<Color> colors;
    for (int c : gen.subset(6, static_cast<int>(pts.size() * (pts.size() - 1) / 2))) colors.push_back(c);
    gen.shuffle(colors);
    const Condition p(pts, colors);
    CHECK(u.contains(p));
    if (trial >= 3) continue;
    const auto d = member_bounded(p, {}, g, b);
    REQUIRE(d.has_value());
    CHECK(verify_derivation(p, *d, {}, g));
  }
  CHECK_FALSE(member_bounded(Condition({0, 9}, {0}), {}, g, b).has_value());
}

TEST_CASE("generate is monotone in the bounds") {
  const TrivialGround g(4);
  const Gamma gamma{triangle()};
  const GenerationBounds base{{0, 1, 2}, 2, 2, 4};
  const auto small = generate(gamma, g, base);
  for (const GenerationBounds& bigger : {GenerationBounds{{0, 1, 2, 3}, 2, 2, 4}, GenerationBounds{{0, 1, 2}, 3, 2, 4},
                                         GenerationBounds{{0, 1, 2}, 2, 3, 4}, GenerationBounds{{0, 1, 2}, 2, 2, 9}}) {
    const auto big = generate(gamma, g, bigger);
    for (const auto& p : small.conditions()) CHECK(big.contains(p));
  }
}

TEST_CASE("restrictions appear within four more stages") {
  const auto g = GradedGround::build(4, {1, 2, 3}, 2);
  const Gamma gamma{triangle()};
  const GenerationBounds b{{0, 1, 2, 3}, 2, 3, 8};
  GenerationBounds more = b;
  more.depth_cap += 4;
  const auto u = generate(gamma, g, b);
  const auto v = generate(gamma, g, more);
  for (const auto& p : u.conditions())
    for (unsigned mask = 0; mask < (1u << p.size()); ++mask) CHECK(v.contains(restrict(p, oracle::points_of(mask, p.universe()))));
}

TEST_CASE("generate is monotone in gamma") {
  const TrivialGround g(3);
  const GenerationBounds b{{0, 1, 2}, 2, 3, 8};
  const std::vector<Identity> pool{triangle(), cross_pair(), star_identity(2)};
  oracle::Gen gen(3);
  for (int trial = 0; trial < 6; ++trial) {
    Gamma g1, g2;
    for (const auto& s : pool) {
      const int r = gen.below(3);
      if (r >= 1) g2.push_back(s);
      if (r == 2) g1.push_back(s);
    }
    const auto a = generate(g1, g, b);
    const auto c = generate(g2, g, b);
    for (const auto& p : a.conditions()) CHECK(c.contains(p));
  }
}

TEST_CASE("generation guards") {
  const TrivialGround g(40);
  std::vector<int> many(17);
  for (int i = 0; i < 17; ++i) many[static_cast<std::size_t>(i)] = i;
  CHECK_THROWS_AS(generate({}, g, {many, 2, 2, 4}), ResourceError);
  CHECK_THROWS_AS(generate({}, g, {{0, 1}, 300, 2, 4}), ResourceError);
  CHECK_THROWS_AS(generate({}, g, {{0, 41}, 2, 2, 4}), InputError);
  GenerationOptions tight;
  tight.candidate_cap = 10;
  CHECK_THROWS_AS(generate({}, g, {{0, 1, 2, 3}, 4, 4, 4}, tight), ResourceError);
}

TEST_CASE("constructors round trip through verify_case") {
  const TrivialGround trivial(12);
  const auto graded = GradedGround::build(12, {2, 5, 9}, 17);
  const std::vector<Identity> pool{triangle(), cross_pair(), star_identity(2)};
  const Gamma gamma = pool;
  oracle::Gen gen(2024);
  int applied = 0;
  for (int trial = 0; applied < 1000 && trial < 4000; ++trial) {
    const GroundModel& g = gen.coin() ? static_cast<const GroundModel&>(trivial) : graded;
    switch (trial % 4) {
      case 0: {
        const Condition p = random_condition(gen, random_points(gen, 12, gen.between(0, 6)), 5);
        const auto u = oracle::points_of(static_cast<unsigned>(gen.below(1 << p.size())), p.universe());
        const Condition q = restrict(p, u);
        CHECK(leq(q, p));
        CHECK(verify_case(q, Case0Witness{p}, gamma, g).passed());
        ++applied;
        break;
      }
      case 1: {
        const Condition p = random_condition(gen, random_points(gen, 12, gen.between(0, 6)), 5);
        int alpha = gen.below(12);
        while (p.contains(alpha)) alpha = gen.below(12);
        const Condition q = extend_point(p, alpha);
        CHECK(leq(p, q));
        CHECK(verify_case(q, Case1Witness{p, alpha}, gamma, g).passed());
        ++applied;
        break;
      }
      case 2: {
        const Condition base = random_condition(gen, random_points(gen, 12, gen.between(0, 7)), 4);
        const auto& u = base.universe();
        const auto u1 = oracle::points_of(static_cast<unsigned>(gen.below(1 << u.size())), u);
        const auto u2 = oracle::points_of(static_cast<unsigned>(gen.below(1 << u.size())), u);
        const Condition p1 = restrict(base, u1), p2 = restrict(base, u2);
        try {
          const Condition q = free_amalgamate(p1, p2, g, gen.coin());
          CHECK(leq(p1, q));
          CHECK(leq(p2, q));
          CHECK(verify_case(q, Case2Witness{p1, p2}, gamma, g).passed());
          ++applied;
        } catch (const ClauseViolation& e) {
          CHECK(e.clause() == "d");
        }
        break;
      }
      default: {
        // Leaves go to distinct points; each p_y adds a few private points.
        const Identity& s = pool[static_cast<std::size_t>(gen.below(static_cast<int>(pool.size())))];
        const int leaves = s.domain().size();
        const auto h = gen.subset(12, leaves);
        std::vector<int> spare;
        for (int x = 0; x < 12; ++x)
          if (std::find(h.begin(), h.end(), x) == h.end()) spare.push_back(x);
        gen.shuffle(spare);
        std::vector<int> all(12);
        for (int x = 0; x < 12; ++x) all[static_cast<std::size_t>(x)] = x;
        const Condition big = random_condition(gen, all, 3);
        std::vector<Condition> family;
        Sides sides;
        sides[{}] = {};
        for (int l = 0; l < leaves; ++l) sides[{l}] = {h[static_cast<std::size_t>(l)]};
        for (const auto& y : s.nontrivial_pairs()) {
          std::vector<int> u{h[static_cast<std::size_t>(y.a)], h[static_cast<std::size_t>(y.b)]};
          const int extra = spare.empty() ? 0 : gen.below(2);
          for (int i = 0; i < extra; ++i) {
            u.push_back(spare.back());
            spare.pop_back();
          }
          std::sort(u.begin(), u.end());
          family.push_back(restrict(big, u));
          sides[{y.a, y.b}] = u;
        }
        try {
          const Condition q = identity_amalgamate(s, family, sides, gamma, trivial);
          for (const auto& p : family) CHECK(leq(p, q));
          CHECK(verify_case(q, Case3Witness{s, family, sides}, gamma, trivial).passed());
          ++applied;
        } catch (const std::exception& e) {
          FAIL(e.what());
        }
      }
    }
  }
  CHECK(applied >= 1000);
}
