#include <doctest.h>

#include "../support/oracles.hpp"
#include "idcalc/errors.hpp"
#include "idcalc/json_io.hpp"

using namespace idcalc;
using io::json;

namespace {

template <class T>
json through_text(const T& x) {
  return io::parse(io::dump(io::to_json(x)));
}

bool same_derivation(const Derivation& a, const Derivation& b) {
  if (a.stage != b.stage || !(a.witness == b.witness) || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_derivation(a.children[i], b.children[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("identities round trip") {
  for (int ell = 0; ell <= 1; ++ell)
    for (int m = 1; m <= 3 - ell; ++m) {
      EnumerationFilter f;
      f.kind = IdentityFilter::ID1;
      for (const auto& s : enumerate_identities(ell, m, f)) CHECK(io::identity_from_json(through_text(s)) == s);
    }
  for (int n = 1; n <= 4; ++n) CHECK(io::identity_from_json(through_text(star_identity(n))) == star_identity(n));
  const json tri = io::to_json(Identity::from_blocks(make_domain(0, 3), {{LeafPair(0, 1), LeafPair(0, 2), LeafPair(1, 2)}}));
  CHECK(tri["ell"] == 0);
  CHECK(tri["m"] == 3);
  CHECK(tri["classes"].size() == 1);
}

TEST_CASE("colorings, gamma and bounds round trip") {
  oracle::Gen gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = gen.subset(20, gen.between(0, 7));
    const auto p = PairColoring::from_function(u, [&](int, int) { return gen.below(9); });
    CHECK(io::coloring_from_json(through_text(p)) == p);
  }
  const Gamma gamma{star_identity(2), Identity::discrete(make_domain(1, 1))};
  CHECK(io::gamma_from_json(through_text(gamma)) == gamma);
  const GenerationBounds b{{0, 2, 5}, 4, 3, 9};
  const auto back = io::bounds_from_json(through_text(b));
  CHECK(back.universe == b.universe);
  CHECK(back.color_cap == 4);
  CHECK(back.size_cap == 3);
  CHECK(back.depth_cap == 9);
}

TEST_CASE("derivations round trip") {
  const Identity tri = Identity::from_blocks(make_domain(0, 3), {{LeafPair(0, 1), LeafPair(0, 2), LeafPair(1, 2)}});
  const auto g = GradedGround::build(4, {1, 2, 3}, 3);
  const auto u = generate({tri}, g, {{0, 1, 2, 3}, 2, 3, 8});
  int seen[4] = {0, 0, 0, 0};
  for (const auto& p : u.conditions()) {
    const auto d = *u.derivation(p);
    const auto back = io::derivation_from_json(through_text(d));
    CHECK(same_derivation(d, back));
    CHECK(verify_derivation(p, back, {tri}, g));
    ++seen[case_of(d.witness)];
  }
  for (int c : seen) CHECK(c > 0);
}

TEST_CASE("grounds and witnesses round trip") {
  const auto g = GradedGround::build(12, {6, 9, 11}, 4);
  const auto back = io::ground_from_json(through_text(g));
  const auto* graded = dynamic_cast<const GradedGround*>(back.get());
  REQUIRE(graded != nullptr);
  CHECK(graded->tables() == g.tables());
  CHECK(graded->thresholds() == g.thresholds());
  CHECK(graded->seed() == g.seed());

  const auto flat = io::ground_from_json(through_text(TrivialGround(7)));
  CHECK(flat->size() == 7);
  CHECK(dynamic_cast<const TrivialGround*>(flat.get()) != nullptr);

  oracle::Gen gen(12);
  const Identity s = star_identity(2);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 5; ++trial) {
    const auto gg = GradedGround::build(12, {gen.between(7, 9), 10, 11}, gen.rng());
    const auto a = gen.subset(12, 4);
    const auto w = find_suitability_witness(gg, a, s);
    if (!w) continue;
    const auto wb = io::suitability_witness_from_json(through_text(*w));
    CHECK(wb.eta == w->eta);
    CHECK(wb.nu == w->nu);
    CHECK(wb.z == w->z);
    CHECK(wb.level == w->level);
    CHECK(verify_suitability_witness(gg, a, s, wb));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("malformed documents raise input errors") {
  CHECK_THROWS_AS(io::parse("{"), InputError);
  CHECK_THROWS_AS(io::read_file("/nonexistent/file.json"), InputError);
  CHECK_THROWS_AS(io::coloring_from_json(io::parse(R"({"universe":[2,1],"colors":[]})")), InputError);
  CHECK_THROWS_AS(io::coloring_from_json(io::parse(R"({"universe":[1,2],"colors":[]})")), InputError);
  CHECK_THROWS_AS(io::coloring_from_json(io::parse(R"({"universe":[1,2],"colors":[{"pair":[1,3],"color":0}]})")),
                  InputError);
  CHECK_THROWS_AS(io::identity_from_json(io::parse(R"({"ell":0,"m":2,"classes":[[[[0],[0]]]]})")), InputError);
  CHECK_THROWS_AS(io::identity_from_json(io::parse(R"({"ell":1,"m":1,"classes":[[[[2,0],[0,0]]]]})")), InputError);
  CHECK_THROWS_AS(io::ground_from_json(io::parse(R"({"kind":"odd","N":3})")), InputError);
  CHECK_THROWS_AS(io::derivation_from_json(io::parse(R"({"stage":1,"case":7,"witness":{},"children":[]})")), InputError);
  CHECK_THROWS_AS(io::bounds_from_json(io::parse(R"({"universe":[0],"color_cap":-1,"size_cap":1,"depth_cap":1})")),
                  InputError);
  CHECK(io::coloring_from_json(io::parse(R"({"universe":[1,2],"colors":[{"pair":[2,1],"color":4}]})")).color(1, 2) == 4);
}
