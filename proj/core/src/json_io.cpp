#include "idcalc/json_io.hpp"

#include <fstream>
#include <sstream>

#include "idcalc/errors.hpp"

namespace idcalc::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw InputError(std::string("expected an object holding \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field \"") + key + "\"");
  return *it;
}

template <class T>
T value(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("malformed ") + what);
  }
}

int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
  return value<int>(j, what);
}

const json& array(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  return j;
}

std::vector<int> ints(const json& j, const char* what) {
  std::vector<int> out;
  for (const auto& x : array(j, what)) out.push_back(integer(x, what));
  return out;
}

json pair_json(const TreeDomain& d, LeafPair p) { return json::array({leaf_to_json(d, p.a), leaf_to_json(d, p.b)}); }

SideKey side_key_from_json(const TreeDomain& d, const json& j) {
  SideKey k;
  for (const auto& leaf : array(j, "side index")) k.push_back(leaf_from_json(d, leaf));
  std::sort(k.begin(), k.end());
  return k;
}

}  // namespace

json leaf_to_json(const TreeDomain& d, int leaf) {
  const Leaf& l = d.leaf(leaf);
  json out = json::array();
  for (auto b : l.bits) out.push_back(static_cast<int>(b));
  out.push_back(l.tail);
  return out;
}

int leaf_from_json(const TreeDomain& d, const json& j) {
  const auto xs = ints(j, "leaf");
  if (static_cast<int>(xs.size()) != d.ell() + 1) throw InputError("leaf must have ell + 1 entries");
  Leaf l;
  for (int i = 0; i < d.ell(); ++i) {
    if (xs[static_cast<std::size_t>(i)] != 0 && xs[static_cast<std::size_t>(i)] != 1) throw InputError("leaf bits must be 0 or 1");
    l.bits.push_back(static_cast<std::uint8_t>(xs[static_cast<std::size_t>(i)]));
  }
  l.tail = xs.back();
  return d.index_of(l);
}

json to_json(const Identity& s) {
  const auto& d = s.domain();
  json classes = json::array();
  for (const auto& block : s.nontrivial_classes()) {
    json b = json::array();
    for (const auto& p : block) b.push_back(pair_json(d, p));
    classes.push_back(std::move(b));
  }
  return {{"ell", d.ell()}, {"m", d.m()}, {"classes", std::move(classes)}};
}

Identity identity_from_json(const json& j) {
  const TreeDomain d = make_domain(integer(field(j, "ell"), "ell"), integer(field(j, "m"), "m"));
  std::vector<Block> blocks;
  for (const auto& b : array(field(j, "classes"), "classes")) {
    Block block;
    for (const auto& p : array(b, "class")) {
      if (!p.is_array() || p.size() != 2) throw InputError("a class member must be a pair of leaves");
      const int a = leaf_from_json(d, p[0]);
      const int c = leaf_from_json(d, p[1]);
      if (a == c) throw InputError("a pair must join two distinct leaves");
      block.emplace_back(a, c);
    }
    blocks.push_back(std::move(block));
  }
  return Identity::from_blocks(d, std::move(blocks));
}

json to_json(const PairColoring& p) {
  json colors = json::array();
  const auto& u = p.universe();
  for (int i = 0; i < p.size(); ++i)
    for (int j = i + 1; j < p.size(); ++j)
      colors.push_back({{"pair", {u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)]}}, {"color", p.color_at(i, j)}});
  return {{"universe", u}, {"colors", std::move(colors)}};
}

PairColoring coloring_from_json(const json& j) {
  std::vector<int> u = ints(field(j, "universe"), "universe");
  if (!std::is_sorted(u.begin(), u.end()) || std::adjacent_find(u.begin(), u.end()) != u.end())
    throw InputError("universe must be strictly increasing");
  const int n = static_cast<int>(u.size());
  std::vector<Color> colors(static_cast<std::size_t>(n * (n - 1) / 2), -1);
  auto pos = [&](int x) {
    auto it = std::lower_bound(u.begin(), u.end(), x);
    if (it == u.end() || *it != x) throw InputError("colored pair outside the universe");
    return static_cast<int>(it - u.begin());
  };
  for (const auto& entry : array(field(j, "colors"), "colors")) {
    const auto pr = ints(field(entry, "pair"), "pair");
    if (pr.size() != 2 || pr[0] == pr[1]) throw InputError("pair must hold two distinct points");
    const int c = integer(field(entry, "color"), "color");
    if (c < 0) throw InputError("colors are non-negative");
    auto& slot = colors[static_cast<std::size_t>(PairColoring::pair_slot(n, pos(pr[0]), pos(pr[1])))];
    if (slot >= 0) throw InputError("pair colored twice");
    slot = c;
  }
  if (std::find(colors.begin(), colors.end(), Color{-1}) != colors.end()) throw InputError("every pair needs a color");
  return PairColoring(std::move(u), std::move(colors));
}

json to_json(const Gamma& gamma) {
  json out = json::array();
  for (const auto& s : gamma) out.push_back(to_json(s));
  return out;
}

Gamma gamma_from_json(const json& j) {
  Gamma out;
  for (const auto& s : array(j, "gamma")) out.push_back(identity_from_json(s));
  return out;
}

json to_json(const ArrowResult& r) {
  return {{"verdict", r.verdict},
          {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
          {"stats",
           {{"colorings_examined", r.stats.colorings_examined},
            {"symmetry_classes", r.stats.symmetry_classes},
            {"vertex_symmetry_quotiented", r.stats.vertex_symmetry_quotiented}}}};
}

namespace {
json violations_json(const std::vector<Violation>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back({{"clause", v.clause}, {"detail", v.detail}});
  return out;
}
}  // namespace

json to_json(const ValidationReport& r) {
  return {{"verdict", to_string(r.verdict)}, {"violations", violations_json(r.violations)}, {"unmet", violations_json(r.unmet)}};
}

json to_json(const NicenessReport& r) {
  return {{"nice", r.nice()},
          {"meets_agree", r.meets_agree},
          {"branching", r.branching},
          {"no_short_cycle", r.no_short_cycle},
          {"has_cycle", r.has_cycle},
          {"girth", r.girth ? json(*r.girth) : json(nullptr)}};
}

// ---------------------------------------------------------------------------
// Forcing

json to_json(const CaseWitness& w) {
  switch (w.index()) {
    case 0: {
      const auto& c = std::get<Case0Witness>(w);
      return {{"parent", c.parent ? to_json(*c.parent) : json(nullptr)}};
    }
    case 1: {
      const auto& c = std::get<Case1Witness>(w);
      return {{"parent", to_json(c.parent)}, {"alpha", c.alpha}};
    }
    case 2: {
      const auto& c = std::get<Case2Witness>(w);
      return {{"left", to_json(c.left)}, {"right", to_json(c.right)}};
    }
    default: {
      const auto& c = std::get<Case3Witness>(w);
      json family = json::array();
      for (const auto& p : c.family) family.push_back(to_json(p));
      json sides = json::array();
      for (const auto& [key, set] : c.sides) {
        json index = json::array();
        for (int leaf : key) index.push_back(leaf_to_json(c.s.domain(), leaf));
        sides.push_back({{"index", std::move(index)}, {"set", set}});
      }
      return {{"identity", to_json(c.s)}, {"family", std::move(family)}, {"sides", std::move(sides)}};
    }
  }
}

CaseWitness witness_from_json(int case_index, const json& j) {
  switch (case_index) {
    case 0: {
      const auto& parent = field(j, "parent");
      return Case0Witness{parent.is_null() ? std::nullopt : std::optional<Condition>(coloring_from_json(parent))};
    }
    case 1:
      return Case1Witness{coloring_from_json(field(j, "parent")), integer(field(j, "alpha"), "alpha")};
    case 2:
      return Case2Witness{coloring_from_json(field(j, "left")), coloring_from_json(field(j, "right"))};
    case 3: {
      Case3Witness c;
      c.s = identity_from_json(field(j, "identity"));
      for (const auto& p : array(field(j, "family"), "family")) c.family.push_back(coloring_from_json(p));
      for (const auto& side : array(field(j, "sides"), "sides")) {
        auto key = side_key_from_json(c.s.domain(), field(side, "index"));
        if (key.size() > 2) throw InputError("side index holds at most two leaves");
        PointSet set = ints(field(side, "set"), "side set");
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        if (!c.sides.emplace(std::move(key), std::move(set)).second) throw InputError("side index repeated");
      }
      return c;
    }
    default:
      throw InputError("case must be 0, 1, 2 or 3");
  }
}

json to_json(const Derivation& d) {
  json children = json::array();
  for (const auto& c : d.children) children.push_back(to_json(c));
  return {{"stage", d.stage}, {"case", case_of(d.witness)}, {"witness", to_json(d.witness)}, {"children", std::move(children)}};
}

Derivation derivation_from_json(const json& j) {
  Derivation d;
  d.stage = integer(field(j, "stage"), "stage");
  d.witness = witness_from_json(integer(field(j, "case"), "case"), field(j, "witness"));
  for (const auto& c : array(field(j, "children"), "children")) d.children.push_back(derivation_from_json(c));
  return d;
}

json to_json(const CaseReport& r) {
  json clauses = json::array();
  for (const auto& c : r.clauses) {
    json e = {{"clause", c.clause}, {"ok", c.ok}};
    if (!c.ok) e["detail"] = c.detail;
    clauses.push_back(std::move(e));
  }
  return {{"case", r.case_index}, {"passed", r.passed()}, {"clauses", std::move(clauses)}};
}

json to_json(const GenerationBounds& b) {
  return {{"universe", b.universe}, {"color_cap", b.color_cap}, {"size_cap", b.size_cap}, {"depth_cap", b.depth_cap}};
}

GenerationBounds bounds_from_json(const json& j) {
  GenerationBounds b;
  b.universe = ints(field(j, "universe"), "universe");
  b.color_cap = integer(field(j, "color_cap"), "color_cap");
  b.size_cap = integer(field(j, "size_cap"), "size_cap");
  b.depth_cap = integer(field(j, "depth_cap"), "depth_cap");
  if (b.color_cap < 0 || b.size_cap < 0 || b.depth_cap < 0) throw InputError("bounds must be non-negative");
  return b;
}

// ---------------------------------------------------------------------------
// Grounds

json to_json(const GradedGround& g) {
  const auto& t = g.thresholds();
  const auto& tb = g.tables();
  return {{"kind", "graded"},
          {"N", g.size()},
          {"thresholds", {t.n0, t.n1, t.n2}},
          {"seed", g.seed()},
          {"R1", tb.r1},
          {"R2", tb.r2},
          {"filtration", tb.filtration},
          {"subfiltration", tb.subfiltration}};
}

json to_json(const TrivialGround& g) { return {{"kind", "trivial"}, {"N", g.size()}}; }

std::unique_ptr<GroundModel> ground_from_json(const json& j) {
  const int n = integer(field(j, "N"), "N");
  const std::string kind = j.contains("kind") ? value<std::string>(j["kind"], "kind") : "graded";
  if (kind == "trivial") return std::make_unique<TrivialGround>(n);
  if (kind != "graded") throw InputError("ground kind must be trivial or graded");
  const auto t = ints(field(j, "thresholds"), "thresholds");
  if (t.size() != 3) throw InputError("thresholds must list N0, N1, N2");
  const auto& seed_json = field(j, "seed");
  if (!seed_json.is_number_unsigned() && !(seed_json.is_number_integer() && seed_json.get<long long>() >= 0))
    throw InputError("seed must be a non-negative integer");
  GroundTables tb;
  tb.r1 = value<decltype(tb.r1)>(field(j, "R1"), "R1");
  tb.r2 = value<decltype(tb.r2)>(field(j, "R2"), "R2");
  tb.filtration = value<decltype(tb.filtration)>(field(j, "filtration"), "filtration");
  tb.subfiltration = value<decltype(tb.subfiltration)>(field(j, "subfiltration"), "subfiltration");
  return std::make_unique<GradedGround>(
      GradedGround::from_tables(n, {t[0], t[1], t[2]}, seed_json.get<std::uint64_t>(), std::move(tb)));
}

json to_json(const GroundReport& r) {
  json vs = json::array();
  for (const auto& v : r.violations) vs.push_back({{"clause", v.clause}, {"detail", v.detail}});
  return {{"ok", r.ok()}, {"violations", std::move(vs)}, {"tuples_checked", r.tuples_checked}, {"sampled", r.sampled}};
}

json to_json(const SuitabilityWitness& w) {
  json nu = json::array();
  for (const auto& bits : w.nu) {
    json b = json::array();
    for (auto x : bits) b.push_back(static_cast<int>(x));
    nu.push_back(std::move(b));
  }
  return {{"eta", w.eta}, {"nu", std::move(nu)}, {"z", w.z}, {"level", w.level}};
}

SuitabilityWitness suitability_witness_from_json(const json& j) {
  SuitabilityWitness w;
  w.eta = ints(field(j, "eta"), "eta");
  for (const auto& node : array(field(j, "nu"), "nu")) {
    Bits bits;
    for (int x : ints(node, "node")) {
      if (x != 0 && x != 1) throw InputError("node bits must be 0 or 1");
      bits.push_back(static_cast<std::uint8_t>(x));
    }
    w.nu.push_back(std::move(bits));
  }
  for (const auto& z : array(field(j, "z"), "z")) w.z.push_back(ints(z, "live set"));
  w.level = integer(field(j, "level"), "level");
  return w;
}

// ---------------------------------------------------------------------------

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string dump(const json& j) { return j.dump() + "\n"; }

}  // namespace idcalc::io
