#include "idcalc/forcing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "idcalc/errors.hpp"
#include "idcalc/partitions.hpp"

namespace idcalc {

Color n_of(const Condition& p) {
  Color top = -1;
  for (Color c : p.colors()) top = std::max(top, c);
  return top + 1;
}

Condition empty_condition() { return Condition({}, {}); }

bool in_gamma(const Gamma& gamma, const Identity& s) { return std::find(gamma.begin(), gamma.end(), s) != gamma.end(); }

namespace {

PointSet normalized(PointSet u) {
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

bool subset(const PointSet& a, const PointSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

PointSet intersect(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet unite(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Color fresh_color(Color base, int i, int j) { return base + static_cast<Color>(i + j) * (i + j) + i; }

// Color of {x, y} in the first part that contains both, or -1.
Color known_color(const std::vector<const Condition*>& parts, int x, int y) {
  for (const auto* p : parts)
    if (p->contains(x) && p->contains(y)) return p->color(x, y);
  return -1;
}

// Union of the parts; uncovered pairs get fresh colors from `base`.
Condition assemble(const std::vector<const Condition*>& parts, Color base) {
  PointSet u;
  for (const auto* p : parts) u = unite(u, p->universe());
  std::vector<Color> colors;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      const Color c = known_color(parts, u[i], u[j]);
      colors.push_back(c >= 0 ? c : fresh_color(base, static_cast<int>(i), static_cast<int>(j)));
    }
  return Condition(std::move(u), std::move(colors));
}

// First pair of shared pairs on which two conditions disagree.
std::optional<std::pair<int, int>> disagreement(const Condition& a, const Condition& b) {
  const PointSet common = intersect(a.universe(), b.universe());
  for (std::size_t i = 0; i < common.size(); ++i)
    for (std::size_t j = i + 1; j < common.size(); ++j)
      if (a.color(common[i], common[j]) != b.color(common[i], common[j])) return std::make_pair(common[i], common[j]);
  return std::nullopt;
}

std::string set_string(const PointSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

// Pairs whose color occurs more than once.
std::vector<std::pair<int, int>> repeated_pairs(const Condition& p) {
  std::map<Color, int> count;
  for (Color c : p.colors()) ++count[c];
  std::vector<std::pair<int, int>> out;
  const auto& u = p.universe();
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j)
      if (count[p.color_at(static_cast<int>(i), static_cast<int>(j))] > 1) out.emplace_back(u[i], u[j]);
  return out;
}

bool within(const PointSet& u, int x, int y) {
  return std::binary_search(u.begin(), u.end(), x) && std::binary_search(u.begin(), u.end(), y);
}

}  // namespace

Condition restrict(const Condition& p, const PointSet& u_in) {
  const PointSet u = normalized(u_in);
  if (!subset(u, p.universe())) throw InputError("restriction set " + set_string(u) + " is not inside the condition");
  return Condition::from_function(u, [&](int x, int y) { return p.color(x, y); });
}

bool leq(const Condition& q, const Condition& p) {
  if (!subset(q.universe(), p.universe())) return false;
  const auto& u = q.universe();
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j)
      if (q.color_at(static_cast<int>(i), static_cast<int>(j)) != p.color(u[i], u[j])) return false;
  return true;
}

Condition extend_point(const Condition& p, int alpha) {
  if (alpha < 0) throw InputError("points are non-negative");
  if (p.contains(alpha)) throw InputError("point " + std::to_string(alpha) + " is already in the condition");
  const Condition single({alpha}, {});
  return assemble({&p, &single}, n_of(p));
}

Condition free_amalgamate(const Condition& p1, const Condition& p2, const GroundModel& g, bool strict) {
  if (auto bad = disagreement(p1, p2))
    throw IncompatibleError("conditions disagree on {" + std::to_string(bad->first) + "," + std::to_string(bad->second) + "}");
  const PointSet common = intersect(p1.universe(), p2.universe());
  const PointSet all = unite(p1.universe(), p2.universe());
  const PointSet leak = intersect(g.closure(0, common), all);
  if (!subset(leak, strict ? common : p1.universe()))
    throw ClauseViolation("d", "closure of the overlap " + set_string(common) + " reaches " + set_string(leak));
  return assemble({&p1, &p2}, std::max(n_of(p1), n_of(p2)));
}

// ---------------------------------------------------------------------------
// Identity amalgamation

std::vector<SideKey> side_keys(const Identity& s) {
  std::vector<SideKey> keys{{}};
  for (int leaf = 0; leaf < s.domain().size(); ++leaf) keys.push_back({leaf});
  for (const auto& y : s.nontrivial_pairs()) keys.push_back({y.a, y.b});
  std::sort(keys.begin(), keys.end());
  return keys;
}

namespace {

SideKey pair_key(LeafPair y) { return {y.a, y.b}; }

SideKey meet_key(const SideKey& a, const SideKey& b) {
  SideKey out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Clauses (d)-(g) and compatibility of an identity family. Assumes the
// index checks passed. A failing closure call (points outside the ground)
// is reported against (e).
std::vector<ClauseResult> side_clauses(const Identity& s, const std::vector<Condition>& family, const Sides& sides,
                                       const GroundModel& g) {
  const auto ys = s.nontrivial_pairs();
  std::vector<ClauseResult> out;

  ClauseResult f{"f", true, ""};
  for (std::size_t i = 0; i < ys.size() && f.ok; ++i)
    if (!subset(family[i].universe(), sides.at(pair_key(ys[i]))))
      f = {"f", false, "u of p_y is not inside v_y for y = {" + std::to_string(ys[i].a) + "," + std::to_string(ys[i].b) + "}"};
  out.push_back(f);

  ClauseResult d{"d", true, ""};
  for (auto it = sides.begin(); it != sides.end() && d.ok; ++it)
    for (auto jt = std::next(it); jt != sides.end() && d.ok; ++jt) {
      const auto m = meet_key(it->first, jt->first);
      if (!subset(intersect(it->second, jt->second), sides.at(m)))
        d = {"d", false, "v_t ∩ v_s is not inside v_{t∩s}"};
    }
  out.push_back(d);

  ClauseResult e{"e", true, ""};
  for (const auto& [t, v] : sides) {
    if (t.size() > 1 || !e.ok) continue;
    PointSet cl;
    try {
      cl = g.closure(0, v);
    } catch (const InputError& err) {
      e = {"e", false, err.what()};
      break;
    }
    for (const auto& p : family)
      if (!subset(intersect(cl, p.universe()), v)) {
        e = {"e", false, "closure of a side set meets a family universe outside it"};
        break;
      }
  }
  out.push_back(e);

  ClauseResult gc{"g", true, ""};
  for (std::size_t i = 0; i < ys.size() && gc.ok; ++i)
    for (std::size_t j = i + 1; j < ys.size() && gc.ok; ++j) {
      const auto t = meet_key(pair_key(ys[i]), pair_key(ys[j]));
      const PointSet& v = sides.at(t);
      const Condition a = restrict(family[i], intersect(family[i].universe(), v));
      const Condition b = restrict(family[j], intersect(family[j].universe(), v));
      if (!(a == b)) gc = {"g", false, "p_y1 and p_y2 differ on v_t"};
    }
  out.push_back(gc);

  ClauseResult compat{"compatible", true, ""};
  for (std::size_t i = 0; i < family.size() && compat.ok; ++i)
    for (std::size_t j = i + 1; j < family.size() && compat.ok; ++j)
      if (disagreement(family[i], family[j])) compat = {"compatible", false, "family has no common upper bound"};
  out.push_back(compat);
  return out;
}

std::optional<std::string> index_problem(const Identity& s, const std::vector<Condition>& family, const Sides& sides) {
  if (family.size() != s.nontrivial_pairs().size()) return "family size differs from |Y|";
  const auto keys = side_keys(s);
  if (sides.size() != keys.size()) return "side sets are not indexed by Y+";
  for (const auto& k : keys)
    if (!sides.count(k)) return "side sets are not indexed by Y+";
  return std::nullopt;
}

}  // namespace

Condition identity_amalgamate(const Identity& s, const std::vector<Condition>& family, const Sides& sides,
                              const Gamma& gamma, const GroundModel& g) {
  if (!in_gamma(gamma, s)) throw InputError("identity is not in gamma");
  if (auto problem = index_problem(s, family, sides)) throw InputError(*problem);
  for (const auto& r : side_clauses(s, family, sides, g)) {
    if (r.ok) continue;
    if (r.clause == "compatible") throw IncompatibleError(r.detail);
    throw ClauseViolation(r.clause, r.detail);
  }
  std::vector<const Condition*> parts;
  Color base = 0;
  for (const auto& p : family) {
    parts.push_back(&p);
    base = std::max(base, n_of(p));
  }
  return assemble(parts, base);
}

// ---------------------------------------------------------------------------
// Witness checking

int case_of(const CaseWitness& w) { return static_cast<int>(w.index()); }

std::vector<Condition> referenced_conditions(const CaseWitness& w) {
  switch (w.index()) {
    case 0: {
      const auto& c = std::get<Case0Witness>(w);
      return c.parent ? std::vector<Condition>{*c.parent} : std::vector<Condition>{};
    }
    case 1:
      return {std::get<Case1Witness>(w).parent};
    case 2:
      return {std::get<Case2Witness>(w).left, std::get<Case2Witness>(w).right};
    default:
      return std::get<Case3Witness>(w).family;
  }
}

bool CaseReport::passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.ok; });
}

namespace {

ClauseResult check(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok, ok ? std::string{} : std::move(detail)};
}

// (c) for Cases 1 and 2: every repeated color lives on pairs inside the parts.
ClauseResult no_new_equalities(const Condition& p, const std::vector<PointSet>& parts) {
  for (const auto& [x, y] : repeated_pairs(p)) {
    bool covered = false;
    for (const auto& u : parts) covered = covered || within(u, x, y);
    if (!covered)
      return check("c", false, "pair {" + std::to_string(x) + "," + std::to_string(y) + "} shares a color but lies in no part");
  }
  return check("c", true);
}

}  // namespace

CaseReport verify_case(const Condition& p, const CaseWitness& w, const Gamma& gamma, const GroundModel& g,
                       const MembershipOracle& lower, bool strict) {
  CaseReport r;
  r.case_index = case_of(w);
  auto member = [&](const Condition& q) { return !lower || lower(q); };
  const bool on_ground = p.universe().empty() || (p.universe().front() >= 0 && p.universe().back() < g.size());
  r.clauses.push_back(check("universe", on_ground, "condition leaves the ground universe"));

  switch (w.index()) {
    case 0: {
      const auto& c = std::get<Case0Witness>(w);
      if (!c.parent) {
        r.clauses.push_back(check("empty", p.size() == 0, "a parentless Case 0 witness only certifies the empty condition"));
        break;
      }
      r.clauses.push_back(check("lower", member(*c.parent), "parent is not a lower-stage member"));
      r.clauses.push_back(check("restriction", leq(p, *c.parent), "condition is not a restriction of the parent"));
      break;
    }
    case 1: {
      const auto& c = std::get<Case1Witness>(w);
      r.clauses.push_back(check("lower", member(c.parent), "parent is not a lower-stage member"));
      r.clauses.push_back(check("fresh", !c.parent.contains(c.alpha), "alpha already lies in the parent"));
      PointSet u = c.parent.universe();
      u.push_back(c.alpha);
      u = normalized(u);
      r.clauses.push_back(check("a", u == p.universe(), "universe is not u1 + alpha"));
      r.clauses.push_back(check("b", subset(c.parent.universe(), p.universe()) && leq(c.parent, p), "colors of the parent are not kept"));
      r.clauses.push_back(no_new_equalities(p, {c.parent.universe()}));
      break;
    }
    case 2: {
      const auto& c = std::get<Case2Witness>(w);
      r.clauses.push_back(check("lower", member(c.left) && member(c.right), "a part is not a lower-stage member"));
      const PointSet all = unite(c.left.universe(), c.right.universe());
      r.clauses.push_back(check("a", all == p.universe(), "universe is not u1 ∪ u2"));
      r.clauses.push_back(check("b", leq(c.left, p) && leq(c.right, p), "a part's colors are not kept"));
      r.clauses.push_back(no_new_equalities(p, {c.left.universe(), c.right.universe()}));
      const PointSet common = intersect(c.left.universe(), c.right.universe());
      bool d_ok = false;
      try {
        const PointSet leak = intersect(g.closure(0, common), all);
        d_ok = subset(leak, strict ? common : c.left.universe());
      } catch (const InputError&) {
      }
      r.clauses.push_back(check("d", d_ok, "closure of the overlap reaches outside u1"));
      break;
    }
    default: {
      const auto& c = std::get<Case3Witness>(w);
      r.clauses.push_back(check("gamma", in_gamma(gamma, c.s), "identity is not in gamma"));
      const auto problem = index_problem(c.s, c.family, c.sides);
      r.clauses.push_back(check("index", !problem, problem.value_or("")));
      if (problem) break;
      bool all_lower = true;
      PointSet u;
      for (const auto& q : c.family) {
        all_lower = all_lower && member(q);
        u = unite(u, q.universe());
      }
      r.clauses.push_back(check("lower", all_lower, "a family member is not a lower-stage member"));
      r.clauses.push_back(check("a", u == p.universe(), "universe is not the union of the family"));
      bool b_ok = true;
      for (const auto& q : c.family) b_ok = b_ok && leq(q, p);
      r.clauses.push_back(check("b", b_ok, "a family member's colors are not kept"));
      std::vector<PointSet> parts;
      for (const auto& q : c.family) parts.push_back(q.universe());
      r.clauses.push_back(no_new_equalities(p, parts));
      for (auto& res : side_clauses(c.s, c.family, c.sides, g)) r.clauses.push_back(std::move(res));
      break;
    }
  }
  return r;
}

bool verify_derivation(const Condition& p, const Derivation& d, const Gamma& gamma, const GroundModel& g, bool strict) {
  const int cs = case_of(d.witness);
  if (d.stage < 0 || d.stage % 4 != cs) return false;
  if (d.stage == 0) {
    const auto* c0 = std::get_if<Case0Witness>(&d.witness);
    return c0 && !c0->parent && d.children.empty() && p.size() == 0;
  }
  if (cs == 0 && !std::get<Case0Witness>(d.witness).parent) return false;
  const auto subs = referenced_conditions(d.witness);
  if (subs.size() != d.children.size()) return false;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (d.children[i].stage >= d.stage) return false;
    if (!verify_derivation(subs[i], d.children[i], gamma, g, strict)) return false;
  }
  return verify_case(p, d.witness, gamma, g, {}, strict).passed();
}

// ---------------------------------------------------------------------------
// Bounded generation
//
// Conditions are keyed by a byte string: four bytes of universe mask over
// the allowed points, then one byte per pair color. Membership is invariant
// under permuting the colors below the cap, so only candidates whose colors
// appear in first-occurrence order are searched; each hit is stored together
// with its whole color orbit.

namespace {

using Key = std::string;
using Mask = std::uint32_t;

struct Record {
  Key key;
  int stage = 0;
  int cas = 0;
  std::vector<Key> refs;
  int alpha = -1;           // point index, Case 1
  int gamma_index = -1;     // Case 3
  std::vector<Mask> small;  // Case 3 sides for the empty set then each leaf
};

class Generator {
 public:
  Generator(const Gamma& gamma, const GroundModel& g, const GenerationBounds& b, GenerationOptions opt)
      : gamma_(gamma), g_(g), b_(b), opt_(opt), pts_(normalized(b.universe)) {
    if (b.color_cap < 0 || b.size_cap < 0 || b.depth_cap < 0) throw InputError("bounds must be non-negative");
    if (pts_.size() > 16) throw ResourceError("generation universe is limited to 16 points");
    if (b.color_cap > 255) throw ResourceError("generation color cap is limited to 255");
    for (int x : pts_)
      if (x < 0 || x >= g.size()) throw InputError("point " + std::to_string(x) + " is outside the ground");
    size_cap_ = std::min<int>(b.size_cap, static_cast<int>(pts_.size()));
    double total = 0;
    for (Mask m = 0; m < (Mask{1} << pts_.size()); ++m) {
      const int k = std::popcount(m);
      if (k <= size_cap_) total += std::pow(static_cast<double>(b.color_cap), k * (k - 1) / 2);
      if (k >= 2 && b.color_cap == 0 && k <= size_cap_) total -= 1;  // no colors: no pairs
    }
    if (total > static_cast<double>(opt.candidate_cap))
      throw ResourceError("bounds allow about " + std::to_string(static_cast<long long>(total)) +
                          " conditions, above the candidate cap");
    for (const auto& s : gamma_) prepare_identity(s);
  }

  std::vector<Record> records;
  std::vector<std::vector<std::size_t>> by_stage;
  int stages_run = 0;
  bool saturated = false;

  void run() {
    int idle = 0;
    for (int k = 0; k <= b_.depth_cap; ++k) {
      std::vector<Record> found;
      std::unordered_set<Key> found_keys;
      const int j = k % 4;
      if (j == 0) {
        case0(k, found, found_keys);
      } else {
        for_each_candidate([&](const Key& key) {
          if (known_.count(key)) return;
          Record r;
          if (j == 1 ? case1(key, r) : j == 2 ? case2(key, r) : case3(key, r)) {
            r.stage = k;
            r.cas = j;
            add_orbit(r, found, found_keys);
          }
        });
      }
      std::vector<std::size_t> ids;
      std::sort(found.begin(), found.end(), [](const Record& a, const Record& b) { return a.key < b.key; });
      for (auto& r : found) {
        known_.emplace(r.key, records.size());
        ids.push_back(records.size());
        records.push_back(std::move(r));
      }
      by_stage.push_back(std::move(ids));
      stages_run = k + 1;
      idle = by_stage.back().empty() ? idle + 1 : 0;
      if (idle == 4) {
        saturated = true;
        break;
      }
    }
  }

  Condition to_condition(const Key& key) const {
    const Mask m = mask_of(key);
    std::vector<int> u;
    for (int i : members(m)) u.push_back(pts_[static_cast<std::size_t>(i)]);
    std::vector<Color> colors;
    for (std::size_t i = 4; i < key.size(); ++i) colors.push_back(static_cast<unsigned char>(key[i]));
    return Condition(std::move(u), std::move(colors));
  }

  std::optional<Key> key_of(const Condition& p) const {
    Mask m = 0;
    for (int x : p.universe()) {
      auto it = std::lower_bound(pts_.begin(), pts_.end(), x);
      if (it == pts_.end() || *it != x) return std::nullopt;
      m |= Mask{1} << (it - pts_.begin());
    }
    Key key = mask_bytes(m);
    for (Color c : p.colors()) {
      if (c < 0 || c >= b_.color_cap) return std::nullopt;
      key.push_back(static_cast<char>(c));
    }
    return key;
  }

  const Record* find(const Key& key) const {
    auto it = known_.find(key);
    return it == known_.end() ? nullptr : &records[it->second];
  }

  int point(int index) const { return pts_[static_cast<std::size_t>(index)]; }

  // Side sets of a Case 3 record in public form.
  Sides sides_of(const Record& r) const {
    const auto& s = gamma_[static_cast<std::size_t>(r.gamma_index)];
    Sides out;
    auto to_points = [&](Mask m) {
      PointSet ps;
      for (int i : members(m)) ps.push_back(point(i));
      return ps;
    };
    out[{}] = to_points(r.small[0]);
    for (int leaf = 0; leaf < s.domain().size(); ++leaf) out[{leaf}] = to_points(r.small[static_cast<std::size_t>(leaf) + 1]);
    const auto ys = s.nontrivial_pairs();
    for (std::size_t y = 0; y < ys.size(); ++y) out[{ys[y].a, ys[y].b}] = to_points(mask_of(r.refs[y]));
    return out;
  }

 private:
  struct Shape {
    int leaves = 0;
    std::vector<LeafPair> ys;
    // Side index space: 0 = empty set, 1..leaves = singletons, then pairs.
    struct Bound {
      int t, s, into;
    };
    std::vector<Bound> bounds;  // v_into ⊇ v_t ∩ v_s
    std::vector<std::vector<int>> g_meet;  // g_meet[y1][y2] = side index of y1 ∩ y2
  };

  static Key mask_bytes(Mask m) {
    Key k(4, '\0');
    for (int i = 0; i < 4; ++i) k[static_cast<std::size_t>(i)] = static_cast<char>((m >> (8 * i)) & 0xff);
    return k;
  }
  static Mask mask_of(const Key& k) {
    Mask m = 0;
    for (int i = 0; i < 4; ++i) m |= static_cast<Mask>(static_cast<unsigned char>(k[static_cast<std::size_t>(i)])) << (8 * i);
    return m;
  }
  static std::vector<int> members(Mask m) {
    std::vector<int> out;
    while (m != 0) {
      out.push_back(std::countr_zero(m));
      m &= m - 1;
    }
    return out;
  }

  static Key restrict_key(const Key& key, Mask sub) {
    const Mask m = mask_of(key);
    const auto mem = members(m);
    const int n = static_cast<int>(mem.size());
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
      if ((sub >> mem[static_cast<std::size_t>(i)]) & 1) keep.push_back(i);
    Key out = mask_bytes(sub);
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = a + 1; b < keep.size(); ++b)
        out.push_back(key[4 + static_cast<std::size_t>(PairColoring::pair_slot(n, keep[a], keep[b]))]);
    return out;
  }

  Mask closure_in(Mask m) {
    auto it = closure_cache_.find(m);
    if (it != closure_cache_.end()) return it->second;
    PointSet ps;
    for (int i : members(m)) ps.push_back(point(i));
    Mask out = 0;
    for (int x : g_.closure(0, ps)) {
      auto jt = std::lower_bound(pts_.begin(), pts_.end(), x);
      if (jt != pts_.end() && *jt == x) out |= Mask{1} << (jt - pts_.begin());
    }
    closure_cache_.emplace(m, out);
    return out;
  }

  template <class F>
  void for_each_candidate(F&& visit) {
    const int n = static_cast<int>(pts_.size());
    for (Mask m = 0; m < (Mask{1} << n); ++m) {
      const int k = std::popcount(m);
      if (k > size_cap_) continue;
      const int pairs = k * (k - 1) / 2;
      if (pairs > 0 && b_.color_cap == 0) continue;
      const Key head = mask_bytes(m);
      for_each_growth_string(pairs, b_.color_cap, [&](const std::vector<int>& rgs) {
        Key key = head;
        for (int c : rgs) key.push_back(static_cast<char>(c));
        visit(key);
        return true;
      });
    }
  }

  void case0(int k, std::vector<Record>& found, std::unordered_set<Key>& found_keys) {
    if (k == 0) {
      Record r;
      r.key = mask_bytes(0);
      found_keys.insert(r.key);
      found.push_back(std::move(r));
      return;
    }
    for (const auto& parent : records) {
      const Mask m = mask_of(parent.key);
      for (Mask sub = m;; sub = (sub - 1) & m) {
        Key rk = restrict_key(parent.key, sub);
        if (!known_.count(rk) && found_keys.insert(rk).second) {
          Record r;
          r.key = std::move(rk);
          r.stage = k;
          r.refs = {parent.key};
          found.push_back(std::move(r));
        }
        if (sub == 0) break;
      }
    }
  }

  // Per-candidate tables shared by Cases 1-3.
  struct View {
    Mask mask = 0;
    std::vector<int> mem;
    std::vector<char> unique;  // per pair slot: its color occurs once
    std::unordered_map<Mask, bool> known_sub;
  };

  View view_of(const Key& key) const {
    View v;
    v.mask = mask_of(key);
    v.mem = members(v.mask);
    std::vector<int> count(256, 0);
    for (std::size_t i = 4; i < key.size(); ++i) ++count[static_cast<unsigned char>(key[i])];
    for (std::size_t i = 4; i < key.size(); ++i) v.unique.push_back(count[static_cast<unsigned char>(key[i])] == 1);
    return v;
  }

  bool known_sub(View& v, const Key& key, Mask sub) const {
    auto it = v.known_sub.find(sub);
    if (it != v.known_sub.end()) return it->second;
    const bool k = known_.count(restrict_key(key, sub)) > 0;
    v.known_sub.emplace(sub, k);
    return k;
  }

  bool case1(const Key& key, Record& r) {
    View v = view_of(key);
    const int n = static_cast<int>(v.mem.size());
    for (int a = 0; a < n; ++a) {
      bool fresh = true;
      for (int b = 0; b < n && fresh; ++b)
        if (b != a) fresh = v.unique[static_cast<std::size_t>(PairColoring::pair_slot(n, a, b))];
      if (!fresh) continue;
      const Mask sub = v.mask & ~(Mask{1} << v.mem[static_cast<std::size_t>(a)]);
      if (!known_sub(v, key, sub)) continue;
      r.key = key;
      r.refs = {restrict_key(key, sub)};
      r.alpha = v.mem[static_cast<std::size_t>(a)];
      return true;
    }
    return false;
  }

  bool case2(const Key& key, Record& r) {
    View v = view_of(key);
    const int n = static_cast<int>(v.mem.size());
    for (Mask m1 = 0;; m1 = ((m1 | ~v.mask) + 1) & v.mask) {
      if (m1 != v.mask && known_sub(v, key, m1)) {
        const Mask rest = v.mask & ~m1;
        for (Mask extra = 0;; extra = ((extra | ~m1) + 1) & m1) {
          const Mask m2 = rest | extra;
          if (m2 != v.mask && known_sub(v, key, m2) && split_ok(v, n, m1, m2)) {
            r.key = key;
            r.refs = {restrict_key(key, m1), restrict_key(key, m2)};
            return true;
          }
          if (extra == m1) break;
        }
      }
      if (m1 == v.mask) break;
    }
    return false;
  }

  bool split_ok(const View& v, int n, Mask m1, Mask m2) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const Mask pair = (Mask{1} << v.mem[static_cast<std::size_t>(a)]) | (Mask{1} << v.mem[static_cast<std::size_t>(b)]);
        if ((pair & ~m1) != 0 && (pair & ~m2) != 0 && !v.unique[static_cast<std::size_t>(PairColoring::pair_slot(n, a, b))])
          return false;
      }
    const Mask leak = closure_in(m1 & m2) & (m1 | m2);
    return (leak & ~(opt_.strict ? (m1 & m2) : m1)) == 0;
  }

  void prepare_identity(const Identity& s) {
    Shape sh;
    sh.leaves = s.domain().size();
    sh.ys = s.nontrivial_pairs();
    const int ny = static_cast<int>(sh.ys.size());
    auto index = [&](const SideKey& t) {
      if (t.empty()) return 0;
      if (t.size() == 1) return t[0] + 1;
      for (int y = 0; y < ny; ++y)
        if (t[0] == sh.ys[static_cast<std::size_t>(y)].a && t[1] == sh.ys[static_cast<std::size_t>(y)].b) return sh.leaves + 1 + y;
      return -1;
    };
    std::vector<SideKey> keys = side_keys(s);
    for (std::size_t i = 0; i < keys.size(); ++i)
      for (std::size_t j = i + 1; j < keys.size(); ++j) {
        const auto m = meet_key(keys[i], keys[j]);
        if (m == keys[i] || m == keys[j]) continue;
        sh.bounds.push_back({index(keys[i]), index(keys[j]), index(m)});
      }
    sh.g_meet.assign(static_cast<std::size_t>(ny), std::vector<int>(static_cast<std::size_t>(ny), 0));
    for (int a = 0; a < ny; ++a)
      for (int b = 0; b < ny; ++b)
        sh.g_meet[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            index(meet_key(pair_key(sh.ys[static_cast<std::size_t>(a)]), pair_key(sh.ys[static_cast<std::size_t>(b)])));
    shapes_.push_back(std::move(sh));
  }

  // Least side system for the assigned y's; returns false if (g) fails.
  bool sides_fixpoint(const Shape& sh, const std::vector<Mask>& u, int assigned, std::vector<Mask>& v) {
    const int small = sh.leaves + 1;
    v.assign(static_cast<std::size_t>(small + static_cast<int>(sh.ys.size())), 0);
    Mask cover = 0;
    for (int y = 0; y < assigned; ++y) {
      v[static_cast<std::size_t>(small + y)] = u[static_cast<std::size_t>(y)];
      cover |= u[static_cast<std::size_t>(y)];
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& bd : sh.bounds) {
        const Mask add = v[static_cast<std::size_t>(bd.t)] & v[static_cast<std::size_t>(bd.s)];
        if ((add & ~v[static_cast<std::size_t>(bd.into)]) != 0) {
          v[static_cast<std::size_t>(bd.into)] |= add;
          changed = true;
        }
      }
      for (int t = 0; t < small; ++t) {
        const Mask add = closure_in(v[static_cast<std::size_t>(t)]) & cover;
        if ((add & ~v[static_cast<std::size_t>(t)]) != 0) {
          v[static_cast<std::size_t>(t)] |= add;
          changed = true;
        }
      }
    }
    for (int a = 0; a < assigned; ++a)
      for (int b = a + 1; b < assigned; ++b) {
        const Mask side = v[static_cast<std::size_t>(sh.g_meet[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])];
        if ((u[static_cast<std::size_t>(a)] & side) != (u[static_cast<std::size_t>(b)] & side)) return false;
      }
    return true;
  }

  bool case3(const Key& key, Record& r) {
    if (shapes_.empty()) return false;
    View v = view_of(key);
    const int n = static_cast<int>(v.mem.size());
    // Sub-universes with a known restriction, larger ones first.
    std::vector<Mask> options;
    for (Mask sub = v.mask;; sub = (sub - 1) & v.mask) {
      if (sub != v.mask && known_sub(v, key, sub)) options.push_back(sub);
      if (sub == 0) break;
    }
    std::stable_sort(options.begin(), options.end(), [](Mask a, Mask b) { return std::popcount(a) > std::popcount(b); });
    std::vector<Mask> must_cover;  // pairs with a repeated color
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (!v.unique[static_cast<std::size_t>(PairColoring::pair_slot(n, a, b))])
          must_cover.push_back((Mask{1} << v.mem[static_cast<std::size_t>(a)]) | (Mask{1} << v.mem[static_cast<std::size_t>(b)]));

    for (std::size_t gi = 0; gi < shapes_.size(); ++gi) {
      const Shape& sh = shapes_[gi];
      const int ny = static_cast<int>(sh.ys.size());
      if (ny == 0) continue;
      std::vector<Mask> u(static_cast<std::size_t>(ny), 0);
      std::vector<Mask> sides;
      long long nodes = 0;
      auto search = [&](auto&& self, int y, Mask covered) -> bool {
        if (++nodes > kNodeCap) throw ResourceError("identity amalgamation search exceeded its node budget");
        if (y == ny) {
          if (covered != v.mask) return false;
          for (Mask pr : must_cover) {
            bool ok = false;
            for (Mask w : u) ok = ok || (pr & ~w) == 0;
            if (!ok) return false;
          }
          return true;
        }
        for (Mask w : options) {
          u[static_cast<std::size_t>(y)] = w;
          std::vector<Mask> side;
          if (!sides_fixpoint(sh, u, y + 1, side)) continue;
          if (self(self, y + 1, covered | w)) return true;
        }
        return false;
      };
      if (search(search, 0, 0)) {
        sides_fixpoint(sh, u, ny, sides);
        r.key = key;
        r.gamma_index = static_cast<int>(gi);
        r.refs.clear();
        for (Mask w : u) r.refs.push_back(restrict_key(key, w));
        r.small.assign(sides.begin(), sides.begin() + sh.leaves + 1);
        return true;
      }
    }
    return false;
  }

  // Stores r and every recoloring of it by an injection of its colors into
  // [0, color_cap), extended to a bijection for the referenced keys.
  void add_orbit(const Record& r, std::vector<Record>& found, std::unordered_set<Key>& found_keys) {
    int used = 0;
    for (std::size_t i = 4; i < r.key.size(); ++i) used = std::max(used, static_cast<unsigned char>(r.key[i]) + 1);
    const int cap = b_.color_cap;
    std::vector<int> image(static_cast<std::size_t>(used));
    std::vector<char> taken(static_cast<std::size_t>(cap), 0);
    auto apply = [&](const Key& k, const std::vector<int>& perm) {
      Key out = k;
      for (std::size_t i = 4; i < out.size(); ++i) out[i] = static_cast<char>(perm[static_cast<unsigned char>(out[i])]);
      return out;
    };
    auto emit = [&] {
      std::vector<int> perm(static_cast<std::size_t>(cap));
      std::vector<char> hit(static_cast<std::size_t>(cap), 0);
      for (int c = 0; c < used; ++c) {
        perm[static_cast<std::size_t>(c)] = image[static_cast<std::size_t>(c)];
        hit[static_cast<std::size_t>(image[static_cast<std::size_t>(c)])] = 1;
      }
      int next = 0;
      for (int c = used; c < cap; ++c) {
        while (hit[static_cast<std::size_t>(next)]) ++next;
        perm[static_cast<std::size_t>(c)] = next++;
      }
      Record img = r;
      img.key = apply(r.key, perm);
      for (auto& ref : img.refs) ref = apply(ref, perm);
      if (found_keys.insert(img.key).second) found.push_back(std::move(img));
    };
    auto assign = [&](auto&& self, int c) -> void {
      if (c == used) {
        emit();
        return;
      }
      for (int t = 0; t < cap; ++t) {
        if (taken[static_cast<std::size_t>(t)]) continue;
        taken[static_cast<std::size_t>(t)] = 1;
        image[static_cast<std::size_t>(c)] = t;
        self(self, c + 1);
        taken[static_cast<std::size_t>(t)] = 0;
      }
    };
    assign(assign, 0);
  }

  static constexpr long long kNodeCap = 20'000'000;

  const Gamma& gamma_;
  const GroundModel& g_;
  GenerationBounds b_;
  GenerationOptions opt_;
  std::vector<int> pts_;
  int size_cap_ = 0;
  std::unordered_map<Key, std::size_t> known_;
  std::unordered_map<Mask, Mask> closure_cache_;
  std::vector<Shape> shapes_;
};

}  // namespace

ConditionUniverse generate(const Gamma& gamma, const GroundModel& g, const GenerationBounds& b, GenerationOptions options) {
  Generator gen(gamma, g, b, options);
  gen.run();
  ConditionUniverse out;
  out.bounds_ = b;
  out.stages_run_ = gen.stages_run;
  out.saturated_ = gen.saturated;
  for (const auto& ids : gen.by_stage) {
    std::vector<Condition> stage;
    for (auto id : ids) {
      const Record& r = gen.records[id];
      Condition p = gen.to_condition(r.key);
      CaseWitness w;
      switch (r.cas) {
        case 0:
          w = Case0Witness{r.refs.empty() ? std::nullopt : std::optional<Condition>(gen.to_condition(r.refs[0]))};
          break;
        case 1:
          w = Case1Witness{gen.to_condition(r.refs[0]), gen.point(r.alpha)};
          break;
        case 2:
          w = Case2Witness{gen.to_condition(r.refs[0]), gen.to_condition(r.refs[1])};
          break;
        default: {
          Case3Witness c3;
          c3.s = gamma[static_cast<std::size_t>(r.gamma_index)];
          for (const auto& ref : r.refs) c3.family.push_back(gen.to_condition(ref));
          c3.sides = gen.sides_of(r);
          w = std::move(c3);
        }
      }
      out.entries_.emplace(p, ConditionUniverse::Entry{r.stage, std::move(w)});
      stage.push_back(std::move(p));
    }
    std::sort(stage.begin(), stage.end());
    out.by_stage_.push_back(std::move(stage));
  }
  return out;
}

bool ConditionUniverse::contains(const Condition& p) const { return entries_.count(p) > 0; }

std::optional<int> ConditionUniverse::stage_of(const Condition& p) const {
  auto it = entries_.find(p);
  if (it == entries_.end()) return std::nullopt;
  return it->second.stage;
}

std::optional<Derivation> ConditionUniverse::derivation(const Condition& p) const {
  auto it = entries_.find(p);
  if (it == entries_.end()) return std::nullopt;
  Derivation d;
  d.stage = it->second.stage;
  d.witness = it->second.witness;
  for (const auto& sub : referenced_conditions(d.witness)) d.children.push_back(*derivation(sub));
  return d;
}

std::vector<Condition> ConditionUniverse::conditions() const {
  std::vector<Condition> out;
  for (const auto& [p, e] : entries_) out.push_back(p);
  return out;
}

std::optional<Derivation> member_bounded(const Condition& p, const Gamma& gamma, const GroundModel& g,
                                         const GenerationBounds& b, GenerationOptions options) {
  if (static_cast<int>(p.universe().size()) > b.size_cap) return std::nullopt;
  for (int x : p.universe())
    if (std::find(b.universe.begin(), b.universe.end(), x) == b.universe.end()) return std::nullopt;
  for (Color c : p.colors())
    if (c >= b.color_cap) return std::nullopt;
  return generate(gamma, g, b, options).derivation(p);
}

}  // namespace idcalc
