#include "idcalc/ground.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <random>
#include <unordered_map>

#include "idcalc/errors.hpp"

namespace idcalc {

std::uint64_t to_mask(const PointSet& s) {
  std::uint64_t m = 0;
  for (int x : s) m |= std::uint64_t{1} << x;
  return m;
}

PointSet from_mask(std::uint64_t m) {
  PointSet out;
  while (m != 0) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

namespace {

std::uint64_t below(int x) { return x <= 0 ? 0 : x >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << x) - 1; }

// Draws are taken straight from the engine so that grounds are identical
// across standard library implementations.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(below(static_cast<int>(i)))]);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

PointSet GroundModel::closure(int level, const PointSet& a) const {
  if (level < 0 || level > levels()) throw InputError("closure level " + std::to_string(level) + " out of range");
  PointSet s = a;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (int x : s)
    if (x < 0 || x >= size()) throw InputError("point " + std::to_string(x) + " outside the universe");
  return closure_impl(level, s);
}

std::vector<int> GroundModel::section(const std::vector<int>& params) const {
  if (!params.empty()) return {};
  std::vector<int> all(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) all[static_cast<std::size_t>(i)] = i;
  return all;
}

TrivialGround::TrivialGround(int n) : n_(n) {
  if (n < 0) throw InputError("ground size must be non-negative");
}

// ---------------------------------------------------------------------------
// Graded ground

std::vector<int> GradedGround::section(const std::vector<int>& params) const {
  for (int p : params)
    if (p < 0 || p >= n_) throw InputError("section parameter outside the universe");
  if (params.empty()) return GroundModel::section(params);
  if (params.size() == 2) return tables_.r1[static_cast<std::size_t>(params[0])][static_cast<std::size_t>(params[1])];
  if (params.size() != 4) throw InputError("sections take 0, 2 or 4 parameters");
  const auto& outer = tables_.r1[static_cast<std::size_t>(params[0])][static_cast<std::size_t>(params[1])];
  const int b1 = params[2];
  const int g1 = params[3];
  if (std::find(outer.begin(), outer.end(), b1) == outer.end() ||
      std::find(outer.begin(), outer.end(), g1) == outer.end())
    return {};
  const std::uint64_t inside = to_mask(PointSet(outer.begin(), outer.end())) & below(g1);
  std::vector<int> out;
  for (int x : tables_.r2[static_cast<std::size_t>(params[0])][static_cast<std::size_t>(b1)])
    if ((inside >> x) & 1) out.push_back(x);
  return out;
}

void GradedGround::add_rule(std::uint64_t params, std::uint64_t members) {
  if (members == 0) return;
  const int sz = std::popcount(members);
  for (int level = 0; level <= kLevels; ++level)
    if (sz < t_.at(level)) rules_[level].push_back({params, members});
}

// Rules for every tuple whose largest parameter is beta. Arity-4 tuples
// with b1 or g1 outside A_{b,g} have empty sections and add nothing.
void GradedGround::add_rules_for(int beta) {
  const auto& tb = tables_;
  for (int other = 0; other <= beta; ++other) {
    for (int flip = 0; flip < (other == beta ? 1 : 2); ++flip) {
      const int b = flip ? other : beta;
      const int g = flip ? beta : other;
      const auto ub = static_cast<std::size_t>(b);
      const std::uint64_t pg = (std::uint64_t{1} << b) | (std::uint64_t{1} << g);
      const auto& outer = tb.r1[ub][static_cast<std::size_t>(g)];
      const std::uint64_t outer_mask = to_mask(PointSet(outer.begin(), outer.end()));
      add_rule(pg, outer_mask);
      for (int b1 : outer) {
        const auto& r2 = tb.r2[ub][static_cast<std::size_t>(b1)];
        const std::uint64_t lower = to_mask(PointSet(r2.begin(), r2.end())) & outer_mask;
        for (int g1 : outer) add_rule(pg | (std::uint64_t{1} << b1) | (std::uint64_t{1} << g1), lower & below(g1));
      }
    }
  }
}

std::uint64_t GradedGround::close_mask(int level, std::uint64_t a) const {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : rules_[level])
      if ((r.params & ~a) == 0 && (r.members & ~a) != 0) {
        a |= r.members;
        changed = true;
      }
  }
  return a;
}

PointSet GradedGround::closure_impl(int level, const PointSet& a) const { return from_mask(close_mask(level, to_mask(a))); }

namespace {

void check_thresholds(int n, GroundThresholds t) {
  if (n < 1 || n > GradedGround::kMaxN)
    throw InputError("graded ground size must be in 1.." + std::to_string(GradedGround::kMaxN));
  if (!(0 <= t.n0 && t.n0 < t.n1 && t.n1 < t.n2 && t.n2 <= std::max(n, 2)))
    throw InputError("thresholds must satisfy 0 <= N0 < N1 < N2 <= N");
}

// Increments of a chain of closed sets covering `target`, each step adding
// 1..max(1,n0) random fresh points before closing.
std::vector<PointSet> closed_chain(std::uint64_t target, int n0, Draw& draw,
                                   const std::function<std::uint64_t(std::uint64_t)>& close) {
  std::vector<PointSet> increments;
  std::uint64_t have = 0;
  while (have != target) {
    PointSet rest = from_mask(target & ~have);
    draw.shuffle(rest);
    const int take = 1 + draw.below(std::max(1, n0));
    std::uint64_t next = have;
    for (int i = 0; i < take && i < static_cast<int>(rest.size()); ++i) next |= std::uint64_t{1} << rest[static_cast<std::size_t>(i)];
    next = close(next) & target;
    increments.push_back(from_mask(next & ~have));
    have = next;
  }
  return increments;
}

}  // namespace

GradedGround GradedGround::build(int n, GroundThresholds t, std::uint64_t seed) {
  check_thresholds(n, t);
  GradedGround g(n, t, seed);
  Draw draw(seed);
  const auto un = static_cast<std::size_t>(n);
  auto& tb = g.tables_;
  tb.r1.assign(un, std::vector<std::vector<int>>(un));
  tb.r2.assign(un, std::vector<std::vector<int>>(un));
  tb.filtration.assign(un, {});
  tb.subfiltration.assign(un, {});
  g.add_rule(0, below(n));
  auto close0 = [&g](std::uint64_t m) { return g.close_mask(0, m); };

  for (int beta = 0; beta < n; ++beta) {
    const auto ub = static_cast<std::size_t>(beta);
    auto& blocks = tb.filtration[ub];
    blocks = closed_chain(below(beta), t.n0, draw, close0);

    std::vector<int> order;  // <*_beta
    for (auto block : blocks) {
      draw.shuffle(block);
      order.insert(order.end(), block.begin(), block.end());
    }
    for (int gamma = 0; gamma < n; ++gamma)
      for (int x : order)
        if (x < gamma) tb.r1[ub][static_cast<std::size_t>(gamma)].push_back(x);

    std::uint64_t cumulative = 0;
    for (const auto& block : blocks) {
      cumulative |= to_mask(block);
      auto sub = closed_chain(cumulative, t.n0, draw, close0);
      std::vector<int> rank(un, 0);
      for (std::size_t e = 0; e < sub.size(); ++e)
        for (int x : sub[e]) rank[static_cast<std::size_t>(x)] = static_cast<int>(e);
      for (int gamma : block) {
        std::vector<int> initial(order.begin(), std::find(order.begin(), order.end(), gamma));
        draw.shuffle(initial);
        std::stable_sort(initial.begin(), initial.end(), [&](int a, int b) {
          return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
        });
        tb.r2[ub][static_cast<std::size_t>(gamma)] = std::move(initial);
      }
      tb.subfiltration[ub].push_back(std::move(sub));
    }
    g.add_rules_for(beta);
  }
  return g;
}

GradedGround GradedGround::from_tables(int n, GroundThresholds t, std::uint64_t seed, GroundTables tables) {
  check_thresholds(n, t);
  const auto un = static_cast<std::size_t>(n);
  auto in_range = [n](const std::vector<int>& v) {
    return std::all_of(v.begin(), v.end(), [n](int x) { return x >= 0 && x < n; });
  };
  if (tables.r1.size() != un || tables.r2.size() != un || tables.filtration.size() != un ||
      tables.subfiltration.size() != un)
    throw InputError("ground tables must have one row per point");
  for (std::size_t b = 0; b < un; ++b) {
    if (tables.r1[b].size() != un || tables.r2[b].size() != un) throw InputError("ground tables must be N x N");
    for (std::size_t c = 0; c < un; ++c)
      if (!in_range(tables.r1[b][c]) || !in_range(tables.r2[b][c])) throw InputError("table entry outside the universe");
    for (const auto& block : tables.filtration[b])
      if (!in_range(block)) throw InputError("filtration entry outside the universe");
    for (const auto& chain : tables.subfiltration[b])
      for (const auto& block : chain)
        if (!in_range(block)) throw InputError("sub-filtration entry outside the universe");
  }
  GradedGround g(n, t, seed);
  g.tables_ = std::move(tables);
  g.add_rule(0, below(n));
  for (int beta = 0; beta < n; ++beta) g.add_rules_for(beta);
  return g;
}

// ---------------------------------------------------------------------------
// Clause checker. Sections are recomputed from the raw tables and the
// closure is a plain fixpoint over parameter tuples, sharing nothing with
// the rule cache above.

namespace {

class Checker {
 public:
  Checker(const GradedGround& g, GroundCheckOptions opt) : g_(g), opt_(opt), n_(g.size()) {}

  GroundReport run() {
    collect_small_rules();
    check_delta();
    check_epsilon();
    check_filtration();
    return std::move(report_);
  }

 private:
  const std::vector<int>& r1(int b, int c) const { return g_.tables().r1[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)]; }
  const std::vector<int>& r2(int b, int b1) const { return g_.tables().r2[static_cast<std::size_t>(b)][static_cast<std::size_t>(b1)]; }
  static std::uint64_t mask_of(const std::vector<int>& v) { return to_mask(PointSet(v.begin(), v.end())); }
  static std::uint64_t bit(int x) { return std::uint64_t{1} << x; }

  void violation(std::string clause, std::string detail) {
    if (report_.violations.size() < 200) report_.violations.push_back({std::move(clause), std::move(detail)});
  }

  static std::string tuple(std::initializer_list<int> xs) {
    std::string s = "(";
    for (int x : xs) s += (s.size() > 1 ? "," : "") + std::to_string(x);
    return s + ")";
  }

  // Section of an arity-4 tuple read off the raw tables; b1, g1 in A_{b,c}.
  std::uint64_t table_section(int b, int c, int b1, int g1) const {
    return mask_of(r2(b, b1)) & mask_of(r1(b, c)) & below(g1);
  }

  void check_delta() {
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) {
        ++report_.tuples_checked;
        const auto& list = r1(b, c);
        PointSet got(list.begin(), list.end());
        std::sort(got.begin(), got.end());
        if (std::adjacent_find(got.begin(), got.end()) != got.end() || to_mask(got) != below(std::min(b, c)))
          violation("delta", "A" + tuple({b, c}) + " is not {a < " + std::to_string(b) + ", a < " + std::to_string(c) + "}");
      }
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) {
        const auto& outer = r1(b, c);
        std::uint64_t earlier = 0;  // members before outer[i] in the R1 ordering
        for (int b1 : outer) {
          const std::uint64_t lower = mask_of(r2(b, b1)) & mask_of(outer);
          for (int g1 : outer) {
            ++report_.tuples_checked;
            if ((lower & below(g1)) != (earlier & below(g1)))
              violation("delta", "A" + tuple({b, c, b1, g1}) + " breaks the section law");
          }
          earlier |= bit(b1);
        }
      }
  }

  // Parameter mask -> union of the sections smaller than N0 it unlocks.
  void collect_small_rules() {
    const int n0 = g_.thresholds().n0;
    std::unordered_map<std::uint64_t, std::uint64_t> by_params;
    auto add = [&](std::uint64_t params, std::uint64_t members) {
      if (members != 0 && std::popcount(members) < n0) by_params[params] |= members;
    };
    add(0, below(n_));
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) {
        const auto& outer = r1(b, c);
        const std::uint64_t pc = bit(b) | bit(c);
        add(pc, mask_of(outer));
        for (int b1 : outer)
          for (int g1 : outer) add(pc | bit(b1) | bit(g1), table_section(b, c, b1, g1));
      }
    rules_.assign(by_params.begin(), by_params.end());
    std::sort(rules_.begin(), rules_.end());
  }

  std::uint64_t naive_closure(std::uint64_t a) const {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [params, members] : rules_)
        if ((params & ~a) == 0 && (members & ~a) != 0) {
          a |= members;
          changed = true;
        }
    }
    return a;
  }

  void check_small(std::uint64_t params, std::uint64_t members, const std::string& label) {
    ++report_.tuples_checked;
    if (members == 0 || std::popcount(members) >= g_.thresholds().n0) return;
    auto it = memo_.find(params);
    if (it == memo_.end()) it = memo_.emplace(params, naive_closure(params)).first;
    if ((members & ~it->second) != 0) violation("epsilon", "small section A" + label + " not inside cl(0, params)");
  }

  void check_epsilon() {
    if (n_ <= opt_.exhaustive_limit) {
      check_small(0, below(n_), "()");
      for (int b = 0; b < n_; ++b)
        for (int c = 0; c < n_; ++c) {
          const auto& outer = r1(b, c);
          check_small(bit(b) | bit(c), mask_of(outer), tuple({b, c}));
          for (int b1 : outer)
            for (int g1 : outer)
              check_small(bit(b) | bit(c) | bit(b1) | bit(g1), table_section(b, c, b1, g1), tuple({b, c, b1, g1}));
        }
      return;
    }
    report_.sampled = true;
    Draw draw(opt_.seed);
    for (long long i = 0; i < opt_.samples; ++i) {
      const int b = draw.below(n_);
      const int c = draw.below(n_);
      const auto& outer = r1(b, c);
      if (outer.empty() || draw.below(2) == 0) {
        check_small(bit(b) | bit(c), mask_of(outer), tuple({b, c}));
        continue;
      }
      const int b1 = outer[static_cast<std::size_t>(draw.below(static_cast<int>(outer.size())))];
      const int g1 = outer[static_cast<std::size_t>(draw.below(static_cast<int>(outer.size())))];
      check_small(bit(b) | bit(c) | bit(b1) | bit(g1), table_section(b, c, b1, g1), tuple({b, c, b1, g1}));
    }
  }

  bool closed(const PointSet& s) const { return naive_closure(to_mask(s)) == to_mask(s); }

  void check_filtration() {
    const auto& tb = g_.tables();
    for (int b = 0; b < n_; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      const auto& order = r1(b, b);
      for (int c = 0; c < n_; ++c) {
        std::vector<int> restricted;
        for (int x : order)
          if (x < c) restricted.push_back(x);
        if (restricted != r1(b, c)) violation("filtration", "A" + tuple({b, c}) + " is not ordered by <*_" + std::to_string(b));
      }
      PointSet cumulative;
      std::size_t prefix = 0;
      for (std::size_t i = 0; i < tb.filtration[ub].size(); ++i) {
        const std::string name = "B_{" + std::to_string(b) + "," + std::to_string(i + 1) + "}";
        const auto& block = tb.filtration[ub][i];
        cumulative.insert(cumulative.end(), block.begin(), block.end());
        std::sort(cumulative.begin(), cumulative.end());
        prefix += block.size();
        PointSet head(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(prefix, order.size())));
        std::sort(head.begin(), head.end());
        if (head != cumulative) violation("filtration", name + " is not an initial segment of <*_" + std::to_string(b));
        if (!closed(cumulative)) violation("filtration", name + " is not closed");
        if (i >= tb.subfiltration[ub].size()) {
          violation("filtration", "missing sub-filtration for " + name);
          continue;
        }
        PointSet sub_cum;
        std::vector<int> rank(static_cast<std::size_t>(n_), -1);
        for (std::size_t e = 0; e < tb.subfiltration[ub][i].size(); ++e) {
          const auto& piece = tb.subfiltration[ub][i][e];
          for (int x : piece) rank[static_cast<std::size_t>(x)] = static_cast<int>(e);
          sub_cum.insert(sub_cum.end(), piece.begin(), piece.end());
          std::sort(sub_cum.begin(), sub_cum.end());
          if (!closed(sub_cum)) violation("filtration", "a sub-filtration set of " + name + " is not closed");
        }
        if (sub_cum != cumulative) violation("filtration", "sub-filtration does not cover " + name);
        for (int gamma : block) {
          const auto& lst = r2(b, gamma);
          std::vector<int> expect(order.begin(), std::find(order.begin(), order.end(), gamma));
          PointSet a(lst.begin(), lst.end()), e(expect.begin(), expect.end());
          std::sort(a.begin(), a.end());
          std::sort(e.begin(), e.end());
          const bool layered = std::is_sorted(lst.begin(), lst.end(), [&](int x, int y) {
            return rank[static_cast<std::size_t>(x)] < rank[static_cast<std::size_t>(y)];
          });
          if (a != e || !layered)
            violation("filtration", "<*_{" + std::to_string(b) + "," + std::to_string(gamma) + "} does not respect the sub-filtration");
        }
      }
      if (to_mask(cumulative) != below(b)) violation("filtration", "filtration of " + std::to_string(b) + " does not cover its predecessors");
    }
  }

  const GradedGround& g_;
  GroundCheckOptions opt_;
  int n_;
  GroundReport report_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> rules_;
  std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

}  // namespace

GroundReport check_suitable_clauses(const GradedGround& g, GroundCheckOptions options) {
  return Checker(g, options).run();
}

// ---------------------------------------------------------------------------
// Suitability witnesses

namespace {

void check_assignment(const GroundModel& g, const std::vector<int>& assignment, const Identity& s) {
  if (static_cast<int>(assignment.size()) != s.domain().size())
    throw InputError("assignment must give one point per leaf");
  std::vector<int> sorted = assignment;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InputError("assignment is not injective");
  for (int x : sorted)
    if (x < 0 || x >= g.size()) throw InputError("assignment point outside the universe");
}

bool extends(const Bits& node, const Bits& leaf) {
  return node.size() < leaf.size() + 1 && std::equal(node.begin(), node.end(), leaf.begin());
}

// Z for a given nu and earlier etas: leaves above nu adjacent to every eta.
std::vector<int> live_set(const Identity& s, const std::vector<std::vector<int>>& adj, const Bits& nu,
                          const std::vector<int>& etas) {
  std::vector<int> z;
  for (int r = 0; r < s.domain().size(); ++r) {
    if (!extends(nu, s.domain().leaf(r).bits)) continue;
    bool ok = true;
    for (int e : etas) {
      const auto& row = adj[static_cast<std::size_t>(e)];
      if (std::find(row.begin(), row.end(), r) == row.end()) {
        ok = false;
        break;
      }
    }
    if (ok) z.push_back(r);
  }
  return z;
}

int resolve_n_star(const Identity& s, int n_star) {
  const int ell = s.domain().ell();
  if (n_star < 0) return ell;
  if (n_star > ell) throw InputError("n* cannot exceed ell of the domain");
  return n_star;
}

}  // namespace

std::optional<SuitabilityWitness> find_suitability_witness(const GroundModel& g, const std::vector<int>& assignment,
                                                           const Identity& s, SuitabilityOptions options) {
  check_assignment(g, assignment, s);
  if (s.domain().pair_count() == 0) return std::nullopt;
  const int n = resolve_n_star(s, options.n_star);
  const auto adj = identity_graph(s).adjacency();
  auto alpha = [&](int leaf) { return assignment[static_cast<std::size_t>(leaf)]; };

  SuitabilityWitness w;
  w.level = options.level;
  w.nu.push_back({});
  for (int l = 0; l < n; ++l) {
    w.z.push_back(live_set(s, adj, w.nu.back(), w.eta));
    const auto& z = w.z.back();
    if (z.empty()) return std::nullopt;
    // Even steps maximize along the section ordering of the chosen points,
    // odd steps along the natural order.
    std::vector<int> ordering;
    if (l % 2 == 0 && l > 0 && l <= 4) {
      std::vector<int> params;
      for (int e : w.eta) params.push_back(alpha(e));
      ordering = g.section(params);
    }
    auto key = [&](int leaf) {
      const auto it = std::find(ordering.begin(), ordering.end(), alpha(leaf));
      if (it != ordering.end()) return std::make_pair(1, static_cast<int>(it - ordering.begin()));
      return std::make_pair(0, alpha(leaf));
    };
    const int best = *std::max_element(z.begin(), z.end(), [&](int a, int b) { return key(a) < key(b); });
    w.eta.push_back(best);
    const Bits& bits = s.domain().leaf(best).bits;
    Bits next(bits.begin(), bits.begin() + l);
    next.push_back(static_cast<std::uint8_t>(1 - bits[static_cast<std::size_t>(l)]));
    w.nu.push_back(std::move(next));
  }
  w.z.push_back(live_set(s, adj, w.nu.back(), w.eta));
  if (!suitability_violations(g, assignment, s, w).empty()) return std::nullopt;
  return w;
}

std::vector<Violation> suitability_violations(const GroundModel& g, const std::vector<int>& assignment,
                                              const Identity& s, const SuitabilityWitness& w) {
  check_assignment(g, assignment, s);
  std::vector<Violation> out;
  const auto& dom = s.domain();
  const int n = static_cast<int>(w.eta.size());
  if (n > dom.ell()) out.push_back({"alpha", "more eta's than tree levels"});
  for (int e : w.eta)
    if (e < 0 || e >= dom.size()) {
      out.push_back({"alpha", "eta " + std::to_string(e) + " is not a leaf"});
      return out;
    }
  if (static_cast<int>(w.nu.size()) != n + 1 || !w.nu[0].empty()) {
    out.push_back({"beta", "nu must start at the root and have one more entry than eta"});
    return out;
  }
  for (int l = 0; l < n && l < dom.ell(); ++l) {
    const Bits& bits = dom.leaf(w.eta[static_cast<std::size_t>(l)]).bits;
    Bits expect(bits.begin(), bits.begin() + l);
    expect.push_back(static_cast<std::uint8_t>(1 - bits[static_cast<std::size_t>(l)]));
    if (w.nu[static_cast<std::size_t>(l) + 1] != expect)
      out.push_back({"beta", "nu_" + std::to_string(l + 1) + " does not flip eta_" + std::to_string(l)});
    const Bits& nu = w.nu[static_cast<std::size_t>(l)];
    if (!(nu.size() == static_cast<std::size_t>(l) && extends(nu, bits)))
      out.push_back({"gamma", "nu_" + std::to_string(l) + " is not an initial segment of eta_" + std::to_string(l)});
  }
  if (!out.empty()) return out;
  const auto adj = identity_graph(s).adjacency();
  const auto z = live_set(s, adj, w.nu.back(), w.eta);
  if (w.z.empty() || w.z.back() != z) {
    out.push_back({"delta", "Z does not match its definition"});
    return out;
  }
  PointSet base;
  for (int e : w.eta) base.push_back(assignment[static_cast<std::size_t>(e)]);
  const PointSet cl = g.closure(w.level, base);
  for (int r : z)
    if (!std::binary_search(cl.begin(), cl.end(), assignment[static_cast<std::size_t>(r)]))
      out.push_back({"epsilon", "image of leaf " + std::to_string(r) + " lies outside the closure"});
  return out;
}

bool verify_suitability_witness(const GroundModel& g, const std::vector<int>& assignment, const Identity& s,
                                const SuitabilityWitness& w) {
  try {
    return suitability_violations(g, assignment, s, w).empty();
  } catch (const InputError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Exchange diagnostic

ExchangeReport exchange_diagnostic(const GroundModel& g, const PointSet& alpha, int beta0, int beta1) {
  ExchangeReport r;
  for (int level = 0; level < g.levels(); ++level) {
    ExchangeLevel e;
    e.level = level;
    const PointSet up = g.closure(level + 1, alpha);
    e.precondition = std::binary_search(up.begin(), up.end(), beta0) && std::binary_search(up.begin(), up.end(), beta1);
    auto with = [&](int b) {
      PointSet a = alpha;
      a.push_back(b);
      return g.closure(level, a);
    };
    const PointSet c1 = with(beta1);
    const PointSet c0 = with(beta0);
    e.holds = std::binary_search(c1.begin(), c1.end(), beta0) || std::binary_search(c0.begin(), c0.end(), beta1);
    r.levels.push_back(e);
  }
  return r;
}

std::vector<ExchangeSweepLevel> exchange_sweep(const GroundModel& g, int max_alpha) {
  if (g.size() > 24) throw ResourceError("exchange sweep is limited to grounds of at most 24 points");
  std::vector<ExchangeSweepLevel> out(static_cast<std::size_t>(g.levels()));
  for (int l = 0; l < g.levels(); ++l) out[static_cast<std::size_t>(l)].level = l;
  const int n = g.size();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (std::popcount(m) > max_alpha) continue;
    const PointSet alpha = from_mask(m);
    for (int b0 = 0; b0 < n; ++b0)
      for (int b1 = b0 + 1; b1 < n; ++b1) {
        const auto rep = exchange_diagnostic(g, alpha, b0, b1);
        for (const auto& e : rep.levels) {
          auto& agg = out[static_cast<std::size_t>(e.level)];
          ++agg.triples;
          if (e.precondition) {
            ++agg.precondition_met;
            if (e.holds) ++agg.holds;
          }
        }
      }
  }
  return out;
}

}  // namespace idcalc
