#pragma once

// Stage-by-stage generation written straight from the four creation rules,
// by testing every candidate condition against every possible witness. It
// shares only value types and ground closures with the library.

#include <algorithm>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <vector>

#include "idcalc/coloring.hpp"
#include "idcalc/ground.hpp"
#include "idcalc/identity.hpp"

namespace oracle {

using idcalc::GroundModel;
using idcalc::Identity;
using idcalc::PairColoring;

inline std::vector<int> points_of(unsigned mask, const std::vector<int>& pts) {
  std::vector<int> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if ((mask >> i) & 1u) out.push_back(pts[i]);
  return out;
}

inline PairColoring naive_restrict(const PairColoring& p, const std::vector<int>& u) {
  return PairColoring::from_function(u, [&](int x, int y) { return p.color(x, y); });
}

inline bool inside(const std::vector<int>& a, const std::vector<int>& b) {
  return std::all_of(a.begin(), a.end(), [&](int x) { return std::find(b.begin(), b.end(), x) != b.end(); });
}

inline std::vector<int> cap(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) out.push_back(x);
  return out;
}

// Every condition inside the bounds, by universe subset and color tuple.
inline std::vector<PairColoring> all_candidates(const std::vector<int>& pts, int color_cap, int size_cap) {
  std::vector<PairColoring> out;
  for (unsigned mask = 0; mask < (1u << pts.size()); ++mask) {
    const auto u = points_of(mask, pts);
    if (static_cast<int>(u.size()) > size_cap) continue;
    const int np = static_cast<int>(u.size() * (u.size() - 1) / 2);
    if (np > 0 && color_cap == 0) continue;
    std::vector<idcalc::Color> c(static_cast<std::size_t>(np), 0);
    while (true) {
      out.emplace_back(u, c);
      int i = 0;
      while (i < np && ++c[static_cast<std::size_t>(i)] == color_cap) c[static_cast<std::size_t>(i++)] = 0;
      if (i == np) break;
    }
  }
  return out;
}

// Pairs {x,y} of u whose color is shared with some other pair of u.
inline std::vector<std::pair<int, int>> repeated(const PairColoring& p) {
  const auto& u = p.universe();
  std::vector<std::pair<int, int>> prs;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j) prs.emplace_back(u[i], u[j]);
  std::vector<std::pair<int, int>> out;
  for (const auto& a : prs)
    for (const auto& b : prs)
      if (a != b && p.color(a.first, a.second) == p.color(b.first, b.second)) {
        out.push_back(a);
        break;
      }
  return out;
}

inline bool pair_in(const std::pair<int, int>& e, const std::vector<int>& w) {
  return inside({e.first, e.second}, w);
}

class NaiveGeneration {
 public:
  NaiveGeneration(std::vector<Identity> gamma, const GroundModel& g, std::vector<int> pts, int color_cap, int size_cap)
      : gamma_(std::move(gamma)), g_(g), pts_(std::move(pts)), candidates_(all_candidates(pts_, color_cap, size_cap)) {}

  // stage[p] for every condition created at stages 0..depth.
  std::map<PairColoring, int> run(int depth) {
    std::map<PairColoring, int> stage;
    for (int k = 0; k <= depth; ++k) {
      std::vector<PairColoring> fresh;
      for (const auto& p : candidates_)
        if (!stage.count(p) && certified(p, k, stage)) fresh.push_back(p);
      for (const auto& p : fresh) stage[p] = k;
    }
    return stage;
  }

 private:
  bool certified(const PairColoring& p, int k, const std::map<PairColoring, int>& earlier) const {
    auto have = [&](const PairColoring& q) { return earlier.count(q) > 0; };
    const auto& u = p.universe();
    const unsigned full = (1u << u.size()) - 1;
    switch (k % 4) {
      case 0:
        if (k == 0) return u.empty();
        for (const auto& [q, s] : earlier)
          if (inside(u, q.universe()) && naive_restrict(q, u) == p) return true;
        return false;
      case 1:
        for (int alpha : u) {
          std::vector<int> u1;
          for (int x : u)
            if (x != alpha) u1.push_back(x);
          if (!have(naive_restrict(p, u1))) continue;
          bool ok = true;
          for (const auto& e : repeated(p)) ok = ok && pair_in(e, u1);
          if (ok) return true;
        }
        return false;
      case 2:
        for (unsigned m1 = 0; m1 <= full; ++m1)
          for (unsigned m2 = 0; m2 <= full; ++m2) {
            if ((m1 | m2) != full) continue;
            const auto u1 = points_of(m1, u), u2 = points_of(m2, u);
            if (!have(naive_restrict(p, u1)) || !have(naive_restrict(p, u2))) continue;
            bool ok = true;
            for (const auto& e : repeated(p)) ok = ok && (pair_in(e, u1) || pair_in(e, u2));
            if (!ok) continue;
            if (inside(cap(g_.closure(0, cap(u1, u2)), u), u1)) return true;
          }
        return false;
      default:
        for (const auto& s : gamma_)
          if (case3(p, s, have)) return true;
        return false;
    }
  }

  // Family members are restrictions of p; side sets can be taken inside u
  // because every side clause survives intersecting all sides with u.
  bool case3(const PairColoring& p, const Identity& s, const std::function<bool(const PairColoring&)>& have) const {
    const auto& u = p.universe();
    const unsigned full = (1u << u.size()) - 1;
    const auto ys = s.nontrivial_pairs();
    const int leaves = s.domain().size();
    std::vector<unsigned> usable;
    for (unsigned m = 0; m <= full; ++m)
      if (have(naive_restrict(p, points_of(m, u)))) usable.push_back(m);
    std::vector<unsigned> w(ys.size());
    std::function<bool(std::size_t)> pick = [&](std::size_t i) -> bool {
      if (i == ys.size()) {
        unsigned all = 0;
        for (unsigned x : w) all |= x;
        if (all != full) return false;
        for (const auto& e : repeated(p)) {
          bool covered = false;
          for (unsigned x : w) covered = covered || pair_in(e, points_of(x, u));
          if (!covered) return false;
        }
        return sides_exist(ys, w, u, leaves);
      }
      for (unsigned m : usable) {
        w[i] = m;
        if (pick(i + 1)) return true;
      }
      return false;
    };
    return pick(0);
  }

  // Sides as bitmasks over u: index 0 is the empty key, 1..leaves the
  // singletons, then one per y.
  bool sides_exist(const std::vector<idcalc::LeafPair>& ys, const std::vector<unsigned>& w,
                   const std::vector<int>& u, int leaves) const {
    const unsigned full = (1u << u.size()) - 1;
    const int nkeys = 1 + leaves + static_cast<int>(ys.size());
    std::vector<std::set<int>> key(static_cast<std::size_t>(nkeys));
    for (int l = 0; l < leaves; ++l) key[static_cast<std::size_t>(1 + l)] = {l};
    for (std::size_t i = 0; i < ys.size(); ++i) key[1 + static_cast<std::size_t>(leaves) + i] = {ys[i].a, ys[i].b};
    auto index_of = [&](const std::set<int>& t) {
      for (int i = 0; i < nkeys; ++i)
        if (key[static_cast<std::size_t>(i)] == t) return i;
      return -1;
    };
    std::vector<unsigned> v(static_cast<std::size_t>(nkeys), 0);
    std::function<bool(int)> go = [&](int i) -> bool {
      if (i == nkeys) return true;
      const bool small = i <= leaves;
      for (unsigned m = 0; m <= full; ++m) {
        v[static_cast<std::size_t>(i)] = m;
        if (!small) {
          const std::size_t y = static_cast<std::size_t>(i - 1 - leaves);
          if ((w[y] & ~m) != 0) continue;  // u^{p_y} inside v_y
        }
        bool ok = true;
        for (int j = 0; j <= i && ok; ++j) {
          std::set<int> t;
          std::set_intersection(key[static_cast<std::size_t>(i)].begin(), key[static_cast<std::size_t>(i)].end(),
                                key[static_cast<std::size_t>(j)].begin(), key[static_cast<std::size_t>(j)].end(),
                                std::inserter(t, t.begin()));
          const int ts = index_of(t);
          ok = ts >= 0 && ts <= i && (v[static_cast<std::size_t>(i)] & v[static_cast<std::size_t>(j)] & ~v[static_cast<std::size_t>(ts)]) == 0;
        }
        if (ok && small) {
          const auto vt = points_of(m, u);
          const auto cl = g_.closure(0, vt);
          for (unsigned x : w) ok = ok && inside(cap(cl, points_of(x, u)), vt);
        }
        if (ok && i == leaves) {
          // every side indexed by the empty set or a singleton is now fixed
          for (std::size_t a = 0; a < ys.size() && ok; ++a)
            for (std::size_t b = a + 1; b < ys.size() && ok; ++b) {
              std::set<int> t;
              for (int l : {ys[a].a, ys[a].b})
                if (l == ys[b].a || l == ys[b].b) t.insert(l);
              const unsigned vt = v[static_cast<std::size_t>(index_of(t))];
              ok = (w[a] & vt) == (w[b] & vt);
            }
        }
        if (ok && go(i + 1)) return true;
      }
      return false;
    };
    return go(0);
  }

  std::vector<Identity> gamma_;
  const GroundModel& g_;
  std::vector<int> pts_;
  std::vector<PairColoring> candidates_;
};

}  // namespace oracle
