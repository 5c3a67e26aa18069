#include "idcalc/coloring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "idcalc/errors.hpp"
#include "idcalc/partitions.hpp"

namespace idcalc {

PairColoring::PairColoring(std::vector<int> universe, std::vector<Color> colors)
    : universe_(std::move(universe)), colors_(std::move(colors)) {
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (universe_[i] < 0) throw InputError("universe points must be non-negative");
    if (i > 0 && universe_[i - 1] >= universe_[i]) throw InputError("universe must be strictly increasing");
  }
  const std::size_t n = universe_.size();
  if (colors_.size() != n * (n - (n > 0 ? 1 : 0)) / 2) throw InputError("coloring must cover every pair exactly once");
  for (Color c : colors_)
    if (c < 0) throw InputError("colors must be non-negative");
}

int PairColoring::position(int point) const {
  auto it = std::lower_bound(universe_.begin(), universe_.end(), point);
  if (it == universe_.end() || *it != point) return -1;
  return static_cast<int>(it - universe_.begin());
}

Color PairColoring::color(int x, int y) const {
  const int i = position(x);
  const int j = position(y);
  if (i < 0 || j < 0 || i == j) throw InputError("pair is not a pair of distinct universe points");
  return color_at(i, j);
}

bool PairColoring::operator<(const PairColoring& o) const {
  if (universe_ != o.universe_) return universe_ < o.universe_;
  return colors_ < o.colors_;
}

SetColoring::SetColoring(std::vector<int> universe, int cap, std::vector<Color> colors_by_mask)
    : universe_(std::move(universe)), cap_(cap), colors_(std::move(colors_by_mask)) {
  if (static_cast<int>(universe_.size()) > kMaxUniverse) throw ResourceError("set coloring universe too large");
  if (cap_ < 0) throw InputError("set coloring cap must be non-negative");
  for (std::size_t i = 1; i < universe_.size(); ++i)
    if (universe_[i - 1] >= universe_[i]) throw InputError("universe must be strictly increasing");
  if (colors_.size() != (std::size_t{1} << universe_.size())) throw InputError("need one color slot per subset");
  for (std::size_t b = 0; b < colors_.size(); ++b)
    if (__builtin_popcountll(b) <= cap_ && colors_[b] < 0) throw InputError("every subset up to the cap needs a color");
}

Color SetColoring::color(std::uint32_t mask) const {
  if (mask >= colors_.size() || __builtin_popcount(mask) > cap_) throw InputError("subset outside the colored range");
  return colors_[mask];
}

namespace {

// Backtracking embedding of an identity into a raw pair coloring on n
// points. Leaves are placed in index order; each non-singleton class fixes
// its color at the first completed pair and later pairs must match it.
class Embedder {
 public:
  Embedder(const Identity& s, int n, const Color* colors, bool ordered)
      : s_(s), n_(n), colors_(colors), ordered_(ordered), leaves_(s.domain().size()) {
    nontrivial_.resize(s.classes().size());
    for (std::size_t c = 0; c < s.classes().size(); ++c) nontrivial_[c] = s.classes()[c].size() > 1;
    h_.assign(static_cast<std::size_t>(leaves_), -1);
    used_.assign(static_cast<std::size_t>(n_), 0);
    slot_.assign(s.classes().size(), -1);
    slot_set_.assign(s.classes().size(), 0);
  }

  bool run() {
    if (leaves_ > n_) return false;
    return place(0);
  }

  const std::vector<int>& mapping() const { return h_; }

 private:
  Color color(int i, int j) const { return colors_[PairColoring::pair_slot(n_, i, j)]; }

  bool place(int leaf) {
    if (leaf == leaves_) return true;
    const int start = (ordered_ && leaf > 0) ? h_[static_cast<std::size_t>(leaf) - 1] + 1 : 0;
    const int stop = ordered_ ? n_ - (leaves_ - leaf - 1) : n_;
    for (int target = start; target < stop; ++target) {
      if (used_[static_cast<std::size_t>(target)]) continue;
      bool ok = true;
      std::vector<std::size_t> opened;
      for (int prev = 0; prev < leaf && ok; ++prev) {
        const auto c = static_cast<std::size_t>(s_.class_of(LeafPair(prev, leaf)));
        if (!nontrivial_[c]) continue;
        const Color col = color(h_[static_cast<std::size_t>(prev)], target);
        if (!slot_set_[c]) {
          slot_set_[c] = 1;
          slot_[c] = col;
          opened.push_back(c);
        } else if (slot_[c] != col) {
          ok = false;
        }
      }
      if (ok) {
        h_[static_cast<std::size_t>(leaf)] = target;
        used_[static_cast<std::size_t>(target)] = 1;
        if (place(leaf + 1)) return true;
        used_[static_cast<std::size_t>(target)] = 0;
        h_[static_cast<std::size_t>(leaf)] = -1;
      }
      for (auto c : opened) slot_set_[c] = 0;
    }
    return false;
  }

  const Identity& s_;
  int n_;
  const Color* colors_;
  bool ordered_;
  int leaves_;
  std::vector<char> nontrivial_;
  std::vector<int> h_;
  std::vector<char> used_;
  std::vector<Color> slot_;
  std::vector<char> slot_set_;
};

double canonical_coloring_count(int pairs, int mu) {
  // sum_{j <= mu} S(pairs, j) via the Stirling recurrence in doubles
  if (pairs == 0) return 1.0;
  std::vector<double> row(static_cast<std::size_t>(mu) + 1, 0.0);
  row[0] = 1.0;
  for (int p = 1; p <= pairs; ++p) {
    for (int j = std::min(p, mu); j >= 1; --j) row[static_cast<std::size_t>(j)] = j * row[static_cast<std::size_t>(j)] + row[static_cast<std::size_t>(j) - 1];
    row[0] = 0.0;
  }
  double total = 0.0;
  for (int j = 1; j <= mu; ++j) total += row[static_cast<std::size_t>(j)];
  return total;
}

}  // namespace

std::optional<EmbeddingWitness> realizes(const PairColoring& col, const Identity& s, bool ordered) {
  Embedder e(s, col.size(), col.colors().data(), ordered);
  if (!e.run()) return std::nullopt;
  EmbeddingWitness w;
  w.ordered = ordered;
  for (int pos : e.mapping()) w.mapping.push_back(col.universe()[static_cast<std::size_t>(pos)]);
  return w;
}

std::vector<Identity> id2_of(const PairColoring& col, int ell_max, int m_max, int pair_cap) {
  const int n = col.size();
  std::set<Identity> found;
  for (int ell = 0; ell <= ell_max; ++ell) {
    for (int m = 0; m <= m_max; ++m) {
      if ((static_cast<long long>(m) << ell) > n) continue;
      TreeDomain dom(ell, m);
      if (dom.pair_count() > pair_cap) throw ResourceError("domain exceeds the pair cap in id2_of");
      const int d = dom.size();
      double injections = 1.0;
      for (int i = 0; i < d; ++i) injections *= n - i;
      if (injections > 1e7) throw ResourceError("too many injections in id2_of");

      // Every identity realized through h refines the kernel of col o h.
      std::set<std::vector<int>> kernels;
      std::vector<int> h(static_cast<std::size_t>(d));
      std::vector<char> used(static_cast<std::size_t>(n), 0);
      std::vector<int> raw(static_cast<std::size_t>(dom.pair_count()));
      auto inject = [&](auto&& self, int leaf) -> void {
        if (leaf == d) {
          std::map<Color, int> ids;
          for (int p = 0; p < dom.pair_count(); ++p) {
            const auto pr = dom.pair_at(p);
            const Color c = col.color_at(h[static_cast<std::size_t>(pr.a)], h[static_cast<std::size_t>(pr.b)]);
            raw[static_cast<std::size_t>(p)] = ids.emplace(c, static_cast<int>(ids.size())).first->second;
          }
          kernels.insert(normalize_labels(raw));
          return;
        }
        for (int t = 0; t < n; ++t) {
          if (used[static_cast<std::size_t>(t)]) continue;
          used[static_cast<std::size_t>(t)] = 1;
          h[static_cast<std::size_t>(leaf)] = t;
          self(self, leaf + 1);
          used[static_cast<std::size_t>(t)] = 0;
        }
      };
      inject(inject, 0);

      std::set<std::vector<int>> labellings;
      for (const auto& k : kernels) for_each_refinement(k, [&](const std::vector<int>& l) { labellings.insert(l); });
      for (const auto& l : labellings) found.insert(Identity::from_labels(dom, l));
    }
  }
  return {found.begin(), found.end()};
}

ArrowResult arrow_check(int n, int mu, const Identity& s, ArrowOptions options) {
  if (n < 1 || mu < 1) throw InputError("arrow_check needs n >= 1 and mu >= 1");
  const int pairs = n * (n - 1) / 2;
  const double total = canonical_coloring_count(pairs, mu);
  if (total > options.coloring_cap)
    throw ResourceError("arrow_check would examine about " + std::to_string(static_cast<long long>(total)) +
                        " canonical colorings, above the cap");

  ArrowResult result;
  result.stats.symmetry_classes = static_cast<long long>(std::llround(total));

  // Split the space by the growth-string prefix over the first pairs; tasks
  // are in lexicographic order so the least refuting task holds the least
  // refuting coloring.
  const int depth = std::min(pairs, 5);
  std::vector<std::vector<int>> prefixes;
  if (pairs == 0) {
    prefixes.emplace_back();
  } else {
    for_each_growth_string(depth, mu, [&](const std::vector<int>& rgs) {
      prefixes.push_back(rgs);
      return true;
    });
  }

  struct TaskResult {
    long long examined = 0;
    std::optional<std::vector<Color>> refutation;
  };
  std::vector<TaskResult> results(prefixes.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{prefixes.size()};

  auto worker = [&] {
    std::vector<Color> colors(static_cast<std::size_t>(pairs));
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= prefixes.size()) return;
      if (task > best.load()) continue;
      const auto& prefix = prefixes[task];
      int pmax = -1;
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        colors[i] = prefix[i];
        pmax = std::max(pmax, prefix[i]);
      }
      auto& out = results[task];
      auto extend = [&](auto&& self, int pos, int cur_max) -> bool {
        if (pos == pairs) {
          ++out.examined;
          Embedder e(s, n, colors.data(), false);
          if (!e.run()) {
            out.refutation = colors;
            return false;
          }
          return true;
        }
        const int cap = std::min(cur_max + 1, mu - 1);
        for (int c = 0; c <= cap; ++c) {
          colors[static_cast<std::size_t>(pos)] = c;
          if (!self(self, pos + 1, std::max(cur_max, c))) return false;
          if ((pos & 3) == 0 && task > best.load()) return false;
        }
        return true;
      };
      if (!extend(extend, static_cast<int>(prefix.size()), pmax)) {
        if (out.refutation) {
          std::size_t cur = best.load();
          while (task < cur && !best.compare_exchange_weak(cur, task)) {
          }
        }
      }
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const std::size_t winner = best.load();
  for (std::size_t t = 0; t < prefixes.size() && t <= winner; ++t) result.stats.colorings_examined += results[t].examined;
  if (winner < prefixes.size()) {
    std::vector<int> universe(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) universe[static_cast<std::size_t>(i)] = i;
    result.verdict = false;
    result.witness = PairColoring(std::move(universe), *results[winner].refutation);
  } else {
    result.verdict = true;
  }
  return result;
}

Color node_rank(const Bits& node, int depth) {
  Color rank = static_cast<Color>(node.size());
  for (std::size_t i = 0; i < node.size(); ++i)
    if (node[i] == 1) rank += (Color{1} << (depth - static_cast<int>(i))) - 1;
  return rank;
}

PairColoring meet_coloring(const std::vector<std::string>& codes) {
  std::vector<Bits> bits;
  for (const auto& code : codes) {
    if (!bits.empty() && code.size() != bits.front().size()) throw InputError("codes must have equal length");
    Bits b;
    for (char ch : code) {
      if (ch != '0' && ch != '1') throw InputError("codes must be binary strings");
      b.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    bits.push_back(std::move(b));
  }
  if (!bits.empty() && bits.front().size() > 60) throw InputError("codes longer than 60 bits");
  for (std::size_t i = 0; i < bits.size(); ++i)
    for (std::size_t j = i + 1; j < bits.size(); ++j)
      if (bits[i] == bits[j]) throw InputError("duplicate code " + codes[i]);
  const int depth = bits.empty() ? 0 : static_cast<int>(bits.front().size());
  std::vector<int> universe(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) universe[i] = static_cast<int>(i);
  return PairColoring::from_function(universe, [&](int i, int j) {
    const auto& x = bits[static_cast<std::size_t>(i)];
    const auto& y = bits[static_cast<std::size_t>(j)];
    Bits common;
    for (std::size_t k = 0; k < x.size() && x[k] == y[k]; ++k) common.push_back(x[k]);
    return node_rank(common, depth);
  });
}

std::vector<GeneralIdentity> id_of_set_coloring(const SetColoring& col, int size_max) {
  if (size_max > col.cap()) throw ResourceError("size_max exceeds the set coloring cap");
  if (size_max > 6) throw ResourceError("size_max above the supported bound 6");
  const int n = col.size();
  std::set<GeneralIdentity> found;
  for (int d = 0; d <= size_max && d <= n; ++d) {
    std::vector<int> base(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) base[static_cast<std::size_t>(i)] = i;
    const std::size_t subsets = std::size_t{1} << d;
    std::set<std::vector<int>> kernels;
    std::vector<int> h(static_cast<std::size_t>(d));
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    auto inject = [&](auto&& self, int i) -> void {
      if (i == d) {
        std::map<std::pair<int, Color>, int> ids;
        std::vector<int> raw(subsets);
        for (std::size_t b = 0; b < subsets; ++b) {
          std::uint32_t image = 0;
          for (int k = 0; k < d; ++k)
            if ((b >> k) & 1) image |= 1U << h[static_cast<std::size_t>(k)];
          const auto key = std::make_pair(__builtin_popcountll(b), col.color(image));
          raw[b] = ids.emplace(key, static_cast<int>(ids.size())).first->second;
        }
        kernels.insert(normalize_labels(raw));
        return;
      }
      for (int t = 0; t < n; ++t) {
        if (used[static_cast<std::size_t>(t)]) continue;
        used[static_cast<std::size_t>(t)] = 1;
        h[static_cast<std::size_t>(i)] = t;
        self(self, i + 1);
        used[static_cast<std::size_t>(t)] = 0;
      }
    };
    inject(inject, 0);
    std::set<std::vector<int>> labellings;
    for (const auto& k : kernels) for_each_refinement(k, [&](const std::vector<int>& l) { labellings.insert(l); });
    for (const auto& l : labellings) found.insert(GeneralIdentity::from_labels(base, l));
  }
  return {found.begin(), found.end()};
}

bool respects_simple_collapse(const PairColoring& f, const SetColoring& c) {
  if (f.universe() != c.universe()) throw InputError("pair and set colorings must share a universe");
  const int n = f.size();
  for (int k = 2; k <= std::min(c.cap(), n); ++k) {
    std::map<std::vector<Color>, Color> seen;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      if (__builtin_popcount(mask) != k) continue;
      std::vector<int> pos;
      for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1) pos.push_back(i);
      std::vector<Color> pattern;
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) pattern.push_back(f.color_at(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]));
      auto [it, inserted] = seen.emplace(std::move(pattern), c.color(mask));
      if (!inserted && it->second != c.color(mask)) return false;
    }
  }
  return true;
}

}  // namespace idcalc
