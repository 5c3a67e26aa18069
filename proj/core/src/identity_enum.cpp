#include <algorithm>
#include <map>

#include "idcalc/errors.hpp"
#include "idcalc/identity.hpp"
#include "idcalc/partitions.hpp"

namespace idcalc {

namespace {

constexpr long long kCandidateCap = 1LL << 24;

// Pair indices grouped by meet node, nodes in lexicographic order.
std::vector<std::vector<int>> pairs_by_meet(const TreeDomain& dom) {
  std::map<Node, std::vector<int>> groups;
  for (int i = 0; i < dom.pair_count(); ++i) groups[dom.meet(dom.pair_at(i))].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [node, idx] : groups) out.push_back(std::move(idx));
  return out;
}

// Visits every ID1 labelling: an independent set partition of the pairs at
// each meet node.
template <class Visitor>
void for_each_id1(const TreeDomain& dom, Visitor&& visit) {
  const auto groups = pairs_by_meet(dom);
  std::vector<int> labels(static_cast<std::size_t>(dom.pair_count()), 0);
  const int stride = dom.pair_count() + 1;
  auto recurse = [&](auto&& self, std::size_t g) -> void {
    if (g == groups.size()) {
      visit(labels);
      return;
    }
    const auto& idx = groups[g];
    for_each_growth_string(static_cast<int>(idx.size()), static_cast<int>(idx.size()), [&](const std::vector<int>& rgs) {
      for (std::size_t j = 0; j < idx.size(); ++j) labels[static_cast<std::size_t>(idx[j])] = static_cast<int>(g) * stride + rgs[j];
      self(self, g + 1);
      return true;
    });
  };
  recurse(recurse, 0);
}

// Visits every ID2 labelling: at each node either no non-singleton class or
// exactly one, given by a subset of at least two of the pairs there.
template <class Visitor>
void for_each_id2(const TreeDomain& dom, Visitor&& visit) {
  const auto groups = pairs_by_meet(dom);
  long long total = 1;
  for (const auto& g : groups) {
    if (g.size() >= 40) throw ResourceError("ID2 search space too large");
    total = std::min(kCandidateCap + 1, total * (1LL << g.size()));
  }
  if (total > kCandidateCap) throw ResourceError("ID2 search space exceeds the candidate cap");

  const int n = dom.pair_count();
  std::vector<int> labels(static_cast<std::size_t>(n));
  auto recurse = [&](auto&& self, std::size_t g) -> void {
    if (g == groups.size()) {
      visit(labels);
      return;
    }
    const auto& idx = groups[g];
    const std::uint64_t limit = 1ULL << idx.size();
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
      const int bits = __builtin_popcountll(mask);
      if (bits == 1) continue;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto p = static_cast<std::size_t>(idx[j]);
        labels[p] = ((mask >> j) & 1) ? n + static_cast<int>(g) : static_cast<int>(p);
      }
      self(self, g + 1);
    }
  };
  recurse(recurse, 0);
}

bool passes(const Identity& s, EnumerationFilter filter) {
  switch (filter.kind) {
    case IdentityFilter::ID1:
    case IdentityFilter::ID2:
      return true;
    case IdentityFilter::IDstar:
      return validate_identity(s).verdict == IdentityKind::IDstar;
    case IdentityFilter::KNice:
      return is_k_nice(s, filter.k);
  }
  return false;
}

}  // namespace

std::vector<Identity> enumerate_identities(int ell, int m, EnumerationFilter filter, int pair_cap) {
  TreeDomain dom(ell, m);
  if (dom.pair_count() > pair_cap)
    throw ResourceError("dom_{" + std::to_string(ell) + "," + std::to_string(m) + "} has " +
                        std::to_string(dom.pair_count()) + " pairs, above the enumeration cap " +
                        std::to_string(pair_cap));
  std::vector<Identity> out;
  auto collect = [&](const std::vector<int>& labels) {
    auto s = Identity::from_labels(dom, labels);
    if (passes(s, filter)) out.push_back(std::move(s));
  };
  if (filter.kind == IdentityFilter::ID1 || filter.kind == IdentityFilter::KNice)
    for_each_id1(dom, collect);
  else
    for_each_id2(dom, collect);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::pair<int, Identity>> find_k_nice(int ell, int k, int m_max) {
  for (int m = 0; m <= m_max; ++m) {
    TreeDomain dom(ell, m);
    std::optional<Identity> best;
    for_each_id2(dom, [&](const std::vector<int>& labels) {
      auto s = Identity::from_labels(dom, labels);
      if (is_k_nice(s, k) && (!best || s < *best)) best = std::move(s);
    });
    if (best) return std::make_pair(m, std::move(*best));
  }
  return std::nullopt;
}

}  // namespace idcalc
