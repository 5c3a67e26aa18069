#include "idcalc/identity.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

#include "idcalc/errors.hpp"

namespace idcalc {

namespace {

std::string bits_string(const Bits& bits) {
  std::string s = "<";
  for (auto b : bits) s += static_cast<char>('0' + b);
  return s + ">";
}

std::string pair_string(const TreeDomain& dom, LeafPair p) {
  std::ostringstream os;
  const auto& x = dom.leaf(p.a);
  const auto& y = dom.leaf(p.b);
  os << "{" << bits_string(x.bits) << x.tail << "," << bits_string(y.bits) << y.tail << "}";
  return os.str();
}

}  // namespace

bool Node::is_proper_prefix_of(const Bits& other) const {
  return bits.size() < other.size() && std::equal(bits.begin(), bits.end(), other.begin());
}

Node meet(const Leaf& x, const Leaf& y) {
  if (x == y) throw InputError("meet of a leaf with itself");
  if (x.bits.size() != y.bits.size()) throw InputError("meet of leaves from different domains");
  Node n;
  for (std::size_t i = 0; i < x.bits.size() && x.bits[i] == y.bits[i]; ++i) n.bits.push_back(x.bits[i]);
  return n;
}

TreeDomain::TreeDomain(int ell, int m) : ell_(ell), m_(m) {
  if (ell < 0 || m < 0) throw InputError("domain parameters must be non-negative");
  if (ell > 15 || (static_cast<long long>(m) << ell) > kMaxLeaves)
    throw ResourceError("domain dom_{" + std::to_string(ell) + "," + std::to_string(m) + "} too large");
  const int n = m << ell;
  leaves_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Leaf leaf;
    const int code = i / m;
    leaf.bits.resize(static_cast<std::size_t>(ell));
    for (int j = 0; j < ell; ++j) leaf.bits[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((code >> (ell - 1 - j)) & 1);
    leaf.tail = i % m;
    leaves_.push_back(std::move(leaf));
  }
}

TreeDomain make_domain(int ell, int m) { return TreeDomain(ell, m); }

int TreeDomain::index_of(const Leaf& leaf) const {
  if (static_cast<int>(leaf.bits.size()) != ell_ || leaf.tail < 0 || leaf.tail >= m_)
    throw InputError("leaf does not belong to dom_{" + std::to_string(ell_) + "," + std::to_string(m_) + "}");
  int code = 0;
  for (auto b : leaf.bits) {
    if (b > 1) throw InputError("leaf bit outside {0,1}");
    code = code * 2 + b;
  }
  return code * m_ + leaf.tail;
}

int TreeDomain::pair_index(LeafPair p) const {
  const int n = size();
  if (p.a < 0 || p.b >= n || p.a >= p.b) throw InputError("invalid leaf pair");
  return p.a * (2 * n - p.a - 1) / 2 + (p.b - p.a - 1);
}

LeafPair TreeDomain::pair_at(int index) const {
  const int n = size();
  int a = 0;
  while (index >= n - a - 1) {
    index -= n - a - 1;
    ++a;
  }
  return {a, a + 1 + index};
}

std::vector<LeafPair> TreeDomain::pairs() const {
  std::vector<LeafPair> out;
  out.reserve(static_cast<std::size_t>(pair_count()));
  for (int a = 0; a < size(); ++a)
    for (int b = a + 1; b < size(); ++b) out.emplace_back(a, b);
  return out;
}

Node TreeDomain::meet(int a, int b) const {
  if (a == b) throw InputError("meet of a leaf with itself");
  return idcalc::meet(leaf(a), leaf(b));
}

Identity Identity::from_labels(TreeDomain domain, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != domain.pair_count()) throw InputError("label count differs from pair count");
  std::map<int, Block> grouped;
  std::vector<Block> blocks;
  for (int i = 0; i < domain.pair_count(); ++i) grouped[labels[static_cast<std::size_t>(i)]].push_back(domain.pair_at(i));
  for (auto& [label, block] : grouped)
    if (block.size() > 1) blocks.push_back(std::move(block));
  return from_blocks(std::move(domain), std::move(blocks));
}

Identity Identity::from_blocks(TreeDomain domain, std::vector<Block> blocks) {
  Identity s;
  const int n = domain.size();
  std::vector<int> owner(static_cast<std::size_t>(domain.pair_count()), -1);
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    for (const auto& p : blocks[bi]) {
      if (p.a == p.b) throw InputError("pair joins a leaf with itself");
      if (p.a < 0 || p.b >= n) throw InputError("pair refers to a leaf outside the domain");
      auto& slot = owner[static_cast<std::size_t>(domain.pair_index(p))];
      if (slot != -1) throw InputError("pair " + pair_string(domain, p) + " appears in more than one place");
      slot = static_cast<int>(bi);
    }
  }
  std::vector<Block> classes;
  for (auto& b : blocks) {
    if (b.empty()) continue;
    std::sort(b.begin(), b.end());
    classes.push_back(std::move(b));
  }
  for (int i = 0; i < domain.pair_count(); ++i)
    if (owner[static_cast<std::size_t>(i)] == -1) classes.push_back(Block{domain.pair_at(i)});
  std::sort(classes.begin(), classes.end(), [](const Block& x, const Block& y) { return x.front() < y.front(); });

  s.class_of_.assign(static_cast<std::size_t>(domain.pair_count()), -1);
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (const auto& p : classes[c]) s.class_of_[static_cast<std::size_t>(domain.pair_index(p))] = static_cast<int>(c);
  s.domain_ = std::move(domain);
  s.classes_ = std::move(classes);
  return s;
}

Identity Identity::discrete(TreeDomain domain) { return from_blocks(std::move(domain), {}); }

std::vector<Block> Identity::nontrivial_classes() const {
  std::vector<Block> out;
  for (const auto& b : classes_)
    if (b.size() > 1) out.push_back(b);
  return out;
}

std::vector<LeafPair> Identity::nontrivial_pairs() const {
  std::vector<LeafPair> out;
  for (const auto& b : classes_)
    if (b.size() > 1) out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool Identity::operator==(const Identity& o) const { return domain_ == o.domain_ && classes_ == o.classes_; }

bool Identity::operator<(const Identity& o) const {
  return std::forward_as_tuple(domain_.ell(), domain_.m(), classes_) < std::forward_as_tuple(o.domain_.ell(), o.domain_.m(), o.classes_);
}

std::string to_string(IdentityKind kind) {
  switch (kind) {
    case IdentityKind::ID1: return "ID1";
    case IdentityKind::ID2: return "ID2";
    case IdentityKind::IDstar: return "IDstar";
    case IdentityKind::invalid: return "invalid";
  }
  return "invalid";
}

namespace {

// Clause (b) of niceness, read universally: for every nu in ^ell 2 and every
// choice of rho_i above (nu|i)^<1-nu(i)>, at least two leaves above nu are
// joined to every rho_i by a non-singleton class.
bool branching_holds(const Identity& s) {
  const auto& dom = s.domain();
  const int ell = dom.ell();
  const int m = dom.m();
  for (int code = 0; code < (1 << ell); ++code) {
    // leaves above nu are the indices code*m .. code*m+m-1
    std::vector<std::vector<int>> choices(static_cast<std::size_t>(ell));
    for (int i = 0; i < ell; ++i) {
      const int bit = (code >> (ell - 1 - i)) & 1;
      // codes sharing the first i bits with nu and differing at bit i
      const int high = (code >> (ell - i)) << (ell - i);
      const int flipped = high | ((1 - bit) << (ell - 1 - i));
      const int span = 1 << (ell - 1 - i);
      for (int c = flipped; c < flipped + span; ++c)
        for (int t = 0; t < m; ++t) choices[static_cast<std::size_t>(i)].push_back(c * m + t);
    }
    if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); })) continue;
    std::vector<std::size_t> pick(static_cast<std::size_t>(ell), 0);
    while (true) {
      int count = 0;
      for (int t = 0; t < m; ++t) {
        const int eta = code * m + t;
        bool ok = true;
        for (int i = 0; i < ell && ok; ++i) {
          const int rho = choices[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
          ok = !s.is_singleton(LeafPair(rho, eta));
        }
        if (ok) ++count;
      }
      if (count < 2) return false;
      int i = ell - 1;
      while (i >= 0 && ++pick[static_cast<std::size_t>(i)] == choices[static_cast<std::size_t>(i)].size()) {
        pick[static_cast<std::size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }
  return true;
}

std::vector<Violation> meet_violations(const Identity& s) {
  std::vector<Violation> out;
  const auto& dom = s.domain();
  for (const auto& block : s.classes()) {
    if (block.size() < 2) continue;
    const Node first = dom.meet(block.front());
    for (std::size_t i = 1; i < block.size(); ++i) {
      const Node other = dom.meet(block[i]);
      if (other != first) {
        out.push_back({"ID1", "pairs " + pair_string(dom, block.front()) + " and " + pair_string(dom, block[i]) +
                                  " meet at " + bits_string(first.bits) + " vs " + bits_string(other.bits)});
      }
    }
  }
  return out;
}

}  // namespace

ValidationReport validate_identity(const Identity& s) {
  ValidationReport report;
  report.violations = meet_violations(s);
  if (!report.violations.empty()) {
    report.verdict = IdentityKind::invalid;
    return report;
  }
  report.verdict = IdentityKind::ID1;

  const auto& dom = s.domain();
  std::map<Node, int> per_node;
  for (const auto& block : s.classes())
    if (block.size() > 1) ++per_node[dom.meet(block.front())];
  bool id2 = true;
  for (const auto& [node, count] : per_node) {
    if (count > 1) {
      id2 = false;
      report.unmet.push_back({"ID2", std::to_string(count) + " non-singleton classes at node " + bits_string(node.bits)});
    }
  }
  if (!id2) return report;
  report.verdict = IdentityKind::ID2;

  const auto nice = niceness(s, 0);
  if (!nice.branching) report.unmet.push_back({"nice(b)", "branching condition fails"});
  if (!nice.has_cycle) report.unmet.push_back({"nice(d)", "graph H[e] is acyclic"});
  if (nice.nice()) report.verdict = IdentityKind::IDstar;
  return report;
}

Restriction restrict_identity(const Identity& s, const Node& nu) {
  const auto& dom = s.domain();
  if (static_cast<int>(nu.length()) >= dom.ell())
    throw InputError("restriction node must be shorter than ell = " + std::to_string(dom.ell()));
  for (auto b : nu.bits)
    if (b > 1) throw InputError("node bit outside {0,1}");
  Restriction r;
  for (int i = 0; i < dom.size(); ++i)
    if (nu.is_proper_prefix_of(dom.leaf(i).bits)) r.subdomain.push_back(i);
  std::map<int, Block> by_class;
  for (const auto& p : dom.pairs())
    if (dom.meet(p) == nu) by_class[s.class_of(p)].push_back(p);
  for (auto& [c, block] : by_class) r.blocks.push_back(std::move(block));
  std::sort(r.blocks.begin(), r.blocks.end(), [](const Block& x, const Block& y) { return x.front() < y.front(); });
  for (const auto& b : r.blocks)
    if (b.size() > 1) {
      r.distinguished = b;
      break;
    }
  if (r.distinguished.empty() && !r.blocks.empty()) r.distinguished = r.blocks.front();
  return r;
}

std::vector<std::vector<int>> IdentityGraph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(order));
  for (const auto& e : edges) {
    adj[static_cast<std::size_t>(e.a)].push_back(e.b);
    adj[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  return adj;
}

IdentityGraph identity_graph(const Identity& s) {
  IdentityGraph g;
  g.order = s.domain().size();
  g.edges = s.nontrivial_pairs();
  return g;
}

std::optional<int> girth(const IdentityGraph& g) {
  const auto adj = g.adjacency();
  int best = std::numeric_limits<int>::max();
  std::vector<int> dist(static_cast<std::size_t>(g.order));
  std::vector<int> parent(static_cast<std::size_t>(g.order));
  for (int src = 0; src < g.order; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(src)] = 0;
    parent[static_cast<std::size_t>(src)] = -1;
    std::queue<int> q;
    q.push(src);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      if (2 * dist[static_cast<std::size_t>(u)] + 1 >= best) break;
      for (int w : adj[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(w)] == -1) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(w)] = u;
          q.push(w);
        } else if (parent[static_cast<std::size_t>(u)] != w) {
          best = std::min(best, dist[static_cast<std::size_t>(u)] + dist[static_cast<std::size_t>(w)] + 1);
        }
      }
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::nullopt;
  return best;
}

NicenessReport niceness(const Identity& s, int k) {
  NicenessReport r;
  r.meets_agree = meet_violations(s).empty();
  r.branching = branching_holds(s);
  r.girth = girth(identity_graph(s));
  r.has_cycle = r.girth.has_value();
  r.no_short_cycle = !r.girth || *r.girth > k;
  return r;
}

bool is_k_nice(const Identity& s, int k) { return niceness(s, k).nice(); }

Identity star_identity(int n) {
  if (n <= 0) throw InputError("star identity needs n >= 1");
  TreeDomain dom(n - 1, 2);
  std::map<Node, Block> by_meet;
  for (const auto& p : dom.pairs()) by_meet[dom.meet(p)].push_back(p);
  std::vector<Block> blocks;
  for (auto& [node, block] : by_meet) blocks.push_back(std::move(block));
  return Identity::from_blocks(std::move(dom), std::move(blocks));
}

std::optional<std::vector<int>> embed_identity(const Identity& s, const Identity& t) {
  const int ns = s.domain().size();
  const int nt = t.domain().size();
  if (ns > nt) return std::nullopt;

  // image_class[c] = t-class that s-class c is mapped into, -1 while open
  std::vector<int> image_class(s.classes().size(), -1);
  std::vector<int> h(static_cast<std::size_t>(ns), -1);
  std::vector<char> used(static_cast<std::size_t>(nt), 0);

  auto place = [&](auto&& self, int leaf) -> bool {
    if (leaf == ns) return true;
    for (int target = 0; target < nt; ++target) {
      if (used[static_cast<std::size_t>(target)]) continue;
      h[static_cast<std::size_t>(leaf)] = target;
      std::vector<int> opened;
      bool ok = true;
      for (int prev = 0; prev < leaf && ok; ++prev) {
        const int sc = s.class_of(LeafPair(prev, leaf));
        if (s.classes()[static_cast<std::size_t>(sc)].size() == 1) continue;
        const int tc = t.class_of(LeafPair(h[static_cast<std::size_t>(prev)], target));
        auto& slot = image_class[static_cast<std::size_t>(sc)];
        if (slot == -1) {
          slot = tc;
          opened.push_back(sc);
        } else if (slot != tc) {
          ok = false;
        }
      }
      if (ok) {
        used[static_cast<std::size_t>(target)] = 1;
        if (self(self, leaf + 1)) return true;
        used[static_cast<std::size_t>(target)] = 0;
      }
      for (int sc : opened) image_class[static_cast<std::size_t>(sc)] = -1;
    }
    h[static_cast<std::size_t>(leaf)] = -1;
    return false;
  };
  if (!place(place, 0)) return std::nullopt;
  return h;
}

}  // namespace idcalc
