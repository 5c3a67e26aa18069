#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace idcalc {

using Bits = std::vector<std::uint8_t>;

/// A node of the binary tree: a bit string of length at most ell.
struct Node {
  Bits bits;

  std::size_t length() const { return bits.size(); }
  /// Proper initial segment test (this strictly below `other`).
  bool is_proper_prefix_of(const Bits& other) const;

  auto operator<=>(const Node&) const = default;
};

/// A leaf of dom_{ell,m}: ell bits followed by a tail coordinate below m.
struct Leaf {
  Bits bits;
  int tail = 0;

  auto operator<=>(const Leaf&) const = default;
};

/// Unordered pair of distinct leaves, stored as domain indices with a < b.
struct LeafPair {
  int a = 0;
  int b = 0;

  LeafPair() = default;
  LeafPair(int x, int y) : a(x < y ? x : y), b(x < y ? y : x) {}

  auto operator<=>(const LeafPair&) const = default;
};

using Block = std::vector<LeafPair>;

/// Longest common initial bit segment of two distinct leaves. Tails never
/// contribute. Throws InputError on equal leaves.
Node meet(const Leaf& x, const Leaf& y);

/// dom_{ell,m} with its leaves in lexicographic order. Leaf index i encodes
/// bits as the binary number i / m and the tail as i % m.
class TreeDomain {
 public:
  static constexpr int kMaxLeaves = 1 << 16;

  TreeDomain() = default;
  TreeDomain(int ell, int m);

  int ell() const { return ell_; }
  int m() const { return m_; }
  int size() const { return static_cast<int>(leaves_.size()); }
  const std::vector<Leaf>& leaves() const { return leaves_; }
  const Leaf& leaf(int i) const { return leaves_.at(static_cast<std::size_t>(i)); }
  /// Throws InputError when the leaf does not belong to the domain.
  int index_of(const Leaf& leaf) const;

  int pair_count() const { return size() * (size() - 1) / 2; }
  int pair_index(LeafPair p) const;
  LeafPair pair_at(int index) const;
  std::vector<LeafPair> pairs() const;

  /// Meet of two distinct leaves given by index.
  Node meet(int a, int b) const;
  Node meet(LeafPair p) const { return meet(p.a, p.b); }

  bool operator==(const TreeDomain& o) const { return ell_ == o.ell_ && m_ == o.m_; }

 private:
  int ell_ = 0;
  int m_ = 0;
  std::vector<Leaf> leaves_;
};

TreeDomain make_domain(int ell, int m);

/// A 2-identity (dom_{ell,m}, e). The partition is stored in canonical form:
/// every pair of distinct leaves belongs to exactly one block, pairs inside a
/// block are sorted, blocks are ordered by their least pair.
class Identity {
 public:
  Identity() = default;

  /// Builds an identity from its non-singleton blocks; pairs not mentioned
  /// become singleton blocks. Throws InputError if a pair is repeated, refers
  /// to a leaf outside the domain, or joins a leaf with itself.
  static Identity from_blocks(TreeDomain domain, std::vector<Block> blocks);
  /// Builds an identity from one class label per pair (in pair_index order).
  static Identity from_labels(TreeDomain domain, const std::vector<int>& labels);
  /// The equality relation: every block is a singleton.
  static Identity discrete(TreeDomain domain);

  const TreeDomain& domain() const { return domain_; }
  const std::vector<Block>& classes() const { return classes_; }
  std::vector<Block> nontrivial_classes() const;
  /// Pairs lying in non-singleton classes, sorted (the index set Y).
  std::vector<LeafPair> nontrivial_pairs() const;

  int class_of(LeafPair p) const { return class_of_[static_cast<std::size_t>(domain_.pair_index(p))]; }
  const std::vector<int>& class_labels() const { return class_of_; }
  bool related(LeafPair p, LeafPair q) const { return class_of(p) == class_of(q); }
  bool is_singleton(LeafPair p) const { return classes_[static_cast<std::size_t>(class_of(p))].size() == 1; }

  bool operator==(const Identity& o) const;
  bool operator<(const Identity& o) const;

 private:
  TreeDomain domain_;
  std::vector<Block> classes_;
  std::vector<int> class_of_;
};

enum class IdentityKind { ID1, ID2, IDstar, invalid };

std::string to_string(IdentityKind kind);

struct Violation {
  std::string clause;
  std::string detail;
};

/// `violations` holds the ID1 failures and is nonempty iff the verdict is
/// invalid. `unmet` explains why a valid identity stopped short of IDstar.
struct ValidationReport {
  IdentityKind verdict = IdentityKind::invalid;
  std::vector<Violation> violations;
  std::vector<Violation> unmet;
};

ValidationReport validate_identity(const Identity& s);

/// The view of s below a node nu with length(nu) < ell.
struct Restriction {
  std::vector<int> subdomain;  ///< leaves extending nu
  std::vector<Block> blocks;   ///< e_<nu>: classes restricted to pairs meeting at nu
  Block distinguished;         ///< e_[nu]
};

Restriction restrict_identity(const Identity& s, const Node& nu);

struct IdentityGraph {
  int order = 0;
  std::vector<LeafPair> edges;

  std::vector<std::vector<int>> adjacency() const;
};

IdentityGraph identity_graph(const Identity& s);

/// Length of a shortest cycle; empty for forests.
std::optional<int> girth(const IdentityGraph& g);

struct NicenessReport {
  bool meets_agree = false;    ///< (a) ID1
  bool branching = false;      ///< (b) two-witness condition, universal reading
  bool no_short_cycle = false; ///< (c) no cycle of length <= k
  bool has_cycle = false;      ///< (d)
  std::optional<int> girth;

  bool nice() const { return meets_agree && branching && no_short_cycle && has_cycle; }
};

NicenessReport niceness(const Identity& s, int k);
bool is_k_nice(const Identity& s, int k);

enum class IdentityFilter { ID1, ID2, IDstar, KNice };

struct EnumerationFilter {
  IdentityFilter kind = IdentityFilter::ID1;
  int k = 0;  ///< only for KNice
};

inline constexpr int kDefaultPairCap = 12;

/// All identities on dom_{ell,m} passing the filter, canonical and sorted.
/// Throws ResourceError when dom_{ell,m} has more than `pair_cap` pairs.
std::vector<Identity> enumerate_identities(int ell, int m, EnumerationFilter filter,
                                           int pair_cap = kDefaultPairCap);

/// Smallest m <= m_max with a k-nice identity in ID2_{ell,m}, plus the
/// lexicographically least witness at that m.
std::optional<std::pair<int, Identity>> find_k_nice(int ell, int k, int m_max);

/// e*_n on dom_{n-1,2} (identified with the full binary level of length n):
/// pairs are related iff their meets coincide. Throws InputError for n == 0.
Identity star_identity(int n);

/// Injective leaf map h from s into t such that pairs related in s go to
/// pairs related in t. Result is indexed by s-leaf.
std::optional<std::vector<int>> embed_identity(const Identity& s, const Identity& t);

/// A general identity (a, e): e partitions all subsets of the base, relating
/// only sets of equal size. Subsets are bitmasks over base positions.
class GeneralIdentity {
 public:
  using Mask = std::uint32_t;
  static constexpr int kMaxBase = 16;

  GeneralIdentity() = default;

  /// Labels are per mask (size 2^|base|); relabelled canonically.
  /// Throws InputError if labels relate sets of different size.
  static GeneralIdentity from_labels(std::vector<int> base, const std::vector<int>& labels);
  /// Blocks of masks; sets not mentioned are singletons.
  static GeneralIdentity from_blocks(std::vector<int> base, const std::vector<std::vector<Mask>>& blocks);
  /// Every set related only to itself.
  static GeneralIdentity discrete(std::vector<int> base);
  /// All equal-size sets related.
  static GeneralIdentity by_cardinality(std::vector<int> base);

  const std::vector<int>& base() const { return base_; }
  int size() const { return static_cast<int>(base_.size()); }
  int class_of(Mask b) const { return labels_[b]; }
  bool related(Mask b, Mask c) const { return labels_[b] == labels_[c]; }
  const std::vector<int>& labels() const { return labels_; }
  std::vector<std::vector<Mask>> blocks() const;

  bool operator==(const GeneralIdentity& o) const { return base_ == o.base_ && labels_ == o.labels_; }
  bool operator<(const GeneralIdentity& o) const;

 private:
  std::vector<int> base_;
  std::vector<int> labels_;
};

/// The unique order-preserving bijection from b onto c (|b| == |c|) applied
/// to a subset of b.
GeneralIdentity::Mask order_transfer(GeneralIdentity::Mask sub, GeneralIdentity::Mask from,
                                     GeneralIdentity::Mask to);

/// e' relating b, c iff |b| = |c| and every sub-pattern b' of b with
/// |b'| <= k is e-related to its order-preserving image in c.
GeneralIdentity k_simple_coarsening(const GeneralIdentity& g, int k);

}  // namespace idcalc
