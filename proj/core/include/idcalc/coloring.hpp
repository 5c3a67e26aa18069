#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idcalc/identity.hpp"

namespace idcalc {

using Color = std::int64_t;

/// A total coloring of the unordered pairs of a finite set of naturals.
/// Colors are stored per pair of universe positions (i < j) in the order
/// (0,1), (0,2), ..., (1,2), ...
class PairColoring {
 public:
  PairColoring() = default;
  /// Throws InputError unless the universe is strictly increasing, non-negative,
  /// and `colors` has one non-negative entry per pair.
  PairColoring(std::vector<int> universe, std::vector<Color> colors);

  template <class F>
  static PairColoring from_function(std::vector<int> universe, F&& color_of) {
    std::vector<Color> colors;
    for (std::size_t i = 0; i < universe.size(); ++i)
      for (std::size_t j = i + 1; j < universe.size(); ++j) colors.push_back(color_of(universe[i], universe[j]));
    return PairColoring(std::move(universe), std::move(colors));
  }

  static int pair_slot(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
  }

  const std::vector<int>& universe() const { return universe_; }
  int size() const { return static_cast<int>(universe_.size()); }
  const std::vector<Color>& colors() const { return colors_; }

  /// Position of a point in the universe, or -1.
  int position(int point) const;
  bool contains(int point) const { return position(point) >= 0; }
  /// Color of the pair {x, y} of distinct universe points.
  Color color(int x, int y) const;
  Color color_at(int i, int j) const { return colors_[static_cast<std::size_t>(pair_slot(size(), i, j))]; }

  bool operator==(const PairColoring& o) const { return universe_ == o.universe_ && colors_ == o.colors_; }
  bool operator<(const PairColoring& o) const;

 private:
  std::vector<int> universe_;
  std::vector<Color> colors_;
};

/// A coloring of every subset of size at most `cap` of a finite universe.
/// Colors are indexed by bitmask over universe positions.
class SetColoring {
 public:
  static constexpr int kMaxUniverse = 20;

  SetColoring() = default;
  SetColoring(std::vector<int> universe, int cap, std::vector<Color> colors_by_mask);

  template <class F>
  static SetColoring from_function(std::vector<int> universe, int cap, F&& color_of) {
    const std::size_t subsets = std::size_t{1} << universe.size();
    std::vector<Color> colors(subsets, -1);
    for (std::size_t b = 0; b < subsets; ++b) {
      if (__builtin_popcountll(b) > cap) continue;
      std::vector<int> members;
      for (std::size_t i = 0; i < universe.size(); ++i)
        if ((b >> i) & 1) members.push_back(universe[i]);
      colors[b] = color_of(members);
    }
    return SetColoring(std::move(universe), cap, std::move(colors));
  }

  const std::vector<int>& universe() const { return universe_; }
  int size() const { return static_cast<int>(universe_.size()); }
  int cap() const { return cap_; }
  /// Color of the subset given as a mask over universe positions.
  Color color(std::uint32_t mask) const;

 private:
  std::vector<int> universe_;
  int cap_ = 0;
  std::vector<Color> colors_;
};

inline constexpr int kDefaultSetCap = 4;

struct EmbeddingWitness {
  std::vector<int> mapping;  ///< identity leaf index -> universe point
  bool ordered = false;
};

/// An injective (order-preserving when `ordered`) map of the identity's
/// leaves into the universe under which each block is monochromatic.
std::optional<EmbeddingWitness> realizes(const PairColoring& col, const Identity& s, bool ordered = false);

/// Every identity on dom_{ell,m}, ell <= ell_max, m <= m_max, realized by col.
/// Throws ResourceError when a fitting domain exceeds `pair_cap` pairs.
std::vector<Identity> id2_of(const PairColoring& col, int ell_max, int m_max, int pair_cap = kDefaultPairCap);

struct ArrowStats {
  long long colorings_examined = 0;
  long long symmetry_classes = 0;  ///< canonical colorings in the whole space
  bool vertex_symmetry_quotiented = false;
};

struct ArrowResult {
  bool verdict = false;
  std::optional<PairColoring> witness;
  ArrowStats stats;
};

struct ArrowOptions {
  int jobs = 1;
  double coloring_cap = 5e7;
};

/// Decides n -> (s)_mu over all colorings of the pairs of {0..n-1} with at
/// most mu colors, up to renaming of colors. On a false verdict the witness
/// is the lexicographically least refuting canonical coloring.
ArrowResult arrow_check(int n, int mu, const Identity& s, ArrowOptions options = {});

/// Lexicographic rank of a node among all binary strings of length <= depth.
Color node_rank(const Bits& node, int depth);

/// Colors {i,j} by the rank of the meet of codes[i] and codes[j]. Throws
/// InputError on duplicate codes, unequal lengths or non-binary characters.
PairColoring meet_coloring(const std::vector<std::string>& codes);

/// General identities on {0..n-1}, n <= size_max, realized by the set coloring.
std::vector<GeneralIdentity> id_of_set_coloring(const SetColoring& col, int size_max);

/// True iff increasing tuples with equal pair patterns under f always get the
/// same c-color, for every tuple length 2..c.cap().
bool respects_simple_collapse(const PairColoring& f, const SetColoring& c);

}  // namespace idcalc
