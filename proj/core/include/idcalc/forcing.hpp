#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "idcalc/coloring.hpp"
#include "idcalc/ground.hpp"
#include "idcalc/identity.hpp"

namespace idcalc {

/// A finite partial coloring (u, c).
using Condition = PairColoring;
using Gamma = std::vector<Identity>;

/// sup(range) + 1, with n of the empty condition equal to 0.
Color n_of(const Condition& p);
Condition empty_condition();
bool in_gamma(const Gamma& gamma, const Identity& s);

Condition restrict(const Condition& p, const PointSet& u);
bool leq(const Condition& q, const Condition& p);

/// Adds alpha; each new pair {b, g} (b < g) is colored n(p) + (i+j)^2 + i
/// with i, j the number of points of the new universe below b and g.
Condition extend_point(const Condition& p, int alpha);

/// Union of two conditions; pairs inside neither part get fresh colors from
/// max(n(p1), n(p2)) with the same rank pattern as extend_point. With
/// `strict`, the closure of the overlap must stay inside u1 ∩ u2.
Condition free_amalgamate(const Condition& p1, const Condition& p2, const GroundModel& g, bool strict = false);

/// Index of a side set: sorted leaves, of size 0 (the empty set), 1 or 2.
using SideKey = std::vector<int>;
using Sides = std::map<SideKey, PointSet>;

/// The keys Y+ an identity's side system must provide.
std::vector<SideKey> side_keys(const Identity& s);

/// Amalgamation over an identity; `family` lists p_y in the order of
/// s.nontrivial_pairs(). Throws InputError for s outside gamma or an index
/// mismatch, ClauseViolation naming (d)-(g), IncompatibleError when the
/// family has no common upper bound.
Condition identity_amalgamate(const Identity& s, const std::vector<Condition>& family, const Sides& sides,
                              const Gamma& gamma, const GroundModel& g);

struct Case0Witness {
  std::optional<Condition> parent;  ///< absent only for the stage-0 empty condition
  bool operator==(const Case0Witness&) const = default;
};
struct Case1Witness {
  Condition parent;
  int alpha = 0;
  bool operator==(const Case1Witness&) const = default;
};
struct Case2Witness {
  Condition left;
  Condition right;
  bool operator==(const Case2Witness&) const = default;
};
struct Case3Witness {
  Identity s;
  std::vector<Condition> family;
  Sides sides;
  bool operator==(const Case3Witness&) const = default;
};
using CaseWitness = std::variant<Case0Witness, Case1Witness, Case2Witness, Case3Witness>;

int case_of(const CaseWitness& w);
/// Sub-conditions a witness refers to, in child order.
std::vector<Condition> referenced_conditions(const CaseWitness& w);

struct Derivation {
  int stage = 0;
  CaseWitness witness;
  std::vector<Derivation> children;
};

struct ClauseResult {
  std::string clause;
  bool ok = true;
  std::string detail;
};

struct CaseReport {
  int case_index = 0;
  std::vector<ClauseResult> clauses;
  bool passed() const;
};

using MembershipOracle = std::function<bool(const Condition&)>;

/// Checks every clause of the witness's case against p. `lower` decides
/// membership of referenced sub-conditions; by default it accepts all.
CaseReport verify_case(const Condition& p, const CaseWitness& w, const Gamma& gamma, const GroundModel& g,
                       const MembershipOracle& lower = {}, bool strict = false);

/// Recursive check with stage discipline: case = stage mod 4, children at
/// strictly lower stages, one child per referenced sub-condition.
bool verify_derivation(const Condition& p, const Derivation& d, const Gamma& gamma, const GroundModel& g,
                       bool strict = false);

struct GenerationBounds {
  std::vector<int> universe;  ///< allowed points
  int color_cap = 0;          ///< colors are < color_cap
  int size_cap = 0;           ///< |u| <= size_cap
  int depth_cap = 0;          ///< stages 0..depth_cap
};

struct GenerationOptions {
  bool strict = false;
  long long candidate_cap = 5'000'000;
};

class ConditionUniverse {
 public:
  bool contains(const Condition& p) const;
  std::optional<int> stage_of(const Condition& p) const;
  std::optional<Derivation> derivation(const Condition& p) const;

  /// First appearances per stage, each sorted.
  const std::vector<std::vector<Condition>>& by_stage() const { return by_stage_; }
  std::vector<Condition> conditions() const;
  std::size_t size() const { return entries_.size(); }
  const GenerationBounds& bounds() const { return bounds_; }
  /// Stages actually run; generation stops once four stages in a row add nothing.
  int stages_run() const { return stages_run_; }
  bool saturated() const { return saturated_; }

 private:
  friend ConditionUniverse generate(const Gamma&, const GroundModel&, const GenerationBounds&, GenerationOptions);
  struct Entry {
    int stage;
    CaseWitness witness;
  };
  std::map<Condition, Entry> entries_;
  std::vector<std::vector<Condition>> by_stage_;
  GenerationBounds bounds_;
  int stages_run_ = 0;
  bool saturated_ = false;
};

/// Applies Cases 0-3 stage by stage inside the bounds. Throws ResourceError
/// when the candidate space exceeds options.candidate_cap and InputError for
/// points outside the ground.
ConditionUniverse generate(const Gamma& gamma, const GroundModel& g, const GenerationBounds& b,
                           GenerationOptions options = {});

/// A derivation when p appears in generate(gamma, g, b). Absence only means
/// absence within the bounds.
std::optional<Derivation> member_bounded(const Condition& p, const Gamma& gamma, const GroundModel& g,
                                         const GenerationBounds& b, GenerationOptions options = {});

}  // namespace idcalc
