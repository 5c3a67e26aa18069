#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idcalc/identity.hpp"

namespace idcalc {

/// Sorted, duplicate-free set of universe points.
using PointSet = std::vector<int>;

/// A finite universe {0..N-1} with graded closure operators cl(0..levels()).
class GroundModel {
 public:
  static constexpr int kLevels = 2;

  virtual ~GroundModel() = default;

  virtual int size() const = 0;
  int levels() const { return kLevels; }

  /// Throws InputError for a level above levels() or a point outside the universe.
  PointSet closure(int level, const PointSet& a) const;

  /// Ordered section A_params for parameter tuples of arity 0, 2 or 4. The
  /// default has only the arity-0 section (the universe in natural order).
  virtual std::vector<int> section(const std::vector<int>& params) const;

 protected:
  virtual PointSet closure_impl(int level, const PointSet& a) const = 0;
};

class TrivialGround final : public GroundModel {
 public:
  explicit TrivialGround(int n);
  int size() const override { return n_; }

 protected:
  PointSet closure_impl(int, const PointSet& a) const override { return a; }

 private:
  int n_;
};

struct GroundThresholds {
  int n0 = 0;
  int n1 = 0;
  int n2 = 0;
  int at(int level) const { return level == 0 ? n0 : level == 1 ? n1 : n2; }
  bool operator==(const GroundThresholds&) const = default;
};

/// Explicit ordering tables of a graded ground.
struct GroundTables {
  /// r1[b][g]: A_{b,g} listed in <*_b order.
  std::vector<std::vector<std::vector<int>>> r1;
  /// r2[b][b1]: the ordering <*_{b,b1} of {x : x <*_b b1}; empty when b1 >= b.
  std::vector<std::vector<std::vector<int>>> r2;
  /// filtration[b]: increments of B_{b,1} ⊆ B_{b,2} ⊆ ... covering {0..b-1}.
  std::vector<std::vector<PointSet>> filtration;
  /// subfiltration[b][i]: increments of the closed sub-filtration of B_{b,i+1}.
  std::vector<std::vector<std::vector<PointSet>>> subfiltration;
  bool operator==(const GroundTables&) const = default;
};

/// Finite stand-in for an explicitly^2 suitable model with thresholds
/// N0 < N1 < N2 playing the roles of mu, mu^+, mu^++.
class GradedGround final : public GroundModel {
 public:
  static constexpr int kMaxN = 64;

  /// Seeded construction. Throws InputError unless N0 < N1 < N2 <= max(N, 2)
  /// and 1 <= N <= kMaxN.
  static GradedGround build(int n, GroundThresholds t, std::uint64_t seed);

  /// Rebuilds a ground from stored tables; shape is validated, clauses are not.
  static GradedGround from_tables(int n, GroundThresholds t, std::uint64_t seed, GroundTables tables);

  int size() const override { return n_; }
  const GroundThresholds& thresholds() const { return t_; }
  std::uint64_t seed() const { return seed_; }
  const GroundTables& tables() const { return tables_; }

  std::vector<int> section(const std::vector<int>& params) const override;

 protected:
  PointSet closure_impl(int level, const PointSet& a) const override;

 private:
  struct Rule {
    std::uint64_t params;
    std::uint64_t members;
  };

  GradedGround(int n, GroundThresholds t, std::uint64_t seed) : n_(n), t_(t), seed_(seed) {}
  void add_rules_for(int beta);
  void add_rule(std::uint64_t params, std::uint64_t members);
  std::uint64_t close_mask(int level, std::uint64_t a) const;

  int n_ = 0;
  GroundThresholds t_;
  std::uint64_t seed_ = 0;
  GroundTables tables_;
  std::vector<Rule> rules_[kLevels + 1];
};

std::uint64_t to_mask(const PointSet& s);
PointSet from_mask(std::uint64_t m);

struct GroundViolation {
  std::string clause;  ///< "delta", "epsilon" or "filtration"
  std::string detail;
};

struct GroundCheckOptions {
  int exhaustive_limit = 16;  ///< (epsilon) is sampled above this N
  long long samples = 20000;
  std::uint64_t seed = 1;
};

struct GroundReport {
  std::vector<GroundViolation> violations;
  long long tuples_checked = 0;
  bool sampled = false;
  bool ok() const { return violations.empty(); }
};

/// Independent re-check of the section law, small-section closure and
/// filtration coherence against the stored tables.
GroundReport check_suitable_clauses(const GradedGround& g, GroundCheckOptions options = {});

struct SuitabilityWitness {
  std::vector<int> eta;             ///< leaf indices eta_0..eta_{n-1}
  std::vector<Bits> nu;             ///< nu_0..nu_n
  std::vector<std::vector<int>> z;  ///< live sets Z_0..Z_n; the last one is Z
  int level = 0;                    ///< closure level used for the final clause
};

struct SuitabilityOptions {
  int n_star = -1;  ///< -1 means ell of the identity's domain
  int level = 0;
};

/// Greedy alternating search. Returns nullopt when the domain has no pairs,
/// a live set runs empty, or the final closure clause fails. Throws
/// InputError for a non-injective or out-of-range assignment.
std::optional<SuitabilityWitness> find_suitability_witness(const GroundModel& g, const std::vector<int>& assignment,
                                                           const Identity& s, SuitabilityOptions options = {});

/// Mechanical check of clauses (alpha)-(epsilon); violations are listed.
std::vector<Violation> suitability_violations(const GroundModel& g, const std::vector<int>& assignment,
                                              const Identity& s, const SuitabilityWitness& w);

bool verify_suitability_witness(const GroundModel& g, const std::vector<int>& assignment, const Identity& s,
                                const SuitabilityWitness& w);

struct ExchangeLevel {
  int level = 0;
  bool precondition = false;  ///< both betas in cl(level+1, alpha)
  bool holds = false;         ///< some beta_i in cl(level, alpha + beta_{1-i})
};

struct ExchangeReport {
  std::vector<ExchangeLevel> levels;
};

ExchangeReport exchange_diagnostic(const GroundModel& g, const PointSet& alpha, int beta0, int beta1);

struct ExchangeSweepLevel {
  int level = 0;
  long long triples = 0;
  long long precondition_met = 0;
  long long holds = 0;
};

/// Every alpha of size <= max_alpha and every pair beta0 < beta1.
std::vector<ExchangeSweepLevel> exchange_sweep(const GroundModel& g, int max_alpha);

}  // namespace idcalc
