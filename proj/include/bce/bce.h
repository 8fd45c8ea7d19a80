// Copyright 2026 The bce-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BCE_BCE_H_
#define BCE_BCE_H_

#include <optional>
#include <string>
#include <vector>

#include "bce/game.h"
#include "bce/lp.h"
#include "bce/mediator.h"

namespace bce {

// A mixture over feedback rules. Under a free prior each entry also names
// the stage-one node it applies to, and weights are joint probabilities of
// (rule, initial node).
struct MixtureEntry {
  FeedbackRule rule;
  Rational weight;
  int initial_node = -1;
};

struct BCEMixture {
  std::vector<MixtureEntry> entries;
};

enum class SolveMode {
  // Variables are realization plans of the mediator (one per node and
  // recommendation history). Polynomial in the tree size.
  kPlan,
  // Variables are weights on enumerated (or user-supplied) feedback rules.
  kRules,
};

enum class ObedienceEncoding {
  // One row per (player, reduced pure deviation), coefficients computed by
  // forward evaluation.
  kPureRows,
  // Backward-induction dual: a free variable per player key bounds the best
  // continuation value. Equivalent to kPureRows, linear in the key count.
  kDual,
};

struct SolverOptions {
  SolveMode mode = SolveMode::kPlan;
  ObedienceEncoding encoding = ObedienceEncoding::kDual;
  RuleDomain domain = RuleDomain::kFull;
  int64_t cap_rules = kDefaultRuleCap;
  int64_t cap_histories = kDefaultHistoryCap;
  int64_t cap_deviations = 1000000;
  // Restricted enumeration: only these rules are used (implies kRules).
  std::optional<std::vector<FeedbackRule>> restricted_rules;
  bool free_prior = false;
  // Players whose obedience rows are included; all by default.
  uint32_t player_mask = ~0u;
  LPOptions lp;
};

struct ObedienceRow {
  int player = -1;
  int lp_row = -1;  // index into LinearProgram::inequalities
  DeviationStrategy deviation;  // pure-row encoding only
  bool trivial = false;         // every coefficient is zero
};

// Obedience polytope over mixture columns. Columns are plan variables in
// kPlan mode and rules (or rule, initial node pairs) in kRules mode; extra
// free variables of the dual encoding follow the columns.
class ObedienceLP {
 public:
  ObedienceLP(const MediatorSpace& space, const SolverOptions& options);

  const MediatorSpace& space() const { return space_; }
  const LinearProgram& lp() const { return lp_; }
  LinearProgram& mutable_lp() { return lp_; }
  int NumColumns() const { return num_columns_; }
  const std::vector<ObedienceRow>& rows() const { return rows_; }
  int NumNontrivialRows() const;
  bool restricted() const { return restricted_; }
  SolveMode mode() const { return mode_; }

  // LP row (over all LP variables) of a functional on plan variables.
  std::vector<Rational> Row(const Functional& f) const;
  // Realization plan of an LP solution.
  Plan PlanOf(const std::vector<Rational>& x) const;
  // Mixture of an LP solution; plans are decomposed into reduced rules.
  BCEMixture MixtureOf(const std::vector<Rational>& x) const;

 private:
  void AddSimplexRows();
  void AddDualRows(uint32_t mask);
  void AddPureRows(int64_t cap, uint32_t mask);

  const MediatorSpace& space_;
  SolveMode mode_;
  bool restricted_ = false;
  LinearProgram lp_;
  int num_columns_ = 0;
  std::vector<FeedbackRule> rules_;
  std::vector<int> rule_initial_;
  std::vector<std::vector<int>> var_columns_;  // plan var -> rule columns
  std::vector<ObedienceRow> rows_;
};

// Sum of weight * y_f over the entries.
Plan PlanOfMixture(const MediatorSpace& space, const BCEMixture& mixture);

// Greedy decomposition of a plan into reduced rules: repeatedly pick the
// lowest positive recommendation at every node along the rule's own codes
// and remove the largest multiple of that rule. Exact; the number of
// entries is at most the plan's support size.
BCEMixture DecomposePlan(const MediatorSpace& space, const Plan& y);

// Obedient outcome distribution over terminals (indexed by terminal id).
std::vector<Rational> OutcomeDistributionOf(const MediatorSpace& space,
                                            const BCEMixture& mixture);

struct MembershipResult {
  bool member = false;
  bool one_sided = false;  // restricted rules: infeasible is inconclusive
  std::optional<BCEMixture> witness;
  std::optional<Plan> plan;
  // When not a member: the player whose obedience cannot be met together
  // with the target, if a single player suffices.
  std::vector<int> blocking_players;
};

// Target indexed by terminal id; must be nonnegative and sum to one.
MembershipResult MembershipTest(const MediatorSpace& space,
                                const std::vector<Rational>& target,
                                const SolverOptions& options = {});

struct DirectionResult {
  Rational value;
  std::vector<Rational> payoff;  // expected payoff of every player
  BCEMixture witness;
  Plan plan;
};

DirectionResult OptimizeDirection(const MediatorSpace& space,
                                  const std::vector<Rational>& direction,
                                  const SolverOptions& options = {});
// Reuses an assembled LP.
DirectionResult OptimizeDirection(const ObedienceLP& olp,
                                  const std::vector<Rational>& direction,
                                  const LPOptions& lp_options = {});

using Point2 = std::pair<Rational, Rational>;

// Exact vertices of the projection of the BCE polytope on the two players'
// payoffs, counterclockwise from the lexicographically smallest vertex. Starts
// from `num_directions` fixed directions and refines with the outward
// normals of hull edges until no edge moves.
std::vector<Point2> PayoffPolytope2P(const MediatorSpace& space,
                                     int num_directions = 8,
                                     const SolverOptions& options = {});

// Hull of a finite point set, counterclockwise from the lexicographically
// smallest point, collinear points dropped.
std::vector<Point2> ConvexHull(std::vector<Point2> points);

// Integer directions: axes and diagonals first, then further primitive
// directions by increasing norm.
std::vector<std::pair<int, int>> InitialDirections(int count);

struct BCEViolation {
  int player = -1;
  Rational gain;  // best deviation value minus obedient value
  DeviationStrategy deviation;
  std::string description;
};

// Empty iff the mixture is a BCE. Reports the most profitable deviation of
// every player who has one. Throws InputError if weights are negative or do
// not sum to one.
std::vector<BCEViolation> VerifyBce(const MediatorSpace& space,
                                    const BCEMixture& mixture);
std::vector<BCEViolation> VerifyPlan(const MediatorSpace& space,
                                     const Plan& y);

// Choices of a deviation that differ from the recommendation, at keys
// reachable under the deviation.
std::string DescribeDeviation(const MediatorSpace& space,
                              const DeviationStrategy& dev);
// Same, restricted to the subtree of keys below `key`.
std::string DescribeDeviationFrom(const MediatorSpace& space,
                                  const DeviationStrategy& dev, int key);

// "t<stage> [private history] recs <own recommendations>".
std::string KeyLabel(const MediatorSpace& space, int player, int key);

std::string DescribeMixture(const MediatorSpace& space,
                            const BCEMixture& mixture);

// Two players, two stages, player 1 moves only at stage 1 and player 2 only
// at stage 2, no signals, messages or states. For such games BCE
// distributions are characterized by closed-form inequalities; returns the
// violated ones as normalized strings such as "mu(B,R) >= mu(T,R)".
// nullopt if the game does not have this structure.
std::optional<std::vector<std::string>> LeaderFollowerViolations(
    const GameTree& tree, const std::vector<Rational>& target);

}  // namespace bce

#endif  // BCE_BCE_H_
