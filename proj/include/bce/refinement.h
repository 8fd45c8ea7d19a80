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

#ifndef BCE_REFINEMENT_H_
#define BCE_REFINEMENT_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bce/bce.h"
#include "bce/mediator.h"

namespace bce {

// ---------------------------------------------------------------------------
// Mediation ranges.

// R_{i,t}(h_i^t, a-hat_i^{t-1}) stored per player key: allowed[i][k] says
// whether the key's own current recommendation lies in the range at the
// key's private history and past own recommendations.
struct MediationRange {
  std::vector<std::vector<bool>> allowed;  // [i][key]
};

// Every recommendation allowed.
MediationRange FullRange(const MediatorSpace& space);

// allowed[i][k] = fn(i, k). Throws InputError if some image is empty.
MediationRange RangeFromFunction(
    const MediatorSpace& space,
    const std::function<bool(int player, int key)>& fn);

// Shape and nonempty images; throws InputError.
void CheckRange(const MediatorSpace& space, const MediationRange& range);

// Own recommendations of the key and of all its ancestors are allowed.
bool KeyInRange(const MediatorSpace& space, const MediationRange& range,
                int player, int key);
// Every player's key at the plan variable is in range: (h^t, omega^t,
// a-hat^t) is a prefix of some history in H(R).
bool VarInRange(const MediatorSpace& space, const MediationRange& range,
                int var);

// Reduced feedback rules consistent with the ranges, in odometer order over
// nodes. Throws CapExceeded beyond `cap`.
std::vector<FeedbackRule> EnumerateRangeRules(const MediatorSpace& space,
                                              const MediationRange& range,
                                              int64_t cap = kDefaultRuleCap);

// ---------------------------------------------------------------------------
// Recommendation kernels.

// Behavioral recommendation kernels mu_t(a-hat_t | h^t, omega^t, a-hat^{t-1})
// indexed by plan variable: prob[v] is the probability of the last
// recommendation of v given v's node and earlier recommendations. defined[v]
// is false when that conditioning event has probability zero.
struct RecommendationKernels {
  std::vector<Rational> prob;
  std::vector<bool> defined;
};

// Conditional frequencies of the rules of the mixture consistent with each
// conditioning history.
RecommendationKernels KernelsFromMixture(const MediatorSpace& space,
                                         const BCEMixture& mixture);
// Same; throws InputError if a rule of the mixture leaves the ranges.
RecommendationKernels KernelsFromMixture(const MediatorSpace& space,
                                         const BCEMixture& mixture,
                                         const MediationRange& range);
RecommendationKernels KernelsFromPlan(const MediatorSpace& space,
                                      const Plan& y);

// Forward evaluation when the mediator draws from the kernels. Atoms with
// equal (terminal, code) are merged; positive probabilities only. Throws
// Error if play reaches a history where the kernels are undefined.
std::vector<OutcomeAtom> OutcomeUnderKernels(const MediatorSpace& space,
                                             const RecommendationKernels& k,
                                             const DeviationStrategy& dev);

// Merges atoms of a mixture of rules in the same canonical order.
std::vector<OutcomeAtom> OutcomeUnderMixture(const MediatorSpace& space,
                                             const BCEMixture& mixture,
                                             const DeviationStrategy& dev);

// Probability of each plan variable under obedience.
std::vector<Rational> ObedientReach(const MediatorSpace& space,
                                    const RecommendationKernels& k);

// ---------------------------------------------------------------------------
// Beliefs and conditional probability systems.

// beta(. | h_i^t, a-hat_i^t): belief[i][key] lists (plan variable, prob);
// the variables must belong to the key. Empty lists mean "not supplied".
struct BeliefSystem {
  std::vector<std::vector<std::vector<std::pair<int, Rational>>>> belief;
};

// Empty belief system of the right shape.
BeliefSystem EmptyBeliefs(const MediatorSpace& space);

// Bayes-rule beliefs at every key of positive obedient probability.
BeliefSystem BayesBeliefs(const MediatorSpace& space,
                          const RecommendationKernels& k);

// One row of an explicit CPS table: beta({x} | given) for x in the sparse
// list; absent elements have probability zero.
struct CpsRow {
  std::vector<int> given;  // sorted, nonempty
  std::vector<std::pair<int, Rational>> prob;
};

// A conditional probability system on {0, ..., n-1}. Either explicit rows,
// or the limit of a fully supported perturbation: element x has weight
// sum_k w[x][k] eps^k and beta(X|Z) is the exact limit as eps -> 0 of
// w(X n Z) / w(Z).
class Cps {
 public:
  static Cps FromTable(int ground_size, std::vector<CpsRow> rows);
  // Throws InputError if an element has zero weight or a coefficient is
  // negative.
  static Cps FromPerturbation(std::vector<std::vector<Rational>> weights);

  int GroundSize() const { return ground_size_; }
  bool IsTable() const { return weights_.empty(); }
  const std::vector<CpsRow>& rows() const { return rows_; }
  const std::vector<std::vector<Rational>>& weights() const {
    return weights_;
  }

  // beta({x} | z) for every x in z, aligned with z (sorted). nullopt when a
  // table has no row for z.
  std::optional<std::vector<Rational>> Conditional(
      const std::vector<int>& z) const;
  // beta(X | Z); throws Error when undefined.
  Rational Value(const std::vector<int>& x, const std::vector<int>& z) const;

  // Table with one row per listed conditioning set.
  Cps Materialize(const std::vector<std::vector<int>>& family) const;

 private:
  int ground_size_ = 0;
  std::vector<CpsRow> rows_;
  std::vector<std::vector<Rational>> weights_;
};

struct CpsViolation {
  std::string property;  // normalization, nonnegativity, chain_rule
  std::vector<int> x, y, z;
  std::string detail;
};

// Checks the table rows (materializing a perturbation over all nonempty
// subsets when the ground set has at most 8 elements, otherwise over the
// singletons and the full set): each row is a nonnegative distribution
// supported on its conditioning set, and beta({x}|Z) = beta({x}|Y) beta(Y|Z)
// for every x in Y with Y, Z rows and Y a subset of Z.
std::vector<CpsViolation> CpsCheck(const Cps& cps);

// ---------------------------------------------------------------------------
// Verification.

struct RefinementViolation {
  enum class Kind {
    kRange,              // kernel or rule leaves the ranges
    kKernel,             // kernel row undefined or not summing to one
    kMissingBelief,      // no belief at a range-consistent private history
    kObedience,          // profitable continuation deviation
    kBeliefConsistency,  // Bayes rule fails on a positive-probability event
    kCpsConsistency,     // CPS disagrees with the mixture
  };
  Kind kind = Kind::kObedience;
  int player = -1;
  int key = -1;
  Rational gain;
  DeviationStrategy deviation;
  std::string description;
};

std::string KindName(RefinementViolation::Kind kind);

// Weak perfect Bayes correlated equilibrium check. Requires a fixed prior.
std::vector<RefinementViolation> VerifyWpbce(const MediatorSpace& space,
                                             const MediationRange& range,
                                             const RecommendationKernels& k,
                                             const BeliefSystem& beliefs);

// Ground set F(R) x terminals: element r * NumTerminals + terminal.
struct SbceGround {
  std::vector<FeedbackRule> rules;
  int num_terminals = 0;
  int Size() const { return static_cast<int>(rules.size()) * num_terminals; }
  int Index(int rule, int terminal) const {
    return rule * num_terminals + terminal;
  }
};

SbceGround MakeSbceGround(const MediatorSpace& space,
                          const MediationRange& range,
                          int64_t cap = kDefaultRuleCap);

// Trembling construction: the weight of (f, terminal) is rule_weight[f]
// times the chance probability times, for every stage and player,
// tremble(player, var, action) when the action differs from the
// recommendation of f (and 1 otherwise). Polynomials in eps.
using Polynomial = std::vector<Rational>;
Cps TremblingCps(
    const MediatorSpace& space, const SbceGround& ground,
    const std::vector<Polynomial>& rule_weight,
    const std::function<Polynomial(int player, int var, int action)>& tremble);

// Conditioning sets used by VerifySbce: the full set, the private-history
// events of every range-consistent key and the events (f_{<t}, h^t, omega^t).
std::vector<std::vector<int>> SbceConditioningFamily(
    const MediatorSpace& space, const MediationRange& range,
    const SbceGround& ground);

// Sequential Bayes correlated equilibrium check of a mixture over reduced
// rules, with beliefs induced by a CPS on the ground set.
std::vector<RefinementViolation> VerifySbce(const MediatorSpace& space,
                                            const MediationRange& range,
                                            const BCEMixture& mixture,
                                            const SbceGround& ground,
                                            const Cps& cps);

}  // namespace bce

#endif  // BCE_REFINEMENT_H_
