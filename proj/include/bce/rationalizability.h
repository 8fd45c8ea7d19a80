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

#ifndef BCE_RATIONALIZABILITY_H_
#define BCE_RATIONALIZABILITY_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bce/bce.h"
#include "bce/game.h"
#include "bce/mediator.h"
#include "bce/rational.h"

namespace bce {

// A single decision-maker choosing a_t in A_t for t = 1..T while a fixed
// state omega is unknown. Action profiles are encoded in mixed radix with
// the first period most significant.
struct DecisionProblem {
  int periods = 0;
  std::vector<std::vector<std::string>> actions;  // [t]
  std::vector<std::string> states;
  std::vector<std::vector<Rational>> utility;  // [profile][state]

  int NumActions(int t) const { return static_cast<int>(actions[t].size()); }
  int NumStates() const { return static_cast<int>(states.size()); }
  // Number of prefixes (a_1..a_t) covering periods 0..t; 1 for t = -1.
  int NumPrefixes(int t) const;
  int NumProfiles() const { return NumPrefixes(periods - 1); }
  int Encode(const std::vector<int>& profile) const;
  std::vector<int> Decode(int profile) const;
  // Code of the first t + 1 entries of `profile`.
  int PrefixCode(const std::vector<int>& profile, int t) const;
  std::string ProfileLabel(int profile) const;
  int ProfileIndex(const std::vector<std::string>& labels) const;
};

// Throws InputError on empty sets or a utility table of the wrong shape.
void CheckDecisionProblem(const DecisionProblem& problem);

// One-player base game: the state is drawn once and never changes, the
// player observes nothing but their own actions, and payoffs are u(a, omega).
// Meant for a free-prior mediator space.
BaseGame DecisionGame(const DecisionProblem& problem);

// Two periods, actions {l, c, r}, states {w, w'}. Period payoffs are
// (0, 1, 0) in w and (0, 0, 1) in w', summed over periods.
DecisionProblem TableOneProblem();

// D(a | a-hat): probability of choosing profile a when the recommended
// profile is a-hat.
struct DeviationPlan {
  std::vector<std::vector<Rational>> prob;  // [recommended][chosen]

  const Rational& Prob(int chosen, int recommended) const {
    return prob[recommended][chosen];
  }
};

// tau_t(a_t | a-hat_1..a-hat_t, a_1..a_{t-1}). Rows are indexed by
// recs_code * NumPrefixes(t - 1) + choices_code.
struct BehavioralStrategy {
  std::vector<std::vector<std::vector<Rational>>> tau;  // [t][row][a_t]
};

int StrategyRow(const DecisionProblem& problem, int t, int recs_code,
                int choices_code);
BehavioralStrategy ObedientStrategy(const DecisionProblem& problem);

// Product formula over periods. Throws InputError on a malformed strategy.
DeviationPlan PlanFromStrategy(const DecisionProblem& problem,
                               const BehavioralStrategy& tau);

// Empty iff rows are distributions and, for every t, the marginal of
// (a_1..a_t) given a-hat depends on a-hat_1..a-hat_t only. These are exactly
// the plans induced by behavioral strategies.
std::vector<std::string> CheckDeviationPlan(const DecisionProblem& problem,
                                            const DeviationPlan& plan);

std::string DescribePlan(const DecisionProblem& problem,
                         const DeviationPlan& plan);

struct DominanceResult {
  bool dominated = false;
  Rational slack;  // optimal epsilon, capped at one
  std::optional<DeviationPlan> plan;
};

struct SureDominanceOptions {
  // B^T_a = prefix x A_T, so that the sets B^t_a partition A. Without it
  // B^T_a = {a}.
  bool full_last_period = true;
  // Continuation recommendations after the first disobedience may react to
  // the choices made since. Without it one continuation a' is fixed for the
  // whole row.
  bool adaptive_continuations = true;
};

// Maximizes epsilon over deviation plans D subject to
//   sum_t sum_{b in B^t_a} u(b, w) D(b | a_1..a_t, a'_{t+1}..a'_T)
//       >= u(a, w) + epsilon [a = target]
// for every state, profile and continuation. Dominated iff epsilon > 0.
DominanceResult IsSurelyDominated(const DecisionProblem& problem,
                                  const std::vector<int>& target,
                                  const SureDominanceOptions& options = {},
                                  const LPOptions& lp_options = {});

// Same with every row using the recommended profile itself:
//   sum_b u(b, w) D(b | a) >= u(a, w) + epsilon [a = target].
DominanceResult IsTrulyDominated(const DecisionProblem& problem,
                                 const std::vector<int>& target,
                                 const LPOptions& lp_options = {});

// Owns the decision game, its tree and its free-prior mediator space.
class DecisionModel {
 public:
  explicit DecisionModel(DecisionProblem problem);

  const DecisionProblem& problem() const { return problem_; }
  const GameTree& tree() const { return *tree_; }
  const MediatorSpace& space() const { return *space_; }
  // Terminal id of profile `profile` in state `state`.
  int Terminal(int state, const std::vector<int>& profile) const;

 private:
  DecisionProblem problem_;
  std::unique_ptr<GameTree> tree_;
  std::unique_ptr<MediatorSpace> space_;
};

struct RationalizabilityVerdict {
  bool rationalizable = false;
  // The LP and the dominance test disagree; neither verdict is reported.
  bool boundary = false;
  Rational max_weight;  // optimal mu(F*)
  // Joint distribution over (feedback rule, state) in model.space().
  std::optional<BCEMixture> witness;
  std::optional<DeviationPlan> dominating_plan;
};

// Maximizes mu(F*) over obedient mu in Delta(F x Omega), where F* are the
// (rule, state) pairs whose obedient path is the target. Rationalizable iff
// the optimum is positive. Otherwise the sure-dominance plan is attached.
RationalizabilityVerdict IsRationalizable(const DecisionModel& model,
                                          const std::vector<int>& target,
                                          const SolverOptions& options = {});

}  // namespace bce

#endif  // BCE_RATIONALIZABILITY_H_
