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

#ifndef BCE_MEDIATOR_H_
#define BCE_MEDIATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "bce/game.h"
#include "bce/rational.h"

namespace bce {

inline constexpr int64_t kDefaultRuleCap = 100000;

// An omniscient mediator observes the node (h^t, m^t, omega^t) and its own
// past recommendations a-hat^{t-1}. Recommendation histories are encoded in
// mixed radix over joint action indices: code_t = code_{t-1} * |A_t| + a-hat_t.
//
// A plan variable y(node_t, code^t) is the product of the mediator's
// recommendation probabilities along the path to node_t, excluding chance.
// Realization plans are exactly the mixtures of feedback rules.
//
// A player key d = (private history h_i^t, own recommendations a-hat_i^t) is
// everything player i knows when choosing a_{i,t}. Keys form a tree: the
// children of (d, a) are the next-stage keys reached when i plays a.

struct PlayerKey {
  int stage = 0;
  int pid = -1;        // private state id in the game tree
  int own_code = 0;    // own recommendation history
  int own_rec = 0;     // own recommendation at this stage
  int parent = -1;     // key at stage - 1
  int parent_action = -1;
  std::vector<std::vector<int>> children;  // [own action] -> keys
};

// Sparse linear functional over plan variables.
using Functional = std::vector<std::pair<int, Rational>>;

class MediatorSpace {
 public:
  // With `free_prior`, stage-one chance is left to the mediator: the mixture
  // is over (rule, initial node) pairs and leaf weights drop p_1.
  MediatorSpace(const GameTree& tree, bool free_prior,
                int64_t cap = kDefaultHistoryCap);

  const GameTree& tree() const { return tree_; }
  const BaseGame& game() const { return tree_.game(); }
  bool free_prior() const { return free_prior_; }
  int NumPlayers() const { return tree_.NumPlayers(); }
  int NumStages() const { return tree_.NumStages(); }

  // Number of codes of recommendation histories covering stages 0..t.
  // NumCodes(-1) is 1.
  int NumCodes(int t) const { return t < 0 ? 1 : num_codes_[t]; }
  int NumVars() const { return static_cast<int>(var_node_.size()); }
  int Var(int node, int code) const;
  int VarNode(int var) const { return var_node_[var]; }
  int VarCode(int var) const { return var_code_[var]; }
  int VarStage(int var) const { return tree_.node(var_node_[var]).stage; }
  // Plan variable of the parent (node, code prefix); -1 at stage 0.
  int ParentVar(int var) const;
  // Joint recommendation at stage k encoded in `code`, which covers 0..t.
  int RecAt(int code, int t, int k) const;
  // Players who disobeyed at some stage before VarStage(var).
  uint32_t DeviatorMask(int var) const { return deviator_mask_[var]; }
  // Chance weight applied to leaves below `node`: reach, or reach over the
  // stage-one chance draw when the prior is free.
  const Rational& LeafWeight(int node) const { return leaf_weight_[node]; }

  int NumKeys(int player) const {
    return static_cast<int>(keys_[player].size());
  }
  const PlayerKey& key(int player, int k) const { return keys_[player][k]; }
  int KeyOf(int player, int var) const { return key_of_[player][var]; }
  const std::vector<int>& RootKeys(int player) const { return roots_[player]; }

  // Player i's expected payoff under obedience.
  const Functional& ObedientValue(int player) const {
    return obedient_value_[player];
  }
  // Stage-T key d and own action a: expected payoff of i from leaves at d
  // when i plays a and everyone else has obeyed throughout.
  const Functional& LeafValue(int player, int key, int action) const;
  // Obedient probability of each terminal.
  const std::vector<Functional>& TerminalFunctionals() const {
    return terminal_;
  }

  // Flow constraints: per stage-one node sum_a y(n, a) = 1 (or q(n)), and
  // sum_a y(n, c.a) = y(parent, c) below.
  struct Flow {
    int parent_var = -1;  // -1 at stage 0
    int node = -1;
    std::vector<int> vars;
  };
  const std::vector<Flow>& Flows() const { return flows_; }

  std::string RecLabel(int code, int t) const;

 private:
  void BuildVars(int64_t cap);
  void BuildKeys();
  void BuildFunctionals();

  const GameTree& tree_;
  bool free_prior_;
  std::vector<int> num_codes_;
  std::vector<int> offset_;
  std::vector<int> var_node_;
  std::vector<int> var_code_;
  std::vector<uint32_t> deviator_mask_;
  std::vector<Rational> leaf_weight_;
  std::vector<std::vector<PlayerKey>> keys_;
  std::vector<std::vector<int>> key_of_;
  std::vector<std::vector<int>> roots_;
  std::vector<Functional> obedient_value_;
  std::vector<std::vector<std::vector<Functional>>> leaf_value_;  // [i][k][a]
  std::vector<Functional> terminal_;
  std::vector<Flow> flows_;
};

// ---------------------------------------------------------------------------
// Feedback rules.

enum class RuleDomain {
  // One recommendation per node; past recommendations are implied by the
  // rule itself along the path.
  kReduced,
  // One recommendation per (node, encoded past recommendations), the total
  // map over every reachable (h^t, omega^t, a-hat^{t-1}).
  kFull,
};

struct FeedbackRule {
  RuleDomain domain = RuleDomain::kReduced;
  std::vector<int> choice;  // joint recommendation per cell
  bool operator==(const FeedbackRule& other) const = default;
};

int NumRuleCells(const MediatorSpace& space, RuleDomain domain);
int RuleCell(const MediatorSpace& space, RuleDomain domain, int node,
             int prev_code);
int Recommend(const MediatorSpace& space, const FeedbackRule& rule, int node,
              int prev_code);

// All rules of the domain, in odometer order. Throws CapExceeded when the
// count exceeds `cap`.
std::vector<FeedbackRule> EnumerateFeedbackRules(const MediatorSpace& space,
                                                 RuleDomain domain,
                                                 int64_t cap = kDefaultRuleCap);
// Count of rules, saturating at INT64_MAX.
int64_t CountFeedbackRules(const MediatorSpace& space, RuleDomain domain);

// Plain-text description of the rule on cells reachable under obedience or
// any deviation; one "stage | history | past recs -> rec" entry per cell.
std::string DescribeRule(const MediatorSpace& space, const FeedbackRule& rule);

// ---------------------------------------------------------------------------
// Deviations and forward evaluation.

// Pure strategy of one player in the mediated game: an action per key.
// Keys mapped to -1 are unreached and obey if they are ever consulted.
struct DeviationStrategy {
  int player = -1;  // -1 means everybody obeys
  std::vector<int> action;

  int Action(const MediatorSpace& space, int key) const;
};

DeviationStrategy Obedient();

// Reduced pure strategies of `player`: choices only at keys reachable given
// the player's own earlier choices. Throws CapExceeded beyond `cap`.
std::vector<DeviationStrategy> EnumerateDeviations(const MediatorSpace& space,
                                                   int player, int64_t cap);
int64_t CountDeviations(const MediatorSpace& space, int player);

struct OutcomeAtom {
  int terminal = -1;
  int code = 0;  // full recommendation history
  Rational prob;
  bool operator==(const OutcomeAtom& other) const = default;
};

// Exact forward evaluation of play when the mediator follows `rule`, the
// deviating player follows `dev` and everybody else obeys. When
// `initial_node` is set only that stage-one node is visited, with weight one.
std::vector<OutcomeAtom> OutcomeUnder(const MediatorSpace& space,
                                      const FeedbackRule& rule,
                                      const DeviationStrategy& dev,
                                      int initial_node = -1);

// Expected payoff vector of a list of atoms.
std::vector<Rational> ExpectedPayoff(const MediatorSpace& space,
                                     const std::vector<OutcomeAtom>& atoms);

// ---------------------------------------------------------------------------
// Realization plans.

using Plan = std::vector<Rational>;  // indexed by plan variable

// y_f: indicator of the cells the rule selects. With `initial_node`, only
// the subtree of that node.
Plan PlanOfRule(const MediatorSpace& space, const FeedbackRule& rule,
                int initial_node = -1);
std::vector<int> PlanSupportOfRule(const MediatorSpace& space,
                                   const FeedbackRule& rule,
                                   int initial_node = -1);

Rational Evaluate(const Functional& f, const Plan& y);

// Every flow constraint holds and y >= 0; under a free prior the stage-one
// totals must sum to one.
bool IsPlan(const MediatorSpace& space, const Plan& y);

struct BestResponse {
  Rational obedient_value;
  Rational best_value;
  DeviationStrategy strategy;  // attains best_value
  Rational Gain() const { return best_value - obedient_value; }
};

// Best pure deviation of `player` against plan y, by backward induction
// over the player's key tree. Ties prefer the recommended action.
BestResponse BestDeviation(const MediatorSpace& space, const Plan& y,
                           int player);

// Obedient probability of each terminal.
std::vector<Rational> ObedientDistribution(const MediatorSpace& space,
                                           const Plan& y);

}  // namespace bce

#endif  // BCE_MEDIATOR_H_
