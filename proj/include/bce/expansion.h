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

#ifndef BCE_EXPANSION_H_
#define BCE_EXPANSION_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bce/bce.h"
#include "bce/game.h"
#include "bce/mediator.h"

namespace bce {

// Distribution over message profiles; positive entries only.
using MessageDraw = std::vector<std::pair<Profile, Rational>>;

// xi_t(m_t | h^t, m^{t-1}, omega^t). The argument is a partial history of
// stage t: actions of stages < t, signals and states of stages <= t, and
// messages of stages < t.
using XiFn = std::function<MessageDraw(const History& partial)>;

// Additional private signals (M, xi).
struct Expansion {
  std::vector<std::vector<std::vector<std::string>>> message_sets;  // [i][t]
  XiFn xi;
};

// Table-backed xi keyed by HistoryKey of the partial history. Keys absent
// from the table draw the uniform distribution over message profiles.
Expansion TabularExpansion(
    std::vector<std::vector<std::vector<std::string>>> message_sets,
    std::map<std::string, MessageDraw> table);

// Partial history of stage t used as the argument of xi: `h` is a full
// history at the beginning of stage t; its stage-t messages are dropped.
History PartialHistory(const History& h);

// Game whose stage-t signals are (s_t, m_t) with kernels xi_t * p_t. The
// base game must have singleton message sets. Throws InputError on shape
// mismatch.
BaseGame InduceGame(const BaseGame& game, const Expansion& exp);

// A kernel family is any game with the base game's players, actions,
// signals and states plus message sets, whose kernels are arbitrary pi_t.

// marg over messages of pi^a equals p^a for every action sequence a.
bool ConsistencyCheck(const BaseGame& game, const BaseGame& kernels,
                      int64_t cap = kDefaultHistoryCap);

struct FactorizationResult {
  bool factorizable = false;
  std::optional<Expansion> witness;
  // When not factorizable: the first history where pi does not factor.
  std::string reason;
};

// Decides whether pi_t = xi_t * p_t for some xi: at every conditioning
// history of pi reachable under some action profile, the message marginal of
// pi_t must equal p_t, and xi is the quotient where p_t > 0.
FactorizationResult FactorizationTest(const BaseGame& game,
                                      const BaseGame& kernels,
                                      int64_t cap = kDefaultHistoryCap);

// Messages are recommendations (M_{i,t} = A_{i,t}) and xi_t is the
// recommendation kernel of the mixture. Requires a fixed prior and a mixture
// that passes VerifyBce; throws InputError otherwise. Off-path conditioning
// histories draw uniform messages.
Expansion CanonicalExpansion(const MediatorSpace& space,
                             const BCEMixture& mixture);

// Behavioral strategies on a game tree: prob[i][pid][a].
struct BehaviorProfile {
  std::vector<std::vector<std::vector<Rational>>> prob;
};

// Every player plays the action with the index of the message received at
// the current stage. Requires |M_{i,t}| = |A_{i,t}|.
BehaviorProfile PlayMessageProfile(const GameTree& tree);

// Pure strategy of one player: an action per private state (-1 unreached).
struct PureDeviation {
  int player = -1;
  std::vector<int> action;
  Rational gain;  // best value minus value of the profile
};

// Most profitable pure deviation of every player who has a profitable one,
// found by backward induction over the player's private states. Empty iff
// the profile is a Bayes-Nash equilibrium of the game.
std::vector<PureDeviation> BestResponseCheck(const GameTree& tree,
                                             const BehaviorProfile& profile);

// Expected payoffs of the profile.
std::vector<Rational> ProfileValue(const GameTree& tree,
                                   const BehaviorProfile& profile);

// Best expected payoff of `player` over all of their pure strategies, the
// others playing `profile`, by enumeration. Throws CapExceeded when the
// number of pure strategies exceeds `cap`.
Rational EnumerateBestValue(const GameTree& tree,
                            const BehaviorProfile& profile, int player,
                            int64_t cap = 1000000);

// Distribution over terminals of `tree` under the profile.
std::vector<Rational> TerminalDistribution(const GameTree& tree,
                                           const BehaviorProfile& profile);

// Pushes a distribution over terminals of an induced game down to the base
// game's terminals by dropping messages.
std::vector<Rational> ProjectToBase(const GameTree& induced,
                                    const std::vector<Rational>& dist,
                                    const GameTree& base);

}  // namespace bce

#endif  // BCE_EXPANSION_H_
