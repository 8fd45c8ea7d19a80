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

#ifndef BCE_SCENARIOS_H_
#define BCE_SCENARIOS_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bce/bce.h"
#include "bce/game.h"
#include "bce/mediator.h"
#include "bce/rationalizability.h"
#include "bce/refinement.h"

namespace bce {

// ---------------------------------------------------------------------------
// Reusable constructions.

// On Example1Game: two equally likely rules recommending T or B to player 1
// and L to player 2 iff player 1 obeyed. Payoff (5/2, 1).
BCEMixture Example1SignalMixture(const MediatorSpace& space);

// ---------------------------------------------------------------------------
// Bilateral bargaining.

struct BargainingParams {
  std::vector<Rational> values;  // buyer valuations, strictly increasing
  std::vector<Rational> prior;
  std::vector<Rational> offers;  // strictly increasing, nonnegative
};

// Omega = {1, 2}, uniform prior, A_1 = {1/2, 1, 3/2, 2}.
BargainingParams DeskBargaining();

// Throws InputError unless values are positive and increasing, the prior is
// positive and sums to one, offers are nonnegative and increasing, and both
// omega_L^- (largest offer below the lowest value) and E(omega) are offers.
void CheckBargaining(const BargainingParams& params);

// Game, tree and mediator space of one instance.
class BargainingModel {
 public:
  explicit BargainingModel(BargainingParams params);

  const BargainingParams& params() const { return params_; }
  const GameTree& tree() const { return *tree_; }
  const MediatorSpace& space() const { return *space_; }
  const Rational& low_minus() const { return low_minus_; }
  const Rational& mean() const { return mean_; }
  int OfferIndex(const Rational& offer) const;  // -1 if absent
  // Offer observed at a stage-two buyer key.
  int BuyerOffer(int key) const;

 private:
  BargainingParams params_;
  Rational low_minus_;
  Rational mean_;
  std::unique_ptr<GameTree> tree_;
  std::unique_ptr<MediatorSpace> space_;
};

enum class BargainingVertex {
  kSellerLow,       // seller offers omega_L^-, payoff (E - omega_L^-, omega_L^-)
  kFullExtraction,  // seller offers omega, payoff (0, E)
  kBuyerIndifferent,  // seller offers E, accepted with prob omega_L^-/E
};

struct SequentialConstruction {
  std::string name;
  MediationRange range;
  BCEMixture mixture;
  SbceGround ground;
  Cps cps;
  std::vector<Rational> payoff;  // (buyer, seller)
};

// Mediation ranges, mixture over F(R) and pessimistic CPS of a vertex of the
// sequential payoff set. With `accept_high`, offers above E(omega) are
// recommended to be accepted instead of rejected.
SequentialConstruction BargainingConstruction(const BargainingModel& model,
                                              BargainingVertex vertex,
                                              bool accept_high = false);

// Limit of trembles where the seller's unrecommended offers have order
// eps at the lowest state and eps^2 elsewhere, the buyer's order eps, and
// rules outside the support order eps^(2 + d), d the weighted distance to
// the support (1 per differing cell at the lowest state, 2 elsewhere).
Cps PessimisticCps(const BargainingModel& model, const SbceGround& ground,
                   const BCEMixture& mixture);


// ---------------------------------------------------------------------------
// Built-in scenarios.

// Leader-follower game with three rows and three columns and generic
// payoffs.
BaseGame GenericLeaderFollowerGame();

// A scenario's objects: the base game and, where relevant, a kernel family,
// a decision problem or bargaining parameters.
struct Scenario {
  std::string name;
  std::string description;
  BaseGame game;
  std::optional<BaseGame> kernels;
  std::optional<DecisionProblem> problem;
  std::optional<BargainingParams> bargaining;
};

// example1, example2, example2_reinterpreted, example3, example4_generic,
// table1, bargaining.
std::vector<std::string> ScenarioNames();

// Throws InputError on an unknown name. `bargaining` uses the desk instance
// unless parameters are given.
Scenario BuildScenario(const std::string& name,
                       const std::optional<BargainingParams>& bargaining = {});

// One checked statement. `basis` is "reported" for values stated with the
// model, "derived" for values obtained by hand from the model and "trivial"
// for sanity checks.
struct Claim {
  std::string claim;
  std::string expected;
  std::string computed;
  bool pass = false;
  std::string basis;
};

struct ScenarioReport {
  std::string name;
  std::vector<Claim> claims;
  // Extra human-readable output (vertices, witnesses).
  std::string details;
  bool ok() const;
};

struct ScenarioOptions {
  int directions = 8;
  int random_targets = 200;  // example4_generic
  uint32_t seed = 1;
  SolverOptions solver;
  std::optional<BargainingParams> bargaining;
};

ScenarioReport RunScenario(const std::string& name,
                           const ScenarioOptions& options = {});

// Aligned plain text, one line per claim.
std::string FormatReport(const ScenarioReport& report);

}  // namespace bce

#endif  // BCE_SCENARIOS_H_
