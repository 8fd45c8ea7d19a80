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

#ifndef BCE_IO_H_
#define BCE_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "bce/bce.h"
#include "bce/expansion.h"
#include "bce/game.h"
#include "bce/mediator.h"
#include "bce/rationalizability.h"
#include "bce/refinement.h"
#include "bce/scenarios.h"

// JSON documents. Numbers are integers or strings "p" / "p/q"; labels are
// strings. Conditions in kernel and payoff entries are matched in file
// order and the first matching entry wins. The README documents every
// schema with examples.

namespace bce {

// Reads a whole file; throws InputError if it cannot be opened.
std::string ReadFile(const std::string& path);
// Writes atomically enough for the CLI: the file is written in full or an
// InputError is thrown.
void WriteFile(const std::string& path, const std::string& text);

// Game file. A game with message sets is a kernel family.
BaseGame ParseGame(const std::string& text);
BaseGame LoadGame(const std::string& path);
// True if the document describes a decision problem ("periods" key).
bool IsDecisionProblemDocument(const std::string& text);

DecisionProblem ParseDecisionProblem(const std::string& text);

// Target distribution over the terminals of `tree`. Every entry must match
// exactly one terminal.
std::vector<Rational> ParseTarget(const GameTree& tree,
                                  const std::string& text);

// Expansion file: message sets and xi entries.
Expansion ParseExpansion(const BaseGame& game, const std::string& text);
// Lists xi at every conditioning history reachable in the induced game.
std::string ExpansionToJson(const BaseGame& game, const Expansion& exp,
                            int64_t cap = kDefaultHistoryCap);

// Rules file for restricted mode: {"domain": ..., "rules": [[cells]]}.
std::vector<FeedbackRule> ParseRules(const MediatorSpace& space,
                                     const std::string& text);

std::string MixtureToJson(const MediatorSpace& space,
                          const BCEMixture& mixture);
BCEMixture ParseMixture(const MediatorSpace& space, const std::string& text);

// Candidate-equilibrium bundle.
struct Bundle {
  enum class Kind { kBce, kWpbce, kSbce };
  Kind kind = Kind::kBce;
  BCEMixture mixture;
  std::optional<MediationRange> range;
  bool bayes_beliefs = false;
  std::optional<BeliefSystem> beliefs;
  std::optional<Cps> cps;
  // Ground set the cps is indexed by; present when cps is.
  std::optional<SbceGround> ground;
};
Bundle ParseBundle(const MediatorSpace& space, const std::string& text);

std::string PlanToJson(const DecisionProblem& problem,
                       const DeviationPlan& plan);

// One "x,y" line per vertex, rationals as num/den.
std::string PolytopeCsv(const std::vector<Point2>& vertices);
// Light grey: hull of the pure payoff profiles. Dark grey: BCE payoffs.
std::string PolytopeSvg(const std::vector<Point2>& feasible,
                        const std::vector<Point2>& bce);

std::string ReportsToJson(const std::vector<ScenarioReport>& reports);

}  // namespace bce

#endif  // BCE_IO_H_
