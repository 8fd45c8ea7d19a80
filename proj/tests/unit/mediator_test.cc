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

#include "bce/mediator.h"

#include <random>

#include "bce/games.h"
#include "doctest.h"
#include "random_games.h"

namespace bce {
namespace {

// Reduced rule for Example 1: recommend `first` at stage 1, then `obey` to
// player 2 after player 1 follows and `punish` otherwise.
FeedbackRule Example1Rule(const MediatorSpace& space, int first, int obey,
                          int punish) {
  const GameTree& tree = space.tree();
  FeedbackRule f{RuleDomain::kReduced,
                 std::vector<int>(tree.NumNodes(), 0)};
  const int root = tree.StageNodes(0)[0];
  f.choice[root] = space.game().EncodeJoint(0, {first, 0});
  for (int a = 0; a < 2; ++a) {
    const int child = tree.node(root).children[space.game().EncodeJoint(0, {a, 0})][0];
    f.choice[child] = space.game().EncodeJoint(1, {0, a == first ? obey : punish});
  }
  return f;
}

TEST_CASE("example 1 sizes") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  CHECK(space.NumVars() == 10);
  CHECK(CountFeedbackRules(space, RuleDomain::kFull) == 32);
  CHECK(EnumerateFeedbackRules(space, RuleDomain::kFull).size() == 32);
  CHECK(EnumerateFeedbackRules(space, RuleDomain::kReduced).size() == 8);
  CHECK(EnumerateDeviations(space, 0, 100).size() == 4);
  CHECK(EnumerateDeviations(space, 1, 100).size() == 4);
  CHECK_THROWS_AS(EnumerateFeedbackRules(space, RuleDomain::kFull, 31),
                  CapExceeded);
}

TEST_CASE("example 1 forward evaluation") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  const BaseGame& g = space.game();
  FeedbackRule f = Example1Rule(space, 0, 0, 1);  // T; L iff obedient
  auto atoms = OutcomeUnder(space, f, Obedient());
  REQUIRE(atoms.size() == 1);
  auto [node, a] = tree.TerminalParts(atoms[0].terminal);
  CHECK(g.HistoryLabel(tree.TerminalHistory(node, a)) == "[a1=T a2=L]");
  CHECK(atoms[0].prob == 1);

  // Player 1 plays B after recommendation T.
  DeviationStrategy dev{0, std::vector<int>(space.NumKeys(0), -1)};
  for (int k : space.RootKeys(0)) dev.action[k] = 1;
  atoms = OutcomeUnder(space, f, dev);
  REQUIRE(atoms.size() == 1);
  std::tie(node, a) = tree.TerminalParts(atoms[0].terminal);
  CHECK(g.HistoryLabel(tree.TerminalHistory(node, a)) == "[a1=B a2=R]");
  CHECK(ExpectedPayoff(space, atoms) == std::vector<Rational>{1, 1});
}

// Oracle: best deviation by enumerating every reduced pure strategy and
// evaluating each by forward simulation of every rule in the mixture.
Rational BruteBest(const MediatorSpace& space,
                   const std::vector<std::pair<FeedbackRule, Rational>>& mix,
                   int player) {
  Rational best;
  bool first = true;
  for (const DeviationStrategy& dev :
       EnumerateDeviations(space, player, 1000000)) {
    Rational v(0);
    for (const auto& [f, w] : mix) {
      v += w * ExpectedPayoff(space, OutcomeUnder(space, f, dev))[player];
    }
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

TEST_CASE("backward induction matches strategy enumeration") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  auto rules = EnumerateFeedbackRules(space, RuleDomain::kFull);
  for (size_t k = 0; k < rules.size(); ++k) {
    const auto& f = rules[k];
    Plan y = PlanOfRule(space, f);
    CHECK(IsPlan(space, y));
    for (int i = 0; i < 2; ++i) {
      BestResponse br = BestDeviation(space, y, i);
      CHECK(br.obedient_value ==
            ExpectedPayoff(space, OutcomeUnder(space, f, Obedient()))[i]);
      CHECK(br.best_value == BruteBest(space, {{f, Rational(1)}}, i));
      CHECK(br.best_value ==
            ExpectedPayoff(space, OutcomeUnder(space, f, br.strategy))[i]);
    }
  }
}

TEST_CASE("random games: mixtures of rules") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    GameTree tree(testing::RandomSmallGame(rng));
    MediatorSpace space(tree, false);
    const int cells = NumRuleCells(space, RuleDomain::kReduced);
    std::vector<std::pair<FeedbackRule, Rational>> mix;
    Plan y(space.NumVars());
    for (int r = 0; r < 3; ++r) {
      FeedbackRule f{RuleDomain::kReduced, std::vector<int>(cells)};
      for (int c = 0; c < cells; ++c) {
        f.choice[c] = std::uniform_int_distribution<int>(
            0, space.game().NumJointActions(tree.node(c).stage) - 1)(rng);
      }
      const Rational w = r == 0 ? Rational(1, 2) : Rational(1, 4);
      Plan yf = PlanOfRule(space, f);
      for (int v = 0; v < space.NumVars(); ++v) y[v] += w * yf[v];
      mix.emplace_back(f, w);
    }
    REQUIRE(IsPlan(space, y));
    for (int i = 0; i < 2; ++i) {
      BestResponse br = BestDeviation(space, y, i);
      Rational obedient(0);
      for (const auto& [f, w] : mix) {
        obedient += w * ExpectedPayoff(space, OutcomeUnder(space, f, Obedient()))[i];
      }
      CHECK(br.obedient_value == obedient);
      if (CountDeviations(space, i) <= 5000) {
        CHECK(br.best_value == BruteBest(space, mix, i));
      }
    }
    // Obedient terminal distribution sums to one.
    Rational total(0);
    for (const Rational& p : ObedientDistribution(space, y)) total += p;
    CHECK(total == 1);
  }
}

TEST_CASE("one action game has only the obedient strategy") {
  BaseGame g = SequentialMatrixGame({"T"}, {"L"}, {{{Rational(1)}}, {{Rational(2)}}});
  GameTree tree(g);
  MediatorSpace space(tree, false);
  CHECK(CountFeedbackRules(space, RuleDomain::kFull) == 1);
  CHECK(CountDeviations(space, 0) == 1);
  CHECK(CountDeviations(space, 1) == 1);
}

TEST_CASE("rule description lists reachable cells") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  FeedbackRule f = Example1Rule(space, 0, 0, 1);
  CHECK(DescribeRule(space, f) ==
        "t1 [] -> T; t2 [a1=T] -> L; t2 [a1=B] -> R");
}

}  // namespace
}  // namespace bce
