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

#include "bce/expansion.h"

#include <functional>
#include <random>

#include "bce/games.h"
#include "bce/refinement.h"
#include "bce/scenarios.h"
#include "doctest.h"
#include "random_games.h"

namespace bce {
namespace {

using testing::RandomProbability;
using testing::RandomSmallGame;

// Two-rule mixture of Example 1: recommend T or B with probability 1/2 each,
// then L iff player 1 obeyed.
// Best value of a player over all pure strategies, by enumeration.
Rational BruteForceBest(const GameTree& tree, const BehaviorProfile& profile,
                        int player) {
  const auto& states = tree.PrivateStates(player);
  BehaviorProfile p = profile;
  Rational best;
  bool first = true;
  std::function<void(size_t)> rec = [&](size_t pid) {
    if (pid == states.size()) {
      Rational v = ProfileValue(tree, p)[player];
      if (first || v > best) best = v;
      first = false;
      return;
    }
    const int A = tree.game().NumActions(player, states[pid].stage);
    for (int a = 0; a < A; ++a) {
      p.prob[player][pid].assign(A, Rational(0));
      p.prob[player][pid][a] = 1;
      rec(pid + 1);
    }
  };
  rec(0);
  return best;
}

// Deterministic pseudo-random xi: a distribution over message profiles that
// depends on the partial history.
Expansion RandomExpansion(const BaseGame& game, int seed) {
  std::vector<std::vector<std::vector<std::string>>> sets(game.NumPlayers());
  for (int i = 0; i < game.NumPlayers(); ++i) {
    for (int t = 0; t < game.stages; ++t) {
      sets[i].push_back((i + t + seed) % 2 == 0
                            ? std::vector<std::string>{"x", "y"}
                            : std::vector<std::string>{"-"});
    }
  }
  Expansion exp;
  exp.message_sets = sets;
  exp.xi = [sets, seed](const History& partial) {
    const int t = static_cast<int>(partial.signals.size()) - 1;
    const std::string key = HistoryKey(partial);
    std::seed_seq seq(key.begin(), key.end());
    std::mt19937 rng(seq);
    rng.discard(seed);
    std::vector<Profile> all = {Profile()};
    for (const auto& s : sets) {
      std::vector<Profile> next;
      for (const Profile& p : all) {
        for (int m = 0; m < static_cast<int>(s[t].size()); ++m) {
          Profile q = p;
          q.push_back(m);
          next.push_back(q);
        }
      }
      all = next;
    }
    MessageDraw draw;
    Rational left(1);
    for (size_t k = 0; k < all.size(); ++k) {
      Rational p = k + 1 == all.size() ? left : left * RandomProbability(rng);
      if (sgn(p) > 0) draw.push_back({all[k], p});
      left -= p;
    }
    return draw;
  };
  return exp;
}

TEST_CASE("example 2 kernels are consistent but do not factor") {
  BaseGame base = Example2Game();
  BaseGame pi = Example2Kernels();
  CHECK(ConsistencyCheck(base, pi));
  FactorizationResult f = FactorizationTest(base, pi);
  CHECK_FALSE(f.factorizable);
  CHECK_FALSE(f.witness);
  CHECK(f.reason.find("stage 2") != std::string::npos);
}

TEST_CASE("example 2 reinterpreted kernels factor") {
  BaseGame base = Example2ReinterpretedGame();
  BaseGame pi = Example2ReinterpretedKernels();
  CHECK(ConsistencyCheck(base, pi));
  FactorizationResult f = FactorizationTest(base, pi);
  REQUIRE(f.factorizable);
  REQUIRE(f.witness);
  for (int w = 0; w < 4; ++w) {
    History partial;
    partial.signals = {{0}};
    partial.states = {w};
    MessageDraw draw = f.witness->xi(partial);
    const int expected = (w % 2 - w / 2 + 2) % 2;
    REQUIRE(draw.size() == 1);
    CHECK(draw[0].first == Profile{expected});
    CHECK(draw[0].second == 1);
  }
  // Inducing with the witness reproduces pi: 1/4 on the matching diagonal.
  GameTree induced(InduceGame(base, *f.witness));
  for (int root : induced.StageNodes(0)) {
    const History h = induced.HistoryOf(root);
    const int w = h.states[0];
    CHECK(h.messages[0][0] == (w % 2 - w / 2 + 2) % 2);
    CHECK(induced.node(root).chance == Ratio(1, 4));
  }
}

TEST_CASE("example 3 kernels") {
  BaseGame base = Example3Game();
  BaseGame pi = Example3Kernels();
  CHECK(ConsistencyCheck(base, pi));
  CHECK_FALSE(FactorizationTest(base, pi).factorizable);

  // Optimal payoff under pi, by enumeration of the 4 pure strategies.
  GameTree tree(pi);
  REQUIRE(tree.PrivateStates(0).size() == 2 + 4);
  BehaviorProfile any = PlayMessageProfile(tree);
  CHECK(BruteForceBest(tree, any, 0) == Ratio(2, 3));

  // The outcome distribution of Example 3 is not a BCE of the base game.
  GameTree btree(base);
  MediatorSpace space(btree, false);
  std::vector<Rational> mu(btree.NumTerminals());
  const int root = btree.StageNodes(0)[0];
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int child : btree.node(root).children[a1]) {
      const int w2 = btree.HistoryOf(child).states[1];
      const Rational p[2][2] = {{Ratio(1, 2), 0}, {Ratio(1, 6), Ratio(1, 3)}};
      mu[btree.TerminalId(child, 0)] = p[a1][w2];
    }
  }
  CHECK_FALSE(MembershipTest(space, mu).member);
  // The mediator cannot see omega_2 before a_1 is taken, so the best BCE
  // payoff stays at 1/2 while pi reaches 2/3.
  CHECK(OptimizeDirection(space, {1}).value == Ratio(1, 2));
}

TEST_CASE("null expansion is isomorphic") {
  BaseGame base = Example1Game();
  Expansion null;
  null.message_sets = base.messages;
  null.xi = [](const History&) {
    return MessageDraw{{Profile{0, 0}, Rational(1)}};
  };
  GameTree a(base);
  GameTree b(InduceGame(base, null));
  CHECK(a.NumNodes() == b.NumNodes());
  CHECK(a.NumTerminals() == b.NumTerminals());
  CHECK(ConsistencyCheck(base, InduceGame(base, null)));
}

TEST_CASE("example 1 canonical expansion") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  BCEMixture m = Example1SignalMixture(space);
  REQUIRE(VerifyBce(space, m).empty());
  BaseGame induced_game = InduceGame(space.game(), CanonicalExpansion(space, m));
  CHECK(ConsistencyCheck(space.game(), induced_game));
  GameTree induced(induced_game);
  BehaviorProfile obey = PlayMessageProfile(induced);
  CHECK(BestResponseCheck(induced, obey).empty());
  auto dist = ProjectToBase(induced, TerminalDistribution(induced, obey), tree);
  CHECK(dist == ObedientDistribution(space, PlanOfMixture(space, m)));
  CHECK(ProfileValue(induced, obey) == std::vector<Rational>{Ratio(5, 2), 1});

  // Player 1 ignoring the signal and always playing B has a profitable
  // deviation back to obedience.
  BehaviorProfile bad = obey;
  for (auto& row : bad.prob[0]) {
    if (row.size() == 2) row = {0, 1};
  }
  auto devs = BestResponseCheck(induced, bad);
  REQUIRE_FALSE(devs.empty());
  CHECK(devs[0].player == 0);
  CHECK(ProfileValue(induced, bad)[0] + devs[0].gain >= Ratio(5, 2));

  // A non-equilibrium mixture is rejected.
  FeedbackRule always{RuleDomain::kReduced, std::vector<int>(tree.NumNodes(), 0)};
  CHECK_THROWS_AS(CanonicalExpansion(space, {{{always, Rational(1)}}}),
                  InputError);
}

TEST_CASE("induced kernels factor back") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    BaseGame base = RandomSmallGame(rng);
    Expansion exp = RandomExpansion(base, trial);
    BaseGame induced = InduceGame(base, exp);
    CHECK(ValidateGame(induced).ok());
    CHECK(ConsistencyCheck(base, induced));
    FactorizationResult f = FactorizationTest(base, induced);
    REQUIRE(f.factorizable);
    GameTree tree(induced);
    for (int node = 0; node < tree.NumNodes(); ++node) {
      const History partial = PartialHistory(tree.HistoryOf(node));
      CHECK(f.witness->xi(partial) == exp.xi(partial));
    }
  }
}

TEST_CASE("best response check against enumeration") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    BaseGame base = RandomSmallGame(rng);
    GameTree tree(InduceGame(base, RandomExpansion(base, trial)));
    BehaviorProfile profile;
    profile.prob.resize(tree.NumPlayers());
    for (int i = 0; i < tree.NumPlayers(); ++i) {
      for (const PrivateState& s : tree.PrivateStates(i)) {
        const Rational p = RandomProbability(rng);
        profile.prob[i].push_back({p, 1 - p});
      }
    }
    auto devs = BestResponseCheck(tree, profile);
    const auto value = ProfileValue(tree, profile);
    for (int i = 0; i < tree.NumPlayers(); ++i) {
      if (tree.PrivateStates(i).size() > 14) continue;
      const Rational gain = BruteForceBest(tree, profile, i) - value[i];
      Rational reported(0);
      for (const PureDeviation& d : devs) {
        if (d.player == i) reported = d.gain;
      }
      CHECK(reported == gain);
    }
  }
}

TEST_CASE("bce round trip through the canonical expansion") {
  std::mt19937 rng(29);
  std::uniform_int_distribution<int> coord(-3, 3);
  for (int trial = 0; trial < 25; ++trial) {
    GameTree tree(RandomSmallGame(rng));
    MediatorSpace space(tree, false);
    DirectionResult r = OptimizeDirection(space, {coord(rng), coord(rng)});
    BaseGame induced_game = InduceGame(space.game(), CanonicalExpansion(space, r.witness));
    CHECK(ConsistencyCheck(space.game(), induced_game));
    GameTree induced(induced_game);
    BehaviorProfile obey = PlayMessageProfile(induced);
    CHECK(BestResponseCheck(induced, obey).empty());
    CHECK(ProjectToBase(induced, TerminalDistribution(induced, obey), tree) ==
          ObedientDistribution(space, r.plan));
  }
}

TEST_CASE("kernels reproduce mixture outcomes") {
  std::mt19937 rng(31);
  int deviations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    GameTree tree(RandomSmallGame(rng));
    MediatorSpace space(tree, false);
    const GameTree& t = space.tree();
    BCEMixture m;
    Rational left(1);
    for (int e = 0; e < 3; ++e) {
      FeedbackRule f{RuleDomain::kFull,
                     std::vector<int>(NumRuleCells(space, RuleDomain::kFull))};
      for (int node = 0; node < t.NumNodes(); ++node) {
        const int st = t.node(node).stage;
        std::uniform_int_distribution<int> pick(
            0, space.game().NumJointActions(st) - 1);
        for (int prev = 0; prev < space.NumCodes(st - 1); ++prev) {
          f.choice[RuleCell(space, RuleDomain::kFull, node, prev)] = pick(rng);
        }
      }
      const Rational w = e == 2 ? left : left * RandomProbability(rng);
      m.entries.push_back({f, w});
      left -= w;
    }
    RecommendationKernels k = KernelsFromMixture(space, m);
    CHECK(OutcomeUnderKernels(space, k, Obedient()) ==
          OutcomeUnderMixture(space, m, Obedient()));
    for (int i = 0; i < 2; ++i) {
      if (CountDeviations(space, i) > 200) continue;
      for (const DeviationStrategy& d : EnumerateDeviations(space, i, 200)) {
        auto a = OutcomeUnderKernels(space, k, d);
        auto b = OutcomeUnderMixture(space, m, d);
        REQUIRE(a.size() == b.size());
        for (size_t j = 0; j < a.size(); ++j) {
          CHECK(a[j].terminal == b[j].terminal);
          CHECK(a[j].code == b[j].code);
          CHECK(a[j].prob == b[j].prob);
        }
        ++deviations;
      }
    }
  }
  CHECK(deviations > 100);
}

}  // namespace
}  // namespace bce
