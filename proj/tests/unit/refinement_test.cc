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

#include "bce/refinement.h"

#include <random>

#include "bce/games.h"
#include "bce/scenarios.h"
#include "doctest.h"
#include "random_games.h"

namespace bce {
namespace {

using Kind = RefinementViolation::Kind;

// Uniform belief at every key that has none.
void FillUniform(const MediatorSpace& space, BeliefSystem* b) {
  for (int i = 0; i < space.NumPlayers(); ++i) {
    std::vector<std::vector<int>> vars(space.NumKeys(i));
    for (int v = 0; v < space.NumVars(); ++v) vars[space.KeyOf(i, v)].push_back(v);
    for (int k = 0; k < space.NumKeys(i); ++k) {
      if (!b->belief[i][k].empty()) continue;
      const Rational w(1, static_cast<long>(vars[k].size()));
      for (int v : vars[k]) b->belief[i][k].push_back({v, w});
    }
  }
}

// Player 2's stage-two key where R is recommended.
int RecRKey(const MediatorSpace& space) {
  for (int k = 0; k < space.NumKeys(1); ++k) {
    const PlayerKey& key = space.key(1, k);
    if (key.stage == 1 && key.own_rec == 1) return k;
  }
  return -1;
}

// Belief at the R key putting `b` on player 1 having played B, spread over
// the two possible first-stage recommendations.
std::vector<std::pair<int, Rational>> OffPathBelief(const MediatorSpace& space,
                                                    int key, Rational b) {
  const GameTree& tree = space.tree();
  std::vector<std::pair<int, Rational>> out;
  for (int v = 0; v < space.NumVars(); ++v) {
    if (space.KeyOf(1, v) != key) continue;
    const int a1 = tree.OwnAction(0, 0, tree.PathAction(space.VarNode(v), 0));
    const int rec1 = tree.OwnAction(0, 0, space.RecAt(space.VarCode(v), 1, 0));
    if (a1 == rec1) continue;  // obedient histories never lead to R
    out.push_back({v, (a1 == 1 ? b : 1 - b)});
  }
  return out;
}

TEST_CASE("kernels of a point mass equal the rule") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  BCEMixture m = Example1SignalMixture(space);
  m.entries.resize(1);
  m.entries[0].weight = 1;
  RecommendationKernels k = KernelsFromMixture(space, m);
  const Plan y = PlanOfRule(space, m.entries[0].rule);
  for (int v = 0; v < space.NumVars(); ++v) {
    if (!k.defined[v]) continue;
    const int parent = space.ParentVar(v);
    const int node = space.VarNode(v);
    const int prev = parent < 0 ? 0 : space.VarCode(parent);
    const int t = space.VarStage(v);
    const bool chosen = Recommend(space, m.entries[0].rule, node, prev) ==
                        space.RecAt(space.VarCode(v), t, t);
    CHECK(k.prob[v] == (chosen ? 1 : 0));
    CHECK(sgn(y[v]) == (chosen ? 1 : 0));
  }
}

TEST_CASE("two rules differing at stage two give a half-half kernel") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  const BaseGame& g = space.game();
  FeedbackRule a{RuleDomain::kReduced, std::vector<int>(tree.NumNodes(), 0)};
  FeedbackRule b = a;
  for (int id : tree.StageNodes(1)) b.choice[id] = g.EncodeJoint(1, {0, 1});
  RecommendationKernels k =
      KernelsFromMixture(space, {{{a, Ratio(1, 2)}, {b, Ratio(1, 2)}}});
  for (int v = 0; v < space.NumVars(); ++v) {
    if (!k.defined[v]) continue;
    const int t = space.VarStage(v);
    const int rec = space.RecAt(space.VarCode(v), t, t);
    if (t == 0) {
      CHECK(k.prob[v] == (rec == 0 ? 1 : 0));
    } else {
      CHECK(k.prob[v] == Ratio(1, 2));
    }
  }
}

TEST_CASE("bargaining kernel accepts E(omega) with probability omega_L^-/E") {
  BargainingModel model(DeskBargaining());
  SequentialConstruction c =
      BargainingConstruction(model, BargainingVertex::kBuyerIndifferent);
  const MediatorSpace& space = model.space();
  RecommendationKernels k = KernelsFromMixture(space, c.mixture, c.range);
  const int mean = model.OfferIndex(model.mean());
  int checked = 0;
  for (int v = 0; v < space.NumVars(); ++v) {
    if (space.VarStage(v) != 1 || !k.defined[v]) continue;
    const int node = space.VarNode(v);
    const GameTree& tree = model.tree();
    if (tree.OwnAction(0, 0, tree.PathAction(node, 0)) != mean) continue;
    const int rec1 = space.RecAt(space.VarCode(v), 1, 0);
    if (tree.OwnAction(0, 0, rec1) != mean) continue;
    const int accept = tree.OwnAction(1, 1, space.RecAt(space.VarCode(v), 1, 1));
    CHECK(k.prob[v] == (accept ? Ratio(1, 3) : Ratio(2, 3)));
    ++checked;
  }
  CHECK(checked == 4);  // two states, accept or reject
}

TEST_CASE("mixture outside the ranges is rejected") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  BCEMixture m = Example1SignalMixture(space);
  MediationRange only_t = RangeFromFunction(space, [&](int player, int key) {
    const PlayerKey& k = space.key(player, key);
    return !(player == 0 && k.stage == 0 && k.own_rec == 1);
  });
  CHECK_THROWS_AS(KernelsFromMixture(space, m, only_t), InputError);
  CHECK_THROWS_AS(RangeFromFunction(space, [](int, int) { return false; }),
                  InputError);
}

TEST_CASE("full range admits every reduced rule") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    BaseGame game = testing::RandomSmallGame(rng);
    GameTree tree(game);
    MediatorSpace space(tree, false);
    if (CountFeedbackRules(space, RuleDomain::kReduced) > 5000) continue;
    auto all = EnumerateFeedbackRules(space, RuleDomain::kReduced);
    auto ranged = EnumerateRangeRules(space, FullRange(space));
    CHECK(ranged.size() == all.size());
  }
}

TEST_CASE("CPS of a fully supported distribution is clean") {
  std::vector<std::vector<Rational>> w = {
      {Ratio(1, 5)}, {Ratio(2, 5)}, {Ratio(1, 10)}, {Ratio(3, 10)}};
  Cps cps = Cps::FromPerturbation(w);
  CHECK(CpsCheck(cps).empty());
  CHECK(cps.Value({0, 1}, {0, 1, 2}) == Ratio(6, 7));
  CHECK(cps.Value({0, 1, 2, 3}, {2}) == 1);
}

TEST_CASE("CPS chain rule violation is listed") {
  Cps cps = Cps::FromTable(
      3, {{{0, 1, 2}, {{0, Ratio(1, 2)}, {1, Ratio(1, 4)}, {2, Ratio(1, 4)}}},
          {{0, 1}, {{0, Ratio(1, 2)}, {1, Ratio(1, 2)}}}});
  auto v = CpsCheck(cps);
  REQUIRE(v.size() == 2);
  for (const CpsViolation& c : v) {
    CHECK(c.property == "chain_rule");
    CHECK(c.y == std::vector<int>{0, 1});
    CHECK(c.z == std::vector<int>{0, 1, 2});
  }
  CHECK(v[0].x == std::vector<int>{0});
  CHECK(v[1].x == std::vector<int>{1});
  Cps fixed = Cps::FromTable(
      3, {{{0, 1, 2}, {{0, Ratio(1, 2)}, {1, Ratio(1, 4)}, {2, Ratio(1, 4)}}},
          {{0, 1}, {{0, Ratio(2, 3)}, {1, Ratio(1, 3)}}}});
  CHECK(CpsCheck(fixed).empty());
  Cps leaky = Cps::FromTable(2, {{{0}, {{0, Ratio(1, 2)}, {1, Ratio(1, 2)}}}});
  REQUIRE(CpsCheck(leaky).size() == 1);
  CHECK(CpsCheck(leaky)[0].property == "normalization");
}

TEST_CASE("perturbation CPS limits match small-epsilon ratios") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<std::vector<Rational>> w(n);
    for (auto& poly : w) {
      poly.assign(1 + rng() % 3, Rational(0));
      for (auto& c : poly) c = rng() % 2 ? Rational(1 + rng() % 4) : Rational(0);
      if (sgn(poly.back()) == 0) poly.back() = 1;
    }
    Cps cps = Cps::FromPerturbation(w);
    auto violations = CpsCheck(cps);
    CHECK(violations.empty());
    // Every conditional is within 1e-4 of the ratio at eps = 1e-6.
    const Rational eps(1, 1000000);
    auto eval = [&](int x) {
      Rational v(0), p(1);
      for (const Rational& c : w[x]) {
        v += c * p;
        p *= eps;
      }
      return v;
    };
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> z;
      Rational total(0);
      for (int x = 0; x < n; ++x) {
        if (mask >> x & 1) {
          z.push_back(x);
          total += eval(x);
        }
      }
      Rational sum(0);
      for (int x : z) {
        const Rational diff = cps.Value({x}, z) - eval(x) / total;
        CHECK(abs(diff) < Rational(1, 10000));
        sum += cps.Value({x}, z);
      }
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("example 1 weak perfect construction") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  BCEMixture m = Example1SignalMixture(space);
  RecommendationKernels k = KernelsFromMixture(space, m);
  const MediationRange full = FullRange(space);
  const int r_key = RecRKey(space);
  REQUIRE(r_key >= 0);
  for (Rational b : {Rational(1), Ratio(1, 2), Ratio(3, 4)}) {
    BeliefSystem beliefs = BayesBeliefs(space, k);
    CHECK(beliefs.belief[1][r_key].empty());
    beliefs.belief[1][r_key] = OffPathBelief(space, r_key, b);
    FillUniform(space, &beliefs);
    auto v = VerifyWpbce(space, full, k, beliefs);
    CHECK(v.empty());
  }
  for (Rational b : {Rational(0), Ratio(1, 3), Ratio(49, 100)}) {
    BeliefSystem beliefs = BayesBeliefs(space, k);
    beliefs.belief[1][r_key] = OffPathBelief(space, r_key, b);
    FillUniform(space, &beliefs);
    auto v = VerifyWpbce(space, full, k, beliefs);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == Kind::kObedience);
    CHECK(v[0].player == 1);
    CHECK(v[0].key == r_key);
    // L pays 2 against T and 0 against B; R pays 1.
    CHECK(v[0].gain == 2 * (1 - b) - 1);
  }
  // The marginal distribution is a BCE.
  CHECK(VerifyPlan(space, PlanOfMixture(space, m)).empty());
}

TEST_CASE("wPBCE checks beliefs, kernels and missing entries") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  BCEMixture m = Example1SignalMixture(space);
  RecommendationKernels k = KernelsFromMixture(space, m);
  BeliefSystem beliefs = BayesBeliefs(space, k);
  const int r_key = RecRKey(space);
  beliefs.belief[1][r_key] = OffPathBelief(space, r_key, Rational(1));

  auto missing = VerifyWpbce(space, FullRange(space), k, beliefs);
  REQUIRE_FALSE(missing.empty());
  for (const auto& v : missing) CHECK(v.kind == Kind::kMissingBelief);

  FillUniform(space, &beliefs);
  // Swap the on-path belief of player 2 after L for a wrong one.
  BeliefSystem wrong = beliefs;
  for (int key = 0; key < space.NumKeys(1); ++key) {
    auto& b = wrong.belief[1][key];
    if (space.key(1, key).stage == 1 && space.key(1, key).own_rec == 0) {
      REQUIRE(b.size() == 2);
      b[0].second = Ratio(1, 4);
      b[1].second = Ratio(3, 4);
    }
  }
  bool consistency = false;
  for (const auto& v : VerifyWpbce(space, FullRange(space), k, wrong)) {
    consistency = consistency || v.kind == Kind::kBeliefConsistency;
  }
  CHECK(consistency);

  // A single rule always recommending T leaves the kernel undefined after B
  // unless the range excludes B.
  BCEMixture single = m;
  single.entries.resize(1);
  single.entries[0].weight = 1;
  RecommendationKernels ks = KernelsFromMixture(space, single);
  BeliefSystem bs = BayesBeliefs(space, ks);
  FillUniform(space, &bs);
  bool kernel = false;
  for (const auto& v : VerifyWpbce(space, FullRange(space), ks, bs)) {
    kernel = kernel || v.kind == Kind::kKernel;
  }
  CHECK(kernel);
  MediationRange only_t = RangeFromFunction(space, [&](int player, int key) {
    const PlayerKey& pk = space.key(player, key);
    return !(player == 0 && pk.stage == 0 && pk.own_rec == 1);
  });
  for (const auto& v : VerifyWpbce(space, only_t, ks, bs)) {
    CHECK(v.kind != Kind::kKernel);
  }
}

TEST_CASE("one-action game passes with consistent beliefs") {
  GameTree tree(Example2Game());
  MediatorSpace space(tree, false);
  FeedbackRule f{RuleDomain::kReduced, std::vector<int>(tree.NumNodes(), 0)};
  RecommendationKernels k = KernelsFromMixture(space, {{{f, Rational(1)}}});
  BeliefSystem b = BayesBeliefs(space, k);
  FillUniform(space, &b);
  CHECK(VerifyWpbce(space, FullRange(space), k, b).empty());
}

TEST_CASE("bargaining sequential constructions") {
  BargainingModel model(DeskBargaining());
  CHECK(model.low_minus() == Ratio(1, 2));
  CHECK(model.mean() == Ratio(3, 2));
  const MediatorSpace& space = model.space();
  const std::vector<std::vector<Rational>> payoffs = {
      {Rational(1), Ratio(1, 2)}, {Rational(0), Ratio(3, 2)},
      {Rational(0), Ratio(1, 2)}};
  int index = 0;
  for (BargainingVertex vertex :
       {BargainingVertex::kSellerLow, BargainingVertex::kFullExtraction,
        BargainingVertex::kBuyerIndifferent}) {
    SequentialConstruction c = BargainingConstruction(model, vertex);
    CAPTURE(c.name);
    CHECK(c.payoff == payoffs[index++]);
    auto v = VerifySbce(space, c.range, c.mixture, c.ground, c.cps);
    for (const auto& e : v) MESSAGE(e.description);
    CHECK(v.empty());
    Cps table =
        c.cps.Materialize(SbceConditioningFamily(space, c.range, c.ground));
    CHECK(CpsCheck(table).empty());
    CHECK(VerifySbce(space, c.range, c.mixture, c.ground, table).empty());
    CHECK(VerifyPlan(space, PlanOfMixture(space, c.mixture)).empty());
  }
}

TEST_CASE("bargaining acceptance of high offers breaks seller obedience") {
  BargainingModel model(DeskBargaining());
  SequentialConstruction c =
      BargainingConstruction(model, BargainingVertex::kSellerLow, true);
  auto v = VerifySbce(model.space(), c.range, c.mixture, c.ground, c.cps);
  bool seller = false;
  for (const auto& e : v) {
    if (e.kind == Kind::kObedience && e.player == 0) {
      seller = true;
      // Offering 2 and being accepted instead of 1/2.
      CHECK(e.gain == Ratio(3, 2));
    }
  }
  CHECK(seller);
}

TEST_CASE("rule leaving the ranges is reported") {
  BargainingModel model(DeskBargaining());
  SequentialConstruction c =
      BargainingConstruction(model, BargainingVertex::kBuyerIndifferent);
  const GameTree& tree = model.tree();
  const int one = model.OfferIndex(Rational(1));
  // Accept offer 1 < E(omega): not allowed by R_2(1) = {0}.
  for (int id : tree.StageNodes(1)) {
    if (tree.OwnAction(0, 0, tree.PathAction(id, 0)) == one) {
      c.mixture.entries[0].rule.choice[id] = tree.game().EncodeJoint(1, {0, 1});
    }
  }
  auto v = VerifySbce(model.space(), c.range, c.mixture, c.ground, c.cps);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Kind::kRange);
}

TEST_CASE("pessimistic beliefs after an off-path offer") {
  BargainingModel model(DeskBargaining());
  SequentialConstruction c =
      BargainingConstruction(model, BargainingVertex::kSellerLow);
  const GameTree& tree = model.tree();
  const int two = model.OfferIndex(Rational(2));
  std::vector<int> offered_two, low_state;
  for (int r = 0; r < static_cast<int>(c.ground.rules.size()); ++r) {
    for (int x = 0; x < tree.NumTerminals(); ++x) {
      const int node = tree.TerminalParts(x).first;
      if (tree.OwnAction(0, 0, tree.PathAction(node, 0)) != two) continue;
      offered_two.push_back(c.ground.Index(r, x));
      if (tree.node(node).state == 0) low_state.push_back(c.ground.Index(r, x));
    }
  }
  CHECK(c.cps.Value(low_state, offered_two) == 1);
}

}  // namespace
}  // namespace bce
