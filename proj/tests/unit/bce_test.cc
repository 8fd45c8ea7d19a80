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

#include "bce/bce.h"

#include <random>

#include "bce/games.h"
#include "doctest.h"
#include "random_games.h"

namespace bce {
namespace {

using testing::RandomProbability;
using testing::RandomSmallGame;

// Terminal id of (a1, a2) in a sequential matrix game.
int Cell(const GameTree& tree, int a1, int a2) {
  const BaseGame& g = tree.game();
  const int root = tree.StageNodes(0)[0];
  const int child = tree.node(root).children[g.EncodeJoint(0, {a1, 0})][0];
  return tree.TerminalId(child, g.EncodeJoint(1, {0, a2}));
}

std::vector<Rational> MatrixTarget(const GameTree& tree, Rational tl,
                                   Rational tr, Rational bl, Rational br) {
  std::vector<Rational> mu(tree.NumTerminals());
  mu[Cell(tree, 0, 0)] = tl;
  mu[Cell(tree, 0, 1)] = tr;
  mu[Cell(tree, 1, 0)] = bl;
  mu[Cell(tree, 1, 1)] = br;
  return mu;
}

// Closed-form BCE conditions of the 2x2 leader-follower game.
bool Example1Oracle(const Rational& tl, const Rational& tr, const Rational& bl,
                    const Rational& br) {
  return tl >= bl && br >= tr && tl >= tr;
}

// Payoff hull of the closed-form set: vertices of {mu >= 0, sum 1, the three
// inequalities} by exhaustive choice of three tight constraints.
std::vector<Point2> Example1OracleHull() {
  // Rows over (tl, tr, bl, br), each meaning row . mu >= 0.
  const int rows[7][4] = {{1, 0, 0, 0},  {0, 1, 0, 0}, {0, 0, 1, 0},
                          {0, 0, 0, 1},  {1, 0, -1, 0}, {0, -1, 0, 1},
                          {1, -1, 0, 0}};
  std::vector<Point2> pts;
  for (int a = 0; a < 7; ++a) {
    for (int b = a + 1; b < 7; ++b) {
      for (int c = b + 1; c < 7; ++c) {
        // Gaussian elimination on [rows a, b, c; ones] mu = [0, 0, 0, 1].
        std::vector<std::vector<Rational>> m(4, std::vector<Rational>(5));
        const int pick[3] = {a, b, c};
        for (int r = 0; r < 3; ++r) {
          for (int j = 0; j < 4; ++j) m[r][j] = rows[pick[r]][j];
        }
        for (int j = 0; j < 5; ++j) m[3][j] = 1;
        bool singular = false;
        for (int col = 0; col < 4 && !singular; ++col) {
          int piv = col;
          while (piv < 4 && m[piv][col] == 0) ++piv;
          if (piv == 4) {
            singular = true;
            break;
          }
          std::swap(m[col], m[piv]);
          for (int r = 0; r < 4; ++r) {
            if (r == col || m[r][col] == 0) continue;
            const Rational f = m[r][col] / m[col][col];
            for (int j = 0; j < 5; ++j) m[r][j] -= f * m[col][j];
          }
        }
        if (singular) continue;
        Rational mu[4];
        for (int j = 0; j < 4; ++j) mu[j] = m[j][4] / m[j][j];
        bool feasible = true;
        for (const auto& row : rows) {
          Rational s(0);
          for (int j = 0; j < 4; ++j) s += row[j] * mu[j];
          feasible = feasible && s >= 0;
        }
        if (!feasible) continue;
        pts.push_back({2 * mu[0] + 3 * mu[2] + mu[3],
                       2 * mu[0] + mu[1] + mu[3]});
      }
    }
  }
  return ConvexHull(pts);
}

TEST_CASE("example 1 payoff polytope") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  std::vector<Point2> hull = PayoffPolytope2P(space);
  CHECK(hull == Example1OracleHull());
  REQUIRE(hull.size() == 4);
  CHECK(hull[0] == Point2{1, 1});
  CHECK(hull[1] == Point2{Ratio(5, 2), 1});
  CHECK(hull[2] == Point2{2, 2});
  CHECK(hull[3] == Point2{1, Ratio(4, 3)});
  for (int k : {1, 2, 4, 16}) CHECK(PayoffPolytope2P(space, k) == hull);

  // The vertex (1, 4/3) is attained by mu = 1/3 on (T,L), (T,R), (B,R).
  auto third = Ratio(1, 3);
  MembershipResult m =
      MembershipTest(space, MatrixTarget(tree, third, third, 0, third));
  REQUIRE(m.member);
  CHECK(VerifyBce(space, *m.witness).empty());
}

TEST_CASE("example 1 directions") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  DirectionResult r = OptimizeDirection(space, {1, 0});
  CHECK(r.value == Ratio(5, 2));
  CHECK(VerifyBce(space, r.witness).empty());
  CHECK(OutcomeDistributionOf(space, r.witness) ==
        ObedientDistribution(space, r.plan));
  CHECK(OptimizeDirection(space, {0, 1}).value == 2);
  CHECK(OptimizeDirection(space, {-1, -1}).value == -2);
  CHECK_THROWS_AS(OptimizeDirection(space, {1}), InputError);
}

TEST_CASE("example 1 membership") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  auto half = Ratio(1, 2);
  MembershipResult m = MembershipTest(space, MatrixTarget(tree, half, 0, half, 0));
  CHECK(m.member);
  REQUIRE(m.witness);
  CHECK(VerifyBce(space, *m.witness).empty());
  CHECK(OutcomeDistributionOf(space, *m.witness) ==
        MatrixTarget(tree, half, 0, half, 0));
  CHECK(MembershipTest(space, MatrixTarget(tree, 0, 0, 0, 1)).member);

  std::vector<Rational> bad = MatrixTarget(tree, 0, 1, 0, 0);
  MembershipResult n = MembershipTest(space, bad);
  CHECK_FALSE(n.member);
  CHECK_FALSE(n.one_sided);
  CHECK(n.blocking_players == std::vector<int>{0, 1});
  auto strings = LeaderFollowerViolations(tree, bad);
  REQUIRE(strings);
  CHECK(std::find(strings->begin(), strings->end(), "mu(B,R) >= mu(T,R)") !=
        strings->end());
  CHECK(std::find(strings->begin(), strings->end(), "mu(T,L) >= mu(T,R)") !=
        strings->end());

  CHECK_THROWS_AS(MembershipTest(space, MatrixTarget(tree, 1, 1, 0, 0)),
                  InputError);
  CHECK_THROWS_AS(MembershipTest(space, {1}), InputError);
}

TEST_CASE("example 1 membership against closed form") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> cell(0, 4);
  SolverOptions rules;
  rules.mode = SolveMode::kRules;
  SolverOptions pure;
  pure.encoding = ObedienceEncoding::kPureRows;
  int members = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int w[4];
    int total = 0;
    for (int& x : w) total += (x = cell(rng));
    if (total == 0) continue;
    Rational tl = Ratio(w[0], total), tr = Ratio(w[1], total);
    Rational bl = Ratio(w[2], total), br = Ratio(w[3], total);
    auto target = MatrixTarget(tree, tl, tr, bl, br);
    const bool expected = Example1Oracle(tl, tr, bl, br);
    members += expected;
    MembershipResult m = MembershipTest(space, target);
    CHECK(m.member == expected);
    CHECK(LeaderFollowerViolations(tree, target)->empty() == expected);
    if (trial % 10 == 0) {
      CHECK(MembershipTest(space, target, rules).member == expected);
      CHECK(MembershipTest(space, target, pure).member == expected);
    }
    if (m.member) CHECK(VerifyBce(space, *m.witness).empty());
  }
  CHECK(members > 50);
}

TEST_CASE("example 1 obedience rows") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  SolverOptions pure;
  pure.encoding = ObedienceEncoding::kPureRows;
  ObedienceLP plan_rows(space, pure);
  CHECK(plan_rows.rows().size() == 8);
  pure.mode = SolveMode::kRules;
  ObedienceLP rule_rows(space, pure);
  CHECK(rule_rows.rows().size() == 8);
  CHECK(rule_rows.NumColumns() == 32);
  CHECK(rule_rows.NumNontrivialRows() == 6);
  pure.domain = RuleDomain::kReduced;
  CHECK(ObedienceLP(space, pure).NumColumns() == 8);
}

TEST_CASE("verify bce reports profitable deviations") {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  const BaseGame& g = space.game();
  // Always recommend (T, L), regardless of what player 1 does.
  FeedbackRule f{RuleDomain::kReduced, std::vector<int>(tree.NumNodes(), 0)};
  BCEMixture always{{{f, Rational(1)}}};
  auto v = VerifyBce(space, always);
  REQUIRE(v.size() == 1);
  CHECK(v[0].player == 0);
  CHECK(v[0].gain == 1);
  CHECK(v[0].description == "t1 [] recs T -> B");

  // Punish a deviation by recommending R.
  const int root = tree.StageNodes(0)[0];
  const int after_b = tree.node(root).children[g.EncodeJoint(0, {1, 0})][0];
  f.choice[after_b] = g.EncodeJoint(1, {0, 1});
  CHECK(VerifyBce(space, {{{f, Rational(1)}}}).empty());

  CHECK_THROWS_AS(VerifyBce(space, {{{f, Ratio(1, 2)}}}), InputError);
  CHECK_THROWS_AS(VerifyBce(space, {{{f, Rational(2)}, {f, Rational(-1)}}}),
                  InputError);
}

TEST_CASE("convex hull") {
  std::vector<Point2> pts = {{0, 0}, {2, 0}, {1, 0}, {2, 2}, {0, 2},
                             {1, 1}, {0, 1}, {2, 2}};
  auto hull = ConvexHull(pts);
  CHECK(hull == std::vector<Point2>{{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  CHECK(ConvexHull({{1, 1}}).size() == 1);
  CHECK(ConvexHull({{1, 1}, {1, 1}}).size() == 1);
  CHECK(InitialDirections(3).size() == 3);
  auto dirs = InitialDirections(20);
  CHECK(dirs.size() == 20);
  CHECK(dirs[8] == std::pair<int, int>{-2, -1});
}

TEST_CASE("solver modes agree on random games") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> coord(-3, 3);
  int compared_rules = 0;
  for (int trial = 0; trial < 25; ++trial) {
    GameTree tree(RandomSmallGame(rng));
    MediatorSpace space(tree, false);
    const bool small =
        CountFeedbackRules(space, RuleDomain::kReduced) <= 1100;
    SolverOptions dual;
    SolverOptions pure;
    pure.encoding = ObedienceEncoding::kPureRows;
    SolverOptions rules;
    rules.mode = SolveMode::kRules;
    rules.domain = RuleDomain::kReduced;
    if (CountDeviations(space, 0) > 300 || CountDeviations(space, 1) > 300) {
      continue;
    }
    ObedienceLP dual_lp(space, dual);
    ObedienceLP pure_lp(space, pure);
    for (int d = 0; d < 4; ++d) {
      std::vector<Rational> dir = {coord(rng), coord(rng)};
      DirectionResult a = OptimizeDirection(dual_lp, dir);
      CHECK(a.value == OptimizeDirection(pure_lp, dir).value);
      CHECK(a.value == dir[0] * a.payoff[0] + dir[1] * a.payoff[1]);
      CHECK(VerifyBce(space, a.witness).empty());
      CHECK(PlanOfMixture(space, a.witness) == a.plan);
      if (small && d == 0) {
        CHECK(a.value == OptimizeDirection(space, dir, rules).value);
        ++compared_rules;
      }
      // The witness outcome is a member; so is any mixture of witnesses.
      std::vector<Rational> mu = ObedientDistribution(space, a.plan);
      CHECK(MembershipTest(space, mu).member);
    }
  }
  CHECK(compared_rules > 0);
}

TEST_CASE("leader follower games: solvers and closed form agree") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> pay(0, 4);
  std::uniform_int_distribution<int> coord(-3, 3);
  std::uniform_int_distribution<int> weight(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const int rows = 2 + trial % 2;
    const int cols = 2 + (trial / 2) % 2;
    std::vector<std::string> r_labels, c_labels;
    for (int r = 0; r < rows; ++r) r_labels.push_back("r" + std::to_string(r));
    for (int c = 0; c < cols; ++c) c_labels.push_back("c" + std::to_string(c));
    std::vector<std::vector<std::vector<Rational>>> u(
        2, std::vector<std::vector<Rational>>(rows, std::vector<Rational>(cols)));
    for (auto& m : u) {
      for (auto& row : m) {
        for (Rational& x : row) x = pay(rng);
      }
    }
    GameTree tree(SequentialMatrixGame(r_labels, c_labels, u));
    MediatorSpace space(tree, false);
    SolverOptions pure;
    pure.encoding = ObedienceEncoding::kPureRows;
    SolverOptions full;
    full.mode = SolveMode::kRules;
    SolverOptions reduced = full;
    reduced.domain = RuleDomain::kReduced;
    for (int d = 0; d < 3; ++d) {
      std::vector<Rational> dir = {coord(rng), coord(rng)};
      const Rational v = OptimizeDirection(space, dir).value;
      CHECK(OptimizeDirection(space, dir, pure).value == v);
      if (CountFeedbackRules(space, RuleDomain::kFull) <= 500) {
        CHECK(OptimizeDirection(space, dir, full).value == v);
      }
      CHECK(OptimizeDirection(space, dir, reduced).value == v);
    }
    for (int k = 0; k < 20; ++k) {
      std::vector<Rational> target(tree.NumTerminals());
      int total = 0;
      std::vector<int> w(target.size());
      for (int& x : w) total += (x = weight(rng));
      if (total == 0) continue;
      for (size_t t = 0; t < w.size(); ++t) target[t] = Ratio(w[t], total);
      const bool closed_form = LeaderFollowerViolations(tree, target)->empty();
      CHECK(MembershipTest(space, target).member == closed_form);
      if (k % 5 == 0) {
        CHECK(MembershipTest(space, target, reduced).member == closed_form);
      }
    }
  }
}

TEST_CASE("bce set is convex") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    GameTree tree(RandomSmallGame(rng));
    MediatorSpace space(tree, false);
    auto a = OptimizeDirection(space, {1, 0});
    auto b = OptimizeDirection(space, {-1, 2});
    const Rational lambda = RandomProbability(rng);
    Plan mix(space.NumVars());
    for (int v = 0; v < space.NumVars(); ++v) {
      mix[v] = lambda * a.plan[v] + (1 - lambda) * b.plan[v];
    }
    CHECK(VerifyPlan(space, mix).empty());
    CHECK(MembershipTest(space, ObedientDistribution(space, mix)).member);
  }
}

TEST_CASE("random plans decompose exactly") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    GameTree tree(RandomSmallGame(rng));
    MediatorSpace space(tree, false);
    // Random behavior plan of the mediator.
    Plan y(space.NumVars());
    for (const auto& f : space.Flows()) {
      const Rational mass = f.parent_var < 0 ? Rational(1) : y[f.parent_var];
      Rational left = mass;
      for (size_t k = 0; k < f.vars.size(); ++k) {
        Rational p = k + 1 == f.vars.size() ? left : mass * RandomProbability(rng);
        if (p > left) p = left;
        y[f.vars[k]] = p;
        left -= p;
      }
    }
    REQUIRE(IsPlan(space, y));
    BCEMixture m = DecomposePlan(space, y);
    CHECK(PlanOfMixture(space, m) == y);
    int support = 0;
    for (const Rational& v : y) support += sgn(v) > 0;
    CHECK(static_cast<int>(m.entries.size()) <= support);
  }
}

}  // namespace
}  // namespace bce
