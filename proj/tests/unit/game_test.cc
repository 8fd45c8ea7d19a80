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

#include "bce/game.h"

#include "doctest.h"

namespace bce {
namespace {

// Two players, player 1 moves first (T/B), player 2 then moves (L/R)
// without observing player 1.
BaseGame TwoStage() {
  BaseGame g;
  g.players = {"1", "2"};
  g.stages = 2;
  g.actions = {{{"T", "B"}, {"-"}}, {{"-"}, {"L", "R"}}};
  g.kernel = NoChanceKernel(2);
  g.payoff = std::make_shared<FunctionPayoff>([](const History& h) {
    static const int u[2][2][2] = {{{2, 2}, {0, 1}}, {{3, 0}, {1, 1}}};
    const int* v = u[h.actions[0][0]][h.actions[1][1]];
    return std::optional<std::vector<Rational>>({Rational(v[0]),
                                                 Rational(v[1])});
  });
  NormalizeShapes(&g);
  return g;
}

// One player picks a in {0,1}; omega_2 = 1 with probability 1/2 or 5/6.
BaseGame ChanceGame(Rational mass = Rational(1)) {
  BaseGame g;
  g.players = {"1"};
  g.stages = 2;
  g.actions = {{{"0", "1"}, {"-"}}};
  g.states = {{"-"}, {"0", "1"}};
  g.kernel = std::make_shared<FunctionKernel>(
      [mass] { return std::vector<Outcome>{{{}, {0}, {}, 0, mass}}; },
      [](const History&, const Profile& a) {
        Rational hi = a[0] == 1 ? Rational(5, 6) : Rational(1, 2);
        return std::vector<Outcome>{{a, {0}, {}, 1, hi},
                                    {a, {0}, {}, 0, 1 - hi}};
      });
  g.payoff = std::make_shared<FunctionPayoff>([](const History& h) {
    return std::optional<std::vector<Rational>>(
        {Rational(h.states[1] == 0 ? 1 : 0)});
  });
  NormalizeShapes(&g);
  return g;
}

TEST_CASE("rational parse and format") {
  CHECK(FormatRational(ParseRational("4/6")) == "2/3");
  CHECK(FormatRational(ParseRational("-3")) == "-3/1");
  CHECK(FormatRational(ParseRational("3"), false) == "3");
  CHECK_THROWS_AS(ParseRational("1/0"), InputError);
  CHECK_THROWS_AS(ParseRational("1/-2"), InputError);
  CHECK_THROWS_AS(ParseRational("x"), InputError);
}

TEST_CASE("valid game has empty report") {
  CHECK(ValidateGame(TwoStage()).ok());
  CHECK(ValidateGame(ChanceGame()).ok());
}

TEST_CASE("initial kernel mass is reported") {
  ValidationReport r = ValidateGame(ChanceGame(Rational(1, 2)));
  REQUIRE_FALSE(r.ok());
  CHECK(r.issues[0].kind == "initial_kernel");
  CHECK_THROWS_AS(GameTree(ChanceGame(Rational(1, 2))), InputError);
}

TEST_CASE("perfect recall violation is reported") {
  BaseGame g = ChanceGame();
  g.kernel = std::make_shared<FunctionKernel>(
      [] { return std::vector<Outcome>{{{}, {0}, {}, 0, Rational(1)}}; },
      [](const History&, const Profile& a) {
        return std::vector<Outcome>{{{1 - a[0]}, {0}, {}, 0, Rational(1)}};
      });
  ValidationReport r = ValidateGame(g);
  bool found = false;
  for (const auto& issue : r.issues) found |= issue.kind == "perfect_recall";
  CHECK(found);
}

TEST_CASE("signal dependent payoffs are reported") {
  BaseGame g = ChanceGame();
  g.signals = {{{"-"}, {"x", "y"}}};
  g.kernel = std::make_shared<FunctionKernel>(
      [] { return std::vector<Outcome>{{{}, {0}, {}, 0, Rational(1)}}; },
      [](const History&, const Profile& a) {
        return std::vector<Outcome>{{a, {0}, {}, 0, Rational(1, 2)},
                                    {a, {1}, {}, 0, Rational(1, 2)}};
      });
  g.payoff = std::make_shared<FunctionPayoff>([](const History& h) {
    return std::optional<std::vector<Rational>>({Rational(h.signals[1][0])});
  });
  ValidationReport r = ValidateGame(g);
  REQUIRE_FALSE(r.ok());
  CHECK(r.issues[0].kind == "signal_dependence");
}

TEST_CASE("terminal histories and probabilities") {
  BaseGame g = TwoStage();
  CHECK(EnumerateTerminalHistories(g).size() == 4);
  BaseGame c = ChanceGame();
  auto terms = EnumerateTerminalHistories(c);
  CHECK(terms.size() == 4);
  History h;
  h.actions = {{1}, {0}};
  h.signals = {{0}, {0}};
  h.states = {0, 1};
  CHECK(OutcomeProbability(c, h) == Rational(5, 6));
  h.actions[0][0] = 0;
  CHECK(OutcomeProbability(c, h) == Rational(1, 2));
  h.states[0] = 1;
  CHECK(OutcomeProbability(c, h) == 0);
  for (const History& t : terms) CHECK(OutcomeProbability(c, t) > 0);
}

TEST_CASE("outcome probabilities telescope") {
  BaseGame c = ChanceGame();
  for (int a = 0; a < 2; ++a) {
    Rational total(0);
    for (const History& t : EnumerateTerminalHistories(c)) {
      if (t.actions[0][0] == a) total += OutcomeProbability(c, t);
    }
    CHECK(total == 1);
  }
}

TEST_CASE("payoffs and private histories") {
  BaseGame g = TwoStage();
  GameTree tree(g);
  CHECK(tree.NumTerminals() == 4);
  int root = tree.StageNodes(0)[0];
  CHECK(tree.node(root).children.size() == 2);
  int after_t = tree.node(root).children[g.EncodeJoint(0, {0, 0})][0];
  CHECK(tree.Payoff(after_t, g.EncodeJoint(1, {0, 0})) ==
        std::vector<Rational>{2, 2});
  int after_b = tree.node(root).children[g.EncodeJoint(0, {1, 0})][0];
  CHECK(tree.Payoff(after_b, g.EncodeJoint(1, {0, 1})) ==
        std::vector<Rational>{1, 1});
  // Player 2 cannot tell the two stage-2 nodes apart.
  CHECK(tree.node(after_t).private_id[1] == tree.node(after_b).private_id[1]);
  CHECK(tree.node(after_t).private_id[0] != tree.node(after_b).private_id[0]);

  History tl = tree.TerminalHistory(after_t, 0);
  PrivateHistory p2 = GetPrivateHistory(g, tl, 1, 2);
  CHECK(p2.actions == std::vector<int>{0});
  PrivateHistory full = GetPrivateHistory(g, tl, 0, 3);
  CHECK(full.actions.size() == 2);
  CHECK_THROWS_AS(GetPrivateHistory(g, tl, 0, 4), InputError);
  CHECK(tree.FindNode(tree.HistoryOf(after_b)) == after_b);
  CHECK(g.HistoryLabel(tl) == "[a1=T a2=L]");
}

TEST_CASE("history cap is enforced") {
  CHECK_THROWS_AS(GameTree(TwoStage(), 2), CapExceeded);
}

}  // namespace
}  // namespace bce
