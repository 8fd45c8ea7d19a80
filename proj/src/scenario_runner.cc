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

#include <algorithm>
#include <random>
#include <sstream>

#include "bce/expansion.h"
#include "bce/games.h"
#include "bce/scenarios.h"

namespace bce {

BaseGame GenericLeaderFollowerGame() {
  const std::vector<std::vector<int>> u1 = {{4, 0, 2}, {1, 3, 5}, {2, 6, 0}};
  const std::vector<std::vector<int>> u2 = {{3, 1, 0}, {0, 2, 4}, {5, 0, 1}};
  std::vector<std::vector<std::vector<Rational>>> u(2);
  for (int r = 0; r < 3; ++r) {
    u[0].emplace_back();
    u[1].emplace_back();
    for (int c = 0; c < 3; ++c) {
      u[0][r].push_back(Rational(u1[r][c]));
      u[1][r].push_back(Rational(u2[r][c]));
    }
  }
  return SequentialMatrixGame({"U", "M", "D"}, {"x", "y", "z"}, u);
}

std::vector<std::string> ScenarioNames() {
  return {"example1", "example2", "example2_reinterpreted", "example3",
          "example4_generic", "table1", "bargaining"};
}

Scenario BuildScenario(const std::string& name,
                       const std::optional<BargainingParams>& bargaining) {
  Scenario s;
  s.name = name;
  if (name == "example1") {
    s.description = "two-stage leader-follower game with payoffs "
                    "(2,2) (0,1) (3,0) (1,1)";
    s.game = Example1Game();
  } else if (name == "example2") {
    s.description = "two independent fair coins drawn at stages 1 and 2, "
                    "message correlated with the second coin";
    s.game = Example2Game();
    s.kernels = Example2Kernels();
  } else if (name == "example2_reinterpreted") {
    s.description = "both coins drawn at stage 1";
    s.game = Example2ReinterpretedGame();
    s.kernels = Example2ReinterpretedKernels();
  } else if (name == "example3") {
    s.description = "single player whose first action shifts the odds of "
                    "the second-stage state";
    s.game = Example3Game();
    s.kernels = Example3Kernels();
  } else if (name == "example4_generic") {
    s.description = "leader-follower game with generic 3x3 payoffs";
    s.game = GenericLeaderFollowerGame();
  } else if (name == "table1") {
    s.description = "two-period choice problem with actions l, c, r";
    s.problem = TableOneProblem();
    s.game = DecisionGame(*s.problem);
  } else if (name == "bargaining") {
    s.bargaining = bargaining ? *bargaining : DeskBargaining();
    CheckBargaining(*s.bargaining);
    s.description = "seller offers, buyer with private value accepts or "
                    "rejects";
    s.game = BargainingGame(s.bargaining->values, s.bargaining->prior,
                            s.bargaining->offers);
  } else {
    throw InputError("unknown scenario '" + name + "'");
  }
  return s;
}

bool ScenarioReport::ok() const {
  return std::all_of(claims.begin(), claims.end(),
                     [](const Claim& c) { return c.pass; });
}

std::string FormatReport(const ScenarioReport& report) {
  size_t width = 0;
  for (const Claim& c : report.claims) width = std::max(width, c.claim.size());
  std::ostringstream out;
  out << "scenario " << report.name << "\n";
  for (const Claim& c : report.claims) {
    out << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.claim
        << std::string(width - c.claim.size(), ' ') << "  expected "
        << c.expected << "  computed " << c.computed << "  [" << c.basis
        << "]\n";
  }
  if (!report.details.empty()) out << report.details;
  out << (report.ok() ? "all claims hold\n" : "some claims fail\n");
  return out.str();
}

namespace {

std::string Fmt(const Rational& x) { return FormatRational(x); }
std::string Bool(bool b) { return b ? "true" : "false"; }

std::string PointLabel(const Point2& p) {
  return "(" + Fmt(p.first) + "," + Fmt(p.second) + ")";
}

std::string PointsLabel(const std::vector<Point2>& points) {
  std::string out = "{";
  for (size_t k = 0; k < points.size(); ++k) {
    if (k > 0) out += ", ";
    out += PointLabel(points[k]);
  }
  return out + "}";
}

class Reporter {
 public:
  explicit Reporter(std::string name) { report_.name = std::move(name); }

  void Add(std::string claim, std::string expected, std::string computed,
           std::string basis) {
    const bool pass = expected == computed;
    report_.claims.push_back({std::move(claim), std::move(expected),
                              std::move(computed), pass, std::move(basis)});
  }
  void Detail(const std::string& text) { report_.details += text; }
  ScenarioReport Take() { return std::move(report_); }

 private:
  ScenarioReport report_;
};

// Obedient distribution that puts all weight on one joint profile of a game
// without chance.
std::vector<Rational> PointTarget(const GameTree& tree,
                                  const std::vector<int>& joint) {
  int node = tree.StageNodes(0)[0];
  for (size_t t = 0; t + 1 < joint.size(); ++t) {
    node = tree.node(node).children[joint[t]][0];
  }
  std::vector<Rational> target(tree.NumTerminals());
  target[tree.TerminalId(node, joint.back())] = 1;
  return target;
}

ScenarioReport RunExample1(const Scenario& s, const ScenarioOptions& opt) {
  Reporter r(s.name);
  const BaseGame& g = s.game;
  r.Add("game validates", "ok", ValidateGame(g).ok() ? "ok" : "invalid",
        "trivial");
  GameTree tree(g);
  MediatorSpace space(tree, false);

  std::vector<Point2> pure;
  std::string leaves;
  for (int x = 0; x < tree.NumTerminals(); ++x) {
    auto [node, a] = tree.TerminalParts(x);
    const auto& u = tree.Payoff(node, a);
    pure.push_back({u[0], u[1]});
    leaves += (x > 0 ? " " : "") + PointLabel(pure.back());
  }
  r.Add("leaf payoffs (TL TR BL BR)", "(2/1,2/1) (0/1,1/1) (3/1,0/1) (1/1,1/1)",
        leaves, "reported");

  const std::vector<Point2> expected_bce = ConvexHull(
      {{Rational(1), Rational(1)}, {Rational(2), Rational(2)},
       {Ratio(5, 2), Rational(1)}});
  const std::vector<Point2> bce =
      PayoffPolytope2P(space, opt.directions, opt.solver);
  r.Add("BCE payoff polytope vertices", PointsLabel(expected_bce),
        PointsLabel(bce), "reported");

  DirectionResult best = OptimizeDirection(space, {1, 0}, opt.solver);
  r.Add("max player 1 payoff over BCE", "5/2", Fmt(best.value), "reported");

  const std::vector<Point2> expected_feasible =
      ConvexHull({{Rational(3), Rational(0)}, {Rational(2), Rational(2)},
                  {Rational(0), Rational(1)}});
  r.Add("feasible payoff hull", PointsLabel(expected_feasible),
        PointsLabel(ConvexHull(pure)), "derived");

  // Always recommend (T, L), even after player 1 disobeys.
  FeedbackRule always{RuleDomain::kReduced,
                      std::vector<int>(tree.NumNodes(), 0)};
  BCEMixture point;
  point.entries.push_back({always, Rational(1)});
  std::vector<BCEViolation> v = VerifyBce(space, point);
  std::string dev = "none";
  for (const BCEViolation& b : v) {
    if (b.player == 0) dev = Fmt(Rational(2) + b.gain);
  }
  r.Add("player 1 deviation payoff against unconditional (T,L)", "3/1", dev,
        "reported");

  const std::vector<Rational> tr = PointTarget(tree, {0, 1});
  MembershipResult m = MembershipTest(space, tr, opt.solver);
  r.Add("mu(T,R) = 1 is a BCE distribution", "false", Bool(m.member),
        "reported");
  std::string violated;
  bool named = false;
  const auto closed_form = LeaderFollowerViolations(tree, tr);
  for (const std::string& s2 : *closed_form) {
    violated += (violated.empty() ? "" : "; ") + s2;
    named = named || s2 == "mu(B,R) >= mu(T,R)";
  }
  r.Add("mu(T,R) = 1 violates mu(B,R) >= mu(T,R)", "true", Bool(named),
        "reported");

  std::ostringstream d;
  d << "  violated by mu(T,R) = 1: " << violated << "\n";
  d << "  BCE vertices:";
  for (const Point2& p : bce) d << " " << PointLabel(p);
  d << "\n  player-1-optimal BCE:\n" << DescribeMixture(space, best.witness);
  r.Detail(d.str());
  return r.Take();
}

ScenarioReport RunKernelScenario(const Scenario& s) {
  Reporter r(s.name);
  r.Add("base game validates", "ok", ValidateGame(s.game).ok() ? "ok" : "invalid",
        "trivial");
  const bool reinterpreted = s.name == "example2_reinterpreted";
  r.Add("kernels are consistent", "true",
        Bool(ConsistencyCheck(s.game, *s.kernels)), "reported");
  FactorizationResult f = FactorizationTest(s.game, *s.kernels);
  r.Add("kernels factor through an expansion", Bool(reinterpreted),
        Bool(f.factorizable), "reported");
  if (!f.reason.empty()) r.Detail("  factorization fails: " + f.reason + "\n");
  if (reinterpreted && f.witness) {
    bool match = true;
    for (int w = 0; w < 4; ++w) {
      History partial;
      partial.signals = {{0}};
      partial.states = {w};
      const int want = ((w % 2) - (w / 2) + 2) % 2;
      MessageDraw draw = f.witness->xi(partial);
      match = match && draw.size() == 1 && draw[0].first == Profile{want} &&
              draw[0].second == 1;
    }
    r.Add("witness sends m = omega_2 - omega_1 mod 2 surely", "true",
          Bool(match), "reported");
  }
  if (s.name != "example3") return r.Take();

  GameTree pi_tree(*s.kernels);
  const Rational best =
      EnumerateBestValue(pi_tree, PlayMessageProfile(pi_tree), 0);
  r.Add("optimal payoff under the information structure", "2/3", Fmt(best),
        "reported");

  GameTree tree(s.game);
  MediatorSpace space(tree, false);
  std::vector<Rational> mu(tree.NumTerminals());
  const Rational p[2][2] = {{Ratio(1, 2), 0}, {Ratio(1, 6), Ratio(1, 3)}};
  const int root = tree.StageNodes(0)[0];
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int child : tree.node(root).children[a1]) {
      mu[tree.TerminalId(child, 0)] = p[a1][tree.node(child).state];
    }
  }
  r.Add("induced (a_1, omega_2) distribution is a BCE distribution", "false",
        Bool(MembershipTest(space, mu).member), "reported");
  r.Add("best BCE payoff of the base game", "1/2",
        Fmt(OptimizeDirection(space, {1}).value), "derived");
  return r.Take();
}

ScenarioReport RunExample4(const Scenario& s, const ScenarioOptions& opt) {
  Reporter r(s.name);
  GameTree tree(s.game);
  MediatorSpace space(tree, false);
  std::mt19937 rng(opt.seed);
  std::uniform_int_distribution<int> draw(0, 4);
  int agree = 0;
  for (int k = 0; k < opt.random_targets; ++k) {
    std::vector<int> w(tree.NumTerminals());
    int total = 0;
    while (total == 0) {
      total = 0;
      for (int& x : w) total += (x = draw(rng));
    }
    std::vector<Rational> target;
    for (int x : w) target.push_back(Rational(x, total));
    target.back() = 1;
    for (size_t x = 0; x + 1 < w.size(); ++x) target.back() -= target[x];
    const bool lp = MembershipTest(space, target, opt.solver).member;
    const bool closed = LeaderFollowerViolations(tree, target)->empty();
    agree += lp == closed;
  }
  const std::string n = std::to_string(opt.random_targets);
  r.Add("membership agrees with the closed-form inequalities", n + "/" + n,
        std::to_string(agree) + "/" + n, "reported");
  return r.Take();
}

ScenarioReport RunTable1(const Scenario& s, const ScenarioOptions& opt) {
  Reporter r(s.name);
  DecisionModel model(*s.problem);
  const std::vector<int> target = {0, 1};
  RationalizabilityVerdict v = IsRationalizable(model, target, opt.solver);
  r.Add("(l,c) is rationalizable", "true", Bool(v.rationalizable), "reported");
  DominanceResult truly = IsTrulyDominated(*s.problem, target, opt.solver.lp);
  r.Add("(l,c) is truly dominated", "true", Bool(truly.dominated), "reported");
  DominanceResult sure = IsSurelyDominated(*s.problem, target, {},
                                           opt.solver.lp);
  r.Add("(l,c) is surely dominated", "false", Bool(sure.dominated),
        "reported");
  if (v.witness) {
    r.Add("rationalizing witness satisfies obedience", "true",
          Bool(VerifyBce(model.space(), *v.witness).empty()), "derived");
    r.Detail("  witness (weight on (l,c) paths " + Fmt(v.max_weight) +
             "):\n" + DescribeMixture(model.space(), *v.witness));
  }
  if (truly.plan) {
    r.Detail("  truly dominating plan:\n" + DescribePlan(*s.problem, *truly.plan));
  }
  return r.Take();
}

ScenarioReport RunBargaining(const Scenario& s) {
  Reporter r(s.name);
  BargainingModel model(*s.bargaining);
  const Rational lm = model.low_minus(), e = model.mean();
  const bool desk = s.bargaining->offers == DeskBargaining().offers &&
                    s.bargaining->values == DeskBargaining().values &&
                    s.bargaining->prior == DeskBargaining().prior;
  if (desk) {
    r.Add("largest offer below the lowest value", "1/2", Fmt(lm), "derived");
    r.Add("expected value", "3/2", Fmt(e), "derived");
  }
  const std::vector<std::pair<BargainingVertex, Point2>> vertices = {
      {BargainingVertex::kSellerLow, {e - lm, lm}},
      {BargainingVertex::kFullExtraction, {Rational(0), e}},
      {BargainingVertex::kBuyerIndifferent, {Rational(0), lm}},
  };
  std::vector<Point2> verified;
  std::ostringstream d;
  for (const auto& [vertex, expected] : vertices) {
    SequentialConstruction c;
    try {
      c = BargainingConstruction(model, vertex);
    } catch (const InputError& err) {
      r.Add("construction for vertex " + PointLabel(expected), "available",
            std::string("unavailable: ") + err.what(), "derived");
      continue;
    }
    std::vector<RefinementViolation> v =
        VerifySbce(model.space(), c.range, c.mixture, c.ground, c.cps);
    r.Add(c.name + ": SBCE violations", "0", std::to_string(v.size()),
          "derived");
    const Point2 payoff = {c.payoff[0], c.payoff[1]};
    r.Add(c.name + ": payoff (buyer, seller)", PointLabel(expected),
          PointLabel(payoff), "derived");
    const bool bounds = sgn(payoff.first) >= 0 && payoff.second >= lm &&
                        payoff.first + payoff.second <= e;
    r.Add(c.name + ": buyer >= 0, seller >= low offer, sum <= mean", "true",
          Bool(bounds), "reported");
    if (v.empty()) verified.push_back(payoff);
    d << "  " << c.name << ":\n" << DescribeMixture(model.space(), c.mixture);
  }
  r.Add("hull of verified construction payoffs",
        PointsLabel(ConvexHull({vertices[0].second, vertices[1].second,
                                vertices[2].second})),
        PointsLabel(ConvexHull(verified)), "reported");
  r.Detail(d.str());
  return r.Take();
}

}  // namespace

ScenarioReport RunScenario(const std::string& name,
                           const ScenarioOptions& options) {
  const Scenario s = BuildScenario(name, options.bargaining);
  if (name == "example1") return RunExample1(s, options);
  if (name == "example4_generic") return RunExample4(s, options);
  if (name == "table1") return RunTable1(s, options);
  if (name == "bargaining") return RunBargaining(s);
  return RunKernelScenario(s);
}

}  // namespace bce
