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

// Acceptance checks. Prints one PASS/FAIL line per criterion, followed by
// indented details, and exits nonzero if any criterion fails. All
// comparisons are exact.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bce/bce.h"
#include "bce/expansion.h"
#include "bce/games.h"
#include "bce/rationalizability.h"
#include "bce/refinement.h"
#include "bce/scenarios.h"
#include "random_games.h"

namespace bce {
namespace {

using testing::RandomProbability;
using testing::RandomSmallGame;

struct CriterionResult {
  bool pass = true;
  std::ostringstream details;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details << "    failed: " << what << "\n";
    }
  }
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string Pt(const Point2& p) {
  return "(" + FormatRational(p.first, false) + ", " +
         FormatRational(p.second, false) + ")";
}

// Terminal id of (row, column) in the leader-follower game.
int LeaderFollowerTerminal(const GameTree& tree, int row, int col) {
  const int root = tree.StageNodes(0)[0];
  return tree.TerminalId(tree.node(root).children[row][0], col);
}

void Criterion1(CriterionResult* out) {
  const auto start = std::chrono::steady_clock::now();
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  const std::vector<Point2> vertices = PayoffPolytope2P(space);
  const Rational best = OptimizeDirection(space, {1, 0}).value;
  const double secs = Seconds(start);

  const std::set<Point2> expected = {{Rational(1), Rational(1)},
                                     {Rational(2), Rational(2)},
                                     {Ratio(5, 2), Rational(1)}};
  const std::set<Point2> got(vertices.begin(), vertices.end());
  out->details << "    vertices:";
  for (const Point2& p : vertices) out->details << " " << Pt(p);
  out->details << "\n    max player 1 payoff " << FormatRational(best, false)
               << ", " << secs << " s\n";
  out->Require(got == expected && got.size() == vertices.size(),
               "vertex set is {(1, 1), (2, 2), (5/2, 1)}");
  out->Require(best == Ratio(5, 2), "optimize_direction(1, 0) = 5/2");
  out->Require(secs < 1.0, "runtime below 1 s");
}

void Criterion2(CriterionResult* out) {
  const auto start = std::chrono::steady_clock::now();
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  const int tl = LeaderFollowerTerminal(tree, 0, 0);
  const int tr = LeaderFollowerTerminal(tree, 0, 1);
  const int bl = LeaderFollowerTerminal(tree, 1, 0);
  const int br = LeaderFollowerTerminal(tree, 1, 1);
  std::mt19937 rng(20260101);
  int agree = 0, members = 0;
  const int kTrials = 1000;
  for (int k = 0; k < kTrials; ++k) {
    // Alternate coarse draws (many ties and zeros) and fine draws.
    std::uniform_int_distribution<int> draw(0, k % 2 == 0 ? 3 : 997);
    std::vector<int> w(4);
    int total = 0;
    while (total == 0) {
      total = 0;
      for (int& x : w) total += (x = draw(rng));
    }
    std::vector<Rational> mu(tree.NumTerminals());
    mu[tl] = Rational(w[0], total);
    mu[tr] = Rational(w[1], total);
    mu[bl] = Rational(w[2], total);
    mu[br] = Rational(w[3], total);
    for (Rational& x : mu) x.canonicalize();
    const bool closed =
        mu[tl] >= mu[bl] && mu[br] >= mu[tr] && mu[tl] >= mu[tr];
    const bool lp = MembershipTest(space, mu).member;
    agree += closed == lp;
    members += lp;
  }
  const double secs = Seconds(start);
  out->details << "    agreement " << agree << "/" << kTrials << ", "
               << members << " members, " << secs << " s\n";
  out->Require(agree == kTrials, "100% agreement");
  out->Require(secs < 30.0, "runtime below 30 s");
}

void Criterion3(CriterionResult* out) {
  out->Require(ConsistencyCheck(Example2Game(), Example2Kernels()),
               "example 2 kernels consistent");
  out->Require(!FactorizationTest(Example2Game(), Example2Kernels())
                    .factorizable,
               "example 2 kernels do not factor");
  FactorizationResult re = FactorizationTest(Example2ReinterpretedGame(),
                                             Example2ReinterpretedKernels());
  out->Require(re.factorizable && re.witness.has_value(),
               "reinterpreted kernels factor");
  if (re.witness) {
    // The witness sends m = omega_2 - omega_1 mod 2 for sure.
    for (int w = 0; w < 4; ++w) {
      History partial;
      partial.signals = {{0}};
      partial.states = {w};
      const int want = ((w % 2) - (w / 2) + 2) % 2;
      MessageDraw draw = re.witness->xi(partial);
      out->Require(draw.size() == 1 && draw[0].first == Profile{want} &&
                       draw[0].second == 1,
                   "witness message at state " + std::to_string(w));
    }
  }

  out->Require(ConsistencyCheck(Example3Game(), Example3Kernels()),
               "example 3 kernels consistent");
  out->Require(
      !FactorizationTest(Example3Game(), Example3Kernels()).factorizable,
      "example 3 kernels do not factor");
  GameTree pi(Example3Kernels());
  const Rational best = EnumerateBestValue(pi, PlayMessageProfile(pi), 0);
  out->details << "    example 3 optimal payoff " << FormatRational(best, false)
               << "\n";
  out->Require(best == Ratio(2, 3), "example 3 optimal payoff 2/3");

  GameTree tree(Example3Game());
  MediatorSpace space(tree, false);
  std::vector<Rational> mu(tree.NumTerminals());
  const Rational p[2][2] = {{Ratio(1, 2), 0}, {Ratio(1, 6), Ratio(1, 3)}};
  const int root = tree.StageNodes(0)[0];
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int child : tree.node(root).children[a1]) {
      mu[tree.TerminalId(child, 0)] = p[a1][tree.node(child).state];
    }
  }
  out->Require(!MembershipTest(space, mu).member,
               "example 3 distribution is not a BCE distribution");
}

void Criterion4(CriterionResult* out) {
  const DecisionProblem p = TableOneProblem();
  const std::vector<int> target = {0, 1};
  DecisionModel model(p);
  RationalizabilityVerdict v = IsRationalizable(model, target);
  out->Require(v.rationalizable && !v.boundary, "(l, c) rationalizable");
  out->Require(IsTrulyDominated(p, target).dominated,
               "(l, c) truly dominated");
  out->Require(!IsSurelyDominated(p, target).dominated,
               "(l, c) not surely dominated");
  out->Require(v.witness.has_value() &&
                   VerifyBce(model.space(), *v.witness).empty(),
               "witness satisfies every obedience row");
  if (v.witness) {
    out->details << "    weight on (l, c) " << FormatRational(v.max_weight)
                 << "\n";
  }
}

DecisionProblem RandomProblem(std::mt19937& rng) {
  std::uniform_int_distribution<int> size(1, 3), value(0, 6);
  DecisionProblem p;
  p.periods = 2;
  for (int t = 0; t < 2; ++t) {
    std::vector<std::string> a;
    const int n = size(rng);
    for (int k = 0; k < n; ++k) a.push_back(std::string(1, 'a' + k));
    p.actions.push_back(a);
  }
  const int states = size(rng);
  for (int s = 0; s < states; ++s) p.states.push_back("s" + std::to_string(s));
  for (int code = 0; code < p.NumProfiles(); ++code) {
    std::vector<Rational> u;
    for (int s = 0; s < states; ++s) u.push_back(Rational(value(rng), 2));
    p.utility.push_back(u);
  }
  return p;
}

void Criterion5(CriterionResult* out) {
  std::mt19937 rng(20260415);
  int instances = 0, rationalizable = 0, dominated = 0;
  for (int k = 0; k < 200; ++k) {
    DecisionProblem p = RandomProblem(rng);
    DecisionModel model(p);
    for (int code = 0; code < p.NumProfiles(); ++code) {
      const std::vector<int> target = p.Decode(code);
      RationalizabilityVerdict v = IsRationalizable(model, target);
      const bool sure = IsSurelyDominated(p, target).dominated;
      const bool truly = IsTrulyDominated(p, target).dominated;
      ++instances;
      rationalizable += v.rationalizable;
      dominated += sure;
      out->Require(!v.boundary && v.rationalizable != sure,
                   "XOR on problem " + std::to_string(k) + " target " +
                       p.ProfileLabel(code));
      out->Require(!sure || truly, "sure implies true dominance on problem " +
                                       std::to_string(k));
    }
  }
  out->details << "    " << instances << " targets on 200 problems: "
               << rationalizable << " rationalizable, " << dominated
               << " surely dominated\n";
}

void Criterion6(CriterionResult* out) {
  std::mt19937 rng(606);
  std::uniform_int_distribution<int> coord(-4, 4);
  for (int k = 0; k < 100; ++k) {
    GameTree tree(RandomSmallGame(rng));
    MediatorSpace space(tree, false);
    std::vector<Rational> direction = {coord(rng), coord(rng)};
    DirectionResult r = OptimizeDirection(space, direction);
    const std::string tag = "game " + std::to_string(k);
    out->Require(VerifyBce(space, r.witness).empty(), tag + ": witness is a BCE");
    BaseGame induced_game =
        InduceGame(space.game(), CanonicalExpansion(space, r.witness));
    out->Require(ConsistencyCheck(space.game(), induced_game),
                 tag + ": induced kernels consistent");
    GameTree induced(induced_game);
    BehaviorProfile obey = PlayMessageProfile(induced);
    out->Require(BestResponseCheck(induced, obey).empty(),
                 tag + ": obedience is a best response");
    out->Require(ProjectToBase(induced, TerminalDistribution(induced, obey),
                               tree) == OutcomeDistributionOf(space, r.witness),
                 tag + ": outcome distribution reproduced");
  }
}

void Criterion7(CriterionResult* out) {
  const BargainingParams params = DeskBargaining();
  BargainingModel model(params);
  const MediatorSpace& space = model.space();
  // omega_L^-: the largest offer below the lowest value; E: the mean value.
  Rational low_minus(-1), mean(0);
  for (const Rational& o : params.offers) {
    if (o < params.values.front()) low_minus = o;
  }
  for (size_t k = 0; k < params.values.size(); ++k) {
    mean += params.prior[k] * params.values[k];
  }
  const std::vector<std::pair<BargainingVertex, Point2>> cases = {
      {BargainingVertex::kSellerLow, {Rational(1), Ratio(1, 2)}},
      {BargainingVertex::kFullExtraction, {Rational(0), Ratio(3, 2)}},
      {BargainingVertex::kBuyerIndifferent, {Rational(0), Ratio(1, 2)}}};
  // Payoffs are compared as (buyer, seller).
  const int buyer = space.game().PlayerIndex("buyer");
  const int seller = space.game().PlayerIndex("seller");
  std::vector<Point2> payoffs;
  for (const auto& [vertex, expected] : cases) {
    SequentialConstruction c = BargainingConstruction(model, vertex);
    const auto violations =
        VerifySbce(space, c.range, c.mixture, c.ground, c.cps);
    const std::vector<Rational> u = ExpectedPayoff(
        space, OutcomeUnderMixture(space, c.mixture, Obedient()));
    const Point2 got = {u[buyer], u[seller]};
    out->details << "    " << c.name << ": " << violations.size()
                 << " violations, payoff " << Pt(got) << "\n";
    out->Require(violations.empty(), c.name + " passes verify_sbce");
    out->Require(got == expected, c.name + " payoff " + Pt(expected));
    out->Require(got.first >= 0, c.name + " buyer payoff >= 0");
    out->Require(got.second >= low_minus, c.name + " seller payoff >= low");
    out->Require(got.first + got.second <= mean, c.name + " sum <= mean");
    payoffs.push_back(got);
  }
  const std::vector<Point2> formula = ConvexHull(
      {{Rational(0), low_minus}, {Rational(0), mean}, {mean - low_minus, low_minus}});
  out->Require(ConvexHull(payoffs) == formula,
               "hull matches co{(0, low), (0, E), (E - low, low)}");
}

BCEMixture Combine(const BCEMixture& a, const BCEMixture& b,
                   const Rational& lambda) {
  BCEMixture m;
  for (MixtureEntry e : a.entries) {
    e.weight *= lambda;
    m.entries.push_back(e);
  }
  for (MixtureEntry e : b.entries) {
    e.weight *= 1 - lambda;
    m.entries.push_back(e);
  }
  return m;
}

void Criterion8(CriterionResult* out) {
  GameTree tree(Example1Game());
  MediatorSpace space(tree, false);
  std::mt19937 rng(808);
  std::uniform_int_distribution<int> coord(-5, 5), den(1, 12);
  auto random_bce = [&]() {
    std::vector<Rational> d = {coord(rng), coord(rng)};
    return OptimizeDirection(space, d).witness;
  };
  for (int k = 0; k < 100; ++k) {
    BCEMixture a = random_bce(), b = random_bce();
    const std::string tag = "pair " + std::to_string(k);
    out->Require(VerifyBce(space, a).empty() && VerifyBce(space, b).empty(),
                 tag + ": inputs verified");
    const int q = den(rng);
    Rational lambda(std::uniform_int_distribution<int>(0, q)(rng), q);
    lambda.canonicalize();
    out->Require(VerifyBce(space, Combine(a, b, lambda)).empty(),
                 tag + ": mixture with weight " + FormatRational(lambda));
  }
}

void Criterion9(CriterionResult* out) {
  std::mt19937 rng(909);
  int64_t deviations = 0;
  for (int k = 0; k < 50; ++k) {
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
    RecommendationKernels kernels = KernelsFromMixture(space, m);
    const std::string tag = "game " + std::to_string(k);
    out->Require(OutcomeUnderKernels(space, kernels, Obedient()) ==
                     OutcomeUnderMixture(space, m, Obedient()),
                 tag + ": obedient play");
    for (int i = 0; i < space.NumPlayers(); ++i) {
      for (const DeviationStrategy& d :
           EnumerateDeviations(space, i, CountDeviations(space, i))) {
        ++deviations;
        if (OutcomeUnderKernels(space, kernels, d) !=
            OutcomeUnderMixture(space, m, d)) {
          out->Require(false, tag + ": deviation of player " +
                                  std::to_string(i + 1) + " " +
                                  DescribeDeviation(space, d));
        }
      }
    }
  }
  out->details << "    " << deviations << " pure deviations compared\n";
}

}  // namespace
}  // namespace bce

int main() {
  using Check = std::function<void(bce::CriterionResult*)>;
  const std::vector<std::pair<std::string, Check>> criteria = {
      {"example 1 BCE payoff polytope and player 1 optimum", bce::Criterion1},
      {"leader-follower membership matches the inequality set",
       bce::Criterion2},
      {"consistency and factorization of examples 2 and 3", bce::Criterion3},
      {"table 1 target: rationalizable, truly but not surely dominated",
       bce::Criterion4},
      {"rationalizable XOR surely dominated on random problems",
       bce::Criterion5},
      {"BCE round trip through the canonical expansion", bce::Criterion6},
      {"bargaining constructions and payoff bounds", bce::Criterion7},
      {"convexity of the BCE set", bce::Criterion8},
      {"kernels reproduce mixtures under every pure deviation",
       bce::Criterion9},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    bce::CriterionResult out;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[k].second(&out);
    } catch (const std::exception& e) {
      out.Require(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << k + 1 << ": " << (out.pass ? "PASS" : "FAIL")
              << "  " << criteria[k].first << "\n"
              << out.details.str() << "    time " << bce::Seconds(start)
              << " s\n"
              << std::flush;
    failed += !out.pass;
  }
  std::cout << (failed == 0 ? "all criteria pass"
                            : std::to_string(failed) + " criteria fail")
            << "\n";
  return failed == 0 ? 0 : 1;
}
