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

// bce-lab: command-line front end.
//
// Exit codes: 0 success or positive answer, 1 negative answer (not a
// member, violations found, dominated, claim failed), 2 usage or input
// error, 3 cap exceeded. Output files are written only after every result
// has been computed, each in full or not at all.

#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "bce/io.h"

namespace bce {
namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kCap = 3;

struct Args {
  std::string game, second;
  std::string out, svg, rules, target, direction;
  int64_t cap_rules = kDefaultRuleCap;
  int64_t cap_histories = kDefaultHistoryCap;
  int directions = 8;
};

// Files to write once the command has succeeded.
using Outputs = std::vector<std::pair<std::string, std::string>>;

SolverOptions Solver(const Args& args) {
  SolverOptions opt;
  opt.cap_rules = args.cap_rules;
  opt.cap_histories = args.cap_histories;
  return opt;
}

std::vector<std::string> Split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::string FormatPoint(const std::vector<Rational>& v) {
  std::string out = "(";
  for (size_t k = 0; k < v.size(); ++k) {
    if (k > 0) out += ", ";
    out += FormatRational(v[k]);
  }
  return out + ")";
}

// Restricted mode switches the solver to the supplied rule family.
void ApplyRules(const Args& args, const MediatorSpace& space,
                SolverOptions* opt) {
  if (args.rules.empty()) return;
  opt->restricted_rules = ParseRules(space, ReadFile(args.rules));
  opt->mode = SolveMode::kRules;
  opt->domain = opt->restricted_rules->front().domain;
}

int Validate(const Args& args, std::ostream& os) {
  const std::string text = ReadFile(args.game);
  if (IsDecisionProblemDocument(text)) {
    DecisionProblem p = ParseDecisionProblem(text);
    os << "valid decision problem: " << p.periods << " periods, "
       << p.NumProfiles() << " action profiles, " << p.NumStates()
       << " states\n";
    return kOk;
  }
  BaseGame g = ParseGame(text);
  ValidationReport r = ValidateGame(g, args.cap_histories);
  if (!r.ok()) {
    os << "invalid game\n" << r.ToString();
    return kNegative;
  }
  GameTree tree(g, args.cap_histories);
  os << "valid game: " << g.NumPlayers() << " players, " << g.stages
     << " stages, " << tree.NumNodes() << " histories, "
     << tree.NumTerminals() << " terminal outcomes\n";
  return kOk;
}

int Solve(const Args& args, std::ostream& os, Outputs* outputs) {
  BaseGame g = LoadGame(args.game);
  GameTree tree(g, args.cap_histories);
  MediatorSpace space(tree, false, args.cap_histories);
  SolverOptions opt = Solver(args);
  ApplyRules(args, space, &opt);
  std::vector<Rational> direction(g.NumPlayers(), Rational(1));
  if (!args.direction.empty()) {
    direction.clear();
    for (const std::string& x : Split(args.direction, ',')) {
      direction.push_back(ParseRational(x));
    }
    if (static_cast<int>(direction.size()) != g.NumPlayers()) {
      throw InputError("--direction needs one weight per player");
    }
  }
  DirectionResult r = OptimizeDirection(space, direction, opt);
  os << "direction " << FormatPoint(direction) << "\n";
  os << "value " << FormatRational(r.value) << "\n";
  os << "payoffs " << FormatPoint(r.payoff) << "\n";
  if (opt.restricted_rules) os << "restricted rule family\n";
  os << "witness\n" << DescribeMixture(space, r.witness);
  if (!args.out.empty()) {
    outputs->push_back({args.out, MixtureToJson(space, r.witness)});
  }
  return kOk;
}

int Membership(const Args& args, std::ostream& os, Outputs* outputs) {
  BaseGame g = LoadGame(args.game);
  GameTree tree(g, args.cap_histories);
  MediatorSpace space(tree, false, args.cap_histories);
  SolverOptions opt = Solver(args);
  ApplyRules(args, space, &opt);
  std::vector<Rational> target = ParseTarget(tree, ReadFile(args.second));
  MembershipResult r = MembershipTest(space, target, opt);
  if (r.member) {
    os << "member\nwitness\n" << DescribeMixture(space, *r.witness);
    if (!args.out.empty()) {
      outputs->push_back({args.out, MixtureToJson(space, *r.witness)});
    }
    return kOk;
  }
  if (r.one_sided) {
    os << "inconclusive: no mixture of the supplied rules reaches the "
          "target\n";
    return kNegative;
  }
  os << "not a member\n";
  auto violated = LeaderFollowerViolations(tree, target);
  if (violated) {
    for (const std::string& v : *violated) os << "violates " << v << "\n";
  }
  for (int i : r.blocking_players) {
    os << "obedience of player " << g.players[i]
       << " alone is incompatible with the target\n";
  }
  return kNegative;
}

int Polytope(const Args& args, std::ostream& os, Outputs* outputs) {
  BaseGame g = LoadGame(args.game);
  if (g.NumPlayers() != 2) throw InputError("polytope needs two players");
  GameTree tree(g, args.cap_histories);
  MediatorSpace space(tree, false, args.cap_histories);
  SolverOptions opt = Solver(args);
  ApplyRules(args, space, &opt);
  std::vector<Point2> bce = PayoffPolytope2P(space, args.directions, opt);
  const std::string csv = PolytopeCsv(bce);
  os << "vertices " << bce.size() << "\n" << csv;
  if (!args.out.empty()) outputs->push_back({args.out, csv});
  if (!args.svg.empty()) {
    std::vector<Point2> pure;
    for (const History& h : EnumerateTerminalHistories(g, args.cap_histories)) {
      std::vector<Rational> u = PayoffVector(g, h);
      pure.push_back({u[0], u[1]});
    }
    outputs->push_back({args.svg, PolytopeSvg(ConvexHull(pure), bce)});
  }
  return kOk;
}

int Rationalize(const Args& args, std::ostream& os, Outputs* outputs) {
  DecisionProblem p = ParseDecisionProblem(ReadFile(args.game));
  if (args.target.empty()) throw InputError("--target is required");
  const std::vector<int> target = p.Decode(p.ProfileIndex(Split(args.target, ',')));
  DecisionModel model(p);
  RationalizabilityVerdict v = IsRationalizable(model, target, Solver(args));
  if (v.boundary) {
    os << "undetermined: the rationalizability LP and the dominance test "
          "disagree\n";
    return kNegative;
  }
  if (v.rationalizable) {
    os << "rationalizable\n";
    os << "weight on target " << FormatRational(v.max_weight) << "\n";
    os << "witness\n" << DescribeMixture(model.space(), *v.witness);
    if (!args.out.empty()) {
      outputs->push_back({args.out, MixtureToJson(model.space(), *v.witness)});
    }
    return kOk;
  }
  os << "surely dominated\n";
  if (v.dominating_plan) {
    os << "dominating plan\n" << DescribePlan(p, *v.dominating_plan);
    if (!args.out.empty()) {
      outputs->push_back({args.out, PlanToJson(p, *v.dominating_plan)});
    }
  }
  return kNegative;
}

void PrintRefinement(const MediatorSpace& space,
                     const std::vector<RefinementViolation>& vs,
                     std::ostream& os) {
  for (const RefinementViolation& v : vs) {
    os << KindName(v.kind) << " player " << space.game().players[v.player];
    if (v.key >= 0) os << " at " << KeyLabel(space, v.player, v.key);
    os << " gain " << FormatRational(v.gain);
    if (!v.description.empty()) os << ": " << v.description;
    os << "\n";
  }
}

int Verify(const Args& args, std::ostream& os) {
  BaseGame g = LoadGame(args.game);
  GameTree tree(g, args.cap_histories);
  MediatorSpace space(tree, false, args.cap_histories);
  Bundle b = ParseBundle(space, ReadFile(args.second));
  const MediationRange range = b.range ? *b.range : FullRange(space);
  size_t count = 0;
  switch (b.kind) {
    case Bundle::Kind::kBce: {
      std::vector<BCEViolation> vs = VerifyBce(space, b.mixture);
      for (const BCEViolation& v : vs) {
        os << "obedience player " << g.players[v.player] << " gain "
           << FormatRational(v.gain) << ": " << v.description << "\n";
      }
      count = vs.size();
      break;
    }
    case Bundle::Kind::kWpbce: {
      RecommendationKernels k = KernelsFromMixture(space, b.mixture, range);
      BeliefSystem beliefs =
          b.bayes_beliefs ? BayesBeliefs(space, k) : EmptyBeliefs(space);
      if (b.beliefs) {
        for (size_t i = 0; i < b.beliefs->belief.size(); ++i) {
          for (size_t key = 0; key < b.beliefs->belief[i].size(); ++key) {
            if (!b.beliefs->belief[i][key].empty()) {
              beliefs.belief[i][key] = b.beliefs->belief[i][key];
            }
          }
        }
      }
      std::vector<RefinementViolation> vs =
          VerifyWpbce(space, range, k, beliefs);
      PrintRefinement(space, vs, os);
      count = vs.size();
      break;
    }
    case Bundle::Kind::kSbce: {
      std::vector<RefinementViolation> vs =
          VerifySbce(space, range, b.mixture, *b.ground, *b.cps);
      PrintRefinement(space, vs, os);
      count = vs.size();
      break;
    }
  }
  os << "violations " << count << "\n";
  if (count == 0) {
    os << "passes\npayoffs "
       << FormatPoint(ExpectedPayoff(
              space, OutcomeUnderMixture(space, b.mixture, Obedient())))
       << "\n";
    return kOk;
  }
  return kNegative;
}

int Scenario(const Args& args, std::ostream& os, Outputs* outputs) {
  ScenarioOptions opt;
  opt.directions = args.directions;
  opt.solver = Solver(args);
  std::vector<std::string> names;
  if (args.game == "all") {
    names = ScenarioNames();
  } else {
    names = {args.game};
  }
  std::vector<ScenarioReport> reports;
  bool ok = true;
  for (const std::string& name : names) {
    BuildScenario(name);  // rejects unknown names before any work
    reports.push_back(RunScenario(name, opt));
    os << FormatReport(reports.back());
    ok = ok && reports.back().ok();
  }
  if (!args.out.empty()) outputs->push_back({args.out, ReportsToJson(reports)});
  return ok ? kOk : kNegative;
}

int Factorize(const Args& args, std::ostream& os, Outputs* outputs) {
  BaseGame base = LoadGame(args.game);
  BaseGame kernels = LoadGame(args.second);
  const bool consistent = ConsistencyCheck(base, kernels, args.cap_histories);
  os << "consistent " << (consistent ? "true" : "false") << "\n";
  FactorizationResult f = FactorizationTest(base, kernels, args.cap_histories);
  os << "factorizable " << (f.factorizable ? "true" : "false") << "\n";
  if (!f.factorizable) {
    os << "reason " << f.reason << "\n";
    return kNegative;
  }
  const std::string listed =
      ExpansionToJson(base, *f.witness, args.cap_histories);
  if (!args.out.empty()) {
    outputs->push_back({args.out, listed});
  } else {
    os << "witness\n" << listed;
  }
  return kOk;
}

int Run(int argc, char** argv) {
  CLI::App app{"Bayes correlated equilibria of finite multi-stage games"};
  app.require_subcommand(1, 1);
  Args args;

  auto caps = [&](CLI::App* sub) {
    sub->add_option("--cap-rules", args.cap_rules,
                    "Maximum number of enumerated feedback rules");
    sub->add_option("--cap-histories", args.cap_histories,
                    "Maximum number of histories");
  };
  auto rules = [&](CLI::App* sub) {
    sub->add_option("--rules", args.rules,
                    "Restricted mode: solve over these feedback rules only")
        ->check(CLI::ExistingFile);
  };

  CLI::App* validate = app.add_subcommand("validate", "Check a game file");
  validate->add_option("game", args.game, "Game or decision problem file")
      ->required();
  caps(validate);

  CLI::App* solve =
      app.add_subcommand("solve", "Maximize a weighted sum of payoffs");
  solve->add_option("game", args.game, "Game file")->required();
  solve->add_option("--direction", args.direction,
                    "Comma-separated player weights (default all 1)");
  solve->add_option("--out", args.out, "Write the witness mixture (JSON)");
  caps(solve);
  rules(solve);

  CLI::App* membership = app.add_subcommand(
      "membership", "Decide whether an outcome distribution is a BCE outcome");
  membership->add_option("game", args.game, "Game file")->required();
  membership->add_option("target", args.second, "Target file")->required();
  membership->add_option("--out", args.out, "Write the witness mixture");
  caps(membership);
  rules(membership);

  CLI::App* polytope = app.add_subcommand(
      "polytope", "Vertices of the two-player BCE payoff set");
  polytope->add_option("game", args.game, "Game file")->required();
  polytope->add_option("--directions", args.directions,
                       "Number of initial search directions");
  polytope->add_option("--out", args.out, "Write the vertices (CSV)");
  polytope->add_option("--svg", args.svg, "Write a plot (SVG)");
  caps(polytope);
  rules(polytope);

  CLI::App* rationalize = app.add_subcommand(
      "rationalize", "Decide whether an action profile is rationalizable");
  rationalize->add_option("problem", args.game, "Decision problem file")
      ->required();
  rationalize->add_option("--target", args.target,
                          "Comma-separated action labels, one per period")
      ->required();
  rationalize->add_option("--out", args.out,
                          "Write the witness mixture or dominating plan");
  caps(rationalize);

  CLI::App* verify = app.add_subcommand(
      "verify", "Check a candidate BCE, wPBCE or SBCE bundle");
  verify->add_option("game", args.game, "Game file")->required();
  verify->add_option("bundle", args.second, "Bundle file")->required();
  caps(verify);

  CLI::App* scenario =
      app.add_subcommand("scenario", "Run a built-in scenario or 'all'");
  scenario->add_option("name", args.game, "Scenario name")->required();
  scenario->add_option("--directions", args.directions,
                       "Number of initial search directions");
  scenario->add_option("--out", args.out, "Write the claims (JSON)");
  caps(scenario);

  CLI::App* factorize = app.add_subcommand(
      "factorize", "Decide whether a kernel family arises from an expansion");
  factorize->add_option("base", args.game, "Base game file")->required();
  factorize->add_option("kernels", args.second, "Kernel family file")
      ->required();
  factorize->add_option("--out", args.out, "Write the expansion (JSON)");
  caps(factorize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (args.cap_rules < 1 || args.cap_histories < 1 || args.directions < 1) {
    std::cerr << "error: caps and --directions must be positive\n";
    return kUsage;
  }

  Outputs outputs;
  std::ostringstream report;
  int code = kOk;
  try {
    if (validate->parsed()) code = Validate(args, report);
    if (solve->parsed()) code = Solve(args, report, &outputs);
    if (membership->parsed()) code = Membership(args, report, &outputs);
    if (polytope->parsed()) code = Polytope(args, report, &outputs);
    if (rationalize->parsed()) code = Rationalize(args, report, &outputs);
    if (verify->parsed()) code = Verify(args, report);
    if (scenario->parsed()) code = Scenario(args, report, &outputs);
    if (factorize->parsed()) code = Factorize(args, report, &outputs);
    for (const auto& [path, text] : outputs) WriteFile(path, text);
  } catch (const CapExceeded& e) {
    std::cout << report.str();
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kCap;
  } catch (const InputError& e) {
    std::cout << report.str();
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cout << report.str();
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::cout << report.str();
  return code;
}

}  // namespace
}  // namespace bce

int main(int argc, char** argv) { return bce::Run(argc, argv); }
