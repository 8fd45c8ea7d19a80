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

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace bce {
namespace {

bool PlayerIncluded(uint32_t mask, int player) {
  return (mask >> player) & 1u;
}

// Stage-T keys of `player` reached when the player follows `dev`.
void ReachedLeafKeys(const MediatorSpace& space, const DeviationStrategy& dev,
                     int key, std::vector<std::pair<int, int>>* out) {
  const PlayerKey& k = space.key(dev.player, key);
  const int a = dev.Action(space, key);
  if (k.stage == space.NumStages() - 1) {
    out->push_back({key, a});
    return;
  }
  for (int c : k.children[a]) ReachedLeafKeys(space, dev, c, out);
}

}  // namespace

// ---------------------------------------------------------------------------
// ObedienceLP.

ObedienceLP::ObedienceLP(const MediatorSpace& space,
                         const SolverOptions& options)
    : space_(space),
      mode_(options.restricted_rules ? SolveMode::kRules : options.mode),
      restricted_(options.restricted_rules.has_value()) {
  if (mode_ == SolveMode::kPlan) {
    num_columns_ = space_.NumVars();
  } else {
    rules_ = restricted_ ? *options.restricted_rules
                         : EnumerateFeedbackRules(space_, options.domain,
                                                  options.cap_rules);
    if (rules_.empty()) throw InputError("empty rule list");
    var_columns_.assign(space_.NumVars(), {});
    std::vector<FeedbackRule> expanded;
    for (const FeedbackRule& rule : rules_) {
      if (static_cast<int>(rule.choice.size()) !=
          NumRuleCells(space_, rule.domain)) {
        throw InputError("rule has " + std::to_string(rule.choice.size()) +
                         " cells, expected " +
                         std::to_string(NumRuleCells(space_, rule.domain)));
      }
      if (space_.free_prior()) {
        for (int root : space_.tree().StageNodes(0)) {
          expanded.push_back(rule);
          rule_initial_.push_back(root);
        }
      } else {
        expanded.push_back(rule);
        rule_initial_.push_back(-1);
      }
    }
    rules_ = std::move(expanded);
    num_columns_ = static_cast<int>(rules_.size());
    for (int col = 0; col < num_columns_; ++col) {
      for (int v : PlanSupportOfRule(space_, rules_[col], rule_initial_[col])) {
        var_columns_[v].push_back(col);
      }
    }
  }
  lp_ = LinearProgram(num_columns_);
  if (options.encoding == ObedienceEncoding::kDual) {
    AddDualRows(options.player_mask);
  } else {
    AddPureRows(options.cap_deviations, options.player_mask);
  }
  AddSimplexRows();
}

int ObedienceLP::NumNontrivialRows() const {
  return static_cast<int>(std::count_if(
      rows_.begin(), rows_.end(),
      [](const ObedienceRow& r) { return !r.trivial; }));
}

std::vector<Rational> ObedienceLP::Row(const Functional& f) const {
  std::vector<Rational> row(lp_.num_vars);
  for (const auto& [v, c] : f) {
    if (mode_ == SolveMode::kPlan) {
      row[v] += c;
    } else {
      for (int col : var_columns_[v]) row[col] += c;
    }
  }
  return row;
}

void ObedienceLP::AddSimplexRows() {
  if (mode_ == SolveMode::kRules) {
    std::vector<Rational> row(lp_.num_vars);
    for (int col = 0; col < num_columns_; ++col) row[col] = 1;
    lp_.AddEquality(std::move(row), Rational(1));
    return;
  }
  std::vector<Rational> roots(lp_.num_vars);
  for (const MediatorSpace::Flow& f : space_.Flows()) {
    if (f.parent_var < 0 && space_.free_prior()) {
      for (int v : f.vars) roots[v] = 1;
      continue;
    }
    std::vector<Rational> row(lp_.num_vars);
    for (int v : f.vars) row[v] = 1;
    if (f.parent_var >= 0) {
      row[f.parent_var] = -1;
      lp_.AddEquality(std::move(row), Rational(0));
    } else {
      lp_.AddEquality(std::move(row), Rational(1));
    }
  }
  if (space_.free_prior()) lp_.AddEquality(std::move(roots), Rational(1));
}

void ObedienceLP::AddDualRows(uint32_t mask) {
  const int n = space_.NumPlayers();
  const int last = space_.NumStages() - 1;
  std::vector<std::vector<int>> w(n);
  for (int i = 0; i < n; ++i) {
    if (!PlayerIncluded(mask, i)) continue;
    for (int k = 0; k < space_.NumKeys(i); ++k) {
      w[i].push_back(lp_.AddVariable(/*is_free=*/true));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!PlayerIncluded(mask, i)) continue;
    for (int k = 0; k < space_.NumKeys(i); ++k) {
      const PlayerKey& key = space_.key(i, k);
      for (int a = 0; a < static_cast<int>(key.children.size()); ++a) {
        std::vector<Rational> row;
        if (key.stage == last) {
          row = Row(space_.LeafValue(i, k, a));
          for (Rational& c : row) c = -c;
        } else {
          row.assign(lp_.num_vars, Rational(0));
          for (int c : key.children[a]) row[w[i][c]] -= 1;
        }
        row[w[i][k]] += 1;
        lp_.AddInequality(std::move(row), Rational(0));
      }
    }
    std::vector<Rational> row = Row(space_.ObedientValue(i));
    for (int r : space_.RootKeys(i)) row[w[i][r]] -= 1;
    ObedienceRow info;
    info.player = i;
    info.lp_row = static_cast<int>(lp_.inequalities.size());
    rows_.push_back(info);
    lp_.AddInequality(std::move(row), Rational(0));
  }
}

void ObedienceLP::AddPureRows(int64_t cap, uint32_t mask) {
  std::vector<std::vector<Rational>> obedient;
  if (mode_ == SolveMode::kRules) {
    for (int col = 0; col < num_columns_; ++col) {
      obedient.push_back(ExpectedPayoff(
          space_, OutcomeUnder(space_, rules_[col], Obedient(),
                               rule_initial_[col])));
    }
  }
  for (int i = 0; i < space_.NumPlayers(); ++i) {
    if (!PlayerIncluded(mask, i)) continue;
    for (DeviationStrategy& dev : EnumerateDeviations(space_, i, cap)) {
      std::vector<Rational> row;
      if (mode_ == SolveMode::kPlan) {
        row = Row(space_.ObedientValue(i));
        std::vector<std::pair<int, int>> leaves;
        for (int r : space_.RootKeys(i)) ReachedLeafKeys(space_, dev, r, &leaves);
        for (const auto& [k, a] : leaves) {
          for (const auto& [v, c] : space_.LeafValue(i, k, a)) row[v] -= c;
        }
      } else {
        row.assign(lp_.num_vars, Rational(0));
        for (int col = 0; col < num_columns_; ++col) {
          row[col] = obedient[col][i] -
                     ExpectedPayoff(space_, OutcomeUnder(space_, rules_[col], dev,
                                                         rule_initial_[col]))[i];
        }
      }
      ObedienceRow info;
      info.player = i;
      info.lp_row = static_cast<int>(lp_.inequalities.size());
      info.trivial = std::all_of(row.begin(), row.end(),
                                 [](const Rational& c) { return IsZero(c); });
      info.deviation = std::move(dev);
      rows_.push_back(std::move(info));
      lp_.AddInequality(std::move(row), Rational(0));
    }
  }
}

Plan ObedienceLP::PlanOf(const std::vector<Rational>& x) const {
  Plan y(space_.NumVars());
  if (mode_ == SolveMode::kPlan) {
    std::copy(x.begin(), x.begin() + space_.NumVars(), y.begin());
    return y;
  }
  for (int col = 0; col < num_columns_; ++col) {
    if (sgn(x[col]) == 0) continue;
    for (int v : PlanSupportOfRule(space_, rules_[col], rule_initial_[col])) {
      y[v] += x[col];
    }
  }
  return y;
}

BCEMixture ObedienceLP::MixtureOf(const std::vector<Rational>& x) const {
  if (mode_ == SolveMode::kPlan) return DecomposePlan(space_, PlanOf(x));
  BCEMixture mixture;
  for (int col = 0; col < num_columns_; ++col) {
    if (sgn(x[col]) == 0) continue;
    mixture.entries.push_back({rules_[col], x[col], rule_initial_[col]});
  }
  return mixture;
}

// ---------------------------------------------------------------------------
// Plans and mixtures.

Plan PlanOfMixture(const MediatorSpace& space, const BCEMixture& mixture) {
  Plan y(space.NumVars());
  for (const MixtureEntry& e : mixture.entries) {
    if (static_cast<int>(e.rule.choice.size()) !=
        NumRuleCells(space, e.rule.domain)) {
      throw InputError("rule has " + std::to_string(e.rule.choice.size()) +
                       " cells, expected " +
                       std::to_string(NumRuleCells(space, e.rule.domain)));
    }
    for (int v : PlanSupportOfRule(space, e.rule, e.initial_node)) {
      y[v] += e.weight;
    }
  }
  return y;
}

BCEMixture DecomposePlan(const MediatorSpace& space, const Plan& y) {
  if (!IsPlan(space, y)) throw InputError("not a realization plan");
  const GameTree& tree = space.tree();
  const BaseGame& game = space.game();
  Plan residual = y;
  BCEMixture mixture;

  // Greedy rule along the residual; returns false when nothing is left.
  auto extract = [&](const std::vector<int>& roots, int initial) {
    FeedbackRule rule{RuleDomain::kReduced,
                      std::vector<int>(NumRuleCells(space, RuleDomain::kReduced),
                                       0)};
    std::vector<int> cells;
    std::function<void(int, int)> visit = [&](int node, int prev) {
      const int t = tree.node(node).stage;
      const int J = game.NumJointActions(t);
      int chosen = -1;
      for (int a = 0; a < J; ++a) {
        if (sgn(residual[space.Var(node, prev * J + a)]) > 0) {
          chosen = a;
          break;
        }
      }
      if (chosen < 0) throw Error("plan decomposition lost mass");
      rule.choice[RuleCell(space, RuleDomain::kReduced, node, prev)] = chosen;
      const int code = prev * J + chosen;
      cells.push_back(space.Var(node, code));
      for (const auto& kids : tree.node(node).children) {
        for (int child : kids) visit(child, code);
      }
    };
    for (int root : roots) visit(root, 0);
    Rational weight = residual[cells.front()];
    for (int v : cells) weight = std::min(weight, residual[v]);
    for (int v : cells) residual[v] -= weight;
    mixture.entries.push_back({rule, weight, initial});
  };

  auto remaining = [&](int root) {
    const int J = game.NumJointActions(0);
    Rational s(0);
    for (int a = 0; a < J; ++a) s += residual[space.Var(root, a)];
    return s;
  };

  if (space.free_prior()) {
    for (int root : tree.StageNodes(0)) {
      while (sgn(remaining(root)) > 0) extract({root}, root);
    }
  } else {
    const int first = tree.StageNodes(0).front();
    while (sgn(remaining(first)) > 0) extract(tree.StageNodes(0), -1);
  }
  return mixture;
}

std::vector<Rational> OutcomeDistributionOf(const MediatorSpace& space,
                                            const BCEMixture& mixture) {
  return ObedientDistribution(space, PlanOfMixture(space, mixture));
}

// ---------------------------------------------------------------------------
// Membership and directional optimization.

namespace {

void CheckTarget(const MediatorSpace& space,
                 const std::vector<Rational>& target) {
  if (static_cast<int>(target.size()) != space.tree().NumTerminals()) {
    throw InputError("target has " + std::to_string(target.size()) +
                     " entries, expected " +
                     std::to_string(space.tree().NumTerminals()));
  }
  Rational total(0);
  for (const Rational& p : target) {
    if (sgn(p) < 0) throw InputError("target has a negative probability");
    total += p;
  }
  if (total != 1) {
    throw InputError("target sums to " + FormatRational(total) +
                     ", expected 1");
  }
}

void AddTargetRows(ObedienceLP* olp, const std::vector<Rational>& target) {
  const auto& terminals = olp->space().TerminalFunctionals();
  for (size_t t = 0; t < terminals.size(); ++t) {
    olp->mutable_lp().AddEquality(olp->Row(terminals[t]), target[t]);
  }
}

}  // namespace

MembershipResult MembershipTest(const MediatorSpace& space,
                                const std::vector<Rational>& target,
                                const SolverOptions& options) {
  CheckTarget(space, target);
  ObedienceLP olp(space, options);
  AddTargetRows(&olp, target);
  MembershipResult result;
  result.one_sided = olp.restricted();
  LPResult res = FeasiblePoint(olp.lp(), options.lp);
  if (res.status == LPStatus::kOptimal) {
    result.member = true;
    result.plan = olp.PlanOf(res.solution);
    result.witness = olp.MixtureOf(res.solution);
    return result;
  }
  for (int i = 0; i < space.NumPlayers(); ++i) {
    if (!PlayerIncluded(options.player_mask, i)) continue;
    SolverOptions single = options;
    single.player_mask = 1u << i;
    ObedienceLP one(space, single);
    AddTargetRows(&one, target);
    if (FeasiblePoint(one.lp(), options.lp).status != LPStatus::kOptimal) {
      result.blocking_players.push_back(i);
    }
  }
  return result;
}

DirectionResult OptimizeDirection(const ObedienceLP& olp,
                                  const std::vector<Rational>& direction,
                                  const LPOptions& lp_options) {
  const MediatorSpace& space = olp.space();
  if (static_cast<int>(direction.size()) != space.NumPlayers()) {
    throw InputError("direction has " + std::to_string(direction.size()) +
                     " entries, expected " +
                     std::to_string(space.NumPlayers()));
  }
  LinearProgram lp = olp.lp();
  lp.objective.assign(lp.num_vars, Rational(0));
  for (int i = 0; i < space.NumPlayers(); ++i) {
    if (sgn(direction[i]) == 0) continue;
    std::vector<Rational> row = olp.Row(space.ObedientValue(i));
    for (int j = 0; j < lp.num_vars; ++j) lp.objective[j] += direction[i] * row[j];
  }
  LPResult res = Solve(lp, lp_options);
  if (res.status != LPStatus::kOptimal) {
    throw Error("obedience LP is " + LPStatusName(res.status));
  }
  DirectionResult out;
  out.value = res.value;
  out.plan = olp.PlanOf(res.solution);
  for (int i = 0; i < space.NumPlayers(); ++i) {
    out.payoff.push_back(Evaluate(space.ObedientValue(i), out.plan));
  }
  out.witness = olp.MixtureOf(res.solution);
  return out;
}

DirectionResult OptimizeDirection(const MediatorSpace& space,
                                  const std::vector<Rational>& direction,
                                  const SolverOptions& options) {
  ObedienceLP olp(space, options);
  return OptimizeDirection(olp, direction, options.lp);
}

// ---------------------------------------------------------------------------
// Payoff polytope.

namespace {

Rational Cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.first - o.first) * (b.second - o.second) -
         (a.second - o.second) * (b.first - o.first);
}

Rational Dot(const std::pair<Rational, Rational>& d, const Point2& p) {
  return d.first * p.first + d.second * p.second;
}

// Canonical key of a direction up to positive scaling.
std::string DirectionKey(const std::pair<Rational, Rational>& d) {
  Rational scale = abs(IsZero(d.first) ? d.second : d.first);
  return FormatRational(d.first / scale) + "," +
         FormatRational(d.second / scale);
}

}  // namespace

std::vector<Point2> ConvexHull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  std::vector<Point2> hull(2 * points.size());
  size_t k = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    while (k >= 2 && sgn(Cross(hull[k - 2], hull[k - 1], points[i])) <= 0) --k;
    hull[k++] = points[i];
  }
  for (size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && sgn(Cross(hull[k - 2], hull[k - 1], points[i])) <= 0) {
      --k;
    }
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<std::pair<int, int>> InitialDirections(int count) {
  std::vector<std::pair<int, int>> dirs = {{1, 0},  {0, 1},  {-1, 0}, {0, -1},
                                           {1, 1},  {-1, 1}, {-1, -1}, {1, -1}};
  for (int m = 2; static_cast<int>(dirs.size()) < count; ++m) {
    std::vector<std::pair<int, int>> ring;
    for (int p = -m; p <= m; ++p) {
      for (int q = -m; q <= m; ++q) {
        if (std::max(std::abs(p), std::abs(q)) != m) continue;
        if (std::gcd(p, q) != 1) continue;
        ring.push_back({p, q});
      }
    }
    std::sort(ring.begin(), ring.end(), [](auto a, auto b) {
      const long na = 1L * a.first * a.first + 1L * a.second * a.second;
      const long nb = 1L * b.first * b.first + 1L * b.second * b.second;
      return na != nb ? na < nb : a < b;
    });
    dirs.insert(dirs.end(), ring.begin(), ring.end());
  }
  dirs.resize(std::max(count, 0));
  return dirs;
}

std::vector<Point2> PayoffPolytope2P(const MediatorSpace& space,
                                     int num_directions,
                                     const SolverOptions& options) {
  if (space.NumPlayers() != 2) {
    throw InputError("payoff polytope needs exactly two players");
  }
  ObedienceLP olp(space, options);
  std::set<std::string> tested;
  std::vector<Point2> points;
  auto probe = [&](const std::pair<Rational, Rational>& d) {
    const std::string key = DirectionKey(d);
    if (!tested.insert(key).second) return std::optional<Point2>();
    DirectionResult r = OptimizeDirection(olp, {d.first, d.second}, options.lp);
    return std::optional<Point2>(Point2{r.payoff[0], r.payoff[1]});
  };
  for (auto [p, q] : InitialDirections(num_directions)) {
    if (auto pt = probe({Rational(p), Rational(q)})) points.push_back(*pt);
  }
  while (true) {
    std::vector<Point2> hull = ConvexHull(points);
    std::vector<std::pair<Rational, Rational>> normals;
    if (hull.size() <= 1) {
      normals = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    } else if (hull.size() == 2) {
      const Rational dx = hull[1].first - hull[0].first;
      const Rational dy = hull[1].second - hull[0].second;
      normals = {{dy, -dx}, {-dy, dx}, {dx, dy}, {-dx, -dy}};
    } else {
      for (size_t e = 0; e < hull.size(); ++e) {
        const Point2& a = hull[e];
        const Point2& b = hull[(e + 1) % hull.size()];
        normals.push_back({b.second - a.second, a.first - b.first});
      }
    }
    bool grew = false;
    for (const auto& d : normals) {
      std::optional<Point2> pt = probe(d);
      if (!pt) continue;
      Rational support = Dot(d, hull.front());
      for (const Point2& h : hull) support = std::max(support, Dot(d, h));
      points.push_back(*pt);
      if (Dot(d, *pt) > support) grew = true;
    }
    if (!grew) return ConvexHull(points);
  }
}

// ---------------------------------------------------------------------------
// Verification and descriptions.

namespace {

// Own private history of a key, e.g. "[a1=T s2=x]"; singleton sets omitted.
std::string PrivateLabel(const MediatorSpace& space, int player, int pid) {
  const BaseGame& game = space.game();
  const auto& states = space.tree().PrivateStates(player);
  std::vector<std::string> parts;
  for (int id = pid; id >= 0; id = states[id].parent) {
    const PrivateState& s = states[id];
    const int t = s.stage;
    if (game.NumMessages(player, t) > 1) {
      parts.push_back("m" + std::to_string(t + 1) + "=" +
                      game.messages[player][t][s.message]);
    }
    if (game.NumSignals(player, t) > 1) {
      parts.push_back("s" + std::to_string(t + 1) + "=" +
                      game.signals[player][t][s.signal]);
    }
    if (t > 0) {
      parts.push_back("a" + std::to_string(t) + "=" +
                      game.actions[player][t - 1][s.own_action]);
    }
  }
  std::string out = "[";
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it != parts.rbegin()) out += " ";
    out += *it;
  }
  return out + "]";
}

std::string OwnRecLabel(const MediatorSpace& space, int player,
                        const PlayerKey& key) {
  const BaseGame& game = space.game();
  std::vector<std::string> recs(key.stage + 1);
  int code = key.own_code;
  for (int t = key.stage; t >= 0; --t) {
    const int A = game.NumActions(player, t);
    recs[t] = game.actions[player][t][code % A];
    code /= A;
  }
  std::string out;
  for (const std::string& r : recs) out += (out.empty() ? "" : " ") + r;
  return out;
}

}  // namespace

std::vector<BCEViolation> VerifyPlan(const MediatorSpace& space,
                                     const Plan& y) {
  if (!IsPlan(space, y)) throw InputError("not a realization plan");
  std::vector<BCEViolation> out;
  for (int i = 0; i < space.NumPlayers(); ++i) {
    BestResponse br = BestDeviation(space, y, i);
    if (sgn(br.Gain()) <= 0) continue;
    BCEViolation v;
    v.player = i;
    v.gain = br.Gain();
    v.description = DescribeDeviation(space, br.strategy);
    v.deviation = std::move(br.strategy);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<BCEViolation> VerifyBce(const MediatorSpace& space,
                                    const BCEMixture& mixture) {
  Rational total(0);
  for (const MixtureEntry& e : mixture.entries) {
    if (sgn(e.weight) < 0) throw InputError("negative mixture weight");
    if (space.free_prior() && e.initial_node < 0) {
      throw InputError("free prior: every entry needs an initial node");
    }
    if (e.initial_node >= 0 &&
        (e.initial_node >= space.tree().NumNodes() ||
         space.tree().node(e.initial_node).stage != 0)) {
      throw InputError("initial node " + std::to_string(e.initial_node) +
                       " is not a stage-one node");
    }
    total += e.weight;
  }
  if (total != 1) {
    throw InputError("mixture weights sum to " + FormatRational(total) +
                     ", expected 1");
  }
  return VerifyPlan(space, PlanOfMixture(space, mixture));
}

std::string KeyLabel(const MediatorSpace& space, int player, int key) {
  const PlayerKey& k = space.key(player, key);
  return "t" + std::to_string(k.stage + 1) + " " +
         PrivateLabel(space, player, k.pid) + " recs " +
         OwnRecLabel(space, player, k);
}

std::string DescribeDeviation(const MediatorSpace& space,
                              const DeviationStrategy& dev) {
  if (dev.player < 0) return "obey";
  std::string out;
  for (int r : space.RootKeys(dev.player)) {
    const std::string part = DescribeDeviationFrom(space, dev, r);
    if (part == "obey") continue;
    out += (out.empty() ? "" : "; ") + part;
  }
  return out.empty() ? "obey" : out;
}

std::string DescribeDeviationFrom(const MediatorSpace& space,
                                  const DeviationStrategy& dev, int key) {
  if (dev.player < 0) return "obey";
  const BaseGame& game = space.game();
  std::vector<std::string> parts;
  std::function<void(int)> visit = [&](int k) {
    const PlayerKey& pk = space.key(dev.player, k);
    const int a = dev.Action(space, k);
    if (a != pk.own_rec) {
      parts.push_back(KeyLabel(space, dev.player, k) + " -> " +
                      game.actions[dev.player][pk.stage][a]);
    }
    for (int c : pk.children[a]) visit(c);
  };
  visit(key);
  if (parts.empty()) return "obey";
  std::string out;
  for (const std::string& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

std::string DescribeMixture(const MediatorSpace& space,
                            const BCEMixture& mixture) {
  std::ostringstream out;
  for (const MixtureEntry& e : mixture.entries) {
    out << FormatRational(e.weight);
    if (e.initial_node >= 0) {
      out << " at "
          << space.game().HistoryLabel(space.tree().HistoryOf(e.initial_node));
    }
    out << ": " << DescribeRule(space, e.rule) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Leader-follower games.

namespace {

// "lhs >= rhs" over cells with coefficients: positive terms on the left,
// negated negative terms on the right, unit coefficients omitted.
std::string Inequality(
    const std::vector<std::pair<std::string, Rational>>& terms) {
  std::string lhs, rhs;
  for (const auto& [label, c] : terms) {
    if (IsZero(c)) continue;
    std::string& side = sgn(c) > 0 ? lhs : rhs;
    const Rational mag = abs(c);
    if (!side.empty()) side += " + ";
    if (mag != 1) side += FormatRational(mag, /*force_den=*/false) + "*";
    side += label;
  }
  return (lhs.empty() ? "0" : lhs) + " >= " + (rhs.empty() ? "0" : rhs);
}

}  // namespace

std::optional<std::vector<std::string>> LeaderFollowerViolations(
    const GameTree& tree, const std::vector<Rational>& target) {
  const BaseGame& game = tree.game();
  if (game.NumPlayers() != 2 || game.stages != 2) return std::nullopt;
  if (game.NumActions(1, 0) != 1 || game.NumActions(0, 1) != 1) {
    return std::nullopt;
  }
  for (int t = 0; t < 2; ++t) {
    if (game.NumStates(t) != 1) return std::nullopt;
    for (int i = 0; i < 2; ++i) {
      if (game.NumSignals(i, t) != 1 || game.NumMessages(i, t) != 1) {
        return std::nullopt;
      }
    }
  }
  if (static_cast<int>(target.size()) != tree.NumTerminals()) {
    throw InputError("target has " + std::to_string(target.size()) +
                     " entries, expected " +
                     std::to_string(tree.NumTerminals()));
  }
  const int A1 = game.NumActions(0, 0);
  const int A2 = game.NumActions(1, 1);
  const int root = tree.StageNodes(0).front();
  std::vector<int> node(A1);
  for (int a1 = 0; a1 < A1; ++a1) {
    node[a1] = tree.node(root).children[game.EncodeJoint(0, {a1, 0})].front();
  }
  auto u = [&](int i, int a1, int a2) -> const Rational& {
    return tree.Payoff(node[a1], game.EncodeJoint(1, {0, a2}))[i];
  };
  auto mu = [&](int a1, int a2) -> const Rational& {
    return target[tree.TerminalId(node[a1], game.EncodeJoint(1, {0, a2}))];
  };
  auto label = [&](int a1, int a2) {
    return "mu(" + game.actions[0][0][a1] + "," + game.actions[1][1][a2] + ")";
  };

  // Pure maxmin value of the leader.
  Rational maxmin;
  for (int a1 = 0; a1 < A1; ++a1) {
    Rational worst = u(0, a1, 0);
    for (int a2 = 1; a2 < A2; ++a2) worst = std::min(worst, u(0, a1, a2));
    if (a1 == 0 || worst > maxmin) maxmin = worst;
  }
  std::vector<std::string> violated;
  for (int a1 = 0; a1 < A1; ++a1) {
    std::vector<std::pair<std::string, Rational>> terms;
    Rational lhs(0);
    for (int a2 = 0; a2 < A2; ++a2) {
      terms.push_back({label(a1, a2), u(0, a1, a2) - maxmin});
      lhs += (u(0, a1, a2) - maxmin) * mu(a1, a2);
    }
    if (sgn(lhs) < 0) violated.push_back(Inequality(terms));
  }
  for (int a2 = 0; a2 < A2; ++a2) {
    for (int b2 = 0; b2 < A2; ++b2) {
      if (b2 == a2) continue;
      std::vector<std::pair<std::string, Rational>> terms;
      Rational lhs(0);
      for (int a1 = 0; a1 < A1; ++a1) {
        const Rational c = u(1, a1, a2) - u(1, a1, b2);
        terms.push_back({label(a1, a2), c});
        lhs += c * mu(a1, a2);
      }
      if (sgn(lhs) < 0) violated.push_back(Inequality(terms));
    }
  }
  return violated;
}

}  // namespace bce
