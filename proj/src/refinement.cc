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

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>
#include <unordered_map>

namespace bce {
namespace {

std::vector<OutcomeAtom> Merge(const std::map<std::pair<int, int>, Rational>& m) {
  std::vector<OutcomeAtom> out;
  for (const auto& [key, p] : m) {
    if (sgn(p) != 0) out.push_back({key.first, key.second, p});
  }
  return out;
}

// Plan variables of every key of every player.
std::vector<std::vector<std::vector<int>>> VarsOfKeys(
    const MediatorSpace& space) {
  std::vector<std::vector<std::vector<int>>> out(space.NumPlayers());
  for (int i = 0; i < space.NumPlayers(); ++i) {
    out[i].resize(space.NumKeys(i));
    for (int v = 0; v < space.NumVars(); ++v) {
      out[i][space.KeyOf(i, v)].push_back(v);
    }
  }
  return out;
}

int LastRec(const MediatorSpace& space, int var) {
  const int t = space.VarStage(var);
  return space.RecAt(space.VarCode(var), t, t);
}

// Joint action when `player` plays `action` and the others obey `rec`.
int JointWith(const BaseGame& game, int t, int rec, int player, int action) {
  Profile p = game.DecodeJoint(t, rec);
  p[player] = action;
  return game.EncodeJoint(t, p);
}

std::string VarLabel(const MediatorSpace& space, int var) {
  const int t = space.VarStage(var);
  return space.game().HistoryLabel(space.tree().HistoryOf(space.VarNode(var))) +
         " recs " + space.RecLabel(space.VarCode(var), t);
}

}  // namespace

// ---------------------------------------------------------------------------
// Mediation ranges.

MediationRange FullRange(const MediatorSpace& space) {
  MediationRange r;
  for (int i = 0; i < space.NumPlayers(); ++i) {
    r.allowed.emplace_back(space.NumKeys(i), true);
  }
  return r;
}

MediationRange RangeFromFunction(
    const MediatorSpace& space,
    const std::function<bool(int player, int key)>& fn) {
  MediationRange r;
  for (int i = 0; i < space.NumPlayers(); ++i) {
    r.allowed.emplace_back(space.NumKeys(i), false);
    for (int k = 0; k < space.NumKeys(i); ++k) r.allowed[i][k] = fn(i, k);
  }
  CheckRange(space, r);
  return r;
}

void CheckRange(const MediatorSpace& space, const MediationRange& range) {
  if (static_cast<int>(range.allowed.size()) != space.NumPlayers()) {
    throw InputError("mediation range has the wrong number of players");
  }
  for (int i = 0; i < space.NumPlayers(); ++i) {
    if (static_cast<int>(range.allowed[i].size()) != space.NumKeys(i)) {
      throw InputError("mediation range of player " + std::to_string(i + 1) +
                       " has the wrong number of entries");
    }
    // Keys sharing stage, private state and past own recommendations.
    std::map<std::tuple<int, int, int>, bool> image;
    for (int k = 0; k < space.NumKeys(i); ++k) {
      const PlayerKey& key = space.key(i, k);
      const int A = space.game().NumActions(i, key.stage);
      auto [it, fresh] = image.try_emplace(
          std::make_tuple(key.stage, key.pid, key.own_code / A), false);
      it->second = it->second || range.allowed[i][k];
    }
    for (const auto& [where, nonempty] : image) {
      if (!nonempty) {
        throw InputError("empty mediation range for player " +
                         std::to_string(i + 1) + " at stage " +
                         std::to_string(std::get<0>(where) + 1));
      }
    }
  }
}

bool KeyInRange(const MediatorSpace& space, const MediationRange& range,
                int player, int key) {
  for (int k = key; k >= 0; k = space.key(player, k).parent) {
    if (!range.allowed[player][k]) return false;
  }
  return true;
}

bool VarInRange(const MediatorSpace& space, const MediationRange& range,
                int var) {
  for (int i = 0; i < space.NumPlayers(); ++i) {
    if (!KeyInRange(space, range, i, space.KeyOf(i, var))) return false;
  }
  return true;
}

std::vector<FeedbackRule> EnumerateRangeRules(const MediatorSpace& space,
                                              const MediationRange& range,
                                              int64_t cap) {
  CheckRange(space, range);
  const GameTree& tree = space.tree();
  const BaseGame& game = space.game();
  const int n = tree.NumNodes();
  for (int id = 0; id < n; ++id) {
    if (tree.node(id).parent >= id) throw Error("nodes not in stage order");
  }
  std::vector<FeedbackRule> out;
  FeedbackRule rule{RuleDomain::kReduced, std::vector<int>(n, 0)};
  std::vector<int> code(n, 0);
  std::function<void(int)> visit = [&](int id) {
    if (id == n) {
      if (static_cast<int64_t>(out.size()) >= cap) {
        throw CapExceeded("more than " + std::to_string(cap) +
                          " rules consistent with the ranges");
      }
      out.push_back(rule);
      return;
    }
    const Node& node = tree.node(id);
    const int J = game.NumJointActions(node.stage);
    const int prev = node.parent < 0 ? 0 : code[node.parent];
    for (int rec = 0; rec < J; ++rec) {
      if (!VarInRange(space, range, space.Var(id, prev * J + rec))) continue;
      rule.choice[id] = rec;
      code[id] = prev * J + rec;
      visit(id + 1);
    }
  };
  visit(0);
  return out;
}

// ---------------------------------------------------------------------------
// Recommendation kernels.

RecommendationKernels KernelsFromPlan(const MediatorSpace& space,
                                      const Plan& y) {
  if (!IsPlan(space, y)) throw InputError("not a realization plan");
  const BaseGame& game = space.game();
  RecommendationKernels k;
  k.prob.assign(space.NumVars(), Rational(0));
  k.defined.assign(space.NumVars(), false);
  for (int v = 0; v < space.NumVars(); ++v) {
    const int node = space.VarNode(v);
    const int J = game.NumJointActions(space.VarStage(v));
    const int prev = space.VarCode(v) / J;
    Rational mass(0);
    for (int a = 0; a < J; ++a) mass += y[space.Var(node, prev * J + a)];
    if (sgn(mass) == 0) continue;
    k.defined[v] = true;
    k.prob[v] = y[v] / mass;
  }
  return k;
}

RecommendationKernels KernelsFromMixture(const MediatorSpace& space,
                                         const BCEMixture& mixture) {
  Rational total(0);
  for (const MixtureEntry& e : mixture.entries) {
    if (sgn(e.weight) < 0) throw InputError("negative mixture weight");
    total += e.weight;
  }
  if (total != 1) throw InputError("mixture weights do not sum to one");
  return KernelsFromPlan(space, PlanOfMixture(space, mixture));
}

RecommendationKernels KernelsFromMixture(const MediatorSpace& space,
                                         const BCEMixture& mixture,
                                         const MediationRange& range) {
  CheckRange(space, range);
  for (const MixtureEntry& e : mixture.entries) {
    if (sgn(e.weight) == 0) continue;
    for (int v : PlanSupportOfRule(space, e.rule, e.initial_node)) {
      if (!VarInRange(space, range, v)) {
        throw InputError("mixture rule leaves the mediation ranges at " +
                         VarLabel(space, v));
      }
    }
  }
  return KernelsFromMixture(space, mixture);
}

std::vector<OutcomeAtom> OutcomeUnderKernels(const MediatorSpace& space,
                                             const RecommendationKernels& k,
                                             const DeviationStrategy& dev) {
  const GameTree& tree = space.tree();
  const BaseGame& game = space.game();
  const int last = space.NumStages() - 1;
  std::map<std::pair<int, int>, Rational> atoms;
  std::function<void(int, int, const Rational&)> visit =
      [&](int node, int prev, const Rational& prob) {
        const int t = tree.node(node).stage;
        const int J = game.NumJointActions(t);
        for (int rec = 0; rec < J; ++rec) {
          const int code = prev * J + rec;
          const int v = space.Var(node, code);
          if (!k.defined[v]) {
            throw Error("kernels undefined at a reached history");
          }
          if (sgn(k.prob[v]) == 0) continue;
          const Rational p = prob * k.prob[v];
          int joint = rec;
          if (dev.player >= 0) {
            Profile act = game.DecodeJoint(t, rec);
            act[dev.player] = dev.Action(space, space.KeyOf(dev.player, v));
            joint = game.EncodeJoint(t, act);
          }
          if (t == last) {
            atoms[{tree.TerminalId(node, joint), code}] += p;
            continue;
          }
          for (int child : tree.node(node).children[joint]) {
            visit(child, code, p * tree.node(child).chance);
          }
        }
      };
  if (space.free_prior()) {
    throw InputError("kernel evaluation needs a fixed prior");
  }
  for (int root : tree.StageNodes(0)) visit(root, 0, tree.node(root).chance);
  return Merge(atoms);
}

std::vector<OutcomeAtom> OutcomeUnderMixture(const MediatorSpace& space,
                                             const BCEMixture& mixture,
                                             const DeviationStrategy& dev) {
  std::map<std::pair<int, int>, Rational> atoms;
  for (const MixtureEntry& e : mixture.entries) {
    if (sgn(e.weight) == 0) continue;
    for (const OutcomeAtom& a : OutcomeUnder(space, e.rule, dev, e.initial_node)) {
      atoms[{a.terminal, a.code}] += e.weight * a.prob;
    }
  }
  return Merge(atoms);
}

std::vector<Rational> ObedientReach(const MediatorSpace& space,
                                    const RecommendationKernels& k) {
  if (space.free_prior()) {
    throw InputError("kernel evaluation needs a fixed prior");
  }
  const GameTree& tree = space.tree();
  std::vector<Rational> reach(space.NumVars(), Rational(0));
  for (int v = 0; v < space.NumVars(); ++v) {
    if (!k.defined[v] || sgn(k.prob[v]) == 0) continue;
    const int node = space.VarNode(v);
    const int t = space.VarStage(v);
    if (t == 0) {
      reach[v] = tree.node(node).chance * k.prob[v];
      continue;
    }
    const int parent = space.ParentVar(v);
    if (sgn(reach[parent]) == 0) continue;
    if (tree.node(node).parent_action != LastRec(space, parent)) continue;
    reach[v] = reach[parent] * tree.node(node).chance * k.prob[v];
  }
  return reach;
}

// ---------------------------------------------------------------------------
// Beliefs.

BeliefSystem EmptyBeliefs(const MediatorSpace& space) {
  BeliefSystem b;
  for (int i = 0; i < space.NumPlayers(); ++i) {
    b.belief.emplace_back(space.NumKeys(i));
  }
  return b;
}

BeliefSystem BayesBeliefs(const MediatorSpace& space,
                          const RecommendationKernels& k) {
  const std::vector<Rational> reach = ObedientReach(space, k);
  const auto vars = VarsOfKeys(space);
  BeliefSystem b = EmptyBeliefs(space);
  for (int i = 0; i < space.NumPlayers(); ++i) {
    for (int key = 0; key < space.NumKeys(i); ++key) {
      Rational mass(0);
      for (int v : vars[i][key]) mass += reach[v];
      if (sgn(mass) == 0) continue;
      for (int v : vars[i][key]) {
        if (sgn(reach[v]) > 0) b.belief[i][key].push_back({v, reach[v] / mass});
      }
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Conditional probability systems.

namespace {

int LowestOrder(const std::vector<Rational>& w) {
  for (int k = 0; k < static_cast<int>(w.size()); ++k) {
    if (sgn(w[k]) != 0) return k;
  }
  return -1;
}

std::string SetLabel(const std::vector<int>& x) {
  std::string out = "{";
  for (size_t k = 0; k < x.size(); ++k) {
    out += (k ? "," : "") + std::to_string(x[k]);
  }
  return out + "}";
}

}  // namespace

Cps Cps::FromTable(int ground_size, std::vector<CpsRow> rows) {
  Cps c;
  c.ground_size_ = ground_size;
  for (CpsRow& row : rows) {
    std::sort(row.given.begin(), row.given.end());
    row.given.erase(std::unique(row.given.begin(), row.given.end()),
                    row.given.end());
    if (row.given.empty()) throw InputError("empty conditioning set");
    for (int x : row.given) {
      if (x < 0 || x >= ground_size) throw InputError("CPS element out of range");
    }
    for (const auto& [x, p] : row.prob) {
      if (x < 0 || x >= ground_size) throw InputError("CPS element out of range");
    }
  }
  c.rows_ = std::move(rows);
  return c;
}

Cps Cps::FromPerturbation(std::vector<std::vector<Rational>> weights) {
  for (size_t x = 0; x < weights.size(); ++x) {
    for (const Rational& w : weights[x]) {
      if (sgn(w) < 0) throw InputError("negative perturbation coefficient");
    }
    if (LowestOrder(weights[x]) < 0) {
      throw InputError("perturbation weight of element " + std::to_string(x) +
                       " is zero");
    }
  }
  Cps c;
  c.ground_size_ = static_cast<int>(weights.size());
  c.weights_ = std::move(weights);
  return c;
}

std::optional<std::vector<Rational>> Cps::Conditional(
    const std::vector<int>& z) const {
  if (z.empty()) return std::nullopt;
  if (IsTable()) {
    for (const CpsRow& row : rows_) {
      if (row.given != z) continue;
      std::map<int, Rational> p(row.prob.begin(), row.prob.end());
      std::vector<Rational> out;
      for (int x : z) out.push_back(p.count(x) ? p[x] : Rational(0));
      return out;
    }
    return std::nullopt;
  }
  int order = -1;
  for (int x : z) {
    const int o = LowestOrder(weights_[x]);
    if (order < 0 || o < order) order = o;
  }
  auto coeff = [&](int x) {
    return order < static_cast<int>(weights_[x].size()) ? weights_[x][order]
                                                        : Rational(0);
  };
  Rational total(0);
  for (int x : z) total += coeff(x);
  std::vector<Rational> out;
  for (int x : z) out.push_back(coeff(x) / total);
  return out;
}

Rational Cps::Value(const std::vector<int>& x, const std::vector<int>& z) const {
  std::vector<int> zs = z;
  std::sort(zs.begin(), zs.end());
  if (IsTable()) {
    for (const CpsRow& row : rows_) {
      if (row.given != zs) continue;
      Rational sum(0);
      for (const auto& [e, p] : row.prob) {
        if (std::find(x.begin(), x.end(), e) != x.end()) sum += p;
      }
      return sum;
    }
    throw Error("CPS has no row for " + SetLabel(zs));
  }
  auto cond = Conditional(zs);
  if (!cond) throw Error("empty conditioning set");
  Rational sum(0);
  for (size_t k = 0; k < zs.size(); ++k) {
    if (std::find(x.begin(), x.end(), zs[k]) != x.end()) sum += (*cond)[k];
  }
  return sum;
}

Cps Cps::Materialize(const std::vector<std::vector<int>>& family) const {
  std::vector<CpsRow> rows;
  for (std::vector<int> z : family) {
    std::sort(z.begin(), z.end());
    auto cond = Conditional(z);
    if (!cond) throw Error("CPS undefined on " + SetLabel(z));
    CpsRow row{z, {}};
    for (size_t k = 0; k < z.size(); ++k) {
      if (sgn((*cond)[k]) != 0) row.prob.push_back({z[k], (*cond)[k]});
    }
    rows.push_back(std::move(row));
  }
  return FromTable(ground_size_, std::move(rows));
}

std::vector<CpsViolation> CpsCheck(const Cps& cps) {
  if (!cps.IsTable()) {
    const int n = cps.GroundSize();
    std::vector<std::vector<int>> family;
    if (n <= 8) {
      for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> z;
        for (int x = 0; x < n; ++x) {
          if (mask >> x & 1) z.push_back(x);
        }
        family.push_back(z);
      }
    } else {
      for (int x = 0; x < n; ++x) family.push_back({x});
      std::vector<int> all(n);
      for (int x = 0; x < n; ++x) all[x] = x;
      family.push_back(all);
    }
    return CpsCheck(cps.Materialize(family));
  }
  std::vector<CpsViolation> out;
  const auto& rows = cps.rows();
  std::vector<std::map<int, Rational>> prob(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    const CpsRow& row = rows[r];
    Rational inside(0), total(0);
    for (const auto& [x, p] : row.prob) {
      prob[r][x] += p;
      if (sgn(p) < 0) {
        out.push_back({"nonnegativity", {x}, row.given, row.given,
                       "negative probability " + FormatRational(p)});
      }
      total += p;
      if (std::binary_search(row.given.begin(), row.given.end(), x)) {
        inside += p;
      }
    }
    if (inside != 1 || total != 1) {
      out.push_back({"normalization", row.given, row.given, row.given,
                     "beta(Z|Z) = " + FormatRational(inside) +
                         ", beta(X|Z) = " + FormatRational(total)});
    }
  }
  auto at = [&](size_t r, int x) {
    auto it = prob[r].find(x);
    return it == prob[r].end() ? Rational(0) : it->second;
  };
  for (size_t y = 0; y < rows.size(); ++y) {
    for (size_t z = 0; z < rows.size(); ++z) {
      if (y == z) continue;
      const auto& Y = rows[y].given;
      const auto& Z = rows[z].given;
      if (!std::includes(Z.begin(), Z.end(), Y.begin(), Y.end())) continue;
      Rational mass(0);
      for (int x : Y) mass += at(z, x);
      for (int x : Y) {
        const Rational lhs = at(z, x);
        const Rational rhs = at(y, x) * mass;
        if (lhs != rhs) {
          out.push_back({"chain_rule", {x}, Y, Z,
                         "beta(X|Z) = " + FormatRational(lhs) +
                             ", beta(X|Y) beta(Y|Z) = " + FormatRational(rhs)});
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification.

std::string KindName(RefinementViolation::Kind kind) {
  switch (kind) {
    case RefinementViolation::Kind::kRange: return "range";
    case RefinementViolation::Kind::kKernel: return "kernel";
    case RefinementViolation::Kind::kMissingBelief: return "missing_belief";
    case RefinementViolation::Kind::kObedience: return "obedience";
    case RefinementViolation::Kind::kBeliefConsistency:
      return "belief_consistency";
    case RefinementViolation::Kind::kCpsConsistency: return "cps_consistency";
  }
  return "unknown";
}

namespace {

// Probability of the last recommendation of a plan variable given its parent.
using KernelFn = std::function<Rational(int var)>;

// Adds to `weight` the mass of every plan variable below the starting ones
// when `player` may play anything, the others obey and the mediator draws
// from `kernel`.
void Propagate(const MediatorSpace& space, int player,
               std::map<int, Rational> current, const KernelFn& kernel,
               std::unordered_map<int, Rational>& weight) {
  const GameTree& tree = space.tree();
  const BaseGame& game = space.game();
  const int last = space.NumStages() - 1;
  while (!current.empty()) {
    std::map<int, Rational> next;
    for (const auto& [v, w] : current) {
      if (sgn(w) == 0) continue;
      weight[v] += w;
      const int t = space.VarStage(v);
      if (t == last) continue;
      const int rec = LastRec(space, v);
      const int J = game.NumJointActions(t + 1);
      const int code = space.VarCode(v);
      for (int a = 0; a < game.NumActions(player, t); ++a) {
        const int joint = JointWith(game, t, rec, player, a);
        for (int c : tree.node(space.VarNode(v)).children[joint]) {
          for (int r = 0; r < J; ++r) {
            const int child = space.Var(c, code * J + r);
            const Rational p = kernel(child);
            if (sgn(p) == 0) continue;
            next[child] += w * tree.node(c).chance * p;
          }
        }
      }
    }
    current = std::move(next);
  }
}

struct Continuation {
  Rational obey;
  Rational best;
  DeviationStrategy strategy;
};

// Backward induction over the keys of `player` below `root` given the
// propagated weights.
Continuation SolveContinuation(
    const MediatorSpace& space, int player, int root,
    const std::unordered_map<int, Rational>& weight,
    const std::vector<std::vector<int>>& vars_of_key) {
  const GameTree& tree = space.tree();
  const BaseGame& game = space.game();
  const int last = space.NumStages() - 1;
  Continuation out;
  out.strategy.player = player;
  out.strategy.action.assign(space.NumKeys(player), -1);
  auto leaf = [&](int k, int a) {
    Rational sum(0);
    for (int v : vars_of_key[k]) {
      auto it = weight.find(v);
      if (it == weight.end() || sgn(it->second) == 0) continue;
      const int joint = JointWith(game, last, LastRec(space, v), player, a);
      sum += it->second * tree.Payoff(space.VarNode(v), joint)[player];
    }
    return sum;
  };
  // Returns {obedient value, best value} of the subtree of k.
  std::function<std::pair<Rational, Rational>(int)> solve = [&](int k) {
    const PlayerKey& key = space.key(player, k);
    const int A = game.NumActions(player, key.stage);
    std::pair<Rational, Rational> res;
    Rational best_q;
    int best_a = -1;
    for (int a = 0; a < A; ++a) {
      Rational obey_q(0), q(0);
      if (key.stage == last) {
        q = leaf(k, a);
        obey_q = q;
      } else {
        for (int c : key.children[a]) {
          auto [o, b] = solve(c);
          obey_q += o;
          q += b;
        }
      }
      if (a == key.own_rec) res.first = obey_q;
      if (best_a < 0 || q > best_q || (q == best_q && a == key.own_rec)) {
        best_q = q;
        best_a = a;
      }
    }
    out.strategy.action[k] = best_a;
    res.second = best_q;
    return res;
  };
  auto [o, b] = solve(root);
  out.obey = o;
  out.best = b;
  return out;
}

RefinementViolation Obedience(const MediatorSpace& space, int player, int key,
                              Continuation c) {
  RefinementViolation v;
  v.kind = RefinementViolation::Kind::kObedience;
  v.player = player;
  v.key = key;
  v.gain = c.best - c.obey;
  v.description = KeyLabel(space, player, key) + ": " +
                  DescribeDeviationFrom(space, c.strategy, key) + " gains " +
                  FormatRational(v.gain);
  v.deviation = std::move(c.strategy);
  return v;
}

RefinementViolation Simple(RefinementViolation::Kind kind, int player, int key,
                           std::string description) {
  RefinementViolation v;
  v.kind = kind;
  v.player = player;
  v.key = key;
  v.description = std::move(description);
  return v;
}

}  // namespace

std::vector<RefinementViolation> VerifyWpbce(const MediatorSpace& space,
                                             const MediationRange& range,
                                             const RecommendationKernels& k,
                                             const BeliefSystem& beliefs) {
  using Kind = RefinementViolation::Kind;
  if (space.free_prior()) throw InputError("wPBCE check needs a fixed prior");
  CheckRange(space, range);
  if (static_cast<int>(k.prob.size()) != space.NumVars() ||
      static_cast<int>(k.defined.size()) != space.NumVars()) {
    throw InputError("kernels do not match the mediator space");
  }
  if (static_cast<int>(beliefs.belief.size()) != space.NumPlayers()) {
    throw InputError("belief system has the wrong number of players");
  }
  const GameTree& tree = space.tree();
  const BaseGame& game = space.game();
  const auto vars = VarsOfKeys(space);
  for (int i = 0; i < space.NumPlayers(); ++i) {
    if (static_cast<int>(beliefs.belief[i].size()) != space.NumKeys(i)) {
      throw InputError("belief system of player " + std::to_string(i + 1) +
                       " has the wrong number of entries");
    }
    for (int key = 0; key < space.NumKeys(i); ++key) {
      const auto& b = beliefs.belief[i][key];
      if (b.empty()) continue;
      Rational total(0);
      for (const auto& [v, p] : b) {
        if (v < 0 || v >= space.NumVars() || space.KeyOf(i, v) != key) {
          throw InputError("belief at " + KeyLabel(space, i, key) +
                           " puts mass outside the private history");
        }
        if (sgn(p) < 0) throw InputError("negative belief");
        total += p;
      }
      if (total != 1) {
        throw InputError("belief at " + KeyLabel(space, i, key) + " sums to " +
                         FormatRational(total));
      }
    }
  }

  std::vector<RefinementViolation> out;
  // Kernel rows at every conditioning history in H(R).
  for (int node = 0; node < tree.NumNodes(); ++node) {
    const Node& n = tree.node(node);
    const int J = game.NumJointActions(n.stage);
    const int prevs = space.NumCodes(n.stage - 1);
    for (int prev = 0; prev < prevs; ++prev) {
      if (n.stage > 0 &&
          !VarInRange(space, range, space.Var(n.parent, prev))) {
        continue;
      }
      Rational total(0);
      bool undefined = false;
      for (int rec = 0; rec < J; ++rec) {
        const int v = space.Var(node, prev * J + rec);
        const bool in = VarInRange(space, range, v);
        if (!in) {
          if (k.defined[v] && sgn(k.prob[v]) != 0) {
            out.push_back(Simple(Kind::kRange, -1, -1,
                                 "kernel recommends outside the ranges at " +
                                     VarLabel(space, v)));
          }
          continue;
        }
        if (!k.defined[v]) {
          undefined = true;
          continue;
        }
        total += k.prob[v];
      }
      const std::string where =
          game.HistoryLabel(tree.HistoryOf(node)) +
          (n.stage > 0 ? " recs " + space.RecLabel(prev, n.stage - 1) : "");
      if (undefined) {
        out.push_back(
            Simple(Kind::kKernel, -1, -1, "kernel undefined at " + where));
      } else if (total != 1) {
        out.push_back(Simple(Kind::kKernel, -1, -1,
                             "kernel sums to " + FormatRational(total) +
                                 " at " + where));
      }
    }
  }
  auto kernel = [&](int v) {
    return k.defined[v] ? k.prob[v] : Rational(0);
  };
  const std::vector<Rational> reach = ObedientReach(space, k);
  for (int i = 0; i < space.NumPlayers(); ++i) {
    for (int key = 0; key < space.NumKeys(i); ++key) {
      const auto& b = beliefs.belief[i][key];
      Rational mass(0);
      for (int v : vars[i][key]) mass += reach[v];
      if (sgn(mass) > 0) {
        std::map<int, Rational> given(b.begin(), b.end());
        for (int v : vars[i][key]) {
          const Rational bayes = reach[v] / mass;
          const Rational have = given.count(v) ? given[v] : Rational(0);
          if (have != bayes) {
            out.push_back(Simple(
                Kind::kBeliefConsistency, i, key,
                KeyLabel(space, i, key) + ": belief " + FormatRational(have) +
                    " on " + VarLabel(space, v) + ", Bayes rule gives " +
                    FormatRational(bayes)));
          }
        }
      }
      if (!KeyInRange(space, range, i, key)) continue;
      if (b.empty()) {
        out.push_back(Simple(Kind::kMissingBelief, i, key,
                             "no belief at " + KeyLabel(space, i, key)));
        continue;
      }
      std::unordered_map<int, Rational> weight;
      Propagate(space, i, std::map<int, Rational>(b.begin(), b.end()), kernel,
                weight);
      Continuation c = SolveContinuation(space, i, key, weight, vars[i]);
      if (c.best > c.obey) out.push_back(Obedience(space, i, key, std::move(c)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sequential verification.

namespace {

Polynomial Multiply(const Polynomial& a, const Polynomial& b) {
  if (a.empty() || b.empty()) return {};
  Polynomial out(a.size() + b.size() - 1, Rational(0));
  for (size_t x = 0; x < a.size(); ++x) {
    if (sgn(a[x]) == 0) continue;
    for (size_t y = 0; y < b.size(); ++y) out[x + y] += a[x] * b[y];
  }
  return out;
}

// Per-rule data on the reduced domain.
struct SbceIndex {
  const MediatorSpace& space;
  const SbceGround& ground;
  std::vector<std::vector<int>> code;   // [rule][node] code covering 0..t
  std::vector<std::vector<int>> below;  // [node] terminals below the node
  // (player, key) -> (rule, node) pairs whose plan variable lies in the key.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> key_events;

  SbceIndex(const MediatorSpace& s, const SbceGround& g) : space(s), ground(g) {
    const GameTree& tree = space.tree();
    const BaseGame& game = space.game();
    const int n = tree.NumNodes();
    const int last = space.NumStages() - 1;
    below.resize(n);
    for (int id = n - 1; id >= 0; --id) {
      const Node& node = tree.node(id);
      if (node.stage == last) {
        for (int a = 0; a < game.NumJointActions(last); ++a) {
          below[id].push_back(tree.TerminalId(id, a));
        }
      }
      if (node.parent >= 0) {
        auto& up = below[node.parent];
        up.insert(up.end(), below[id].begin(), below[id].end());
      }
    }
    for (auto& b : below) std::sort(b.begin(), b.end());
    key_events.resize(space.NumPlayers());
    for (int i = 0; i < space.NumPlayers(); ++i) {
      key_events[i].resize(space.NumKeys(i));
    }
    for (int r = 0; r < static_cast<int>(ground.rules.size()); ++r) {
      const FeedbackRule& f = ground.rules[r];
      if (f.domain != RuleDomain::kReduced) {
        throw InputError("sequential checks need reduced feedback rules");
      }
      std::vector<int> c(n, 0);
      for (int id = 0; id < n; ++id) {
        const Node& node = tree.node(id);
        const int J = game.NumJointActions(node.stage);
        const int prev = node.parent < 0 ? 0 : c[node.parent];
        c[id] = prev * J + Recommend(space, f, id, prev);
        const int v = space.Var(id, c[id]);
        for (int i = 0; i < space.NumPlayers(); ++i) {
          key_events[i][space.KeyOf(i, v)].push_back({r, id});
        }
      }
      code.push_back(std::move(c));
    }
  }

  int VarOf(int rule, int node) const {
    return space.Var(node, code[rule][node]);
  }
  int RecOf(int rule, int node) const {
    return LastRec(space, VarOf(rule, node));
  }

  // Obedient probability of terminal x given the node `from` on its path.
  Rational Continue(int rule, int from, int x) const {
    const GameTree& tree = space.tree();
    auto [n, a] = tree.TerminalParts(x);
    if (a != RecOf(rule, n)) return Rational(0);
    Rational p(1);
    for (int id = n; id != from; id = tree.node(id).parent) {
      const Node& node = tree.node(id);
      if (node.parent_action != RecOf(rule, node.parent)) return Rational(0);
      p *= node.chance;
    }
    return p;
  }

  std::vector<int> KeyEvent(int player, int key) const {
    std::vector<int> z;
    for (auto [r, node] : key_events[player][key]) {
      for (int x : below[node]) z.push_back(ground.Index(r, x));
    }
    std::sort(z.begin(), z.end());
    return z;
  }

  // Rules grouped by their choices at nodes of stages before `stage`.
  std::vector<std::vector<int>> Groups(int stage) const {
    const GameTree& tree = space.tree();
    std::map<std::vector<int>, std::vector<int>> groups;
    for (int r = 0; r < static_cast<int>(ground.rules.size()); ++r) {
      std::vector<int> sig;
      for (int t = 0; t < stage; ++t) {
        for (int id : tree.StageNodes(t)) {
          sig.push_back(ground.rules[r].choice[id]);
        }
      }
      groups[sig].push_back(r);
    }
    std::vector<std::vector<int>> out;
    for (auto& [sig, rules] : groups) out.push_back(std::move(rules));
    return out;
  }

  std::vector<int> HistoryEvent(const std::vector<int>& rules, int node) const {
    std::vector<int> z;
    for (int r : rules) {
      for (int x : below[node]) z.push_back(ground.Index(r, x));
    }
    std::sort(z.begin(), z.end());
    return z;
  }
};

}  // namespace

SbceGround MakeSbceGround(const MediatorSpace& space,
                          const MediationRange& range, int64_t cap) {
  SbceGround g;
  g.rules = EnumerateRangeRules(space, range, cap);
  g.num_terminals = space.tree().NumTerminals();
  return g;
}

Cps TremblingCps(
    const MediatorSpace& space, const SbceGround& ground,
    const std::vector<Polynomial>& rule_weight,
    const std::function<Polynomial(int player, int var, int action)>& tremble) {
  if (rule_weight.size() != ground.rules.size()) {
    throw InputError("one weight per rule expected");
  }
  const GameTree& tree = space.tree();
  SbceIndex index(space, ground);
  std::vector<std::vector<Rational>> weights(ground.Size());
  for (int r = 0; r < static_cast<int>(ground.rules.size()); ++r) {
    for (int x = 0; x < ground.num_terminals; ++x) {
      auto [n, last_action] = tree.TerminalParts(x);
      Polynomial w = Multiply(rule_weight[r], {tree.node(n).reach});
      int action = last_action;
      for (int id = n; id >= 0; id = tree.node(id).parent) {
        const int t = tree.node(id).stage;
        const int v = index.VarOf(r, id);
        const int rec = LastRec(space, v);
        for (int i = 0; i < space.NumPlayers(); ++i) {
          const int own = tree.OwnAction(i, t, action);
          if (own != tree.OwnAction(i, t, rec)) {
            w = Multiply(w, tremble(i, v, own));
          }
        }
        action = tree.node(id).parent_action;
      }
      weights[ground.Index(r, x)] = std::move(w);
    }
  }
  return Cps::FromPerturbation(std::move(weights));
}

std::vector<std::vector<int>> SbceConditioningFamily(
    const MediatorSpace& space, const MediationRange& range,
    const SbceGround& ground) {
  SbceIndex index(space, ground);
  std::vector<std::vector<int>> family;
  std::vector<int> all(ground.Size());
  for (int x = 0; x < ground.Size(); ++x) all[x] = x;
  family.push_back(all);
  for (int i = 0; i < space.NumPlayers(); ++i) {
    for (int key = 0; key < space.NumKeys(i); ++key) {
      if (!KeyInRange(space, range, i, key)) continue;
      std::vector<int> z = index.KeyEvent(i, key);
      if (!z.empty()) family.push_back(std::move(z));
    }
  }
  for (int t = 0; t < space.NumStages(); ++t) {
    for (const auto& rules : index.Groups(t)) {
      for (int node : space.tree().StageNodes(t)) {
        family.push_back(index.HistoryEvent(rules, node));
      }
    }
  }
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());
  return family;
}

std::vector<RefinementViolation> VerifySbce(const MediatorSpace& space,
                                            const MediationRange& range,
                                            const BCEMixture& mixture,
                                            const SbceGround& ground,
                                            const Cps& cps) {
  using Kind = RefinementViolation::Kind;
  if (space.free_prior()) throw InputError("SBCE check needs a fixed prior");
  CheckRange(space, range);
  const GameTree& tree = space.tree();
  if (ground.num_terminals != tree.NumTerminals() ||
      cps.GroundSize() != ground.Size()) {
    throw InputError("CPS ground set does not match F(R) x terminals");
  }
  const int num_rules = static_cast<int>(ground.rules.size());
  std::vector<Rational> mu(num_rules, Rational(0));
  std::vector<RefinementViolation> out;
  Rational total(0);
  for (const MixtureEntry& e : mixture.entries) {
    if (sgn(e.weight) < 0) throw InputError("negative mixture weight");
    if (e.initial_node >= 0) throw InputError("initial nodes need a free prior");
    total += e.weight;
    if (sgn(e.weight) == 0) continue;
    auto it = std::find(ground.rules.begin(), ground.rules.end(), e.rule);
    if (it == ground.rules.end()) {
      out.push_back(Simple(Kind::kRange, -1, -1,
                           "mixture rule outside F(R): " +
                               DescribeRule(space, e.rule)));
      continue;
    }
    mu[it - ground.rules.begin()] += e.weight;
  }
  if (total != 1) throw InputError("mixture weights do not sum to one");
  if (!out.empty()) return out;

  SbceIndex index(space, ground);
  auto rule_label = [&](int r) { return "rule " + std::to_string(r); };
  // Unconditional beliefs.
  {
    std::vector<int> all(ground.Size());
    for (int x = 0; x < ground.Size(); ++x) all[x] = x;
    auto cond = cps.Conditional(all);
    if (!cond) {
      out.push_back(Simple(Kind::kCpsConsistency, -1, -1,
                           "CPS has no row for the full ground set"));
    } else {
      for (int r = 0; r < num_rules; ++r) {
        for (int x = 0; x < ground.num_terminals; ++x) {
          const int root = tree.Ancestor(tree.TerminalParts(x).first, 0);
          const Rational want =
              mu[r] * tree.node(root).chance * index.Continue(r, root, x);
          const Rational& have = (*cond)[ground.Index(r, x)];
          if (have != want) {
            out.push_back(Simple(
                Kind::kCpsConsistency, -1, -1,
                rule_label(r) + ", terminal " +
                    space.game().HistoryLabel(tree.TerminalHistory(
                        tree.TerminalParts(x).first,
                        tree.TerminalParts(x).second)) +
                    ": beta = " + FormatRational(have) + ", mu P = " +
                    FormatRational(want)));
            break;
          }
        }
      }
    }
  }
  // Continuation after (f_{<t}, h^t, omega^t) follows obedient play of f.
  for (int t = 0; t < space.NumStages(); ++t) {
    for (const auto& rules : index.Groups(t)) {
      for (int node : tree.StageNodes(t)) {
        const std::vector<int> z = index.HistoryEvent(rules, node);
        auto cond = cps.Conditional(z);
        const std::string where =
            space.game().HistoryLabel(tree.HistoryOf(node));
        if (!cond) {
          out.push_back(Simple(Kind::kCpsConsistency, -1, -1,
                               "CPS has no row for the event at " + where));
          continue;
        }
        std::map<int, Rational> p;
        for (size_t k = 0; k < z.size(); ++k) p[z[k]] = (*cond)[k];
        for (int r : rules) {
          Rational mass(0);
          for (int x : index.below[node]) mass += p[ground.Index(r, x)];
          for (int x : index.below[node]) {
            const Rational want = mass * index.Continue(r, node, x);
            if (p[ground.Index(r, x)] != want) {
              out.push_back(Simple(
                  Kind::kCpsConsistency, -1, -1,
                  rule_label(r) + " at " + where +
                      ": continuation beliefs differ from obedient play"));
              break;
            }
          }
        }
      }
    }
  }
  // Obedience under CPS-induced beliefs.
  const auto vars = VarsOfKeys(space);
  for (int i = 0; i < space.NumPlayers(); ++i) {
    for (int key = 0; key < space.NumKeys(i); ++key) {
      if (!KeyInRange(space, range, i, key)) continue;
      const std::vector<int> z = index.KeyEvent(i, key);
      auto cond = z.empty() ? std::nullopt : cps.Conditional(z);
      if (!cond) {
        out.push_back(Simple(Kind::kMissingBelief, i, key,
                             "no belief at " + KeyLabel(space, i, key)));
        continue;
      }
      std::map<int, Rational> p;
      for (size_t k = 0; k < z.size(); ++k) p[z[k]] = (*cond)[k];
      std::unordered_map<int, Rational> weight;
      for (auto [r, node] : index.key_events[i][key]) {
        Rational w(0);
        for (int x : index.below[node]) w += p[ground.Index(r, x)];
        if (sgn(w) == 0) continue;
        const FeedbackRule& f = ground.rules[r];
        KernelFn kernel = [&](int v) {
          const int parent = space.ParentVar(v);
          const int prev = parent < 0 ? 0 : space.VarCode(parent);
          return Recommend(space, f, space.VarNode(v), prev) ==
                         LastRec(space, v)
                     ? Rational(1)
                     : Rational(0);
        };
        Propagate(space, i, {{index.VarOf(r, node), w}}, kernel, weight);
      }
      Continuation c = SolveContinuation(space, i, key, weight, vars[i]);
      if (c.best > c.obey) out.push_back(Obedience(space, i, key, std::move(c)));
    }
  }
  return out;
}

}  // namespace bce
