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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace bce {
namespace {

int64_t SaturatingMul(int64_t a, int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<int64_t>::max() / b) {
    return std::numeric_limits<int64_t>::max();
  }
  return a * b;
}

int64_t SaturatingAdd(int64_t a, int64_t b) {
  if (a > std::numeric_limits<int64_t>::max() - b) {
    return std::numeric_limits<int64_t>::max();
  }
  return a + b;
}

void Push(Functional* f, int var, const Rational& coeff) {
  if (sgn(coeff) != 0) f->emplace_back(var, coeff);
}

}  // namespace

// ---------------------------------------------------------------------------
// MediatorSpace.

MediatorSpace::MediatorSpace(const GameTree& tree, bool free_prior,
                             int64_t cap)
    : tree_(tree), free_prior_(free_prior) {
  if (NumPlayers() > 31) throw InputError("at most 31 players are supported");
  BuildVars(cap);
  BuildKeys();
  BuildFunctionals();
}

int MediatorSpace::Var(int node, int code) const {
  const int t = tree_.node(node).stage;
  return offset_[t] + tree_.StageIndex(node) * num_codes_[t] + code;
}

int MediatorSpace::ParentVar(int var) const {
  const Node& n = tree_.node(var_node_[var]);
  if (n.parent < 0) return -1;
  return Var(n.parent, var_code_[var] / game().NumJointActions(n.stage));
}

int MediatorSpace::RecAt(int code, int t, int k) const {
  for (int j = t; j > k; --j) code /= game().NumJointActions(j);
  return code % game().NumJointActions(k);
}

std::string MediatorSpace::RecLabel(int code, int t) const {
  std::string out;
  for (int k = 0; k <= t; ++k) {
    if (k > 0) out += " ";
    out += game().JointActionLabel(k, RecAt(code, t, k));
  }
  return out;
}

void MediatorSpace::BuildVars(int64_t cap) {
  const int T = NumStages();
  int64_t codes = 1;
  int64_t total = 0;
  for (int t = 0; t < T; ++t) {
    codes *= game().NumJointActions(t);
    const int64_t stage_vars =
        SaturatingMul(codes, static_cast<int64_t>(tree_.StageNodes(t).size()));
    total = SaturatingAdd(total, stage_vars);
    if (codes > cap || total > cap) {
      throw CapExceeded("recommendation histories exceed the cap of " +
                        std::to_string(cap));
    }
    num_codes_.push_back(static_cast<int>(codes));
  }
  int running = 0;
  for (int t = 0; t < T; ++t) {
    offset_.push_back(running);
    for (int node : tree_.StageNodes(t)) {
      for (int c = 0; c < num_codes_[t]; ++c) {
        var_node_.push_back(node);
        var_code_.push_back(c);
      }
    }
    running = static_cast<int>(var_node_.size());
  }

  deviator_mask_.assign(var_node_.size(), 0);
  for (int v = 0; v < NumVars(); ++v) {
    const Node& n = tree_.node(var_node_[v]);
    if (n.parent < 0) continue;
    const int pv = ParentVar(v);
    const int t = n.stage - 1;
    const int rec = var_code_[pv] % game().NumJointActions(t);
    uint32_t mask = deviator_mask_[pv];
    for (int i = 0; i < NumPlayers(); ++i) {
      if (tree_.OwnAction(i, t, n.parent_action) != tree_.OwnAction(i, t, rec)) {
        mask |= 1u << i;
      }
    }
    deviator_mask_[v] = mask;
  }

  leaf_weight_.resize(tree_.NumNodes());
  for (int id = 0; id < tree_.NumNodes(); ++id) {
    const Node& n = tree_.node(id);
    leaf_weight_[id] = n.reach;
    if (free_prior_) leaf_weight_[id] /= tree_.node(tree_.Ancestor(id, 0)).chance;
  }

  for (int node : tree_.StageNodes(0)) {
    Flow f;
    f.node = node;
    for (int a = 0; a < num_codes_[0]; ++a) f.vars.push_back(Var(node, a));
    flows_.push_back(std::move(f));
  }
  for (int t = 1; t < T; ++t) {
    const int J = game().NumJointActions(t);
    for (int node : tree_.StageNodes(t)) {
      for (int c = 0; c < num_codes_[t - 1]; ++c) {
        Flow f;
        f.parent_var = Var(tree_.node(node).parent, c);
        f.node = node;
        for (int a = 0; a < J; ++a) f.vars.push_back(Var(node, c * J + a));
        flows_.push_back(std::move(f));
      }
    }
  }
}

void MediatorSpace::BuildKeys() {
  const int n = NumPlayers();
  keys_.resize(n);
  key_of_.assign(n, std::vector<int>(NumVars(), -1));
  roots_.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> own_code(NumVars(), 0);
    std::unordered_map<int64_t, int> lookup;
    for (int v = 0; v < NumVars(); ++v) {
      const Node& node = tree_.node(var_node_[v]);
      const int t = node.stage;
      const int rec = var_code_[v] % game().NumJointActions(t);
      const int own_rec = tree_.OwnAction(i, t, rec);
      const int pv = ParentVar(v);
      own_code[v] =
          (pv < 0 ? 0 : own_code[pv] * game().NumActions(i, t)) + own_rec;
      const int pid = node.private_id[i];
      const int64_t lk = (static_cast<int64_t>(pid) << 32) | own_code[v];
      auto it = lookup.find(lk);
      if (it != lookup.end()) {
        key_of_[i][v] = it->second;
        continue;
      }
      PlayerKey key;
      key.stage = t;
      key.pid = pid;
      key.own_code = own_code[v];
      key.own_rec = own_rec;
      key.children.resize(game().NumActions(i, t));
      const int id = static_cast<int>(keys_[i].size());
      if (pv >= 0) {
        key.parent = key_of_[i][pv];
        key.parent_action = tree_.OwnAction(i, t - 1, node.parent_action);
        keys_[i][key.parent].children[key.parent_action].push_back(id);
      } else {
        roots_[i].push_back(id);
      }
      keys_[i].push_back(std::move(key));
      lookup.emplace(lk, id);
      key_of_[i][v] = id;
    }
  }
}

void MediatorSpace::BuildFunctionals() {
  const int n = NumPlayers();
  const int last = NumStages() - 1;
  obedient_value_.assign(n, {});
  terminal_.assign(tree_.NumTerminals(), {});
  leaf_value_.resize(n);
  for (int i = 0; i < n; ++i) {
    leaf_value_[i].resize(keys_[i].size());
    for (size_t k = 0; k < keys_[i].size(); ++k) {
      if (keys_[i][k].stage == last) {
        leaf_value_[i][k].resize(game().NumActions(i, last));
      }
    }
  }
  for (int v = offset_[last]; v < NumVars(); ++v) {
    const int node = var_node_[v];
    const int rec = var_code_[v] % game().NumJointActions(last);
    const uint32_t mask = deviator_mask_[v];
    const Rational& w = leaf_weight_[node];
    if (mask == 0) {
      terminal_[tree_.TerminalId(node, rec)].emplace_back(v, w);
      const auto& u = tree_.Payoff(node, rec);
      for (int i = 0; i < n; ++i) Push(&obedient_value_[i], v, w * u[i]);
    }
    Profile profile = game().DecodeJoint(last, rec);
    for (int i = 0; i < n; ++i) {
      if ((mask & ~(1u << i)) != 0) continue;
      const int key = key_of_[i][v];
      Profile p = profile;
      for (int a = 0; a < game().NumActions(i, last); ++a) {
        p[i] = a;
        const auto& u = tree_.Payoff(node, game().EncodeJoint(last, p));
        Push(&leaf_value_[i][key][a], v, w * u[i]);
      }
    }
  }
}

const Functional& MediatorSpace::LeafValue(int player, int key,
                                           int action) const {
  return leaf_value_[player][key][action];
}

// ---------------------------------------------------------------------------
// Feedback rules.

int NumRuleCells(const MediatorSpace& space, RuleDomain domain) {
  const GameTree& tree = space.tree();
  if (domain == RuleDomain::kReduced) return tree.NumNodes();
  int64_t cells = 0;
  for (int t = 0; t < space.NumStages(); ++t) {
    cells += static_cast<int64_t>(tree.StageNodes(t).size()) *
             space.NumCodes(t - 1);
  }
  if (cells > std::numeric_limits<int>::max()) {
    throw CapExceeded("too many rule cells");
  }
  return static_cast<int>(cells);
}

int RuleCell(const MediatorSpace& space, RuleDomain domain, int node,
             int prev_code) {
  const GameTree& tree = space.tree();
  if (domain == RuleDomain::kReduced) return node;
  const int t = tree.node(node).stage;
  int offset = 0;
  for (int k = 0; k < t; ++k) {
    offset += static_cast<int>(tree.StageNodes(k).size()) *
              space.NumCodes(k - 1);
  }
  return offset + tree.StageIndex(node) * space.NumCodes(t - 1) + prev_code;
}

int Recommend(const MediatorSpace& space, const FeedbackRule& rule, int node,
              int prev_code) {
  return rule.choice[RuleCell(space, rule.domain, node, prev_code)];
}

namespace {

// Radix (number of joint actions) of every cell of the domain.
std::vector<int> CellRadix(const MediatorSpace& space, RuleDomain domain) {
  const GameTree& tree = space.tree();
  std::vector<int> radix;
  if (domain == RuleDomain::kReduced) {
    for (int id = 0; id < tree.NumNodes(); ++id) {
      radix.push_back(space.game().NumJointActions(tree.node(id).stage));
    }
  } else {
    for (int t = 0; t < space.NumStages(); ++t) {
      const int cells =
          static_cast<int>(tree.StageNodes(t).size()) * space.NumCodes(t - 1);
      radix.insert(radix.end(), cells, space.game().NumJointActions(t));
    }
  }
  return radix;
}

}  // namespace

int64_t CountFeedbackRules(const MediatorSpace& space, RuleDomain domain) {
  int64_t count = 1;
  for (int r : CellRadix(space, domain)) count = SaturatingMul(count, r);
  return count;
}

std::vector<FeedbackRule> EnumerateFeedbackRules(const MediatorSpace& space,
                                                 RuleDomain domain,
                                                 int64_t cap) {
  const int64_t count = CountFeedbackRules(space, domain);
  if (count > cap) {
    throw CapExceeded("feedback rule count exceeds the cap of " +
                      std::to_string(cap));
  }
  const std::vector<int> radix = CellRadix(space, domain);
  std::vector<FeedbackRule> rules;
  rules.reserve(count);
  FeedbackRule rule{domain, std::vector<int>(radix.size(), 0)};
  for (;;) {
    rules.push_back(rule);
    int k = static_cast<int>(radix.size()) - 1;
    while (k >= 0 && ++rule.choice[k] == radix[k]) rule.choice[k--] = 0;
    if (k < 0) break;
  }
  return rules;
}

std::string DescribeRule(const MediatorSpace& space,
                         const FeedbackRule& rule) {
  const GameTree& tree = space.tree();
  std::ostringstream out;
  bool first = true;
  std::function<void(int, int)> visit = [&](int node, int prev) {
    const Node& n = tree.node(node);
    const int rec = Recommend(space, rule, node, prev);
    if (!first) out << "; ";
    first = false;
    out << "t" << n.stage + 1 << " " << space.game().HistoryLabel(tree.HistoryOf(node));
    if (rule.domain == RuleDomain::kFull && n.stage > 0) {
      out << " recs " << space.RecLabel(prev, n.stage - 1);
    }
    out << " -> " << space.game().JointActionLabel(n.stage, rec);
    const int code = prev * space.game().NumJointActions(n.stage) + rec;
    for (const auto& kids : n.children) {
      for (int child : kids) visit(child, code);
    }
  };
  for (int root : tree.StageNodes(0)) visit(root, 0);
  return out.str();
}

// ---------------------------------------------------------------------------
// Deviations.

int DeviationStrategy::Action(const MediatorSpace& space, int key) const {
  if (player < 0 || key >= static_cast<int>(action.size()) || action[key] < 0) {
    return space.key(player < 0 ? 0 : player, key).own_rec;
  }
  return action[key];
}

DeviationStrategy Obedient() { return DeviationStrategy{}; }

int64_t CountDeviations(const MediatorSpace& space, int player) {
  const int K = space.NumKeys(player);
  std::vector<int64_t> count(K, 0);
  for (int k = K - 1; k >= 0; --k) {
    const PlayerKey& key = space.key(player, k);
    int64_t total = 0;
    for (const auto& kids : key.children) {
      int64_t prod = 1;
      for (int c : kids) prod = SaturatingMul(prod, count[c]);
      total = SaturatingAdd(total, prod);
    }
    count[k] = total;
  }
  int64_t total = 1;
  for (int r : space.RootKeys(player)) total = SaturatingMul(total, count[r]);
  return total;
}

std::vector<DeviationStrategy> EnumerateDeviations(const MediatorSpace& space,
                                                   int player, int64_t cap) {
  if (CountDeviations(space, player) > cap) {
    throw CapExceeded("deviation count for player " +
                      space.game().players[player] + " exceeds the cap of " +
                      std::to_string(cap));
  }
  std::vector<DeviationStrategy> out;
  DeviationStrategy current{player, std::vector<int>(space.NumKeys(player), -1)};
  std::function<void(std::vector<int>)> expand = [&](std::vector<int> pending) {
    if (pending.empty()) {
      out.push_back(current);
      return;
    }
    const int k = pending.back();
    pending.pop_back();
    const PlayerKey& key = space.key(player, k);
    for (int a = 0; a < static_cast<int>(key.children.size()); ++a) {
      current.action[k] = a;
      std::vector<int> next = pending;
      next.insert(next.end(), key.children[a].rbegin(), key.children[a].rend());
      expand(std::move(next));
    }
    current.action[k] = -1;
  };
  std::vector<int> roots(space.RootKeys(player).rbegin(),
                         space.RootKeys(player).rend());
  expand(roots);
  return out;
}

// ---------------------------------------------------------------------------
// Forward evaluation.

std::vector<OutcomeAtom> OutcomeUnder(const MediatorSpace& space,
                                      const FeedbackRule& rule,
                                      const DeviationStrategy& dev,
                                      int initial_node) {
  const GameTree& tree = space.tree();
  const BaseGame& game = space.game();
  const int last = space.NumStages() - 1;
  std::vector<OutcomeAtom> atoms;
  std::function<void(int, int, const Rational&)> visit =
      [&](int node, int prev, const Rational& prob) {
        const Node& n = tree.node(node);
        const int t = n.stage;
        const int rec = Recommend(space, rule, node, prev);
        const int code = prev * game.NumJointActions(t) + rec;
        int joint = rec;
        if (dev.player >= 0) {
          Profile act = game.DecodeJoint(t, rec);
          const int key = space.KeyOf(dev.player, space.Var(node, code));
          act[dev.player] = dev.Action(space, key);
          joint = game.EncodeJoint(t, act);
        }
        if (t == last) {
          atoms.push_back({tree.TerminalId(node, joint), code, prob});
          return;
        }
        for (int child : n.children[joint]) {
          visit(child, code, prob * tree.node(child).chance);
        }
      };
  if (initial_node >= 0) {
    visit(initial_node, 0, Rational(1));
  } else {
    for (int root : tree.StageNodes(0)) visit(root, 0, tree.node(root).chance);
  }
  return atoms;
}

std::vector<Rational> ExpectedPayoff(const MediatorSpace& space,
                                     const std::vector<OutcomeAtom>& atoms) {
  std::vector<Rational> total(space.NumPlayers());
  for (const OutcomeAtom& atom : atoms) {
    auto [node, a] = space.tree().TerminalParts(atom.terminal);
    const auto& u = space.tree().Payoff(node, a);
    for (int i = 0; i < space.NumPlayers(); ++i) total[i] += atom.prob * u[i];
  }
  return total;
}

// ---------------------------------------------------------------------------
// Plans.

std::vector<int> PlanSupportOfRule(const MediatorSpace& space,
                                   const FeedbackRule& rule,
                                   int initial_node) {
  const GameTree& tree = space.tree();
  std::vector<int> support;
  std::function<void(int, int)> visit = [&](int node, int prev) {
    const Node& n = tree.node(node);
    const int code =
        prev * space.game().NumJointActions(n.stage) +
        Recommend(space, rule, node, prev);
    support.push_back(space.Var(node, code));
    for (const auto& kids : n.children) {
      for (int child : kids) visit(child, code);
    }
  };
  if (initial_node >= 0) {
    visit(initial_node, 0);
  } else {
    for (int root : tree.StageNodes(0)) visit(root, 0);
  }
  return support;
}

Plan PlanOfRule(const MediatorSpace& space, const FeedbackRule& rule,
                int initial_node) {
  Plan y(space.NumVars());
  for (int v : PlanSupportOfRule(space, rule, initial_node)) y[v] = 1;
  return y;
}

Rational Evaluate(const Functional& f, const Plan& y) {
  Rational s(0);
  for (const auto& [v, c] : f) {
    if (sgn(y[v]) != 0) s += c * y[v];
  }
  return s;
}

bool IsPlan(const MediatorSpace& space, const Plan& y) {
  if (static_cast<int>(y.size()) != space.NumVars()) return false;
  for (const Rational& v : y) {
    if (sgn(v) < 0) return false;
  }
  Rational roots(0);
  for (const MediatorSpace::Flow& f : space.Flows()) {
    Rational s(0);
    for (int v : f.vars) s += y[v];
    if (f.parent_var >= 0) {
      if (s != y[f.parent_var]) return false;
    } else if (space.free_prior()) {
      roots += s;
    } else if (s != 1) {
      return false;
    }
  }
  return !space.free_prior() || roots == 1;
}

BestResponse BestDeviation(const MediatorSpace& space, const Plan& y,
                           int player) {
  const int K = space.NumKeys(player);
  const int last = space.NumStages() - 1;
  std::vector<Rational> value(K);
  BestResponse br;
  br.strategy.player = player;
  br.strategy.action.assign(K, -1);
  for (int k = K - 1; k >= 0; --k) {
    const PlayerKey& key = space.key(player, k);
    const int A = static_cast<int>(key.children.size());
    std::vector<Rational> val(A);
    for (int a = 0; a < A; ++a) {
      if (key.stage == last) {
        val[a] = Evaluate(space.LeafValue(player, k, a), y);
      } else {
        for (int c : key.children[a]) val[a] += value[c];
      }
    }
    int best = key.own_rec;
    for (int a = 0; a < A; ++a) {
      if (val[a] > val[best]) best = a;
    }
    value[k] = val[best];
    br.strategy.action[k] = best;
  }
  for (int r : space.RootKeys(player)) br.best_value += value[r];
  br.obedient_value = Evaluate(space.ObedientValue(player), y);
  return br;
}

std::vector<Rational> ObedientDistribution(const MediatorSpace& space,
                                           const Plan& y) {
  std::vector<Rational> dist;
  for (const Functional& f : space.TerminalFunctionals()) {
    dist.push_back(Evaluate(f, y));
  }
  return dist;
}

}  // namespace bce
