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

#include <algorithm>
#include <memory>
#include <optional>

#include "bce/refinement.h"

namespace bce {
namespace {

Profile Zeros(int n) { return Profile(n, 0); }

History StripMessages(History h) {
  const int n = h.signals.empty() ? 0 : static_cast<int>(h.signals[0].size());
  for (Profile& m : h.messages) m = Zeros(n);
  return h;
}

// All message profiles of stage t in mixed radix, player 0 most significant.
std::vector<Profile> AllProfiles(
    const std::vector<std::vector<std::vector<std::string>>>& sets, int t) {
  std::vector<Profile> out = {Profile()};
  for (size_t i = 0; i < sets.size(); ++i) {
    std::vector<Profile> next;
    for (const Profile& p : out) {
      for (int m = 0; m < static_cast<int>(sets[i][t].size()); ++m) {
        Profile q = p;
        q.push_back(m);
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

class InducedKernel : public KernelModel {
 public:
  InducedKernel(std::shared_ptr<const KernelModel> base, XiFn xi, int n)
      : base_(std::move(base)), xi_(std::move(xi)), n_(n) {}

  std::vector<Outcome> Initial() const override {
    std::vector<Outcome> out;
    for (const Outcome& o : base_->Initial()) {
      History partial;
      partial.signals.push_back(o.signal);
      partial.states.push_back(o.state);
      Expand(o, partial, &out);
    }
    return out;
  }

  std::vector<Outcome> Transition(const History& h,
                                  const Profile& a) const override {
    std::vector<Outcome> out;
    for (const Outcome& o : base_->Transition(StripMessages(h), a)) {
      History partial = h;
      partial.actions.push_back(o.recall.empty() ? a : o.recall);
      partial.signals.push_back(o.signal);
      partial.states.push_back(o.state);
      Expand(o, partial, &out);
    }
    return out;
  }

 private:
  void Expand(const Outcome& o, const History& partial,
              std::vector<Outcome>* out) const {
    for (const auto& [m, q] : xi_(partial)) {
      if (sgn(q) == 0 || sgn(o.prob) == 0) continue;
      Outcome d = o;
      d.message = m;
      d.prob = o.prob * q;
      out->push_back(std::move(d));
    }
  }

  std::shared_ptr<const KernelModel> base_;
  XiFn xi_;
  int n_;
};

void CheckSameBase(const BaseGame& game, const BaseGame& kernels) {
  if (game.players.size() != kernels.players.size() ||
      game.stages != kernels.stages || game.actions != kernels.actions ||
      game.signals != kernels.signals || game.states != kernels.states) {
    throw InputError(
        "kernel family does not match the base game's players, actions, "
        "signals or states");
  }
}

// Draw of the last stage of a node's history, without the message.
std::string DrawKey(const History& h) {
  History last;
  if (!h.actions.empty()) last.actions.push_back(h.actions.back());
  last.signals.push_back(h.signals.back());
  last.states.push_back(h.states.back());
  return HistoryKey(last);
}

}  // namespace

Expansion TabularExpansion(
    std::vector<std::vector<std::vector<std::string>>> message_sets,
    std::map<std::string, MessageDraw> table) {
  auto shared = std::make_shared<const std::map<std::string, MessageDraw>>(
      std::move(table));
  auto sets = message_sets;
  Expansion exp;
  exp.message_sets = std::move(message_sets);
  exp.xi = [shared, sets](const History& partial) {
    auto it = shared->find(HistoryKey(partial));
    if (it != shared->end()) return it->second;
    const int t = static_cast<int>(partial.signals.size()) - 1;
    std::vector<Profile> all = AllProfiles(sets, t);
    MessageDraw uniform;
    for (Profile& p : all) {
      uniform.push_back({std::move(p), Ratio(1, static_cast<long>(all.size()))});
    }
    return uniform;
  };
  return exp;
}

History PartialHistory(const History& h) {
  History p = h;
  p.messages.resize(h.signals.empty() ? 0 : h.signals.size() - 1);
  return p;
}

BaseGame InduceGame(const BaseGame& game, const Expansion& exp) {
  const int n = game.NumPlayers();
  if (game.HasMessages()) {
    throw InputError("base game already has non-singleton message sets");
  }
  if (static_cast<int>(exp.message_sets.size()) != n) {
    throw InputError("expansion has message sets for " +
                     std::to_string(exp.message_sets.size()) +
                     " players, expected " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(exp.message_sets[i].size()) != game.stages) {
      throw InputError("expansion message sets of player " + game.players[i] +
                       " do not cover every stage");
    }
    for (const auto& set : exp.message_sets[i]) {
      if (set.empty()) throw InputError("empty message set");
    }
  }
  if (!exp.xi) throw InputError("expansion has no kernels");
  BaseGame out = game;
  out.messages = exp.message_sets;
  out.kernel = std::make_shared<InducedKernel>(game.kernel, exp.xi, n);
  auto payoff = game.payoff;
  out.payoff = std::make_shared<FunctionPayoff>(
      [payoff](const History& h) { return payoff->Payoff(StripMessages(h)); });
  return out;
}

bool ConsistencyCheck(const BaseGame& game, const BaseGame& kernels,
                      int64_t cap) {
  CheckSameBase(game, kernels);
  std::map<std::string, Rational> marginal;
  for (const History& h : EnumerateTerminalHistories(kernels, cap)) {
    marginal[HistoryKey(StripMessages(h))] += OutcomeProbability(kernels, h);
  }
  std::map<std::string, Rational> base;
  for (const History& h : EnumerateTerminalHistories(game, cap)) {
    base[HistoryKey(StripMessages(h))] += OutcomeProbability(game, h);
  }
  std::erase_if(marginal, [](const auto& kv) { return sgn(kv.second) == 0; });
  std::erase_if(base, [](const auto& kv) { return sgn(kv.second) == 0; });
  return marginal == base;
}

FactorizationResult FactorizationTest(const BaseGame& game,
                                      const BaseGame& kernels, int64_t cap) {
  CheckSameBase(game, kernels);
  GameTree ktree(kernels, cap);
  GameTree btree(game, cap);
  FactorizationResult result;
  std::map<std::string, MessageDraw> table;

  // Compares the message marginal of the pi-children with the p-children
  // and records xi = pi / p.
  auto compare = [&](const std::vector<int>& kids,
                     const std::vector<int>& base_kids,
                     const std::string& where) {
    std::map<std::string, Rational> pi, p;
    for (int c : kids) pi[DrawKey(ktree.HistoryOf(c))] += ktree.node(c).chance;
    for (int c : base_kids) p[DrawKey(btree.HistoryOf(c))] += btree.node(c).chance;
    if (pi != p) {
      result.reason = where;
      return false;
    }
    for (int c : kids) {
      const History h = ktree.HistoryOf(c);
      table[HistoryKey(PartialHistory(h))].push_back(
          {h.messages.back(), ktree.node(c).chance / p[DrawKey(h)]});
    }
    return true;
  };

  std::vector<int> broots = btree.StageNodes(0);
  if (!compare(ktree.StageNodes(0), broots, "stage 1 initial draw")) {
    return result;
  }
  for (int t = 0; t + 1 < ktree.NumStages(); ++t) {
    for (int node : ktree.StageNodes(t)) {
      const History h = ktree.HistoryOf(node);
      const int bnode = btree.FindNode(StripMessages(h));
      if (bnode < 0) throw Error("kernel family reaches a history unknown to the base game");
      for (int a = 0; a < game.NumJointActions(t); ++a) {
        const std::string where =
            "stage " + std::to_string(t + 2) + " draw after " +
            kernels.HistoryLabel(h) + " and " + game.JointActionLabel(t, a);
        if (!compare(ktree.node(node).children[a], btree.node(bnode).children[a],
                     where)) {
          return result;
        }
      }
    }
  }
  result.factorizable = true;
  result.witness = TabularExpansion(kernels.messages, std::move(table));
  return result;
}

Expansion CanonicalExpansion(const MediatorSpace& space,
                             const BCEMixture& mixture) {
  if (space.free_prior()) {
    throw InputError("canonical expansion needs a fixed prior");
  }
  if (!VerifyBce(space, mixture).empty()) {
    throw InputError("mixture is not a Bayes correlated equilibrium");
  }
  const GameTree& tree = space.tree();
  const BaseGame& game = space.game();
  RecommendationKernels k = KernelsFromMixture(space, mixture);
  std::map<std::string, MessageDraw> table;
  for (int v = 0; v < space.NumVars(); ++v) {
    if (!k.defined[v] || sgn(k.prob[v]) == 0) continue;
    const int node = space.VarNode(v);
    const int t = tree.node(node).stage;
    const int code = space.VarCode(v);
    const int prev = code / game.NumJointActions(t);
    History partial = PartialHistory(tree.HistoryOf(node));
    for (int s = 0; s < t; ++s) {
      partial.messages[s] = game.DecodeJoint(s, space.RecAt(prev, t - 1, s));
    }
    table[HistoryKey(partial)].push_back(
        {game.DecodeJoint(t, code % game.NumJointActions(t)), k.prob[v]});
  }
  return TabularExpansion(game.actions, std::move(table));
}

// ---------------------------------------------------------------------------
// Strategies on game trees.

BehaviorProfile PlayMessageProfile(const GameTree& tree) {
  const BaseGame& game = tree.game();
  BehaviorProfile profile;
  profile.prob.resize(tree.NumPlayers());
  for (int i = 0; i < tree.NumPlayers(); ++i) {
    for (const PrivateState& s : tree.PrivateStates(i)) {
      const int A = game.NumActions(i, s.stage);
      if (game.NumMessages(i, s.stage) != A) {
        throw InputError("message and action sets differ in size for player " +
                         game.players[i]);
      }
      std::vector<Rational> p(A);
      p[s.message] = 1;
      profile.prob[i].push_back(std::move(p));
    }
  }
  return profile;
}

namespace {

void CheckProfile(const GameTree& tree, const BehaviorProfile& profile) {
  if (static_cast<int>(profile.prob.size()) != tree.NumPlayers()) {
    throw InputError("profile has the wrong number of players");
  }
  for (int i = 0; i < tree.NumPlayers(); ++i) {
    const auto& states = tree.PrivateStates(i);
    if (profile.prob[i].size() != states.size()) {
      throw InputError("profile does not cover every private state of player " +
                       tree.game().players[i]);
    }
    for (size_t pid = 0; pid < states.size(); ++pid) {
      const auto& p = profile.prob[i][pid];
      if (static_cast<int>(p.size()) !=
          tree.game().NumActions(i, states[pid].stage)) {
        throw InputError("profile row has the wrong number of actions");
      }
      Rational total(0);
      for (const Rational& x : p) {
        if (sgn(x) < 0) throw InputError("negative strategy probability");
        total += x;
      }
      if (total != 1) throw InputError("strategy row does not sum to one");
    }
  }
}

// Probability that the players other than `skip` play the joint action at
// the node (skip = -1 multiplies every player).
Rational JointProb(const GameTree& tree, const BehaviorProfile& profile,
                   int node, int joint, int skip) {
  const Node& n = tree.node(node);
  const Profile a = tree.game().DecodeJoint(n.stage, joint);
  Rational p(1);
  for (int i = 0; i < tree.NumPlayers(); ++i) {
    if (i == skip) continue;
    p *= profile.prob[i][n.private_id[i]][a[i]];
    if (sgn(p) == 0) break;
  }
  return p;
}

// Chance reach times the action probabilities of everyone except `skip`.
std::vector<Rational> Reach(const GameTree& tree,
                            const BehaviorProfile& profile, int skip) {
  std::vector<Rational> reach(tree.NumNodes());
  for (int t = 0; t < tree.NumStages(); ++t) {
    for (int node : tree.StageNodes(t)) {
      const Node& n = tree.node(node);
      if (t == 0) reach[node] = n.chance;
      if (sgn(reach[node]) == 0 || t + 1 == tree.NumStages()) continue;
      for (int j = 0; j < static_cast<int>(n.children.size()); ++j) {
        const Rational q = JointProb(tree, profile, node, j, skip);
        if (sgn(q) == 0) continue;
        for (int c : n.children[j]) reach[c] += reach[node] * q * tree.node(c).chance;
      }
    }
  }
  return reach;
}

}  // namespace

std::vector<Rational> TerminalDistribution(const GameTree& tree,
                                           const BehaviorProfile& profile) {
  CheckProfile(tree, profile);
  std::vector<Rational> reach = Reach(tree, profile, -1);
  std::vector<Rational> dist(tree.NumTerminals());
  const int last = tree.NumStages() - 1;
  for (int node : tree.StageNodes(last)) {
    if (sgn(reach[node]) == 0) continue;
    const int J = tree.game().NumJointActions(last);
    for (int j = 0; j < J; ++j) {
      const Rational q = JointProb(tree, profile, node, j, -1);
      if (sgn(q) != 0) dist[tree.TerminalId(node, j)] += reach[node] * q;
    }
  }
  return dist;
}

std::vector<Rational> ProfileValue(const GameTree& tree,
                                   const BehaviorProfile& profile) {
  std::vector<Rational> dist = TerminalDistribution(tree, profile);
  std::vector<Rational> value(tree.NumPlayers());
  for (int t = 0; t < static_cast<int>(dist.size()); ++t) {
    if (sgn(dist[t]) == 0) continue;
    auto [node, a] = tree.TerminalParts(t);
    const auto& u = tree.Payoff(node, a);
    for (int i = 0; i < tree.NumPlayers(); ++i) value[i] += dist[t] * u[i];
  }
  return value;
}

Rational EnumerateBestValue(const GameTree& tree,
                            const BehaviorProfile& profile, int player,
                            int64_t cap) {
  CheckProfile(tree, profile);
  const auto& states = tree.PrivateStates(player);
  const int P = static_cast<int>(states.size());
  std::vector<int> radix(P);
  int64_t count = 1;
  for (int pid = 0; pid < P; ++pid) {
    radix[pid] = tree.game().NumActions(player, states[pid].stage);
    if (count > cap / radix[pid]) {
      throw CapExceeded("more than " + std::to_string(cap) +
                        " pure strategies");
    }
    count *= radix[pid];
  }
  BehaviorProfile p = profile;
  std::optional<Rational> best;
  std::vector<int> digit(P, 0);
  for (int64_t s = 0; s < count; ++s) {
    for (int pid = 0; pid < P; ++pid) {
      p.prob[player][pid].assign(radix[pid], Rational(0));
      p.prob[player][pid][digit[pid]] = 1;
    }
    Rational v = ProfileValue(tree, p)[player];
    if (!best || v > *best) best = v;
    for (int pid = 0; pid < P && ++digit[pid] == radix[pid]; ++pid) {
      digit[pid] = 0;
    }
  }
  return *best;
}

std::vector<PureDeviation> BestResponseCheck(const GameTree& tree,
                                             const BehaviorProfile& profile) {
  CheckProfile(tree, profile);
  const BaseGame& game = tree.game();
  const int last = tree.NumStages() - 1;
  std::vector<PureDeviation> out;
  for (int i = 0; i < tree.NumPlayers(); ++i) {
    const auto& states = tree.PrivateStates(i);
    const int P = static_cast<int>(states.size());
    std::vector<Rational> reach = Reach(tree, profile, i);
    std::vector<std::vector<Rational>> q_best(P), q_own(P);
    for (int pid = 0; pid < P; ++pid) {
      q_best[pid].assign(game.NumActions(i, states[pid].stage), Rational(0));
      q_own[pid] = q_best[pid];
    }
    for (int node : tree.StageNodes(last)) {
      if (sgn(reach[node]) == 0) continue;
      const int pid = tree.node(node).private_id[i];
      for (int j = 0; j < game.NumJointActions(last); ++j) {
        const Rational q = JointProb(tree, profile, node, j, i);
        if (sgn(q) == 0) continue;
        const Rational v = reach[node] * q * tree.Payoff(node, j)[i];
        q_best[pid][tree.OwnAction(i, last, j)] += v;
      }
    }
    for (int pid = 0; pid < P; ++pid) q_own[pid] = q_best[pid];
    std::vector<Rational> v_best(P), v_own(P);
    PureDeviation dev;
    dev.player = i;
    dev.action.assign(P, -1);
    for (int t = last; t >= 0; --t) {
      for (int pid = P - 1; pid >= 0; --pid) {
        if (states[pid].stage != t) continue;
        const auto& sigma = profile.prob[i][pid];
        int best = -1;
        for (int a = 0; a < static_cast<int>(sigma.size()); ++a) {
          if (best < 0 || q_best[pid][a] > q_best[pid][best] ||
              (q_best[pid][a] == q_best[pid][best] && sgn(sigma[best]) == 0 &&
               sgn(sigma[a]) > 0)) {
            best = a;
          }
          v_own[pid] += sigma[a] * q_own[pid][a];
        }
        v_best[pid] = q_best[pid][best];
        dev.action[pid] = best;
        if (t > 0) {
          const PrivateState& s = states[pid];
          q_best[s.parent][s.own_action] += v_best[pid];
          q_own[s.parent][s.own_action] += v_own[pid];
        }
      }
    }
    Rational best(0), own(0);
    for (int pid = 0; pid < P; ++pid) {
      if (states[pid].stage != 0) continue;
      best += v_best[pid];
      own += v_own[pid];
    }
    dev.gain = best - own;
    if (sgn(dev.gain) > 0) out.push_back(std::move(dev));
  }
  return out;
}

std::vector<Rational> ProjectToBase(const GameTree& induced,
                                    const std::vector<Rational>& dist,
                                    const GameTree& base) {
  std::vector<Rational> out(base.NumTerminals());
  for (int t = 0; t < static_cast<int>(dist.size()); ++t) {
    if (sgn(dist[t]) == 0) continue;
    auto [node, a] = induced.TerminalParts(t);
    const int bnode = base.FindNode(StripMessages(induced.HistoryOf(node)));
    if (bnode < 0) throw Error("induced terminal is not a base terminal");
    out[base.TerminalId(bnode, a)] += dist[t];
  }
  return out;
}

}  // namespace bce
