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

#include <algorithm>
#include <map>
#include <sstream>

namespace bce {
namespace {

const std::vector<std::string> kSingleton = {"-"};

Profile Zeros(int n) { return Profile(n, 0); }

Profile MessageOrZeros(const Outcome& o, int n) {
  return o.message.empty() ? Zeros(n) : o.message;
}

std::string ProfileLabel(const std::vector<std::vector<std::string>>& sets,
                         const Profile& p) {
  std::vector<std::string> parts;
  for (size_t i = 0; i < p.size(); ++i) {
    if (sets[i].size() > 1) parts.push_back(sets[i][p[i]]);
  }
  if (parts.empty()) return "-";
  if (parts.size() == 1) return parts[0];
  std::string out = "(";
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ",";
    out += parts[i];
  }
  return out + ")";
}

std::vector<std::vector<std::string>> StageSets(
    const std::vector<std::vector<std::vector<std::string>>>& table, int t) {
  std::vector<std::vector<std::string>> out;
  for (const auto& per_player : table) out.push_back(per_player[t]);
  return out;
}

History Prefix(const History& terminal, int stages_drawn) {
  History h;
  h.actions.assign(terminal.actions.begin(),
                   terminal.actions.begin() + (stages_drawn - 1));
  h.signals.assign(terminal.signals.begin(),
                   terminal.signals.begin() + stages_drawn);
  h.messages.assign(terminal.messages.begin(),
                    terminal.messages.begin() + stages_drawn);
  h.states.assign(terminal.states.begin(),
                  terminal.states.begin() + stages_drawn);
  return h;
}

void AppendKey(std::string* key, const Profile& p) {
  for (int v : p) {
    *key += std::to_string(v);
    *key += ',';
  }
  *key += ';';
}

// Key of a draw (signal, message, state) used to merge duplicate entries.
std::string DrawKey(const Profile& recall, const Profile& signal,
                    const Profile& message, int state) {
  std::string key;
  AppendKey(&key, recall);
  AppendKey(&key, signal);
  AppendKey(&key, message);
  key += std::to_string(state);
  return key;
}

class NoChance : public KernelModel {
 public:
  explicit NoChance(int n) : n_(n) {}
  std::vector<Outcome> Initial() const override {
    return {Outcome{{}, Zeros(n_), Zeros(n_), 0, Rational(1)}};
  }
  std::vector<Outcome> Transition(const History&,
                                  const Profile& a) const override {
    return {Outcome{a, Zeros(n_), Zeros(n_), 0, Rational(1)}};
  }

 private:
  int n_;
};

// Shared traversal used by validation. Visits every history reachable under
// some action profile, and every terminal.
class Validator {
 public:
  Validator(const BaseGame& game, int64_t cap) : game_(game), cap_(cap) {}

  ValidationReport Run() {
    const int n = game_.NumPlayers();
    std::vector<History> frontier;
    {
      std::vector<Outcome> draws = game_.kernel->Initial();
      History empty;
      frontier = Expand(empty, nullptr, draws, "p_1");
    }
    for (int t = 0; t + 1 < game_.stages; ++t) {
      std::vector<History> next;
      for (const History& h : frontier) {
        for (int a = 0; a < game_.NumJointActions(t); ++a) {
          Profile actions = game_.DecodeJoint(t, a);
          std::vector<Outcome> draws = game_.kernel->Transition(h, actions);
          std::vector<History> kids = Expand(
              h, &actions, draws,
              "p_" + std::to_string(t + 2) + " at " + game_.HistoryLabel(h) +
                  " after " + game_.JointActionLabel(t, a));
          for (History& k : kids) next.push_back(std::move(k));
        }
      }
      frontier = std::move(next);
    }
    const int last = game_.stages - 1;
    std::map<std::string, std::vector<Rational>> by_actions_states;
    for (const History& h : frontier) {
      for (int a = 0; a < game_.NumJointActions(last); ++a) {
        History term = h;
        term.actions.push_back(game_.DecodeJoint(last, a));
        std::optional<std::vector<Rational>> u = game_.payoff->Payoff(term);
        const std::string where = game_.HistoryLabel(term);
        if (!u.has_value()) {
          Add("payoff_missing", where, "no payoff defined");
          continue;
        }
        if (static_cast<int>(u->size()) != n) {
          Add("payoff_shape", where,
              "expected " + std::to_string(n) + " payoffs, got " +
                  std::to_string(u->size()));
          continue;
        }
        std::string key;
        for (const Profile& p : term.actions) AppendKey(&key, p);
        for (int w : term.states) key += std::to_string(w) + ",";
        auto it = by_actions_states.find(key);
        if (it == by_actions_states.end()) {
          by_actions_states.emplace(key, *u);
        } else if (it->second != *u) {
          Add("signal_dependence", where,
              "payoff differs from another terminal with the same actions "
              "and states");
        }
      }
    }
    (void)n;
    return std::move(report_);
  }

 private:
  void Add(const std::string& kind, const std::string& where,
           const std::string& detail) {
    report_.issues.push_back({kind, where, detail});
  }

  bool InRange(const Outcome& o, int stage, std::string* why) const {
    const int n = game_.NumPlayers();
    if (static_cast<int>(o.signal.size()) != n) {
      *why = "signal profile has wrong size";
      return false;
    }
    if (!o.message.empty() && static_cast<int>(o.message.size()) != n) {
      *why = "message profile has wrong size";
      return false;
    }
    for (int i = 0; i < n; ++i) {
      if (o.signal[i] < 0 || o.signal[i] >= game_.NumSignals(i, stage)) {
        *why = "signal index out of range";
        return false;
      }
      int m = o.message.empty() ? 0 : o.message[i];
      if (m < 0 || m >= game_.NumMessages(i, stage)) {
        *why = "message index out of range";
        return false;
      }
    }
    if (o.state < 0 || o.state >= game_.NumStates(stage)) {
      *why = "state index out of range";
      return false;
    }
    return true;
  }

  std::vector<History> Expand(const History& h, const Profile* actions,
                              const std::vector<Outcome>& draws,
                              const std::string& where) {
    const int stage = h.Stage();
    const int n = game_.NumPlayers();
    const std::string kind = actions == nullptr ? "initial_kernel"
                                                : "transition_kernel";
    Rational total(0);
    std::map<std::string, std::pair<History, Rational>> merged;
    std::vector<std::string> order;
    for (const Outcome& o : draws) {
      if (sgn(o.prob) < 0) {
        Add("negative_probability", where,
            "entry with probability " + FormatRational(o.prob));
        continue;
      }
      std::string why;
      if (!InRange(o, stage, &why)) {
        Add("range", where, why);
        continue;
      }
      total += o.prob;
      Profile recall;
      if (actions != nullptr) {
        recall = o.recall.empty() ? *actions : o.recall;
        if (static_cast<int>(recall.size()) != n) {
          Add("range", where, "recalled action profile has wrong size");
          continue;
        }
        if (recall != *actions && sgn(o.prob) > 0) {
          Add("perfect_recall", where,
              "positive probability " + FormatRational(o.prob) +
                  " on recalled action " +
                  game_.ActionProfileLabel(stage - 1, recall));
        }
      }
      if (sgn(o.prob) == 0) continue;
      Profile message = MessageOrZeros(o, n);
      std::string key = DrawKey(recall, o.signal, message, o.state);
      auto it = merged.find(key);
      if (it == merged.end()) {
        History child = h;
        if (actions != nullptr) child.actions.push_back(recall);
        child.signals.push_back(o.signal);
        child.messages.push_back(message);
        child.states.push_back(o.state);
        merged.emplace(key, std::make_pair(std::move(child), o.prob));
        order.push_back(key);
      } else {
        it->second.second += o.prob;
      }
    }
    if (total != 1) {
      Add(kind, where, "row sums to " + FormatRational(total));
    }
    std::vector<History> out;
    for (const std::string& key : order) {
      out.push_back(merged[key].first);
      if (++visited_ > cap_) {
        throw CapExceeded("history cap of " + std::to_string(cap_) +
                          " exceeded");
      }
    }
    return out;
  }

  const BaseGame& game_;
  int64_t cap_;
  int64_t visited_ = 0;
  ValidationReport report_;
};

}  // namespace

// ---------------------------------------------------------------------------
// BaseGame.

int BaseGame::NumJointActions(int t) const {
  int total = 1;
  for (int i = 0; i < NumPlayers(); ++i) total *= NumActions(i, t);
  return total;
}

bool BaseGame::HasMessages() const {
  for (const auto& per_player : messages) {
    for (const auto& set : per_player) {
      if (set.size() > 1) return true;
    }
  }
  return false;
}

int BaseGame::EncodeJoint(int t, const Profile& profile) const {
  int index = 0;
  for (int i = 0; i < NumPlayers(); ++i) {
    index = index * NumActions(i, t) + profile[i];
  }
  return index;
}

Profile BaseGame::DecodeJoint(int t, int index) const {
  Profile p(NumPlayers());
  for (int i = NumPlayers() - 1; i >= 0; --i) {
    p[i] = index % NumActions(i, t);
    index /= NumActions(i, t);
  }
  return p;
}

int BaseGame::PlayerIndex(const std::string& name) const {
  for (int i = 0; i < NumPlayers(); ++i) {
    if (players[i] == name) return i;
  }
  throw InputError("unknown player '" + name + "'");
}

int BaseGame::ActionIndex(int player, int t, const std::string& label) const {
  const auto& set = actions[player][t];
  for (size_t k = 0; k < set.size(); ++k) {
    if (set[k] == label) return static_cast<int>(k);
  }
  throw InputError("unknown action '" + label + "' for player " +
                   players[player] + " at stage " + std::to_string(t + 1));
}

std::string BaseGame::ActionProfileLabel(int t, const Profile& profile) const {
  return ProfileLabel(StageSets(actions, t), profile);
}

std::string BaseGame::JointActionLabel(int t, int index) const {
  return ActionProfileLabel(t, DecodeJoint(t, index));
}

std::string BaseGame::HistoryLabel(const History& h) const {
  std::ostringstream out;
  out << "[";
  bool first = true;
  auto put = [&](const std::string& s) {
    if (!first) out << " ";
    out << s;
    first = false;
  };
  const int drawn = h.Stage();
  for (int k = 0; k < drawn || k < static_cast<int>(h.actions.size()); ++k) {
    if (k < drawn) {
      if (states[k].size() > 1) {
        put("w" + std::to_string(k + 1) + "=" + states[k][h.states[k]]);
      }
      std::string s = ProfileLabel(StageSets(signals, k), h.signals[k]);
      if (s != "-") put("s" + std::to_string(k + 1) + "=" + s);
      if (k < static_cast<int>(h.messages.size())) {
        std::string m = ProfileLabel(StageSets(messages, k), h.messages[k]);
        if (m != "-") put("m" + std::to_string(k + 1) + "=" + m);
      }
    }
    if (k < static_cast<int>(h.actions.size())) {
      put("a" + std::to_string(k + 1) + "=" +
          ActionProfileLabel(k, h.actions[k]));
    }
  }
  out << "]";
  return out.str();
}

void NormalizeShapes(BaseGame* game) {
  const int n = game->NumPlayers();
  const int T = game->stages;
  if (n == 0) throw InputError("game has no players");
  if (T <= 0) throw InputError("game must have at least one stage");
  if (!game->kernel || !game->payoff) {
    throw InputError("game is missing kernels or payoffs");
  }
  auto fill = [&](std::vector<std::vector<std::vector<std::string>>>* table,
                  const char* what, bool allow_default) {
    if (table->empty() && allow_default) {
      table->assign(n, std::vector<std::vector<std::string>>(T, kSingleton));
    }
    if (static_cast<int>(table->size()) != n) {
      throw InputError(std::string(what) + " table needs one entry per player");
    }
    for (auto& per_player : *table) {
      if (per_player.empty() && allow_default) per_player.assign(T, kSingleton);
      if (static_cast<int>(per_player.size()) != T) {
        throw InputError(std::string(what) +
                         " table needs one set per stage");
      }
      for (auto& set : per_player) {
        if (set.empty()) {
          if (!allow_default) {
            throw InputError(std::string(what) + " sets must be nonempty");
          }
          set = kSingleton;
        }
      }
    }
  };
  fill(&game->actions, "action", false);
  fill(&game->signals, "signal", true);
  fill(&game->messages, "message", true);
  if (game->states.empty()) game->states.assign(T, kSingleton);
  if (static_cast<int>(game->states.size()) != T) {
    throw InputError("state table needs one set per stage");
  }
  for (auto& set : game->states) {
    if (set.empty()) set = kSingleton;
  }
}

std::shared_ptr<const KernelModel> NoChanceKernel(int num_players) {
  return std::make_shared<NoChance>(num_players);
}

// ---------------------------------------------------------------------------
// Validation.

std::string ValidationReport::ToString() const {
  if (issues.empty()) return "valid\n";
  std::ostringstream out;
  for (const ValidationIssue& issue : issues) {
    out << issue.kind << ": " << issue.where << ": " << issue.detail << "\n";
  }
  return out.str();
}

ValidationReport ValidateGame(const BaseGame& game, int64_t cap) {
  BaseGame copy = game;
  NormalizeShapes(&copy);
  return Validator(copy, cap).Run();
}

// ---------------------------------------------------------------------------
// GameTree.

std::string HistoryKey(const History& h) {
  std::string key = std::to_string(h.Stage()) + "|";
  for (const Profile& p : h.actions) AppendKey(&key, p);
  key += "|";
  for (const Profile& p : h.signals) AppendKey(&key, p);
  key += "|";
  for (const Profile& p : h.messages) AppendKey(&key, p);
  key += "|";
  for (int w : h.states) key += std::to_string(w) + ",";
  return key;
}

int GameTree::InternPrivate(int player, const PrivateState& s) {
  std::string key = std::to_string(s.stage) + "," + std::to_string(s.parent) +
                    "," + std::to_string(s.own_action) + "," +
                    std::to_string(s.signal) + "," + std::to_string(s.message);
  auto& lookup = private_lookup_[player];
  auto it = lookup.find(key);
  if (it != lookup.end()) return it->second;
  int id = static_cast<int>(private_states_[player].size());
  private_states_[player].push_back(s);
  lookup.emplace(key, id);
  return id;
}

GameTree::GameTree(const BaseGame& game, int64_t cap) : game_(game) {
  NormalizeShapes(&game_);
  ValidationReport report = ValidateGame(game_, cap);
  if (!report.ok()) {
    throw InputError("invalid game: " + report.issues[0].kind + ": " +
                     report.issues[0].where + ": " + report.issues[0].detail);
  }
  const int n = game_.NumPlayers();
  const int T = game_.stages;
  private_states_.resize(n);
  private_lookup_.resize(n);
  stage_nodes_.resize(T);
  own_action_.resize(T);
  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < game_.NumJointActions(t); ++a) {
      own_action_[t].push_back(game_.DecodeJoint(t, a));
    }
  }

  auto add_children = [&](int parent, int action,
                          const std::vector<Outcome>& draws, int stage) {
    std::map<std::string, int> merged;
    std::vector<int> ids;
    for (const Outcome& o : draws) {
      if (sgn(o.prob) <= 0) continue;
      Profile message = MessageOrZeros(o, n);
      std::string key = DrawKey({}, o.signal, message, o.state);
      auto it = merged.find(key);
      if (it != merged.end()) {
        nodes_[it->second].chance += o.prob;
        continue;
      }
      Node node;
      node.stage = stage;
      node.parent = parent;
      node.parent_action = action;
      node.signal = o.signal;
      node.message = message;
      node.state = o.state;
      node.chance = o.prob;
      int id = static_cast<int>(nodes_.size());
      if (id >= cap) {
        throw CapExceeded("history cap of " + std::to_string(cap) +
                          " exceeded");
      }
      nodes_.push_back(std::move(node));
      merged.emplace(key, id);
      ids.push_back(id);
    }
    for (int id : ids) {
      Node& node = nodes_[id];
      node.reach = parent < 0 ? node.chance : nodes_[parent].reach * node.chance;
      node.private_id.resize(n);
      for (int i = 0; i < n; ++i) {
        PrivateState s;
        s.stage = stage;
        s.parent = parent < 0 ? -1 : nodes_[parent].private_id[i];
        s.own_action = parent < 0 ? -1 : own_action_[stage - 1][action][i];
        s.signal = node.signal[i];
        s.message = node.message[i];
        nodes_[id].private_id[i] = InternPrivate(i, s);
      }
      stage_nodes_[stage].push_back(id);
    }
    return ids;
  };

  add_children(-1, -1, game_.kernel->Initial(), 0);
  for (int t = 0; t + 1 < T; ++t) {
    for (int id : stage_nodes_[t]) {
      History h = HistoryOf(id);
      std::vector<std::vector<int>> children(game_.NumJointActions(t));
      for (int a = 0; a < game_.NumJointActions(t); ++a) {
        children[a] =
            add_children(id, a, game_.kernel->Transition(h, own_action_[t][a]),
                         t + 1);
      }
      nodes_[id].children = std::move(children);
    }
  }
  stage_index_.assign(nodes_.size(), -1);
  for (int t = 0; t < T; ++t) {
    for (size_t k = 0; k < stage_nodes_[t].size(); ++k) {
      stage_index_[stage_nodes_[t][k]] = static_cast<int>(k);
    }
  }
  for (int id = 0; id < NumNodes(); ++id) {
    node_lookup_.emplace(HistoryKey(HistoryOf(id)), id);
  }
  if (static_cast<int64_t>(stage_nodes_[T - 1].size()) *
          game_.NumJointActions(T - 1) >
      cap) {
    throw CapExceeded("terminal history cap of " + std::to_string(cap) +
                      " exceeded");
  }
  for (int id : stage_nodes_[T - 1]) {
    std::vector<std::vector<Rational>> row;
    for (int a = 0; a < game_.NumJointActions(T - 1); ++a) {
      row.push_back(*game_.payoff->Payoff(TerminalHistory(id, a)));
    }
    payoffs_.push_back(std::move(row));
  }
}

int GameTree::Ancestor(int node, int stage) const {
  while (nodes_[node].stage > stage) node = nodes_[node].parent;
  return node;
}

int GameTree::PathAction(int node, int k) const {
  return nodes_[Ancestor(node, k + 1)].parent_action;
}

History GameTree::HistoryOf(int node) const {
  std::vector<int> path;
  for (int v = node; v >= 0; v = nodes_[v].parent) path.push_back(v);
  std::reverse(path.begin(), path.end());
  History h;
  for (int v : path) {
    const Node& nd = nodes_[v];
    if (nd.parent >= 0) h.actions.push_back(own_action_[nd.stage - 1][nd.parent_action]);
    h.signals.push_back(nd.signal);
    h.messages.push_back(nd.message);
    h.states.push_back(nd.state);
  }
  return h;
}

History GameTree::TerminalHistory(int node, int last_action) const {
  History h = HistoryOf(node);
  h.actions.push_back(own_action_[nodes_[node].stage][last_action]);
  return h;
}

int GameTree::FindNode(const History& h) const {
  History copy = h;
  if (copy.messages.empty()) {
    for (size_t k = 0; k < copy.signals.size(); ++k) {
      copy.messages.push_back(Zeros(NumPlayers()));
    }
  }
  auto it = node_lookup_.find(HistoryKey(copy));
  return it == node_lookup_.end() ? -1 : it->second;
}

int GameTree::NumTerminals() const {
  const int last = NumStages() - 1;
  return static_cast<int>(stage_nodes_[last].size()) *
         game_.NumJointActions(last);
}

int GameTree::TerminalId(int node, int last_action) const {
  return stage_index_[node] * game_.NumJointActions(NumStages() - 1) +
         last_action;
}

std::pair<int, int> GameTree::TerminalParts(int terminal) const {
  const int last = NumStages() - 1;
  const int k = game_.NumJointActions(last);
  return {stage_nodes_[last][terminal / k], terminal % k};
}

const std::vector<Rational>& GameTree::Payoff(int node, int last_action) const {
  return payoffs_[stage_index_[node]][last_action];
}

// ---------------------------------------------------------------------------
// Terminal-history operations.

std::vector<History> EnumerateTerminalHistories(const BaseGame& game,
                                                int64_t cap) {
  GameTree tree(game, cap);
  std::vector<History> out;
  for (int term = 0; term < tree.NumTerminals(); ++term) {
    auto [node, a] = tree.TerminalParts(term);
    out.push_back(tree.TerminalHistory(node, a));
  }
  return out;
}

Rational OutcomeProbability(const BaseGame& game, const History& terminal) {
  BaseGame g = game;
  NormalizeShapes(&g);
  const int n = g.NumPlayers();
  const int T = g.stages;
  History term = terminal;
  if (term.messages.empty()) term.messages.assign(term.signals.size(), Zeros(n));
  if (static_cast<int>(term.signals.size()) != T ||
      static_cast<int>(term.actions.size()) != T ||
      static_cast<int>(term.states.size()) != T ||
      static_cast<int>(term.messages.size()) != T) {
    throw InputError("terminal history has the wrong number of stages");
  }
  auto matches = [&](const Outcome& o, int k, const Profile* played) {
    if (played != nullptr) {
      const Profile& recall = o.recall.empty() ? *played : o.recall;
      if (recall != term.actions[k - 1]) return false;
    }
    return o.signal == term.signals[k] &&
           MessageOrZeros(o, n) == term.messages[k] &&
           o.state == term.states[k];
  };
  Rational p(0);
  for (const Outcome& o : g.kernel->Initial()) {
    if (matches(o, 0, nullptr)) p += o.prob;
  }
  for (int k = 1; k < T && sgn(p) != 0; ++k) {
    History prefix = Prefix(term, k);
    const Profile& played = term.actions[k - 1];
    Rational row(0);
    for (const Outcome& o : g.kernel->Transition(prefix, played)) {
      if (matches(o, k, &played)) row += o.prob;
    }
    p *= row;
  }
  return p;
}

PrivateHistory GetPrivateHistory(const BaseGame& game, const History& terminal,
                                 int player, int stage) {
  if (player < 0 || player >= game.NumPlayers()) {
    throw InputError("unknown player index " + std::to_string(player));
  }
  if (stage < 1 || stage > game.stages + 1) {
    throw InputError("stage must lie in 1.." + std::to_string(game.stages + 1));
  }
  PrivateHistory out;
  const int drawn = std::min(stage, game.stages);
  const int acted = stage - 1;
  for (int k = 0; k < acted; ++k) out.actions.push_back(terminal.actions[k][player]);
  for (int k = 0; k < drawn; ++k) {
    out.signals.push_back(terminal.signals[k][player]);
    out.messages.push_back(k < static_cast<int>(terminal.messages.size())
                               ? terminal.messages[k][player]
                               : 0);
  }
  return out;
}

std::vector<Rational> PayoffVector(const BaseGame& game,
                                   const History& terminal) {
  std::optional<std::vector<Rational>> u = game.payoff->Payoff(terminal);
  if (!u.has_value()) {
    throw InputError("no payoff defined at " + game.HistoryLabel(terminal));
  }
  return *u;
}

}  // namespace bce
