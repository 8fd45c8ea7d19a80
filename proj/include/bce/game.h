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

#ifndef BCE_GAME_H_
#define BCE_GAME_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bce/rational.h"

namespace bce {

// Stages are 0-based in code (stage 0 is the first stage). User-facing text
// uses 1-based stage numbers.

inline constexpr int64_t kDefaultHistoryCap = 1000000;

// One entry per player.
using Profile = std::vector<int>;

// A history (h^t, m^t, omega^t) at the beginning of stage t, or a terminal
// history when actions has one entry per stage.
struct History {
  std::vector<Profile> actions;   // actions[k]: profile played at stage k
  std::vector<Profile> signals;   // signals[k]: base signals of stage k
  std::vector<Profile> messages;  // messages[k]: additional signals
  std::vector<int> states;        // states[k]

  int Stage() const { return static_cast<int>(signals.size()); }
  bool operator==(const History& other) const = default;
};

// One positive-probability draw of a kernel row.
struct Outcome {
  Profile recall;   // recalled action profile b_t; ignored for stage 0
  Profile signal;
  Profile message;  // empty means index 0 for every player
  int state = 0;
  Rational prob;
};

// Chance kernels p_1 and p_{t+1}. Rows list positive entries only.
class KernelModel {
 public:
  virtual ~KernelModel() = default;
  virtual std::vector<Outcome> Initial() const = 0;
  // Draws for stage h.Stage() after `actions` is played at history h.
  virtual std::vector<Outcome> Transition(const History& h,
                                          const Profile& actions) const = 0;
};

class PayoffModel {
 public:
  virtual ~PayoffModel() = default;
  virtual std::optional<std::vector<Rational>> Payoff(
      const History& terminal) const = 0;
};

// Finite multi-stage base game. Every label set is nonempty; absent signal,
// message and state sets are singletons labelled "-".
struct BaseGame {
  std::vector<std::string> players;
  int stages = 0;
  std::vector<std::vector<std::vector<std::string>>> actions;   // [i][t]
  std::vector<std::vector<std::vector<std::string>>> signals;   // [i][t]
  std::vector<std::vector<std::vector<std::string>>> messages;  // [i][t]
  std::vector<std::vector<std::string>> states;                 // [t]
  std::shared_ptr<const KernelModel> kernel;
  std::shared_ptr<const PayoffModel> payoff;

  int NumPlayers() const { return static_cast<int>(players.size()); }
  int NumActions(int player, int t) const {
    return static_cast<int>(actions[player][t].size());
  }
  int NumSignals(int player, int t) const {
    return static_cast<int>(signals[player][t].size());
  }
  int NumMessages(int player, int t) const {
    return static_cast<int>(messages[player][t].size());
  }
  int NumStates(int t) const { return static_cast<int>(states[t].size()); }
  int NumJointActions(int t) const;
  bool HasMessages() const;

  // Mixed-radix encoding of joint action profiles, player 0 most significant.
  int EncodeJoint(int t, const Profile& profile) const;
  Profile DecodeJoint(int t, int index) const;

  int PlayerIndex(const std::string& name) const;  // throws InputError
  int ActionIndex(int player, int t, const std::string& label) const;

  // Labels; profiles print only the coordinates of non-singleton sets.
  std::string ActionProfileLabel(int t, const Profile& profile) const;
  std::string JointActionLabel(int t, int index) const;
  std::string HistoryLabel(const History& h) const;
};

// Fills absent signal, message and state sets with singletons and checks the
// shapes of all label tables. Throws InputError on malformed shapes.
void NormalizeShapes(BaseGame* game);

// Kernel and payoff models backed by closures. Used by code-built games.
class FunctionKernel : public KernelModel {
 public:
  using InitialFn = std::function<std::vector<Outcome>()>;
  using TransitionFn =
      std::function<std::vector<Outcome>(const History&, const Profile&)>;
  FunctionKernel(InitialFn initial, TransitionFn transition)
      : initial_(std::move(initial)), transition_(std::move(transition)) {}
  std::vector<Outcome> Initial() const override { return initial_(); }
  std::vector<Outcome> Transition(const History& h,
                                  const Profile& a) const override {
    return transition_(h, a);
  }

 private:
  InitialFn initial_;
  TransitionFn transition_;
};

class FunctionPayoff : public PayoffModel {
 public:
  using Fn = std::function<std::optional<std::vector<Rational>>(
      const History&)>;
  explicit FunctionPayoff(Fn fn) : fn_(std::move(fn)) {}
  std::optional<std::vector<Rational>> Payoff(
      const History& terminal) const override {
    return fn_(terminal);
  }

 private:
  Fn fn_;
};

// Deterministic transitions for games without chance moves: every stage draws
// signal, message and state index 0 with probability one.
std::shared_ptr<const KernelModel> NoChanceKernel(int num_players);

// ---------------------------------------------------------------------------
// Validation.

struct ValidationIssue {
  std::string kind;  // initial_kernel, transition_kernel, perfect_recall, ...
  std::string where;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string ToString() const;
};

ValidationReport ValidateGame(const BaseGame& game,
                              int64_t cap = kDefaultHistoryCap);

// ---------------------------------------------------------------------------
// Compiled game tree. Nodes are the histories (h^t, m^t, omega^t) reachable
// under some action profile; node reach is the product of the chance draws
// along the path, which equals p^a of the embedded action sequence.

struct Node {
  int stage = 0;
  int parent = -1;
  int parent_action = -1;  // joint index played at stage - 1
  Profile signal;
  Profile message;
  int state = 0;
  Rational chance;
  Rational reach;
  std::vector<int> private_id;             // per player
  std::vector<std::vector<int>> children;  // [joint action] -> nodes
};

// Interned private history h_i^t (with messages).
struct PrivateState {
  int stage = 0;
  int parent = -1;
  int own_action = -1;  // own action at stage - 1
  int signal = 0;
  int message = 0;
};

class GameTree {
 public:
  // Throws CapExceeded if the number of nodes exceeds `cap`, and InputError
  // if the game is not valid.
  explicit GameTree(const BaseGame& game, int64_t cap = kDefaultHistoryCap);

  const BaseGame& game() const { return game_; }
  int NumPlayers() const { return game_.NumPlayers(); }
  int NumStages() const { return game_.stages; }
  int NumNodes() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[id]; }
  const std::vector<int>& StageNodes(int t) const { return stage_nodes_[t]; }
  int StageIndex(int node) const { return stage_index_[node]; }

  int Ancestor(int node, int stage) const;
  // Joint action played at stage k < node.stage along the path to `node`.
  int PathAction(int node, int k) const;
  History HistoryOf(int node) const;
  History TerminalHistory(int node, int last_action) const;
  int FindNode(const History& h) const;  // -1 if absent

  // Terminals are pairs (last-stage node, joint last action).
  int NumTerminals() const;
  int TerminalId(int node, int last_action) const;
  std::pair<int, int> TerminalParts(int terminal) const;
  const std::vector<Rational>& Payoff(int node, int last_action) const;

  const std::vector<PrivateState>& PrivateStates(int player) const {
    return private_states_[player];
  }
  // Own action index of `player` inside the joint profile `joint` at stage t.
  int OwnAction(int player, int t, int joint) const {
    return own_action_[t][joint][player];
  }

 private:
  int InternPrivate(int player, const PrivateState& s);

  BaseGame game_;
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> stage_nodes_;
  std::vector<int> stage_index_;
  std::vector<std::vector<std::vector<Rational>>> payoffs_;  // [T-node][a]
  std::vector<std::vector<PrivateState>> private_states_;
  std::vector<std::unordered_map<std::string, int>> private_lookup_;
  std::unordered_map<std::string, int> node_lookup_;
  std::vector<std::vector<Profile>> own_action_;  // [t][joint] -> profile
};

// ---------------------------------------------------------------------------
// Operations on terminal histories.

// All terminal histories with p^a(h, omega) > 0.
std::vector<History> EnumerateTerminalHistories(
    const BaseGame& game, int64_t cap = kDefaultHistoryCap);

// p_1(h_1, omega_1) times the product of the transition kernels along the
// terminal's own action sequence. Zero when any factor is zero.
Rational OutcomeProbability(const BaseGame& game, const History& terminal);

struct PrivateHistory {
  std::vector<int> actions;
  std::vector<int> signals;
  std::vector<int> messages;
  bool operator==(const PrivateHistory& other) const = default;
};

// h_i^t for stage number t in 1..T+1 (1-based, as in the user interface).
PrivateHistory GetPrivateHistory(const BaseGame& game, const History& terminal,
                                 int player, int stage);

std::vector<Rational> PayoffVector(const BaseGame& game,
                                   const History& terminal);

std::string HistoryKey(const History& h);

}  // namespace bce

#endif  // BCE_GAME_H_
