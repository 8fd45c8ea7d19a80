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

#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

#include "bce/io.h"
#include "io_util.h"

namespace bce {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    out.close();
    if (!out) {
      std::remove(tmp.c_str());
      throw InputError("failed writing '" + path + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw InputError("failed writing '" + path + "'");
  }
}

namespace io {

Json Parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

const Json& Field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

Rational Number(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    try {
      return ParseRational(j.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  throw InputError(where + ": numbers are integers or \"p/q\" strings");
}

std::string Label(const Json& j, const std::string& where) {
  if (!j.is_string()) throw InputError(where + ": labels are strings");
  return j.get<std::string>();
}

std::vector<std::string> Labels(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected a list of labels");
  std::vector<std::string> out;
  for (const Json& x : j) out.push_back(Label(x, where));
  return out;
}

int Index(const std::vector<std::string>& set, const std::string& label,
          const std::string& where) {
  if (label == "*") return -1;
  for (size_t k = 0; k < set.size(); ++k) {
    if (set[k] == label) return static_cast<int>(k);
  }
  throw InputError(where + ": unknown label '" + label + "'");
}

int Integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace io

namespace {

using io::Json;

// [player][stage] label sets.
using LabelTable = std::vector<std::vector<std::vector<std::string>>>;

LabelTable PlayerTable(const Json& j, int players, int stages,
                       const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != players) {
    throw InputError(what + ": one entry per player expected");
  }
  LabelTable out(players);
  for (int i = 0; i < players; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != stages) {
      throw InputError(what + ": one label set per stage expected");
    }
    for (int t = 0; t < stages; ++t) {
      out[i].push_back(io::Labels(j[i][t], what));
    }
  }
  return out;
}

// Per-player indices of a stage profile; "*" gives -1.
Profile StageProfile(const Json& j, const LabelTable& sets, int t,
                     const std::string& where) {
  const int n = static_cast<int>(sets.size());
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw InputError(where + ": one label per player expected");
  }
  Profile p(n);
  for (int i = 0; i < n; ++i) {
    p[i] = io::Index(sets[i][t], io::Label(j[i], where), where);
  }
  return p;
}

// Index profile with every entry 0, for singleton sets left implicit.
Profile DefaultProfile(const LabelTable& sets, int t, const std::string& what,
                       const std::string& where) {
  Profile p(sets.size(), 0);
  for (size_t i = 0; i < sets.size(); ++i) {
    if (sets[i][t].size() > 1) {
      throw InputError(where + ": " + what + " must be given");
    }
  }
  return p;
}

bool Matches(const Profile& pattern, const Profile& value) {
  for (size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] >= 0 && pattern[i] != value[i]) return false;
  }
  return true;
}

// Conditions on a history prefix. Empty vectors mean "any".
struct HistoryPattern {
  std::vector<int> states;                 // stages 0..
  std::vector<Profile> signals, messages;  // stages 0..
  std::vector<Profile> actions;            // stages 0..

  bool Match(const History& h) const {
    for (size_t k = 0; k < states.size(); ++k) {
      if (k >= h.states.size()) return false;
      if (states[k] >= 0 && states[k] != h.states[k]) return false;
    }
    auto prefix = [](const std::vector<Profile>& pat,
                     const std::vector<Profile>& val) {
      for (size_t k = 0; k < pat.size(); ++k) {
        if (k >= val.size() || !Matches(pat[k], val[k])) return false;
      }
      return true;
    };
    return prefix(signals, h.signals) && prefix(messages, h.messages) &&
           prefix(actions, h.actions);
  }
};

struct GameSets {
  LabelTable actions, signals, messages;
  std::vector<std::vector<std::string>> states;
};

HistoryPattern ParseHistory(const Json& j, const GameSets& sets, int stages,
                            const std::string& where) {
  HistoryPattern p;
  if (!j.is_object()) throw InputError(where + ": history must be an object");
  auto list = [&](const char* key) -> const Json* {
    if (!j.contains(key)) return nullptr;
    const Json& x = j.at(key);
    if (!x.is_array() || static_cast<int>(x.size()) > stages) {
      throw InputError(where + ": '" + key + "' must list at most one entry "
                       "per stage");
    }
    return &x;
  };
  if (const Json* x = list("states")) {
    for (size_t k = 0; k < x->size(); ++k) {
      p.states.push_back(
          io::Index(sets.states[k], io::Label((*x)[k], where), where));
    }
  }
  if (const Json* x = list("signals")) {
    for (size_t k = 0; k < x->size(); ++k) {
      p.signals.push_back(StageProfile((*x)[k], sets.signals, k, where));
    }
  }
  if (const Json* x = list("messages")) {
    for (size_t k = 0; k < x->size(); ++k) {
      p.messages.push_back(StageProfile((*x)[k], sets.messages, k, where));
    }
  }
  if (const Json* x = list("actions")) {
    for (size_t k = 0; k < x->size(); ++k) {
      p.actions.push_back(StageProfile((*x)[k], sets.actions, k, where));
    }
  }
  return p;
}

Outcome ParseOutcome(const Json& j, const GameSets& sets, int t,
                     const std::string& where) {
  Outcome o;
  if (j.contains("state")) {
    o.state = io::Index(sets.states[t], io::Label(j.at("state"), where), where);
    if (o.state < 0) throw InputError(where + ": wildcard state in a draw");
  } else if (sets.states[t].size() > 1) {
    throw InputError(where + ": state must be given");
  }
  o.signal = j.contains("signals")
                 ? StageProfile(j.at("signals"), sets.signals, t, where)
                 : DefaultProfile(sets.signals, t, "signals", where);
  o.message = j.contains("messages")
                  ? StageProfile(j.at("messages"), sets.messages, t, where)
                  : DefaultProfile(sets.messages, t, "messages", where);
  for (int x : o.signal) {
    if (x < 0) throw InputError(where + ": wildcard signal in a draw");
  }
  for (int x : o.message) {
    if (x < 0) throw InputError(where + ": wildcard message in a draw");
  }
  o.prob = io::Number(io::Field(j, "prob", where), where);
  return o;
}

struct TransitionEntry {
  int stage;  // 0-based stage being drawn
  HistoryPattern history;
  std::vector<Outcome> outcomes;
};

struct PayoffEntry {
  HistoryPattern pattern;
  std::vector<Rational> payoff;
};

class FileKernel : public KernelModel {
 public:
  FileKernel(std::vector<Outcome> initial, std::vector<TransitionEntry> rows,
             std::vector<bool> trivial_stage)
      : initial_(std::move(initial)),
        rows_(std::move(rows)),
        trivial_(std::move(trivial_stage)) {}

  std::vector<Outcome> Initial() const override { return initial_; }

  std::vector<Outcome> Transition(const History& h,
                                  const Profile& a) const override {
    const int t = h.Stage();
    History full = h;
    full.actions.push_back(a);
    for (const TransitionEntry& e : rows_) {
      if (e.stage != t || !e.history.Match(full)) continue;
      std::vector<Outcome> out = e.outcomes;
      for (Outcome& o : out) o.recall = a;
      return out;
    }
    if (trivial_[t]) {
      const int n = static_cast<int>(a.size());
      return {{a, Profile(n, 0), Profile(n, 0), 0, Rational(1)}};
    }
    return {};
  }

 private:
  std::vector<Outcome> initial_;
  std::vector<TransitionEntry> rows_;
  std::vector<bool> trivial_;
};

class FilePayoff : public PayoffModel {
 public:
  FilePayoff(std::vector<PayoffEntry> entries,
             std::optional<std::vector<Rational>> fallback)
      : entries_(std::move(entries)), fallback_(std::move(fallback)) {}

  std::optional<std::vector<Rational>> Payoff(
      const History& terminal) const override {
    for (const PayoffEntry& e : entries_) {
      if (e.pattern.Match(terminal)) return e.payoff;
    }
    return fallback_;
  }

 private:
  std::vector<PayoffEntry> entries_;
  std::optional<std::vector<Rational>> fallback_;
};

std::vector<Rational> PayoffVector(const Json& j, int players,
                                   const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != players) {
    throw InputError(where + ": one payoff per player expected");
  }
  std::vector<Rational> out;
  for (const Json& x : j) out.push_back(io::Number(x, where));
  return out;
}

}  // namespace

BaseGame ParseGame(const std::string& text) {
  const Json doc = io::Parse(text);
  const std::string w = "game";
  BaseGame g;
  g.players = io::Labels(io::Field(doc, "players", w), w + ".players");
  const int n = g.NumPlayers();
  if (n < 1) throw InputError("game: at least one player");
  g.stages = io::Integer(io::Field(doc, "stages", w), w + ".stages");
  if (g.stages < 1) throw InputError("game: at least one stage");
  const int T = g.stages;
  auto singletons = [&] {
    return LabelTable(n, std::vector<std::vector<std::string>>(
                             T, std::vector<std::string>{"-"}));
  };
  GameSets sets;
  sets.actions = PlayerTable(io::Field(doc, "actions", w), n, T, "actions");
  sets.signals = doc.contains("signals")
                     ? PlayerTable(doc.at("signals"), n, T, "signals")
                     : singletons();
  sets.messages = doc.contains("messages")
                      ? PlayerTable(doc.at("messages"), n, T, "messages")
                      : singletons();
  if (doc.contains("states")) {
    const Json& s = doc.at("states");
    if (!s.is_array() || static_cast<int>(s.size()) != T) {
      throw InputError("states: one label set per stage expected");
    }
    for (int t = 0; t < T; ++t) sets.states.push_back(io::Labels(s[t], "states"));
  } else {
    sets.states.assign(T, {"-"});
  }
  for (int t = 0; t < T; ++t) {
    if (sets.states[t].empty()) throw InputError("states: empty set");
    for (int i = 0; i < n; ++i) {
      if (sets.actions[i][t].empty() || sets.signals[i][t].empty() ||
          sets.messages[i][t].empty()) {
        throw InputError("game: empty label set for player " + g.players[i]);
      }
    }
  }
  g.actions = sets.actions;
  g.signals = sets.signals;
  g.messages = sets.messages;
  g.states = sets.states;

  std::vector<Outcome> initial;
  if (doc.contains("initial_kernel")) {
    const Json& ik = doc.at("initial_kernel");
    if (!ik.is_array()) throw InputError("initial_kernel must be a list");
    for (size_t k = 0; k < ik.size(); ++k) {
      initial.push_back(ParseOutcome(ik[k], sets, 0,
                                     "initial_kernel[" + std::to_string(k) + "]"));
    }
  } else {
    Outcome o = ParseOutcome(Json{{"prob", 1}}, sets, 0, "initial_kernel");
    initial.push_back(o);
  }

  std::vector<TransitionEntry> rows;
  if (doc.contains("transition_kernels")) {
    const Json& tk = doc.at("transition_kernels");
    if (!tk.is_array()) throw InputError("transition_kernels must be a list");
    for (size_t k = 0; k < tk.size(); ++k) {
      const std::string where = "transition_kernels[" + std::to_string(k) + "]";
      const Json& e = tk[k];
      TransitionEntry row;
      row.stage = io::Integer(io::Field(e, "stage", where), where) - 1;
      if (row.stage < 1 || row.stage >= T) {
        throw InputError(where + ": stage must be between 2 and " +
                         std::to_string(T));
      }
      if (e.contains("history")) {
        row.history = ParseHistory(e.at("history"), sets, T, where);
      }
      if (e.contains("from_state")) {
        row.history.states.resize(row.stage, -1);
        row.history.states[row.stage - 1] = io::Index(
            sets.states[row.stage - 1], io::Label(e.at("from_state"), where),
            where);
      }
      if (e.contains("actions")) {
        row.history.actions.resize(row.stage, Profile(n, -1));
        row.history.actions[row.stage - 1] =
            StageProfile(e.at("actions"), sets.actions, row.stage - 1, where);
      }
      const Json& outs = io::Field(e, "outcomes", where);
      if (!outs.is_array()) throw InputError(where + ": outcomes must be a list");
      for (const Json& o : outs) {
        row.outcomes.push_back(ParseOutcome(o, sets, row.stage, where));
      }
      rows.push_back(std::move(row));
    }
  }
  std::vector<bool> trivial(T, true);
  for (int t = 0; t < T; ++t) {
    trivial[t] = sets.states[t].size() == 1;
    for (int i = 0; i < n; ++i) {
      trivial[t] = trivial[t] && sets.signals[i][t].size() == 1 &&
                   sets.messages[i][t].size() == 1;
    }
  }
  g.kernel = std::make_shared<FileKernel>(std::move(initial), std::move(rows),
                                          std::move(trivial));

  std::vector<PayoffEntry> payoffs;
  if (doc.contains("payoffs")) {
    const Json& pe = doc.at("payoffs");
    if (!pe.is_array()) throw InputError("payoffs must be a list");
    for (size_t k = 0; k < pe.size(); ++k) {
      const std::string where = "payoffs[" + std::to_string(k) + "]";
      PayoffEntry entry;
      entry.pattern = ParseHistory(pe[k], sets, T, where);
      entry.payoff = PayoffVector(io::Field(pe[k], "payoff", where), n, where);
      payoffs.push_back(std::move(entry));
    }
  }
  std::optional<std::vector<Rational>> fallback;
  if (doc.contains("default_payoff")) {
    fallback = PayoffVector(doc.at("default_payoff"), n, "default_payoff");
  }
  g.payoff = std::make_shared<FilePayoff>(std::move(payoffs),
                                          std::move(fallback));
  NormalizeShapes(&g);
  return g;
}

BaseGame LoadGame(const std::string& path) { return ParseGame(ReadFile(path)); }

bool IsDecisionProblemDocument(const std::string& text) {
  const Json doc = io::Parse(text);
  return doc.is_object() && doc.contains("periods");
}

DecisionProblem ParseDecisionProblem(const std::string& text) {
  const Json doc = io::Parse(text);
  const std::string w = "decision problem";
  DecisionProblem p;
  p.periods = io::Integer(io::Field(doc, "periods", w), w + ".periods");
  const Json& acts = io::Field(doc, "actions", w);
  if (!acts.is_array() || static_cast<int>(acts.size()) != p.periods) {
    throw InputError(w + ": one action set per period expected");
  }
  for (const Json& a : acts) p.actions.push_back(io::Labels(a, w + ".actions"));
  p.states = io::Labels(io::Field(doc, "states", w), w + ".states");
  if (p.periods < 1 || p.states.empty()) {
    throw InputError(w + ": needs periods and states");
  }
  for (const auto& a : p.actions) {
    if (a.empty()) throw InputError(w + ": empty action set");
  }
  const int S = p.NumStates();
  if (doc.contains("period_utility")) {
    // Additive: [period][action][state].
    const Json& pu = doc.at("period_utility");
    if (!pu.is_array() || static_cast<int>(pu.size()) != p.periods) {
      throw InputError(w + ".period_utility: one table per period expected");
    }
    std::vector<std::vector<std::vector<Rational>>> table(p.periods);
    for (int t = 0; t < p.periods; ++t) {
      if (!pu[t].is_array() ||
          static_cast<int>(pu[t].size()) != p.NumActions(t)) {
        throw InputError(w + ".period_utility: one row per action expected");
      }
      for (const Json& row : pu[t]) {
        table[t].push_back(PayoffVector(row, S, w + ".period_utility"));
      }
    }
    for (int code = 0; code < p.NumProfiles(); ++code) {
      std::vector<int> a = p.Decode(code);
      std::vector<Rational> u(S);
      for (int t = 0; t < p.periods; ++t) {
        for (int s = 0; s < S; ++s) u[s] += table[t][a[t]][s];
      }
      p.utility.push_back(u);
    }
  } else {
    const Json& ut = io::Field(doc, "utility", w);
    if (!ut.is_array()) throw InputError(w + ".utility must be a list");
    p.utility.assign(p.NumProfiles(), {});
    for (const Json& e : ut) {
      const int code =
          p.ProfileIndex(io::Labels(io::Field(e, "profile", w), w + ".utility"));
      if (!p.utility[code].empty()) {
        throw InputError(w + ": duplicate utility for " + p.ProfileLabel(code));
      }
      p.utility[code] = PayoffVector(io::Field(e, "values", w), S, w + ".utility");
    }
    for (int code = 0; code < p.NumProfiles(); ++code) {
      if (p.utility[code].empty()) {
        throw InputError(w + ": no utility for " + p.ProfileLabel(code));
      }
    }
  }
  CheckDecisionProblem(p);
  return p;
}

std::vector<Rational> ParseTarget(const GameTree& tree,
                                  const std::string& text) {
  const Json doc = io::Parse(text);
  const BaseGame& g = tree.game();
  GameSets sets{g.actions, g.signals, g.messages, g.states};
  const Json& entries = io::Field(doc, "target", "target file");
  if (!entries.is_array()) throw InputError("target must be a list");
  std::vector<History> terminals;
  for (int x = 0; x < tree.NumTerminals(); ++x) {
    auto [node, a] = tree.TerminalParts(x);
    terminals.push_back(tree.TerminalHistory(node, a));
  }
  std::vector<Rational> out(tree.NumTerminals());
  for (size_t k = 0; k < entries.size(); ++k) {
    const std::string where = "target[" + std::to_string(k) + "]";
    HistoryPattern p = ParseHistory(entries[k], sets, g.stages, where);
    if (static_cast<int>(p.actions.size()) != g.stages) {
      throw InputError(where + ": actions must cover every stage");
    }
    int hit = -1;
    for (int x = 0; x < tree.NumTerminals(); ++x) {
      if (!p.Match(terminals[x])) continue;
      if (hit >= 0) {
        throw InputError(where + ": matches more than one terminal history");
      }
      hit = x;
    }
    if (hit < 0) throw InputError(where + ": matches no terminal history");
    out[hit] += io::Number(io::Field(entries[k], "prob", where), where);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expansions.

Expansion ParseExpansion(const BaseGame& game, const std::string& text) {
  const Json doc = io::Parse(text);
  const int n = game.NumPlayers(), T = game.stages;
  Expansion exp;
  exp.message_sets =
      PlayerTable(io::Field(doc, "message_sets", "expansion"), n, T,
                  "message_sets");
  GameSets sets{game.actions, game.signals, exp.message_sets, game.states};
  struct XiEntry {
    int stage;
    HistoryPattern history;
    MessageDraw draw;
  };
  std::vector<XiEntry> entries;
  if (doc.contains("xi")) {
    const Json& xs = doc.at("xi");
    if (!xs.is_array()) throw InputError("xi must be a list");
    for (size_t k = 0; k < xs.size(); ++k) {
      const std::string where = "xi[" + std::to_string(k) + "]";
      XiEntry e;
      e.stage = io::Integer(io::Field(xs[k], "stage", where), where) - 1;
      if (e.stage < 0 || e.stage >= T) throw InputError(where + ": bad stage");
      if (xs[k].contains("history")) {
        e.history = ParseHistory(xs[k].at("history"), sets, T, where);
      }
      for (const Json& d : io::Field(xs[k], "draw", where)) {
        Profile m = StageProfile(io::Field(d, "messages", where),
                                 exp.message_sets, e.stage, where);
        for (int x : m) {
          if (x < 0) throw InputError(where + ": wildcard message in a draw");
        }
        e.draw.push_back({m, io::Number(io::Field(d, "prob", where), where)});
      }
      entries.push_back(std::move(e));
    }
  }
  const LabelTable msets = exp.message_sets;
  exp.xi = [entries, msets](const History& partial) {
    const int t = partial.Stage() - 1;
    for (const XiEntry& e : entries) {
      if (e.stage == t && e.history.Match(partial)) return e.draw;
    }
    // Uniform over message profiles.
    MessageDraw uniform = {{Profile(), Rational(1)}};
    for (const auto& player_sets : msets) {
      const int size = static_cast<int>(player_sets[t].size());
      MessageDraw next;
      for (const auto& [p, w] : uniform) {
        for (int m = 0; m < size; ++m) {
          Profile q = p;
          q.push_back(m);
          next.push_back({q, w / size});
        }
      }
      uniform = next;
    }
    return uniform;
  };
  return exp;
}

namespace {

io::OJson ProfileJson(const LabelTable& sets, int t, const Profile& p) {
  io::OJson out = io::OJson::array();
  for (size_t i = 0; i < p.size(); ++i) out.push_back(sets[i][t][p[i]]);
  return out;
}

}  // namespace

std::string ExpansionToJson(const BaseGame& game, const Expansion& exp,
                            int64_t cap) {
  const int T = game.stages;
  io::OJson doc;
  io::OJson ms = io::OJson::array();
  for (const auto& player : exp.message_sets) ms.push_back(player);
  doc["message_sets"] = ms;
  io::OJson xi = io::OJson::array();
  std::set<std::string> seen;
  int64_t visited = 0;
  // Depth-first over histories with messages: at stage t, draw messages
  // from xi, then every action profile and the base transition.
  std::function<void(const History&)> visit = [&](const History& partial) {
    if (++visited > cap) {
      throw CapExceeded("more than " + std::to_string(cap) + " histories");
    }
    const int t = partial.Stage() - 1;
    MessageDraw draw = exp.xi(partial);
    const std::string key = HistoryKey(partial);
    if (seen.insert(key).second) {
      io::OJson e;
      e["stage"] = t + 1;
      io::OJson h;
      io::OJson states = io::OJson::array(), signals = io::OJson::array(),
                messages = io::OJson::array(), actions = io::OJson::array();
      for (int k = 0; k <= t; ++k) {
        states.push_back(game.states[k][partial.states[k]]);
        signals.push_back(ProfileJson(game.signals, k, partial.signals[k]));
      }
      for (int k = 0; k < t; ++k) {
        messages.push_back(
            ProfileJson(exp.message_sets, k, partial.messages[k]));
        actions.push_back(ProfileJson(game.actions, k, partial.actions[k]));
      }
      h["states"] = states;
      h["signals"] = signals;
      h["messages"] = messages;
      h["actions"] = actions;
      e["history"] = h;
      io::OJson d = io::OJson::array();
      for (const auto& [m, p] : draw) {
        io::OJson entry;
        entry["messages"] = ProfileJson(exp.message_sets, t, m);
        entry["prob"] = FormatRational(p);
        d.push_back(entry);
      }
      e["draw"] = d;
      xi.push_back(e);
    }
    if (t + 1 >= T) return;
    for (const auto& [m, p] : draw) {
      History with = partial;
      with.messages.push_back(m);
      for (int j = 0; j < game.NumJointActions(t); ++j) {
        const Profile a = game.DecodeJoint(t, j);
        History base = partial;
        base.messages.assign(t + 1, Profile(game.NumPlayers(), 0));
        for (const Outcome& o : game.kernel->Transition(base, a)) {
          History next = with;
          next.actions.push_back(a);
          next.signals.push_back(o.signal);
          next.states.push_back(o.state);
          visit(next);
        }
      }
    }
  };
  for (const Outcome& o : game.kernel->Initial()) {
    History h;
    h.signals.push_back(o.signal);
    h.states.push_back(o.state);
    visit(h);
  }
  doc["xi"] = xi;
  return doc.dump(2) + "\n";
}

}  // namespace bce
