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
#include <iomanip>
#include <sstream>

#include "bce/io.h"
#include "io_util.h"

namespace bce {

namespace {

using io::Json;
using io::OJson;

RuleDomain ParseDomain(const Json& j, const std::string& where) {
  const std::string d = j.is_null() ? "reduced" : io::Label(j, where);
  if (d == "reduced") return RuleDomain::kReduced;
  if (d == "full") return RuleDomain::kFull;
  throw InputError(where + ": domain is 'reduced' or 'full'");
}

const char* DomainName(RuleDomain d) {
  return d == RuleDomain::kReduced ? "reduced" : "full";
}

FeedbackRule ParseRule(const MediatorSpace& space, RuleDomain domain,
                       const Json& cells, const std::string& where) {
  if (!cells.is_array()) throw InputError(where + ": a rule is a list of cells");
  const int n = NumRuleCells(space, domain);
  if (static_cast<int>(cells.size()) != n) {
    throw InputError(where + ": rule has " + std::to_string(cells.size()) +
                     " cells, expected " + std::to_string(n));
  }
  int max_joint = 0;
  for (int t = 0; t < space.NumStages(); ++t) {
    max_joint = std::max(max_joint, space.game().NumJointActions(t));
  }
  FeedbackRule rule{domain, {}};
  for (int c = 0; c < n; ++c) {
    const int v = io::Integer(cells[c], where);
    const int limit = domain == RuleDomain::kReduced
                          ? space.game().NumJointActions(space.tree().node(c).stage)
                          : max_joint;
    if (v < 0 || v >= limit) {
      throw InputError(where + ": cell " + std::to_string(c) +
                       " recommends joint action " + std::to_string(v) +
                       " out of range");
    }
    rule.choice.push_back(v);
  }
  return rule;
}

BCEMixture ParseMixtureEntries(const MediatorSpace& space, const Json& list,
                               const std::string& what) {
  if (!list.is_array()) throw InputError(what + " must be a list");
  BCEMixture m;
  for (size_t k = 0; k < list.size(); ++k) {
    const std::string where = what + "[" + std::to_string(k) + "]";
    const Json& e = list[k];
    MixtureEntry entry;
    entry.rule = ParseRule(
        space, ParseDomain(e.contains("domain") ? e.at("domain") : Json(), where),
        io::Field(e, "rule", where), where);
    entry.weight = io::Number(io::Field(e, "weight", where), where);
    if (e.contains("initial_node")) {
      entry.initial_node = io::Integer(e.at("initial_node"), where);
      const auto& roots = space.tree().StageNodes(0);
      if (std::find(roots.begin(), roots.end(), entry.initial_node) ==
          roots.end()) {
        throw InputError(where + ": initial_node is not a stage-1 node");
      }
    }
    m.entries.push_back(std::move(entry));
  }
  return m;
}

// Keys of `player` at 0-based `stage` whose label matches (all if empty).
std::vector<int> MatchingKeys(const MediatorSpace& space, int player,
                              int stage, const std::string& label) {
  std::vector<int> out;
  for (int k = 0; k < space.NumKeys(player); ++k) {
    if (space.key(player, k).stage != stage) continue;
    if (!label.empty() && KeyLabel(space, player, k) != label) continue;
    out.push_back(k);
  }
  return out;
}

std::vector<Rational> ParsePolynomial(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": a polynomial is a list");
  std::vector<Rational> out;
  for (const Json& c : j) out.push_back(io::Number(c, where));
  return out;
}

}  // namespace

std::vector<FeedbackRule> ParseRules(const MediatorSpace& space,
                                     const std::string& text) {
  const Json doc = io::Parse(text);
  const RuleDomain domain = ParseDomain(
      doc.contains("domain") ? doc.at("domain") : Json(), "rules file");
  const Json& rules = io::Field(doc, "rules", "rules file");
  if (!rules.is_array() || rules.empty()) {
    throw InputError("rules file: 'rules' must be a nonempty list");
  }
  std::vector<FeedbackRule> out;
  for (size_t k = 0; k < rules.size(); ++k) {
    out.push_back(
        ParseRule(space, domain, rules[k], "rules[" + std::to_string(k) + "]"));
  }
  return out;
}

std::string MixtureToJson(const MediatorSpace& space,
                          const BCEMixture& mixture) {
  OJson list = OJson::array();
  for (const MixtureEntry& e : mixture.entries) {
    OJson j;
    j["domain"] = DomainName(e.rule.domain);
    j["rule"] = e.rule.choice;
    j["weight"] = FormatRational(e.weight);
    if (e.initial_node >= 0) {
      j["initial_node"] = e.initial_node;
      j["initial_history"] =
          space.game().HistoryLabel(space.tree().HistoryOf(e.initial_node));
    }
    j["description"] = DescribeRule(space, e.rule);
    list.push_back(j);
  }
  OJson doc;
  doc["mixture"] = list;
  return doc.dump(2) + "\n";
}

BCEMixture ParseMixture(const MediatorSpace& space, const std::string& text) {
  const Json doc = io::Parse(text);
  return ParseMixtureEntries(space, io::Field(doc, "mixture", "mixture file"),
                             "mixture");
}

Bundle ParseBundle(const MediatorSpace& space, const std::string& text) {
  const Json doc = io::Parse(text);
  const BaseGame& g = space.game();
  Bundle b;
  const std::string kind =
      doc.contains("kind") ? io::Label(doc.at("kind"), "bundle.kind") : "bce";
  if (kind == "bce") {
    b.kind = Bundle::Kind::kBce;
  } else if (kind == "wpbce") {
    b.kind = Bundle::Kind::kWpbce;
  } else if (kind == "sbce") {
    b.kind = Bundle::Kind::kSbce;
  } else {
    throw InputError("bundle.kind is 'bce', 'wpbce' or 'sbce'");
  }
  b.mixture = ParseMixtureEntries(space, io::Field(doc, "mixture", "bundle"),
                                  "mixture");

  if (doc.contains("ranges")) {
    const Json& rs = doc.at("ranges");
    if (!rs.is_array()) throw InputError("ranges must be a list");
    std::vector<std::vector<bool>> allowed(g.NumPlayers());
    for (int i = 0; i < g.NumPlayers(); ++i) {
      allowed[i].assign(space.NumKeys(i), true);
    }
    for (size_t k = 0; k < rs.size(); ++k) {
      const std::string where = "ranges[" + std::to_string(k) + "]";
      const Json& e = rs[k];
      const int i = g.PlayerIndex(io::Label(io::Field(e, "player", where), where));
      const int t = io::Integer(io::Field(e, "stage", where), where) - 1;
      if (t < 0 || t >= g.stages) throw InputError(where + ": bad stage");
      const std::string label =
          e.contains("key") ? io::Label(e.at("key"), where) : "";
      std::vector<bool> in_set(g.NumActions(i, t), false);
      for (const std::string& a :
           io::Labels(io::Field(e, "allowed", where), where)) {
        in_set[g.ActionIndex(i, t, a)] = true;
      }
      const std::vector<int> keys = MatchingKeys(space, i, t, label);
      if (keys.empty()) throw InputError(where + ": no matching key");
      for (int key : keys) allowed[i][key] = in_set[space.key(i, key).own_rec];
    }
    b.range = RangeFromFunction(
        space, [&](int player, int key) { return allowed[player][key]; });
  }

  if (doc.contains("beliefs")) {
    const Json& be = doc.at("beliefs");
    if (be.is_string()) {
      if (be.get<std::string>() != "bayes") {
        throw InputError("beliefs: use \"bayes\" or an object");
      }
      b.bayes_beliefs = true;
    } else {
      b.bayes_beliefs = !be.contains("bayes") || be.at("bayes").get<bool>();
      BeliefSystem bs = EmptyBeliefs(space);
      if (be.contains("keys")) {
        for (size_t k = 0; k < be.at("keys").size(); ++k) {
          const std::string where = "beliefs.keys[" + std::to_string(k) + "]";
          const Json& e = be.at("keys")[k];
          const int i =
              g.PlayerIndex(io::Label(io::Field(e, "player", where), where));
          const std::string label = io::Label(io::Field(e, "key", where), where);
          int key = -1;
          for (int c = 0; c < space.NumKeys(i); ++c) {
            if (KeyLabel(space, i, c) == label) key = c;
          }
          if (key < 0) throw InputError(where + ": unknown key '" + label + "'");
          for (const Json& x : io::Field(e, "belief", where)) {
            const int var = io::Integer(io::Field(x, "var", where), where);
            if (var < 0 || var >= space.NumVars() ||
                space.KeyOf(i, var) != key) {
              throw InputError(where + ": variable " + std::to_string(var) +
                               " does not belong to the key");
            }
            bs.belief[i][key].push_back(
                {var, io::Number(io::Field(x, "prob", where), where)});
          }
        }
      }
      b.beliefs = std::move(bs);
    }
  }

  if (doc.contains("cps")) {
    const Json& c = doc.at("cps");
    const MediationRange range = b.range ? *b.range : FullRange(space);
    b.ground = MakeSbceGround(space, range);
    const int size = b.ground->Size();
    const std::string type = io::Label(io::Field(c, "type", "cps"), "cps.type");
    if (type == "perturbation") {
      const Json& ws = io::Field(c, "weights", "cps");
      if (!ws.is_array() || static_cast<int>(ws.size()) != size) {
        throw InputError("cps.weights needs one polynomial per element (" +
                         std::to_string(size) + ")");
      }
      std::vector<std::vector<Rational>> weights;
      for (const Json& w : ws) weights.push_back(ParsePolynomial(w, "cps.weights"));
      b.cps = Cps::FromPerturbation(std::move(weights));
    } else if (type == "table") {
      std::vector<CpsRow> rows;
      for (const Json& r : io::Field(c, "rows", "cps")) {
        CpsRow row;
        for (const Json& z : io::Field(r, "given", "cps.rows")) {
          row.given.push_back(io::Integer(z, "cps.rows.given"));
        }
        std::sort(row.given.begin(), row.given.end());
        for (const Json& p : io::Field(r, "prob", "cps.rows")) {
          if (!p.is_array() || p.size() != 2) {
            throw InputError("cps.rows.prob entries are [element, prob]");
          }
          row.prob.push_back({io::Integer(p[0], "cps.rows.prob"),
                              io::Number(p[1], "cps.rows.prob")});
        }
        rows.push_back(std::move(row));
      }
      b.cps = Cps::FromTable(size, std::move(rows));
    } else {
      throw InputError("cps.type is 'perturbation' or 'table'");
    }
  }
  if (b.kind == Bundle::Kind::kSbce && !b.cps) {
    throw InputError("an sbce bundle needs a cps section");
  }
  return b;
}

std::string PlanToJson(const DecisionProblem& problem,
                       const DeviationPlan& plan) {
  OJson rows = OJson::array();
  const int n = problem.NumProfiles();
  for (int rec = 0; rec < n; ++rec) {
    for (int chosen = 0; chosen < n; ++chosen) {
      if (sgn(plan.prob[rec][chosen]) == 0) continue;
      OJson r;
      r["recommended"] = problem.ProfileLabel(rec);
      r["chosen"] = problem.ProfileLabel(chosen);
      r["prob"] = FormatRational(plan.prob[rec][chosen]);
      rows.push_back(r);
    }
  }
  OJson doc;
  doc["plan"] = rows;
  return doc.dump(2) + "\n";
}

std::string PolytopeCsv(const std::vector<Point2>& vertices) {
  std::string out;
  for (const Point2& p : vertices) {
    out += FormatRational(p.first) + "," + FormatRational(p.second) + "\n";
  }
  return out;
}

std::string PolytopeSvg(const std::vector<Point2>& feasible,
                        const std::vector<Point2>& bce) {
  const double size = 400, margin = 40;
  double lo_x = 0, hi_x = 1, lo_y = 0, hi_y = 1;
  bool first = true;
  for (const auto* set : {&feasible, &bce}) {
    for (const Point2& p : *set) {
      const double x = p.first.get_d(), y = p.second.get_d();
      if (first) {
        lo_x = hi_x = x;
        lo_y = hi_y = y;
        first = false;
      }
      lo_x = std::min(lo_x, x);
      hi_x = std::max(hi_x, x);
      lo_y = std::min(lo_y, y);
      hi_y = std::max(hi_y, y);
    }
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  auto sx = [&](double x) { return margin + (x - lo_x) / span * (size - 2 * margin); };
  auto sy = [&](double y) {
    return size - margin - (y - lo_y) / span * (size - 2 * margin);
  };
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto polygon = [&](const std::vector<Point2>& pts, const char* fill) {
    if (pts.empty()) return;
    out << "<polygon fill=\"" << fill << "\" stroke=\"black\" "
        << "stroke-width=\"1\" points=\"";
    for (size_t k = 0; k < pts.size(); ++k) {
      if (k > 0) out << " ";
      out << sx(pts[k].first.get_d()) << "," << sy(pts[k].second.get_d());
    }
    out << "\"/>\n";
  };
  polygon(feasible, "#d9d9d9");
  polygon(bce, "#7f7f7f");
  out << "<line x1=\"" << margin << "\" y1=\"" << size - margin << "\" x2=\""
      << size - margin << "\" y2=\"" << size - margin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << size - margin << "\" x2=\""
      << margin << "\" y2=\"" << margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << size - margin << "\" y=\"" << size - 10
      << "\" font-size=\"12\" text-anchor=\"end\">player 1</text>\n";
  out << "<text x=\"10\" y=\"" << margin - 10
      << "\" font-size=\"12\">player 2</text>\n";
  for (const Point2& p : bce) {
    out << "<circle cx=\"" << sx(p.first.get_d()) << "\" cy=\""
        << sy(p.second.get_d()) << "\" r=\"3\" fill=\"black\"/>\n";
    out << "<text x=\"" << sx(p.first.get_d()) + 5 << "\" y=\""
        << sy(p.second.get_d()) - 5 << "\" font-size=\"11\">("
        << FormatRational(p.first, false) << ", "
        << FormatRational(p.second, false) << ")</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string ReportsToJson(const std::vector<ScenarioReport>& reports) {
  OJson list = OJson::array();
  for (const ScenarioReport& r : reports) {
    for (const Claim& c : r.claims) {
      OJson j;
      j["name"] = r.name;
      j["claim"] = c.claim;
      j["expected"] = c.expected;
      j["computed"] = c.computed;
      j["pass"] = c.pass;
      j["basis"] = c.basis;
      list.push_back(j);
    }
  }
  return list.dump(2) + "\n";
}

}  // namespace bce
