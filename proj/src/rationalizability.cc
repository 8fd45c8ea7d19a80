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

#include "bce/rationalizability.h"

#include <map>
#include <sstream>
#include <tuple>
#include <utility>

#include "bce/lp.h"

namespace bce {

int DecisionProblem::NumPrefixes(int t) const {
  int n = 1;
  for (int s = 0; s <= t; ++s) n *= NumActions(s);
  return n;
}

int DecisionProblem::Encode(const std::vector<int>& profile) const {
  return PrefixCode(profile, periods - 1);
}

std::vector<int> DecisionProblem::Decode(int profile) const {
  std::vector<int> out(periods);
  for (int t = periods - 1; t >= 0; --t) {
    out[t] = profile % NumActions(t);
    profile /= NumActions(t);
  }
  return out;
}

int DecisionProblem::PrefixCode(const std::vector<int>& profile, int t) const {
  int code = 0;
  for (int s = 0; s <= t; ++s) code = code * NumActions(s) + profile[s];
  return code;
}

std::string DecisionProblem::ProfileLabel(int profile) const {
  std::vector<int> a = Decode(profile);
  std::string out;
  for (int t = 0; t < periods; ++t) {
    if (t > 0) out += ",";
    out += actions[t][a[t]];
  }
  return out;
}

int DecisionProblem::ProfileIndex(
    const std::vector<std::string>& labels) const {
  if (static_cast<int>(labels.size()) != periods) {
    throw InputError("profile has " + std::to_string(labels.size()) +
                     " entries, expected " + std::to_string(periods));
  }
  std::vector<int> a(periods);
  for (int t = 0; t < periods; ++t) {
    a[t] = -1;
    for (int k = 0; k < NumActions(t); ++k) {
      if (actions[t][k] == labels[t]) a[t] = k;
    }
    if (a[t] < 0) {
      throw InputError("unknown action '" + labels[t] + "' in period " +
                       std::to_string(t + 1));
    }
  }
  return Encode(a);
}

void CheckDecisionProblem(const DecisionProblem& problem) {
  if (problem.periods < 1) throw InputError("decision problem has no periods");
  if (static_cast<int>(problem.actions.size()) != problem.periods) {
    throw InputError("actions must list one set per period");
  }
  for (int t = 0; t < problem.periods; ++t) {
    if (problem.actions[t].empty()) {
      throw InputError("period " + std::to_string(t + 1) + " has no actions");
    }
  }
  if (problem.states.empty()) throw InputError("decision problem has no states");
  if (static_cast<int>(problem.utility.size()) != problem.NumProfiles()) {
    throw InputError("utility has " + std::to_string(problem.utility.size()) +
                     " rows, expected " +
                     std::to_string(problem.NumProfiles()));
  }
  for (int p = 0; p < problem.NumProfiles(); ++p) {
    if (static_cast<int>(problem.utility[p].size()) != problem.NumStates()) {
      throw InputError("utility row " + problem.ProfileLabel(p) +
                       " needs one entry per state");
    }
  }
}

BaseGame DecisionGame(const DecisionProblem& problem) {
  CheckDecisionProblem(problem);
  BaseGame g;
  g.players = {"agent"};
  g.stages = problem.periods;
  g.actions = {problem.actions};
  g.states.assign(problem.periods, problem.states);
  const int n = problem.NumStates();
  g.kernel = std::make_shared<FunctionKernel>(
      [n] {
        std::vector<Outcome> out;
        for (int w = 0; w < n; ++w) out.push_back({{}, {0}, {}, w, Ratio(1, n)});
        return out;
      },
      [](const History& h, const Profile& a) {
        return std::vector<Outcome>{{a, {0}, {}, h.states[0], Rational(1)}};
      });
  g.payoff = std::make_shared<FunctionPayoff>([problem](const History& h) {
    std::vector<int> a;
    for (const Profile& p : h.actions) a.push_back(p[0]);
    return std::optional<std::vector<Rational>>(
        {problem.utility[problem.Encode(a)][h.states[0]]});
  });
  NormalizeShapes(&g);
  return g;
}

DecisionProblem TableOneProblem() {
  DecisionProblem p;
  p.periods = 2;
  p.actions = {{"l", "c", "r"}, {"l", "c", "r"}};
  p.states = {"w", "w'"};
  const int period[2][3] = {{0, 1, 0}, {0, 0, 1}};
  for (int a1 = 0; a1 < 3; ++a1) {
    for (int a2 = 0; a2 < 3; ++a2) {
      p.utility.push_back({Rational(period[0][a1] + period[0][a2]),
                           Rational(period[1][a1] + period[1][a2])});
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Deviation plans.

int StrategyRow(const DecisionProblem& problem, int t, int recs_code,
                int choices_code) {
  return recs_code * problem.NumPrefixes(t - 1) + choices_code;
}

BehavioralStrategy ObedientStrategy(const DecisionProblem& problem) {
  BehavioralStrategy s;
  s.tau.resize(problem.periods);
  for (int t = 0; t < problem.periods; ++t) {
    const int n = problem.NumActions(t);
    for (int rc = 0; rc < problem.NumPrefixes(t); ++rc) {
      for (int cc = 0; cc < problem.NumPrefixes(t - 1); ++cc) {
        std::vector<Rational> row(n);
        row[rc % n] = 1;
        s.tau[t].push_back(std::move(row));
      }
    }
  }
  return s;
}

DeviationPlan PlanFromStrategy(const DecisionProblem& problem,
                               const BehavioralStrategy& tau) {
  CheckDecisionProblem(problem);
  if (static_cast<int>(tau.tau.size()) != problem.periods) {
    throw InputError("strategy needs one table per period");
  }
  for (int t = 0; t < problem.periods; ++t) {
    const int rows = problem.NumPrefixes(t) * problem.NumPrefixes(t - 1);
    if (static_cast<int>(tau.tau[t].size()) != rows) {
      throw InputError("strategy table of period " + std::to_string(t + 1) +
                       " needs " + std::to_string(rows) + " rows");
    }
    for (const auto& row : tau.tau[t]) {
      if (static_cast<int>(row.size()) != problem.NumActions(t)) {
        throw InputError("strategy row of period " + std::to_string(t + 1) +
                         " has the wrong length");
      }
    }
  }
  const int n = problem.NumProfiles();
  DeviationPlan plan;
  plan.prob.assign(n, std::vector<Rational>(n));
  for (int rec = 0; rec < n; ++rec) {
    const std::vector<int> r = problem.Decode(rec);
    for (int chosen = 0; chosen < n; ++chosen) {
      const std::vector<int> b = problem.Decode(chosen);
      Rational p = 1;
      for (int t = 0; t < problem.periods && sgn(p) != 0; ++t) {
        const int row = StrategyRow(problem, t, problem.PrefixCode(r, t),
                                    problem.PrefixCode(b, t - 1));
        p *= tau.tau[t][row][b[t]];
      }
      plan.prob[rec][chosen] = p;
    }
  }
  return plan;
}

std::vector<std::string> CheckDeviationPlan(const DecisionProblem& problem,
                                            const DeviationPlan& plan) {
  std::vector<std::string> issues;
  const int n = problem.NumProfiles();
  if (static_cast<int>(plan.prob.size()) != n) {
    issues.push_back("plan needs " + std::to_string(n) + " rows");
    return issues;
  }
  for (int rec = 0; rec < n; ++rec) {
    if (static_cast<int>(plan.prob[rec].size()) != n) {
      issues.push_back("row " + problem.ProfileLabel(rec) +
                       " has the wrong length");
      return issues;
    }
    Rational total;
    for (const Rational& p : plan.prob[rec]) {
      if (sgn(p) < 0) {
        issues.push_back("row " + problem.ProfileLabel(rec) +
                         " has a negative entry");
      }
      total += p;
    }
    if (total != 1) {
      issues.push_back("row " + problem.ProfileLabel(rec) + " sums to " +
                       FormatRational(total));
    }
  }
  // Marginal of the first t + 1 choices as a function of the recommendation.
  for (int t = 0; t + 1 < problem.periods; ++t) {
    const int suffix = n / problem.NumPrefixes(t);
    for (int rec = 0; rec < n; ++rec) {
      const int base = rec - rec % suffix;  // same prefix, suffix zero
      if (base == rec) continue;
      for (int pc = 0; pc < problem.NumPrefixes(t); ++pc) {
        Rational m_rec, m_base;
        for (int s = 0; s < suffix; ++s) {
          m_rec += plan.prob[rec][pc * suffix + s];
          m_base += plan.prob[base][pc * suffix + s];
        }
        if (m_rec != m_base) {
          issues.push_back("choices through period " + std::to_string(t + 1) +
                           " depend on later recommendations (" +
                           problem.ProfileLabel(rec) + " vs " +
                           problem.ProfileLabel(base) + ")");
          break;
        }
      }
    }
  }
  return issues;
}

std::string DescribePlan(const DecisionProblem& problem,
                         const DeviationPlan& plan) {
  std::ostringstream out;
  const int n = problem.NumProfiles();
  bool any = false;
  for (int rec = 0; rec < n; ++rec) {
    if (plan.prob[rec][rec] == 1) continue;
    any = true;
    out << "  D(.|" << problem.ProfileLabel(rec) << "):";
    for (int chosen = 0; chosen < n; ++chosen) {
      if (sgn(plan.prob[rec][chosen]) == 0) continue;
      out << " " << problem.ProfileLabel(chosen) << " "
          << FormatRational(plan.prob[rec][chosen], false);
    }
    out << "\n";
  }
  if (!any) out << "  obedient\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Dominance LPs.

namespace {

// Builds rows sparsely so variables may be added after rows exist.
class SparseLp {
 public:
  int AddVariable(bool is_free) {
    if (is_free) free_.push_back(num_vars_);
    return num_vars_++;
  }
  void AddRow(std::map<int, Rational> row, Rational rhs, bool equality) {
    rows_.push_back({std::move(row), std::move(rhs), equality});
  }
  LinearProgram Build(int objective_var) const {
    LinearProgram lp(num_vars_);
    lp.free_vars = free_;
    for (const auto& [row, rhs, eq] : rows_) {
      std::vector<Rational> dense = lp.ZeroRow();
      for (const auto& [j, c] : row) dense[j] += c;
      if (eq) {
        lp.AddEquality(std::move(dense), rhs);
      } else {
        lp.AddInequality(std::move(dense), rhs);
      }
    }
    lp.objective.assign(num_vars_, Rational(0));
    lp.objective[objective_var] = 1;
    return lp;
  }

 private:
  struct Row {
    std::map<int, Rational> coeffs;
    Rational rhs;
    bool equality;
  };
  int num_vars_ = 0;
  std::vector<int> free_;
  std::vector<Row> rows_;
};

// Sequence-form realization weights r_t(a-hat^t, a^t) of the decision-maker:
// the probability of choosing a^t when recommended a-hat^t. Flow rows make
// every feasible point the plan of a behavioral strategy.
class PlanVariables {
 public:
  PlanVariables(const DecisionProblem& problem, SparseLp* lp)
      : problem_(problem) {
    const int periods = problem.periods;
    offset_.resize(periods);
    for (int t = 0; t < periods; ++t) {
      const int k = problem.NumPrefixes(t);
      offset_[t] = lp->AddVariable(false);
      for (int j = 1; j < k * k; ++j) lp->AddVariable(false);
    }
    for (int t = 0; t < periods; ++t) {
      const int n = problem.NumActions(t);
      for (int rc = 0; rc < problem.NumPrefixes(t); ++rc) {
        for (int cp = 0; cp < problem.NumPrefixes(t - 1); ++cp) {
          std::map<int, Rational> row;
          for (int a = 0; a < n; ++a) row[Var(t, rc, cp * n + a)] = 1;
          Rational rhs = 1;
          if (t > 0) {
            row[Var(t - 1, rc / n, cp)] = -1;
            rhs = 0;
          }
          lp->AddRow(std::move(row), rhs, true);
        }
      }
    }
  }

  int Var(int t, int recs_code, int choices_code) const {
    return offset_[t] + recs_code * problem_.NumPrefixes(t) + choices_code;
  }

  DeviationPlan Extract(const std::vector<Rational>& x) const {
    const int n = problem_.NumProfiles();
    const int last = problem_.periods - 1;
    DeviationPlan plan;
    plan.prob.assign(n, std::vector<Rational>(n));
    for (int rec = 0; rec < n; ++rec) {
      for (int chosen = 0; chosen < n; ++chosen) {
        plan.prob[rec][chosen] = x[Var(last, rec, chosen)];
      }
    }
    return plan;
  }

 private:
  const DecisionProblem& problem_;
  std::vector<int> offset_;
};

// Adds the epsilon variable, bounded by one so the LP stays bounded.
int AddSlack(SparseLp* lp) {
  const int eps = lp->AddVariable(false);
  lp->AddRow({{eps, Rational(-1)}}, Rational(-1), false);
  return eps;
}

DominanceResult SolveDominance(const SparseLp& sparse,
                               const PlanVariables& vars, int eps,
                               const LPOptions& lp_options) {
  LPResult res = Solve(sparse.Build(eps), lp_options);
  if (res.status != LPStatus::kOptimal) {
    throw Error("dominance LP is " + LPStatusName(res.status));
  }
  DominanceResult out;
  out.slack = res.value;
  out.dominated = sgn(res.value) > 0;
  if (out.dominated) out.plan = vars.Extract(res.solution);
  return out;
}

void CheckTarget(const DecisionProblem& problem,
                 const std::vector<int>& target) {
  CheckDecisionProblem(problem);
  if (static_cast<int>(target.size()) != problem.periods) {
    throw InputError("target needs one action per period");
  }
  for (int t = 0; t < problem.periods; ++t) {
    if (target[t] < 0 || target[t] >= problem.NumActions(t)) {
      throw InputError("target action out of range in period " +
                       std::to_string(t + 1));
    }
  }
}

// Worst-case continuation values for the adaptive sure-dominance system. A
// node is (state, stage s, recommendations and choices through s) after the
// first disobedience; its variable is bounded above by the value of every
// next recommendation.
class ContinuationValues {
 public:
  ContinuationValues(const DecisionProblem& problem, const PlanVariables& vars,
                     SparseLp* lp)
      : problem_(problem), vars_(vars), lp_(lp) {}

  void Add(int state, int s, int rc, int cc, std::map<int, Rational>* row) {
    const int last = problem_.periods - 1;
    if (s == last) {
      (*row)[vars_.Var(last, rc, cc)] += problem_.utility[cc][state];
      return;
    }
    auto key = std::make_tuple(state, s, rc, cc);
    auto it = memo_.find(key);
    int w;
    if (it != memo_.end()) {
      w = it->second;
    } else {
      w = lp_->AddVariable(true);
      memo_[key] = w;
      const int n = problem_.NumActions(s + 1);
      for (int rec = 0; rec < n; ++rec) {
        std::map<int, Rational> bound;
        for (int b = 0; b < n; ++b) {
          Add(state, s + 1, rc * n + rec, cc * n + b, &bound);
        }
        bound[w] -= 1;
        lp_->AddRow(std::move(bound), Rational(0), false);
      }
    }
    (*row)[w] += 1;
  }

 private:
  const DecisionProblem& problem_;
  const PlanVariables& vars_;
  SparseLp* lp_;
  std::map<std::tuple<int, int, int, int>, int> memo_;
};

}  // namespace

DominanceResult IsSurelyDominated(const DecisionProblem& problem,
                                  const std::vector<int>& target,
                                  const SureDominanceOptions& options,
                                  const LPOptions& lp_options) {
  CheckTarget(problem, target);
  SparseLp sparse;
  PlanVariables vars(problem, &sparse);
  const int eps = AddSlack(&sparse);
  ContinuationValues values(problem, vars, &sparse);
  const int T = problem.periods;
  const int last = T - 1;
  const int target_code = problem.Encode(target);
  // Continuations a' over periods 1..T-1 (the first is never used).
  const int num_cont = options.adaptive_continuations
                           ? 1
                           : problem.NumProfiles() / problem.NumActions(0);
  for (int w = 0; w < problem.NumStates(); ++w) {
    for (int code = 0; code < problem.NumProfiles(); ++code) {
      const std::vector<int> a = problem.Decode(code);
      for (int c = 0; c < num_cont; ++c) {
        std::vector<int> cont = problem.Decode(c);  // cont[0] is zero
        std::map<int, Rational> row;
        for (int t = 0; t < T; ++t) {
          if (t == last) {
            if (!options.full_last_period) {
              row[vars.Var(last, code, code)] += problem.utility[code][w];
              continue;
            }
            std::vector<int> b = a;
            for (b[t] = 0; b[t] < problem.NumActions(t); ++b[t]) {
              const int bc = problem.Encode(b);
              row[vars.Var(last, code, bc)] += problem.utility[bc][w];
            }
            continue;
          }
          const int n = problem.NumActions(t);
          const int rc = problem.PrefixCode(a, t);
          const int cp = problem.PrefixCode(a, t - 1);
          for (int bt = 0; bt < n; ++bt) {
            if (bt == a[t]) continue;
            if (options.adaptive_continuations) {
              values.Add(w, t, rc, cp * n + bt, &row);
              continue;
            }
            // Fixed continuation: recommendation a_1..a_t, cont_{t+1}..
            std::vector<int> rec = a;
            for (int s = t + 1; s < T; ++s) rec[s] = cont[s];
            const int rec_code = problem.Encode(rec);
            const int suffix = problem.NumProfiles() / problem.NumPrefixes(t);
            for (int sfx = 0; sfx < suffix; ++sfx) {
              const int bc = (cp * n + bt) * suffix + sfx;
              row[vars.Var(last, rec_code, bc)] += problem.utility[bc][w];
            }
          }
        }
        if (code == target_code) row[eps] -= 1;
        sparse.AddRow(std::move(row), problem.utility[code][w], false);
      }
    }
  }
  return SolveDominance(sparse, vars, eps, lp_options);
}

DominanceResult IsTrulyDominated(const DecisionProblem& problem,
                                 const std::vector<int>& target,
                                 const LPOptions& lp_options) {
  CheckTarget(problem, target);
  SparseLp sparse;
  PlanVariables vars(problem, &sparse);
  const int eps = AddSlack(&sparse);
  const int last = problem.periods - 1;
  const int target_code = problem.Encode(target);
  for (int w = 0; w < problem.NumStates(); ++w) {
    for (int code = 0; code < problem.NumProfiles(); ++code) {
      std::map<int, Rational> row;
      for (int b = 0; b < problem.NumProfiles(); ++b) {
        row[vars.Var(last, code, b)] += problem.utility[b][w];
      }
      if (code == target_code) row[eps] -= 1;
      sparse.AddRow(std::move(row), problem.utility[code][w], false);
    }
  }
  return SolveDominance(sparse, vars, eps, lp_options);
}

// ---------------------------------------------------------------------------
// Rationalizability.

DecisionModel::DecisionModel(DecisionProblem problem)
    : problem_(std::move(problem)) {
  tree_ = std::make_unique<GameTree>(DecisionGame(problem_));
  space_ = std::make_unique<MediatorSpace>(*tree_, /*free_prior=*/true);
}

int DecisionModel::Terminal(int state, const std::vector<int>& profile) const {
  int node = -1;
  for (int n : tree_->StageNodes(0)) {
    if (tree_->node(n).state == state) node = n;
  }
  if (node < 0) throw InputError("unknown state " + std::to_string(state));
  const int last = problem_.periods - 1;
  for (int t = 0; t < last; ++t) {
    node = tree_->node(node).children[profile[t]].at(0);
  }
  return tree_->TerminalId(node, profile[last]);
}

RationalizabilityVerdict IsRationalizable(const DecisionModel& model,
                                          const std::vector<int>& target,
                                          const SolverOptions& options) {
  const DecisionProblem& problem = model.problem();
  CheckTarget(problem, target);
  SolverOptions opts = options;
  opts.free_prior = true;
  ObedienceLP olp(model.space(), opts);
  LinearProgram lp = olp.lp();
  lp.objective.assign(lp.num_vars, Rational(0));
  const auto& terminals = model.space().TerminalFunctionals();
  for (int w = 0; w < problem.NumStates(); ++w) {
    std::vector<Rational> row = olp.Row(terminals[model.Terminal(w, target)]);
    for (int j = 0; j < lp.num_vars; ++j) lp.objective[j] += row[j];
  }
  LPResult res = Solve(lp, opts.lp);
  if (res.status != LPStatus::kOptimal) {
    throw Error("rationalizability LP is " + LPStatusName(res.status));
  }
  RationalizabilityVerdict out;
  out.max_weight = res.value;
  const bool positive = sgn(res.value) > 0;
  if (positive) out.witness = olp.MixtureOf(res.solution);
  DominanceResult sure = IsSurelyDominated(problem, target, {}, opts.lp);
  if (sure.dominated) out.dominating_plan = sure.plan;
  // Exactly one of the two holds unless restricted rules cut the LP short.
  out.boundary = positive == sure.dominated;
  out.rationalizable = positive && !out.boundary;
  return out;
}

}  // namespace bce
