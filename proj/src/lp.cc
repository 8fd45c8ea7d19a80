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

#include "bce/lp.h"

#include <algorithm>

namespace bce {
namespace {

// Dense tableau in canonical form with respect to `basis`.
class Tableau {
 public:
  Tableau(int rows, int cols)
      : cols_(cols), t_(rows, std::vector<Rational>(cols + 1)),
        basis_(rows, -1), d_(cols + 1) {}

  int rows() const { return static_cast<int>(t_.size()); }
  int cols() const { return cols_; }
  Rational& at(int r, int c) { return t_[r][c]; }
  Rational& rhs(int r) { return t_[r][cols_]; }
  int& basis(int r) { return basis_[r]; }
  const std::vector<int>& basis() const { return basis_; }
  // Objective value of the current basis (stored negated in d_[cols_]).
  Rational Value() const { return -d_[cols_]; }

  // Sets reduced costs for maximizing c . x.
  void SetObjective(const std::vector<Rational>& c) {
    for (int j = 0; j < cols_; ++j) d_[j] = c[j];
    d_[cols_] = 0;
    for (int r = 0; r < rows(); ++r) {
      const Rational& cb = c[basis_[r]];
      if (sgn(cb) == 0) continue;
      for (int j = 0; j <= cols_; ++j) {
        if (sgn(t_[r][j]) != 0) d_[j] -= cb * t_[r][j];
      }
    }
  }

  void Pivot(int r, int c) {
    std::vector<Rational>& prow = t_[r];
    const Rational inv = 1 / prow[c];
    std::vector<int> nz;
    for (int j = 0; j <= cols_; ++j) {
      if (sgn(prow[j]) != 0) {
        prow[j] *= inv;
        nz.push_back(j);
      }
    }
    auto eliminate = [&](std::vector<Rational>& row) {
      if (sgn(row[c]) == 0) return;
      const Rational f = row[c];
      for (int j : nz) row[j] -= f * prow[j];
    };
    for (int i = 0; i < rows(); ++i) {
      if (i != r) eliminate(t_[i]);
    }
    eliminate(d_);
    basis_[r] = c;
  }

  // Runs simplex iterations; columns with allowed[j] false never enter.
  // Returns false if unbounded.
  bool Optimize(const std::vector<bool>& allowed, const LPOptions& options,
                int* pivots) {
    int degenerate = 0;
    for (;;) {
      const bool bland = options.rule == PivotRule::kBland ||
                         degenerate >= options.degenerate_run;
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        if (!allowed[j] || sgn(d_[j]) <= 0) continue;
        if (enter < 0 || (!bland && d_[j] > d_[enter])) enter = j;
        if (bland) break;
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int r = 0; r < rows(); ++r) {
        if (sgn(t_[r][enter]) <= 0) continue;
        Rational ratio = t_[r][cols_] / t_[r][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      degenerate = sgn(best) == 0 ? degenerate + 1 : 0;
      Pivot(leave, enter);
      ++*pivots;
    }
  }

  void DropRow(int r) {
    t_.erase(t_.begin() + r);
    basis_.erase(basis_.begin() + r);
  }

 private:
  int cols_;
  std::vector<std::vector<Rational>> t_;
  std::vector<int> basis_;
  std::vector<Rational> d_;  // reduced costs; d_[cols_] is -value
};

void CheckShape(const LinearProgram& lp) {
  auto check = [&](const std::vector<Constraint>& rows) {
    for (const Constraint& c : rows) {
      if (static_cast<int>(c.coeffs.size()) != lp.num_vars) {
        throw InputError("constraint row has " +
                         std::to_string(c.coeffs.size()) + " entries, expected " +
                         std::to_string(lp.num_vars));
      }
    }
  };
  check(lp.equalities);
  check(lp.inequalities);
  if (!lp.objective.empty() &&
      static_cast<int>(lp.objective.size()) != lp.num_vars) {
    throw InputError("objective has the wrong length");
  }
  for (int j : lp.free_vars) {
    if (j < 0 || j >= lp.num_vars) throw InputError("free variable out of range");
  }
}

Rational Dot(const std::vector<Rational>& a, const std::vector<Rational>& x) {
  Rational s(0);
  for (size_t j = 0; j < a.size(); ++j) {
    if (sgn(a[j]) != 0 && sgn(x[j]) != 0) s += a[j] * x[j];
  }
  return s;
}

void Certify(const LinearProgram& lp, const LPResult& result,
             bool check_value) {
  const auto& x = result.solution;
  for (const Constraint& c : lp.equalities) {
    if (Dot(c.coeffs, x) != c.rhs) throw Error("simplex: equality residual");
  }
  for (const Constraint& c : lp.inequalities) {
    if (Dot(c.coeffs, x) < c.rhs) throw Error("simplex: inequality residual");
  }
  std::vector<bool> is_free(lp.num_vars, !lp.nonneg);
  for (int j : lp.free_vars) is_free[j] = true;
  for (int j = 0; j < lp.num_vars; ++j) {
    if (!is_free[j] && sgn(x[j]) < 0) throw Error("simplex: negative variable");
  }
  if (check_value && !lp.objective.empty() &&
      Dot(lp.objective, x) != result.value) {
    throw Error("simplex: objective mismatch");
  }
}

// mpq arithmetic requires canonical operands; callers may build values with
// the two-argument constructor, which does not reduce.
LinearProgram Canonical(const LinearProgram& in) {
  LinearProgram lp = in;
  auto fix = [](std::vector<Rational>* row) {
    for (Rational& v : *row) v.canonicalize();
  };
  for (Constraint& c : lp.equalities) {
    fix(&c.coeffs);
    c.rhs.canonicalize();
  }
  for (Constraint& c : lp.inequalities) {
    fix(&c.coeffs);
    c.rhs.canonicalize();
  }
  fix(&lp.objective);
  return lp;
}

LPResult Run(const LinearProgram& input, const LPOptions& options,
             bool phase_two) {
  CheckShape(input);
  const LinearProgram lp = Canonical(input);
  const int n = lp.num_vars;
  std::vector<bool> is_free(n, !lp.nonneg);
  for (int j : lp.free_vars) is_free[j] = true;

  // Column layout: positive parts, negative parts of free variables, slacks,
  // artificials.
  std::vector<int> neg_col(n, -1);
  int cols = n;
  for (int j = 0; j < n; ++j) {
    if (is_free[j]) neg_col[j] = cols++;
  }
  const int num_eq = static_cast<int>(lp.equalities.size());
  const int num_ineq = static_cast<int>(lp.inequalities.size());
  const int slack0 = cols;
  cols += num_ineq;
  const int m = num_eq + num_ineq;

  // Rows needing an artificial basic variable.
  std::vector<int> art_row;
  std::vector<bool> negate(m, false);
  for (int r = 0; r < m; ++r) {
    const bool ineq = r >= num_eq;
    const Rational& b =
        ineq ? lp.inequalities[r - num_eq].rhs : lp.equalities[r].rhs;
    if (ineq) {
      negate[r] = sgn(b) <= 0;
      if (sgn(b) > 0) art_row.push_back(r);
    } else {
      negate[r] = sgn(b) < 0;
      art_row.push_back(r);
    }
  }
  const int art0 = cols;
  cols += static_cast<int>(art_row.size());

  Tableau tab(m, cols);
  for (int r = 0; r < m; ++r) {
    const bool ineq = r >= num_eq;
    const Constraint& c = ineq ? lp.inequalities[r - num_eq] : lp.equalities[r];
    const int sign = negate[r] ? -1 : 1;
    for (int j = 0; j < n; ++j) {
      if (sgn(c.coeffs[j]) == 0) continue;
      tab.at(r, j) = sign * c.coeffs[j];
      if (neg_col[j] >= 0) tab.at(r, neg_col[j]) = -sign * c.coeffs[j];
    }
    if (ineq) {
      tab.at(r, slack0 + r - num_eq) = -sign;
      if (negate[r]) tab.basis(r) = slack0 + r - num_eq;
    }
    tab.rhs(r) = sign * c.rhs;
  }
  for (size_t k = 0; k < art_row.size(); ++k) {
    tab.at(art_row[k], art0 + k) = 1;
    tab.basis(art_row[k]) = art0 + static_cast<int>(k);
  }

  LPResult result;
  std::vector<bool> allowed(cols, true);
  if (!art_row.empty()) {
    std::vector<Rational> c1(cols);
    for (int j = art0; j < cols; ++j) c1[j] = -1;
    tab.SetObjective(c1);
    tab.Optimize(allowed, options, &result.pivots);
    if (sgn(tab.Value()) < 0) {
      result.status = LPStatus::kInfeasible;
      return result;
    }
    // Drive remaining artificials out of the basis, dropping redundant rows.
    for (int r = tab.rows() - 1; r >= 0; --r) {
      if (tab.basis(r) < art0) continue;
      int enter = -1;
      for (int j = 0; j < art0 && enter < 0; ++j) {
        if (sgn(tab.at(r, j)) != 0) enter = j;
      }
      if (enter >= 0) {
        tab.Pivot(r, enter);
        ++result.pivots;
      } else {
        tab.DropRow(r);
      }
    }
    for (int j = art0; j < cols; ++j) allowed[j] = false;
  }

  std::vector<Rational> c2(cols);
  if (phase_two && !lp.objective.empty()) {
    for (int j = 0; j < n; ++j) {
      c2[j] = lp.objective[j];
      if (neg_col[j] >= 0) c2[neg_col[j]] = -lp.objective[j];
    }
  }
  tab.SetObjective(c2);
  if (!tab.Optimize(allowed, options, &result.pivots)) {
    result.status = LPStatus::kUnbounded;
    return result;
  }
  std::vector<Rational> col_value(cols);
  for (int r = 0; r < tab.rows(); ++r) col_value[tab.basis(r)] = tab.rhs(r);
  result.solution.assign(n, Rational(0));
  for (int j = 0; j < n; ++j) {
    result.solution[j] = col_value[j];
    if (neg_col[j] >= 0) result.solution[j] -= col_value[neg_col[j]];
  }
  result.status = LPStatus::kOptimal;
  result.value = tab.Value();
  Certify(lp, result, phase_two);
  return result;
}

}  // namespace

int LinearProgram::AddVariable(bool is_free) {
  for (Constraint& c : equalities) c.coeffs.emplace_back(0);
  for (Constraint& c : inequalities) c.coeffs.emplace_back(0);
  if (!objective.empty()) objective.emplace_back(0);
  if (is_free) free_vars.push_back(num_vars);
  return num_vars++;
}

std::string LPStatusName(LPStatus status) {
  switch (status) {
    case LPStatus::kOptimal:
      return "optimal";
    case LPStatus::kInfeasible:
      return "infeasible";
    case LPStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

LPResult Solve(const LinearProgram& lp, const LPOptions& options) {
  return Run(lp, options, true);
}

LPResult FeasiblePoint(const LinearProgram& lp, const LPOptions& options) {
  LPResult r = Run(lp, options, false);
  if (r.status == LPStatus::kOptimal) r.value = 0;
  return r;
}

void DumpTableau(const LinearProgram& lp, std::ostream& out) {
  auto row = [&](const std::vector<Rational>& coeffs) {
    for (size_t j = 0; j < coeffs.size(); ++j) {
      out << (j == 0 ? "" : " ") << FormatRational(coeffs[j]);
    }
  };
  out << "vars " << lp.num_vars << (lp.nonneg ? " nonneg" : " free");
  for (int j : lp.free_vars) out << " free:" << j;
  out << "\n";
  out << "max ";
  row(lp.objective.empty() ? lp.ZeroRow() : lp.objective);
  out << "\n";
  for (const Constraint& c : lp.equalities) {
    out << "eq ";
    row(c.coeffs);
    out << " = " << FormatRational(c.rhs) << "\n";
  }
  for (const Constraint& c : lp.inequalities) {
    out << "ge ";
    row(c.coeffs);
    out << " >= " << FormatRational(c.rhs) << "\n";
  }
}

}  // namespace bce
