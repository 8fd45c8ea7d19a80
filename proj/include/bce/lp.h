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

#ifndef BCE_LP_H_
#define BCE_LP_H_

#include <ostream>
#include <string>
#include <vector>

#include "bce/rational.h"

namespace bce {

struct Constraint {
  std::vector<Rational> coeffs;  // length num_vars
  Rational rhs;
};

// maximize objective . x
// subject to   equalities:   row . x == rhs
//              inequalities: row . x >= rhs
//              x_j >= 0 for every j unless nonneg is false or j is free.
struct LinearProgram {
  int num_vars = 0;
  std::vector<Constraint> equalities;
  std::vector<Constraint> inequalities;
  bool nonneg = true;
  std::vector<int> free_vars;
  std::vector<Rational> objective;  // empty means zero

  explicit LinearProgram(int n = 0) : num_vars(n) {}

  std::vector<Rational> ZeroRow() const {
    return std::vector<Rational>(num_vars);
  }
  // Appends a variable (column of zeros in every row). Returns its index.
  int AddVariable(bool is_free = false);
  void AddEquality(std::vector<Rational> row, Rational rhs) {
    equalities.push_back({std::move(row), std::move(rhs)});
  }
  void AddInequality(std::vector<Rational> row, Rational rhs) {
    inequalities.push_back({std::move(row), std::move(rhs)});
  }
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

std::string LPStatusName(LPStatus status);

struct LPResult {
  LPStatus status = LPStatus::kInfeasible;
  std::vector<Rational> solution;
  Rational value;
  int pivots = 0;
};

enum class PivotRule {
  // Largest reduced cost, switching to Bland's rule after a run of
  // degenerate pivots. Terminates for the same reason Bland's rule does.
  kDantzigWithBlandFallback,
  kBland,
};

struct LPOptions {
  PivotRule rule = PivotRule::kDantzigWithBlandFallback;
  int degenerate_run = 500;
};

// Two-phase primal simplex over exact rationals. The optimal solution is a
// basic feasible solution and is checked against every constraint before it
// is returned. Throws InputError on dimension mismatch.
LPResult Solve(const LinearProgram& lp, const LPOptions& options = {});

// Phase one only: any feasible point, or infeasible.
LPResult FeasiblePoint(const LinearProgram& lp, const LPOptions& options = {});

// Writes one line per constraint, rationals as num/den.
void DumpTableau(const LinearProgram& lp, std::ostream& out);

}  // namespace bce

#endif  // BCE_LP_H_
