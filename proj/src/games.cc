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

#include "bce/games.h"

namespace bce {

BaseGame SequentialMatrixGame(
    const std::vector<std::string>& rows, const std::vector<std::string>& cols,
    const std::vector<std::vector<std::vector<Rational>>>& u) {
  BaseGame g;
  g.players = {"1", "2"};
  g.stages = 2;
  g.actions = {{rows, {"-"}}, {{"-"}, cols}};
  g.kernel = NoChanceKernel(2);
  g.payoff = std::make_shared<FunctionPayoff>([u](const History& h) {
    const int r = h.actions[0][0];
    const int c = h.actions[1][1];
    return std::optional<std::vector<Rational>>({u[0][r][c], u[1][r][c]});
  });
  NormalizeShapes(&g);
  return g;
}

BaseGame Example1Game() {
  auto q = [](int v) { return Rational(v); };
  return SequentialMatrixGame(
      {"T", "B"}, {"L", "R"},
      {{{q(2), q(0)}, {q(3), q(1)}}, {{q(2), q(1)}, {q(0), q(1)}}});
}

namespace {

std::shared_ptr<const PayoffModel> ZeroPayoff() {
  return std::make_shared<FunctionPayoff>([](const History&) {
    return std::optional<std::vector<Rational>>({Rational(0)});
  });
}

}  // namespace

BaseGame Example2Game() {
  BaseGame g;
  g.players = {"1"};
  g.stages = 2;
  g.actions = {{{"-"}, {"-"}}};
  g.states = {{"0", "1"}, {"0", "1"}};
  const Rational half(1, 2);
  g.kernel = std::make_shared<FunctionKernel>(
      [half] {
        return std::vector<Outcome>{{{}, {0}, {}, 0, half},
                                    {{}, {0}, {}, 1, half}};
      },
      [half](const History&, const Profile& a) {
        return std::vector<Outcome>{{a, {0}, {}, 0, half},
                                    {a, {0}, {}, 1, half}};
      });
  g.payoff = ZeroPayoff();
  NormalizeShapes(&g);
  return g;
}

BaseGame Example2ReinterpretedGame() {
  BaseGame g;
  g.players = {"1"};
  g.stages = 1;
  g.actions = {{{"-"}}};
  g.states = {{"00", "01", "10", "11"}};
  g.kernel = std::make_shared<FunctionKernel>(
      [] {
        std::vector<Outcome> out;
        for (int w = 0; w < 4; ++w) out.push_back({{}, {0}, {}, w, Rational(1, 4)});
        return out;
      },
      [](const History&, const Profile&) { return std::vector<Outcome>{}; });
  g.payoff = ZeroPayoff();
  NormalizeShapes(&g);
  return g;
}

BaseGame Example3Game() {
  BaseGame g;
  g.players = {"1"};
  g.stages = 2;
  g.actions = {{{"0", "1"}, {"-"}}};
  g.states = {{"-"}, {"0", "1"}};
  g.kernel = std::make_shared<FunctionKernel>(
      [] { return std::vector<Outcome>{{{}, {0}, {}, 0, Rational(1)}}; },
      [](const History&, const Profile& a) {
        const Rational hi = a[0] == 1 ? Rational(5, 6) : Rational(1, 2);
        return std::vector<Outcome>{{a, {0}, {}, 0, 1 - hi},
                                    {a, {0}, {}, 1, hi}};
      });
  g.payoff = std::make_shared<FunctionPayoff>([](const History& h) {
    return std::optional<std::vector<Rational>>(
        {Rational(h.states[1] == 0 ? 1 : 0)});
  });
  NormalizeShapes(&g);
  return g;
}

BaseGame Example2Kernels() {
  BaseGame g = Example2Game();
  g.messages = {{{"0", "1"}, {"-"}}};
  const Rational quarter(1, 4);
  g.kernel = std::make_shared<FunctionKernel>(
      [quarter] {
        std::vector<Outcome> out;
        for (int w = 0; w < 2; ++w) {
          for (int m = 0; m < 2; ++m) out.push_back({{}, {0}, {m}, w, quarter});
        }
        return out;
      },
      [](const History& h, const Profile& a) {
        const int w2 = (h.states[0] + h.messages[0][0]) % 2;
        return std::vector<Outcome>{{a, {0}, {0}, w2, Rational(1)}};
      });
  return g;
}

BaseGame Example2ReinterpretedKernels() {
  BaseGame g = Example2ReinterpretedGame();
  g.messages = {{{"0", "1"}}};
  g.kernel = std::make_shared<FunctionKernel>(
      [] {
        std::vector<Outcome> out;
        for (int w = 0; w < 4; ++w) {
          const int w1 = w / 2, w2 = w % 2;
          out.push_back({{}, {0}, {(w2 - w1 + 2) % 2}, w, Rational(1, 4)});
        }
        return out;
      },
      [](const History&, const Profile&) { return std::vector<Outcome>{}; });
  return g;
}

BaseGame Example3Kernels() {
  BaseGame g = Example3Game();
  g.messages = {{{"0", "1"}, {"-"}}};
  g.kernel = std::make_shared<FunctionKernel>(
      [] {
        return std::vector<Outcome>{{{}, {0}, {0}, 0, Rational(1, 2)},
                                    {{}, {0}, {1}, 0, Rational(1, 2)}};
      },
      [](const History& h, const Profile& a) {
        const int m1 = h.messages[0][0];
        Rational hi;
        if (a[0] == 1) {
          hi = m1 == 1 ? Rational(2, 3) : Rational(1);
        } else {
          hi = m1 == 1 ? Rational(1) : Rational(0);
        }
        std::vector<Outcome> out;
        if (sgn(1 - hi) > 0) out.push_back({a, {0}, {0}, 0, 1 - hi});
        if (sgn(hi) > 0) out.push_back({a, {0}, {0}, 1, hi});
        return out;
      });
  return g;
}

BaseGame BargainingGame(const std::vector<Rational>& values,
                        const std::vector<Rational>& prior,
                        const std::vector<Rational>& offers) {
  if (values.empty() || values.size() != prior.size() || offers.empty()) {
    throw InputError("bargaining needs states, a prior and offers");
  }
  BaseGame g;
  g.players = {"seller", "buyer"};
  g.stages = 2;
  std::vector<std::string> offer_labels, value_labels;
  for (const Rational& a : offers) offer_labels.push_back(FormatRational(a, false));
  for (const Rational& w : values) value_labels.push_back(FormatRational(w, false));
  g.actions = {{offer_labels, {"-"}}, {{"-"}, {"0", "1"}}};
  g.signals = {{{"-"}, {"-"}}, {{"-"}, offer_labels}};
  g.states = {value_labels, value_labels};
  g.kernel = std::make_shared<FunctionKernel>(
      [prior] {
        std::vector<Outcome> out;
        for (int w = 0; w < static_cast<int>(prior.size()); ++w) {
          if (sgn(prior[w]) > 0) out.push_back({{}, {0, 0}, {}, w, prior[w]});
        }
        return out;
      },
      [](const History& h, const Profile& a) {
        return std::vector<Outcome>{
            {a, {0, a[0]}, {}, h.states[0], Rational(1)}};
      });
  g.payoff = std::make_shared<FunctionPayoff>(
      [values, offers](const History& h) {
        if (h.actions[1][1] == 0) {
          return std::optional<std::vector<Rational>>(
              {Rational(0), Rational(0)});
        }
        const Rational& a = offers[h.actions[0][0]];
        return std::optional<std::vector<Rational>>(
            {a, values[h.states[1]] - a});
      });
  NormalizeShapes(&g);
  return g;
}

}  // namespace bce
