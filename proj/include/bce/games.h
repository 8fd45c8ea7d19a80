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

#ifndef BCE_GAMES_H_
#define BCE_GAMES_H_

#include <string>
#include <vector>

#include "bce/game.h"

namespace bce {

// Code-built base games used by the scenarios and the tests.

// Player 1 picks a row at stage 1, player 2 then picks a column without
// observing the row. No chance. u[i][row][col].
BaseGame SequentialMatrixGame(
    const std::vector<std::string>& rows, const std::vector<std::string>& cols,
    const std::vector<std::vector<std::vector<Rational>>>& u);

// T/B then L/R, payoffs (2,2) (0,1) (3,0) (1,1).
BaseGame Example1Game();

// One player with no choices; omega_1 and omega_2 uniform on {0,1}, drawn
// at stages 1 and 2.
BaseGame Example2Game();
// Same states, both drawn at stage 1 as omega*_1 = (omega_1, omega_2).
BaseGame Example2ReinterpretedGame();

// One player picks a_1 in {0,1}; omega_2 = 1 with probability 5/6 after
// a_1 = 1 and 1/2 after a_1 = 0. Payoff 1 iff omega_2 = 0.
BaseGame Example3Game();

// Kernel families pi with a message m_1 in {0,1} at stage 1.
// pi_1(m_1, omega_1) = 1/4; omega_2 = omega_1 + m_1 mod 2.
BaseGame Example2Kernels();
// pi*_1(m_1, (omega_1, omega_2)) = 1/4 iff m_1 = omega_2 - omega_1 mod 2.
BaseGame Example2ReinterpretedKernels();
// m_1 uniform; pi_2(omega_2 = 1 | a_1, m_1) is 2/3, 1, 1, 0 for
// (a_1, m_1) = (1, 1), (0, 1), (1, 0), (0, 0).
BaseGame Example3Kernels();

// Seller (player 1) offers a_1 in `offers` without knowing omega, drawn at
// stage 1 from `prior` over `values`; the buyer (player 2) observes the
// offer and accepts ("1") or rejects ("0") at stage 2. Acceptance pays
// (a_1, omega - a_1), rejection (0, 0). Throws InputError on bad shapes.
BaseGame BargainingGame(const std::vector<Rational>& values,
                        const std::vector<Rational>& prior,
                        const std::vector<Rational>& offers);

}  // namespace bce

#endif  // BCE_GAMES_H_
