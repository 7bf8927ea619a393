// Copyright 2026 The bellmd Authors
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

#include "bellmd/quantum_adversary.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bellmd {

BiasR bias_from_profile(const StrategyProfile &profile) {
    if (profile.game().m() != 2) {
        throw std::invalid_argument("bias_from_profile: CHSH profiles only");
    }
    if (!profile.is_normalized()) {
        throw std::invalid_argument("bias_from_profile: profile is not normalized");
    }
    // 3^(k-1) C(N,k) p_k is a third of the class total.
    double sum = 0.0;
    for (const auto &c : profile.classes()) {
        sum += c.k * c.weight / 3.0;
    }
    return BiasR{sum / profile.N()};
}

double quantum_max(BiasR bias) {
    const double R = bias.value;
    if (!(R >= 0.25 - 1e-12 && R <= 1.0 / 3.0 + 1e-12)) {
        throw std::out_of_range("quantum_max: R must be in [1/4, 1/3], got " + std::to_string(R));
    }
    if (R >= kQuantumCrossover) {
        return 4.0 * (6.0 * R - 1.0);
    }
    return 4.0 * std::pow(1.0 - 2.0 * R, 1.5) / std::sqrt(1.0 - 3.0 * R);
}

double sq_from_sc(double classical_score) {
    const double sc = classical_score;
    if (!(sc >= 2.0 - 1e-12 && sc <= 4.0 + 1e-12)) {
        throw std::out_of_range("sq_from_sc: S_C must be in [2, 4], got " + std::to_string(sc));
    }
    if (sc >= kQuantumCrossoverScore) {
        return sc;
    }
    return 2.0 * std::pow(8.0 - sc, 1.5) / (3.0 * std::sqrt(6.0 * (4.0 - sc)));
}

}  // namespace bellmd
