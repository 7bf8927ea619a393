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

#ifndef BELLMD_QUANTUM_ADVERSARY_H
#define BELLMD_QUANTUM_ADVERSARY_H

#include "bellmd/bell_model.h"

namespace bellmd {

/// Common per-run probability of each of the three settings pairs that are
/// not (1, 1) under a symmetry-reduced CHSH profile; pair (1, 1) then has
/// probability 1 - 3R.
struct BiasR {
    double value = 0.25;
};

inline constexpr double kQuantumCrossover = 0.3;       // R
inline constexpr double kQuantumCrossoverScore = 3.2;  // S_C = 16/5

/// R = sum_k 3^(k-1) (k/N) C(N,k) p_k. Satisfies S_C = 4(6R - 1).
BiasR bias_from_profile(const StrategyProfile &profile);

/// Largest quantum CHSH value at bias R: 4(1-2R)^(3/2) / sqrt(1-3R) below
/// R = 3/10, the classical 4(6R - 1) from there on.
double quantum_max(BiasR bias);

/// The same ceiling written in terms of the classical score S_C:
/// 2(8 - S_C)^(3/2) / (3 sqrt(6 (4 - S_C))) below 16/5, S_C above.
double sq_from_sc(double classical_score);

}  // namespace bellmd

#endif
