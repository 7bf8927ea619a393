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

#ifndef BELLMD_STRATEGY_SIM_H
#define BELLMD_STRATEGY_SIM_H

#include <cstdint>
#include <string>
#include <vector>

#include "bellmd/bell_model.h"
#include "bellmd/philox.h"

namespace bellmd {

/// One simulated block of N runs.
struct SampledBlock {
    std::vector<int> x;  // hidden row per run
    std::vector<int> y;  // settings pair per run, y = j m + k
    std::vector<int> a;  // Alice's output for her chosen setting
    std::vector<int> b;  // Bob's output for his chosen setting
    int sign = 1;        // global conjugation applied to every output
    CorrectCount label;  // class the settings string was drawn from
};

/// Draws x uniformly, then a class with probability equal to its total mass,
/// then a settings string uniformly among that class's members relative to x.
/// A fair coin decides whether all outputs are conjugated.
SampledBlock sample_block(const StrategyProfile &profile, const OutcomeTable &table, RngState &rng);

struct SimReport {
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    int N = 0;
    int pair_count = 0;
    double analytic_S = 0.0;
    double empirical_S = 0.0;
    /// Sample standard deviation of the per-block score over sqrt(trials).
    double std_error = 0.0;
    /// Per run position, frequency of each settings pair.
    std::vector<std::vector<double>> marginals;
    /// Binomial standard error of a single marginal frequency at 1/m^2.
    double marginal_sigma = 0.0;
    double alice_mean = 0.0;
    double alice_std_error = 0.0;
    double bob_mean = 0.0;
    double bob_std_error = 0.0;
    /// Per-run P of the profile (analytic maximum member mass).
    double empirical_md = 0.0;
    /// Frequency of blocks drawn from each class, in profile class order.
    std::vector<double> class_frequencies;

    std::string to_json() const;
    std::string summary() const;
};

inline constexpr std::int64_t kMinTrials = 1000;

/// Monte-Carlo estimate over `trials` blocks. Block i always uses stream i of
/// the seed and partial sums are combined in a fixed order, so the report is
/// bit-identical for any thread count.
SimReport estimate(
    const StrategyProfile &profile, const OutcomeTable &table, std::int64_t trials, std::uint64_t seed,
    int threads = 0);

/// Names of the statistics that miss their target by more than `sigmas`
/// standard errors: the score, each marginal, and the two output means.
std::vector<std::string> failed_checks(const SimReport &report, double sigmas = 4.0);

}  // namespace bellmd

#endif
