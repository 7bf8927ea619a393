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

#ifndef BELLMD_BELL_LP_H
#define BELLMD_BELL_LP_H

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellmd/bell_model.h"
#include "bellmd/lp_core.h"

namespace bellmd {

/// Raised when the derived outcome rows break the symmetry the class
/// reduction relies on.
class ReductionError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Budget at which the CHSH score first reaches 4: 2(1 - (3/4)^N).
double chsh_m1_max(int N);

/// Budget at which the best score needs no wrong answers at all:
/// 2(1 - ((good + unused) / m^2)^N). For I3322 this is 2(1 - (7/9)^N).
double imm22_m1_max(const PairCounts &counts, int m, int N);

/// CHSH under the M_1 measure with variable blocks (p, w, a, b).
///
/// `lp` is the program actually solved. Its variables are the class totals
/// n_k p_k, n_k w_k, n_k a_k, n_k b_k, which keeps every entry O(1) however
/// large n_k = C(N,k) 3^k gets. unscaled_form() gives the unscaled layout.
struct ChshM1Program {
    int N = 0;
    double M1 = 0.0;
    bool above_max = false;
    LinearProgram lp;

    /// Unscaled program over member masses: objective (-s, 0, 0, 0) with
    /// s_k = 3^k C(N-1, k-1); rows (n 0 0 0), (1 -1 1 0), (-1 -1 0 1),
    /// (0 n 0 0). Available for N <= 60.
    LinearProgram unscaled_form() const;
};

ChshM1Program build_chsh_m1(int N, double M1);

struct BellLpResult {
    LpStatus status = LpStatus::infeasible;
    double S = 0.0;
    /// Only meaningful when status is optimal.
    std::vector<double> weights;
    int iterations = 0;
};

BellLpResult solve_chsh_m1(const ChshM1Program &program);
StrategyProfile profile_from_result(const ChshM1Program &program, const BellLpResult &result);

struct LpCurvePoint {
    std::string game;
    int N = 0;
    double M1 = 0.0;
    double S = 0.0;
    std::string status;
};

/// Solves one program per budget (in parallel) and returns points in grid
/// order. Throws LpError if any point is not optimal.
std::vector<LpCurvePoint> solve_chsh_m1_curve(int N, const std::vector<double> &grid);

/// I_mm22 under the M_1 measure over (k, l) classes: k correct used pairs,
/// l unused pairs. Variables are class totals (q, w, a, b) in
/// StrategyProfile::class_labels order.
struct Imm22Program {
    GameSpec game;
    int N = 0;
    double M1 = 0.0;
    bool above_max = false;
    OutcomeTable table;
    PairCounts counts;
    int homogeneity = 0;
    std::vector<CorrectCount> labels;
    LinearProgram lp;
};

/// Derives the optimal rows by brute force and checks the symmetry the
/// reduction needs (throws ReductionError otherwise). Supports m = 2, 3.
Imm22Program build_imm22(int m, int N, double M1);

BellLpResult solve_imm22(const Imm22Program &program);
StrategyProfile profile_from_result(const Imm22Program &program, const BellLpResult &result);

std::vector<LpCurvePoint> solve_imm22_curve(int m, int N, const std::vector<double> &grid);

/// N independent repetitions of a one-run profile: member masses multiply
/// run by run.
StrategyProfile repeated_profile(const StrategyProfile &one_shot, int N);

/// The comparison series: for each one-run budget on the grid, the optimal
/// one-run attack repeated N times, reported at its N-run M_1 value.
std::vector<LpCurvePoint> repeated_one_shot_curve(int m, int N, const std::vector<double> &one_shot_grid);

/// Result of the un-reduced program over every p(y|x).
struct OracleResult {
    LpStatus status = LpStatus::infeasible;
    double S = 0.0;
    /// MaxProb: per-run P of the solution. L1: max_x sum_y |p(y|x) - p(y)|.
    double measure_value = 0.0;
    ConditionalTable conditional;
};

inline constexpr std::int64_t kOracleLimit = 1'000'000;

/// Solves the full conditional-probability program with uniform p(x) over the
/// balanced optimal rows (the same rows build_imm22 uses), every Bayes
/// condition, and the measure applied entry by entry. Throws
/// std::length_error if (m^2)^N T^N > 10^6.
OracleResult brute_force_oracle(const GameSpec &game, int N, MdMeasure measure);

/// Same program over an explicit row set with per-run row probabilities
/// `row_weights`; p(x) is their product over runs.
OracleResult brute_force_oracle(
    const OutcomeTable &table, const std::vector<double> &row_weights, int N, MdMeasure measure);

void write_oracle_audit(std::ostream &out, const GameSpec &game, MdMeasure measure, const OracleResult &result);

}  // namespace bellmd

#endif
