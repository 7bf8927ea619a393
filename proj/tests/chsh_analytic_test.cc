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

#include "bellmd/chsh_analytic.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "bellmd/lp_core.h"
#include "test_oracles.h"

namespace bellmd {
namespace {

const double kSqrt2 = std::sqrt(2.0);

TEST(SingleShot, LinearLaw) {
    for (int i = 0; i <= 200; i++) {
        const double P = 0.25 + (1.0 / 3.0 - 0.25) * i / 200.0;
        EXPECT_NEAR(max_score(1, P), 24.0 * P - 4.0, 1e-12);
        EXPECT_NEAR(single_shot_score(P), 24.0 * P - 4.0, 1e-12);
    }
    EXPECT_DOUBLE_EQ(max_score(1, 0.5), 4.0);
    EXPECT_THROW(max_score(1, 0.2), std::out_of_range);
    EXPECT_THROW(max_score(0, 0.3), std::out_of_range);
}

TEST(SingleShot, MatchesGridSearch) {
    // With N = 1 the cap P only binds the three correct settings.
    for (double P : {0.25, 0.26, 0.28, 0.3, 1.0 / 3.0}) {
        double best = -1e9;
        for (int i = 0; i <= 100000; i++) {
            const double p1 = P * i / 100000;
            const double p0 = 1.0 - 3.0 * p1;
            if (p0 >= -1e-15 && p0 <= P + 1e-15) {
                best = std::max(best, 24.0 * p1 - 4.0);
            }
        }
        EXPECT_NEAR(max_score(1, P), best, 1e-3) << P;
    }
}

TEST(Breakpoints, TwoRuns) {
    auto curve = breakpoints(2);
    ASSERT_EQ(curve.points.size(), 3U);
    EXPECT_DOUBLE_EQ(curve.points[0].P, 0.25);
    EXPECT_DOUBLE_EQ(curve.points[0].S, 2.0);
    EXPECT_NEAR(curve.points[1].P, 1.0 / std::sqrt(15.0), 1e-14);
    EXPECT_NEAR(curve.points[1].S, 2.4, 1e-13);
    EXPECT_DOUBLE_EQ(curve.points[2].P, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(curve.points[2].S, 4.0);

    auto exact = breakpoints_exact(2);
    EXPECT_EQ(exact[1].inverse_pn, 15);
    EXPECT_EQ(exact[1].S, BigRational(12, 5));
}

TEST(Breakpoints, ExactAndLogDomainAgree) {
    for (int N = 1; N <= kMaxExactRuns; N++) {
        auto curve = breakpoints(N);
        auto exact = breakpoints_exact(N);
        ASSERT_EQ(curve.points.size(), exact.size());
        for (std::size_t i = 0; i < exact.size(); i++) {
            const double P = std::exp(-std::log(to_double(exact[i].inverse_pn)) / N);
            EXPECT_NEAR(curve.points[i].P, P, 1e-12) << N << " " << i;
            EXPECT_NEAR(curve.points[i].S, exact[i].S.convert_to<double>(), 1e-11) << N << " " << i;
        }
        EXPECT_EQ(exact.front().S, 2);
        EXPECT_EQ(exact.back().S, 4);
    }
}

TEST(Breakpoints, ScoreAtBreakpointMatchesMaxScore) {
    for (int N : {1, 3, 10, 100, 1000}) {
        for (const auto &point : breakpoints(N).points) {
            EXPECT_NEAR(max_score(N, point.P), point.S, 1e-9) << N << " " << point.lprime;
        }
    }
}

TEST(MaxScore, TwoRunsMatchesGridSearch) {
    for (double P : {0.25, 0.255, 1.0 / std::sqrt(15.0), 0.27, 0.3, 1.0 / 3.0}) {
        EXPECT_NEAR(max_score(2, P), testing::grid_search_chsh_maxprob_two(P * P), 2e-3) << P;
    }
}

// The same capped program over p_k, handed to the simplex solver.
double lp_max_score(int N, double P) {
    LpBuilder builder;
    std::vector<int> vars;
    std::vector<LpBuilder::Term> norm;
    const double cap = std::pow(P, N);
    for (int k = 0; k <= N; k++) {
        const double n_k = to_double(class_size(N, k));
        // Variables are the class totals n_k p_k.
        vars.push_back(builder.add_variable(-8.0 * k / N));
        norm.push_back({vars.back(), 1.0});
        builder.add_constraint({{vars.back(), 1.0}}, Sense::less_equal, cap * n_k);
    }
    builder.add_constraint(norm, Sense::equal, 1.0);
    auto solution = solve(builder.build());
    EXPECT_EQ(solution.status, LpStatus::optimal);
    return -solution.objective - 4.0;
}

TEST(MaxScore, AgreesWithLinearProgram) {
    for (int N : {1, 2, 4, 9, 30}) {
        for (int i = 0; i <= 20; i++) {
            const double P = 0.25 + (1.0 / 3.0 - 0.25) * i / 20.0;
            EXPECT_NEAR(max_score(N, P), lp_max_score(N, P), 1e-9) << N << " " << P;
        }
    }
}

TEST(MaxScore, ProfileIsNormalizedAndCapped) {
    for (int N : {1, 2, 7, 50, 500, 10000}) {
        for (double P : {0.25, 0.26, 0.29, 0.33, 1.0 / 3.0}) {
            auto profile = optimal_profile(N, P);
            EXPECT_TRUE(profile.is_normalized(1e-9)) << N << " " << P;
            EXPECT_LE(md_from_profile(profile, MdKind::MaxProb).value, P * (1.0 + 1e-9));
            EXPECT_NEAR(score_from_profile(profile), max_score(N, P), 1e-9);
        }
    }
}

TEST(MaxScore, MultiplesOfNDoNoWorse) {
    // q independent copies of an N-run profile are a valid qN-run profile.
    const std::vector<std::vector<int>> chains = {{1, 2, 4, 8, 16, 64}, {1, 3, 6, 12, 36}, {1, 5, 10, 50, 100}};
    for (const auto &chain : chains) {
        for (int i = 0; i <= 100; i++) {
            const double P = 0.25 + (1.0 / 3.0 - 0.25) * i / 100.0;
            for (std::size_t j = 1; j < chain.size(); j++) {
                EXPECT_GE(max_score(chain[j], P), max_score(chain[j - 1], P) - 1e-12) << P << " " << chain[j];
            }
        }
    }
}

TEST(MaxScore, NotMonotoneAcrossAllN) {
    // Between N = 2 and N = 3 the order flips just above P = 15^-1/2:
    // N = 2 sits on its first breakpoint, N = 3 interpolates between
    // (63^-1/3, 44/21) and (54^-1/3, 8/3) linearly in P^3.
    const double P = 0.2583;
    const double cube = P * P * P;
    const double t = (cube - 1.0 / 63.0) / (1.0 / 54.0 - 1.0 / 63.0);
    const double three = 44.0 / 21.0 + t * (8.0 / 3.0 - 44.0 / 21.0);
    const double square = P * P;
    const double two = 2.4 + (square - 1.0 / 15.0) / (1.0 / 9.0 - 1.0 / 15.0) * (4.0 - 2.4);
    EXPECT_NEAR(max_score(3, P), three, 1e-12);
    EXPECT_NEAR(max_score(2, P), two, 1e-12);
    EXPECT_LT(three, two);
}

TEST(MaxScore, NonDecreasingInP) {
    for (int N : {1, 2, 3, 5, 10, 20, 50, 200}) {
        double previous = 2.0;
        for (int i = 0; i <= 100; i++) {
            const double P = 0.25 + (1.0 / 3.0 - 0.25) * i / 100.0;
            const double S = max_score(N, P);
            EXPECT_GE(S, previous - 1e-12);
            previous = S;
        }
    }
}

TEST(MaxScore, DominatedByAsymptote) {
    for (int N : {1, 2, 5, 10, 50, 1000}) {
        for (int i = 0; i <= 100; i++) {
            const double P = 0.25 + (1.0 / 3.0 - 0.25) * i / 100.0;
            EXPECT_LE(max_score(N, P), asymptotic_score(P) + 1e-9) << N << " " << P;
        }
    }
}

TEST(Asymptote, LandmarksAndEndpoints) {
    EXPECT_DOUBLE_EQ(asymptotic_bound_P(2.0), 0.25);
    EXPECT_DOUBLE_EQ(asymptotic_bound_P(4.0), 1.0 / 3.0);
    const double p_inf = asymptotic_bound_P(2.0 * kSqrt2);
    EXPECT_GT(p_inf, 0.2575);
    EXPECT_LT(p_inf, 0.2590);
    // Single shot reaches 2 sqrt 2 at P = (2 sqrt 2 + 4) / 24.
    EXPECT_NEAR((2.0 * kSqrt2 + 4.0) / 24.0, 0.2845, 5e-4);
}

TEST(Asymptote, ParametricFormMatchesBound) {
    for (int i = 0; i <= 50; i++) {
        const double l = 0.75 + 0.25 * i / 50.0;
        auto point = asymptotic_parametric(l);
        EXPECT_NEAR(point.S, 8.0 * l - 4.0, 1e-15);
        EXPECT_NEAR(point.P, asymptotic_bound_P(point.S), 1e-13) << l;
    }
}

TEST(Asymptote, BisectionInvertsBound) {
    for (int i = 0; i <= 100; i++) {
        const double P = 0.25 + (1.0 / 3.0 - 0.25) * i / 100.0;
        EXPECT_NEAR(asymptotic_bound_P(asymptotic_score(P)), P, 1e-12) << P;
    }
    // The bound is flat at S = 2, so S itself is only recoverable away from it.
    for (int i = 10; i <= 100; i++) {
        const double S = 2.0 + 2.0 * i / 100.0;
        EXPECT_NEAR(asymptotic_score(asymptotic_bound_P(S)), S, 1e-9) << S;
    }
    EXPECT_DOUBLE_EQ(asymptotic_score(0.5), 4.0);
}

TEST(Asymptote, LargeNApproachesBound) {
    // The finite-N curve creeps up to the limit; at N = 10^4 the gap is small.
    for (double P : {0.26, 0.28, 0.3}) {
        const double gap = asymptotic_score(P) - max_score(10000, P);
        EXPECT_GE(gap, -1e-9);
        EXPECT_LT(gap, 0.01) << P;
    }
}

TEST(WinProbability, Conversions) {
    EXPECT_DOUBLE_EQ(pwin_from_score(2.0), 0.75);
    EXPECT_DOUBLE_EQ(pwin_from_score(4.0), 1.0);
    EXPECT_DOUBLE_EQ(score_from_pwin(0.75), 2.0);
    for (double S : {2.0, 2.5, 3.0, 3.7, 4.0}) {
        EXPECT_NEAR(score_from_pwin(pwin_from_score(S)), S, 1e-15);
        EXPECT_NEAR(bound_pwin(pwin_from_score(S)), asymptotic_bound_P(S), 1e-13);
    }
}

}  // namespace
}  // namespace bellmd
