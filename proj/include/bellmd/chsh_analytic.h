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

#ifndef BELLMD_CHSH_ANALYTIC_H
#define BELLMD_CHSH_ANALYTIC_H

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bellmd/bell_model.h"

namespace bellmd {

using BigRational = boost::multiprecision::cpp_rational;

/// A (measurement dependence, score) pair. `lprime` is the saturation index
/// for breakpoints and -1 for interpolated or asymptotic points.
struct CurvePoint {
    int N = 0;
    double P = 0.0;
    double S = 0.0;
    int lprime = -1;
};

struct BreakpointCurve {
    int N = 0;
    /// l' = 0..N, increasing in P.
    std::vector<CurvePoint> points;
};

inline constexpr int kMaxRuns = 10'000;
inline constexpr int kMaxExactRuns = 64;

/// 24P - 4 up to P = 1/3, then 4.
double single_shot_score(double P);

/// Vertices of the optimal N-run score curve under the MaxProb measure.
/// Evaluated in log domain; valid for 1 <= N <= 10^4.
BreakpointCurve breakpoints(int N);

struct ExactBreakpoint {
    int lprime = 0;
    /// sum_{k >= l'} C(N,k) 3^k, which equals P^-N.
    BigInt inverse_pn;
    BigRational S;
};

/// Exact rational breakpoints for N <= 64.
std::vector<ExactBreakpoint> breakpoints_exact(int N);

/// Saturate the top classes at P^N and put the remainder into the next class
/// down. P above 1/3 is treated as 1/3, since S = 4 is already reached there.
StrategyProfile optimal_profile(int N, double P);

/// Score of optimal_profile(N, P). Linear in P^N between breakpoints.
double max_score(int N, double P);

/// Lower bound on P needed to reach score S with arbitrarily long correlated
/// blocks; 0^0 is taken as 1 at S = 4.
double asymptotic_bound_P(double S);

/// Inverse of asymptotic_bound_P by bisection to 1e-12; 4 for P >= 1/3.
double asymptotic_score(double P);

/// The limit curve parametrized by the fraction l in [3/4, 1] of correct
/// answers: P = (l/3)^l (1-l)^(1-l), S = 8l - 4.
CurvePoint asymptotic_parametric(double l);

double pwin_from_score(double S);
double score_from_pwin(double p_win);
/// (p/3)^p (1-p)^(1-p).
double bound_pwin(double p_win);

}  // namespace bellmd

#endif
