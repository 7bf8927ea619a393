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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bellmd {

namespace {

constexpr double kQuarter = 0.25;
constexpr double kThird = 1.0 / 3.0;
// Slack for grid endpoints that land a rounding error outside [1/4, 1].
constexpr double kDomainSlack = 1e-12;

void check_runs(int N) {
    if (N < 1 || N > kMaxRuns) {
        throw std::out_of_range("N must be in [1, " + std::to_string(kMaxRuns) + "], got " + std::to_string(N));
    }
}

double clamp_P(double P) {
    if (!(P >= kQuarter - kDomainSlack && P <= 1.0 + kDomainSlack)) {
        throw std::out_of_range("P must be in [1/4, 1], got " + std::to_string(P));
    }
    return std::clamp(P, kQuarter, kThird);
}

// x log x with 0 log 0 = 0.
double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

double log_add(double a, double b) {
    if (a < b) {
        std::swap(a, b);
    }
    if (b == -INFINITY) {
        return a;
    }
    return a + std::log1p(std::exp(b - a));
}

// log n_k = log C(N,k) + k log 3.
std::vector<double> log_class_sizes(int N) {
    auto row = log_binomial_row(N);
    const double log3 = std::log(3.0);
    for (int k = 0; k <= N; k++) {
        row[static_cast<std::size_t>(k)] += k * log3;
    }
    return row;
}

// Suffix sums over k >= j of n_k (index j = 0..N, entry N+1 is -inf).
std::vector<double> log_suffix(const std::vector<double> &log_terms) {
    std::vector<double> out(log_terms.size() + 1, -INFINITY);
    for (std::size_t j = log_terms.size(); j-- > 0;) {
        out[j] = log_add(out[j + 1], log_terms[j]);
    }
    return out;
}

// Class totals n_k p_k of the optimal profile.
std::vector<double> optimal_weights(int N, double P) {
    check_runs(N);
    P = clamp_P(P);
    auto log_n = log_class_sizes(N);
    auto log_total = log_suffix(log_n);
    const double log_pn = N * std::log(P);
    std::vector<double> weights(static_cast<std::size_t>(N + 1), 0.0);

    // Smallest l' whose saturated tail P^N * T(l') still fits in unit mass.
    // The slack tracks the rounding of log sums of size N log 4.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, -log_pn);
    int lprime = N + 1;
    for (int j = 0; j <= N; j++) {
        if (log_pn + log_total[static_cast<std::size_t>(j)] <= slack) {
            lprime = j;
            break;
        }
    }
    if (lprime == N + 1) {
        weights[static_cast<std::size_t>(N)] = 1.0;
        return weights;
    }
    double tail = 0.0;
    for (int k = lprime; k <= N; k++) {
        weights[static_cast<std::size_t>(k)] = std::exp(log_n[static_cast<std::size_t>(k)] + log_pn);
        tail += weights[static_cast<std::size_t>(k)];
    }
    if (lprime > 0) {
        const double cap = std::exp(log_n[static_cast<std::size_t>(lprime - 1)] + log_pn);
        weights[static_cast<std::size_t>(lprime - 1)] = std::clamp(1.0 - tail, 0.0, cap);
    }
    return weights;
}

}  // namespace

double single_shot_score(double P) {
    if (!(P >= kQuarter - kDomainSlack && P <= 1.0 + kDomainSlack)) {
        throw std::out_of_range("single_shot_score: P must be in [1/4, 1], got " + std::to_string(P));
    }
    return P <= kThird ? 24.0 * P - 4.0 : 4.0;
}

BreakpointCurve breakpoints(int N) {
    check_runs(N);
    auto log_n = log_class_sizes(N);
    std::vector<double> log_kn(log_n.size(), -INFINITY);
    for (int k = 1; k <= N; k++) {
        log_kn[static_cast<std::size_t>(k)] = log_n[static_cast<std::size_t>(k)] + std::log(static_cast<double>(k));
    }
    auto log_total = log_suffix(log_n);
    auto log_moment = log_suffix(log_kn);

    BreakpointCurve curve;
    curve.N = N;
    for (int lprime = 0; lprime <= N; lprime++) {
        const double lt = log_total[static_cast<std::size_t>(lprime)];
        CurvePoint point;
        point.N = N;
        point.lprime = lprime;
        point.P = std::exp(-lt / N);
        point.S = 8.0 / N * std::exp(log_moment[static_cast<std::size_t>(lprime)] - lt) - 4.0;
        curve.points.push_back(point);
    }
    // Endpoints are known exactly; pin them against rounding.
    curve.points.front().P = kQuarter;
    curve.points.front().S = 2.0;
    curve.points.back().P = kThird;
    curve.points.back().S = 4.0;
    return curve;
}

std::vector<ExactBreakpoint> breakpoints_exact(int N) {
    if (N < 1 || N > kMaxExactRuns) {
        throw std::out_of_range("breakpoints_exact: N must be in [1, 64], got " + std::to_string(N));
    }
    std::vector<ExactBreakpoint> out;
    for (int lprime = 0; lprime <= N; lprime++) {
        BigInt total = 0;
        BigInt moment = 0;
        for (int k = lprime; k <= N; k++) {
            BigInt n_k = class_size(N, k);
            total += n_k;
            moment += n_k * k;
        }
        BigRational S = BigRational(moment * 8, total * N) - 4;
        out.push_back({lprime, total, S});
    }
    return out;
}

StrategyProfile optimal_profile(int N, double P) {
    auto weights = optimal_weights(N, P);
    return StrategyProfile::from_weights(GameSpec::chsh(), PairCounts{3, 1, 0}, N, weights);
}

double max_score(int N, double P) {
    auto weights = optimal_weights(N, P);
    double moment = 0.0;
    for (int k = 0; k <= N; k++) {
        moment += k * weights[static_cast<std::size_t>(k)];
    }
    return 8.0 * moment / N - 4.0;
}

double asymptotic_bound_P(double S) {
    if (!(S >= 2.0 && S <= 4.0)) {
        throw std::out_of_range("asymptotic_bound_P: S must be in [2, 4], got " + std::to_string(S));
    }
    // With l = (4 + S) / 8 the bound is (l/3)^l (1-l)^(1-l), evaluated as
    // (l/3) (3(1-l)/l)^(1-l). Both endpoints then come out exact:
    // the base is 1 at S = 2, and std::pow(0, 0) == 1 at S = 4.
    const double l = (4.0 + S) / 8.0;
    return l / 3.0 * std::pow(3.0 * (1.0 - l) / l, 1.0 - l);
}

double asymptotic_score(double P) {
    if (!(P >= kQuarter - kDomainSlack && P <= 1.0 + kDomainSlack)) {
        throw std::out_of_range("asymptotic_score: P must be in [1/4, 1], got " + std::to_string(P));
    }
    if (P >= kThird) {
        return 4.0;
    }
    if (P <= kQuarter) {
        return 2.0;
    }
    double lo = 2.0;
    double hi = 4.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (asymptotic_bound_P(mid) < P) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CurvePoint asymptotic_parametric(double l) {
    if (!(l >= 0.75 && l <= 1.0)) {
        throw std::out_of_range("asymptotic_parametric: l must be in [3/4, 1], got " + std::to_string(l));
    }
    CurvePoint point;
    point.N = 0;
    point.P = std::exp(l * std::log(l / 3.0) + xlogx(1.0 - l));
    point.S = 8.0 * l - 4.0;
    return point;
}

double pwin_from_score(double S) {
    if (!(S >= 2.0 && S <= 4.0)) {
        throw std::out_of_range("pwin_from_score: S must be in [2, 4], got " + std::to_string(S));
    }
    return (1.0 + S / 4.0) / 2.0;
}

double score_from_pwin(double p_win) {
    if (!(p_win >= 0.75 && p_win <= 1.0)) {
        throw std::out_of_range("score_from_pwin: p_win must be in [3/4, 1], got " + std::to_string(p_win));
    }
    return 4.0 * (2.0 * p_win - 1.0);
}

double bound_pwin(double p_win) {
    if (!(p_win >= 0.75 && p_win <= 1.0)) {
        throw std::out_of_range("bound_pwin: p_win must be in [3/4, 1], got " + std::to_string(p_win));
    }
    return std::exp(p_win * std::log(p_win / 3.0) + xlogx(1.0 - p_win));
}

}  // namespace bellmd
