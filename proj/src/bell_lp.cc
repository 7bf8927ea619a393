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

#include "bellmd/bell_lp.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "bellmd/parallel.h"
#include "json.hpp"

namespace bellmd {

namespace {

constexpr int kMaxChshRuns = 1000;
constexpr int kMaxImm22Runs = 100;
constexpr int kMaxUnscaledRuns = 60;

// n log(x) with 0 log 0 = 0.
double n_log(int n, double x) {
    if (n == 0) {
        return 0.0;
    }
    return x == 0.0 ? -INFINITY : n * std::log(x);
}

void check_budget(double M1) {
    if (!(M1 >= 0.0) || !std::isfinite(M1)) {
        throw std::out_of_range("M1 budget must be finite and non-negative, got " + std::to_string(M1));
    }
}

std::vector<double> clamped_weights(const std::vector<double> &z, std::size_t count) {
    std::vector<double> out(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(count));
    for (double &w : out) {
        w = std::max(0.0, w);
    }
    return out;
}

}  // namespace

double chsh_m1_max(int N) {
    if (N < 1) {
        throw std::out_of_range("chsh_m1_max: N must be positive");
    }
    return 2.0 * (1.0 - std::pow(0.75, N));
}

double imm22_m1_max(const PairCounts &counts, int m, int N) {
    if (N < 1) {
        throw std::out_of_range("imm22_m1_max: N must be positive");
    }
    const double no_wrong = static_cast<double>(counts.good + counts.unused) / (m * m);
    return 2.0 * (1.0 - std::pow(no_wrong, N));
}

ChshM1Program build_chsh_m1(int N, double M1) {
    if (N < 1 || N > kMaxChshRuns) {
        throw std::out_of_range("build_chsh_m1: N must be in [1, 1000], got " + std::to_string(N));
    }
    check_budget(M1);
    ChshM1Program program;
    program.N = N;
    program.M1 = M1;
    program.above_max = M1 > chsh_m1_max(N) + 1e-12;

    const int width = N + 1;
    auto log_binomials = log_binomial_row(N);
    const double log3 = std::log(3.0);
    const double log_uniform = -N * std::log(4.0);

    // Blocks: q = n p at [0, width), w' at [width, 2 width), a' then b'.
    LinearProgram &lp = program.lp;
    lp.c.assign(static_cast<std::size_t>(4 * width), 0.0);
    lp.B = DenseMatrix(2 * width + 2, 4 * width);
    lp.v.assign(static_cast<std::size_t>(2 * width + 2), 0.0);
    for (int k = 0; k <= N; k++) {
        lp.c[static_cast<std::size_t>(k)] = -static_cast<double>(k) / N;
        const double uniform_total = std::exp(log_binomials[static_cast<std::size_t>(k)] + k * log3 + log_uniform);
        lp.B(0, k) = 1.0;

        const int a_row = 1 + k;
        lp.B(a_row, k) = 1.0;
        lp.B(a_row, width + k) = -1.0;
        lp.B(a_row, 2 * width + k) = 1.0;
        lp.v[static_cast<std::size_t>(a_row)] = uniform_total;

        const int b_row = 1 + width + k;
        lp.B(b_row, k) = -1.0;
        lp.B(b_row, width + k) = -1.0;
        lp.B(b_row, 3 * width + k) = 1.0;
        lp.v[static_cast<std::size_t>(b_row)] = -uniform_total;

        lp.B(2 * width + 1, width + k) = 1.0;
    }
    lp.v[0] = 1.0;
    lp.v[static_cast<std::size_t>(2 * width + 1)] = M1;
    return program;
}

LinearProgram ChshM1Program::unscaled_form() const {
    if (N > kMaxUnscaledRuns) {
        throw std::out_of_range("unscaled_form: N must be at most 60");
    }
    const int width = N + 1;
    const double uniform = std::pow(0.25, N);
    LinearProgram out;
    out.c.assign(static_cast<std::size_t>(4 * width), 0.0);
    out.B = DenseMatrix(2 * width + 2, 4 * width);
    out.v.assign(static_cast<std::size_t>(2 * width + 2), 0.0);
    for (int k = 0; k <= N; k++) {
        const double n_k = to_double(class_size(N, k));
        // 3^k C(N-1, k-1) = n_k k / N exactly.
        const double s_k = to_double(class_size(N, k) * k / N);
        out.c[static_cast<std::size_t>(k)] = -s_k;
        out.B(0, k) = n_k;
        out.B(1 + k, k) = 1.0;
        out.B(1 + k, width + k) = -1.0;
        out.B(1 + k, 2 * width + k) = 1.0;
        out.v[static_cast<std::size_t>(1 + k)] = uniform;
        out.B(1 + width + k, k) = -1.0;
        out.B(1 + width + k, width + k) = -1.0;
        out.B(1 + width + k, 3 * width + k) = 1.0;
        out.v[static_cast<std::size_t>(1 + width + k)] = -uniform;
        out.B(2 * width + 1, width + k) = n_k;
    }
    out.v[0] = 1.0;
    out.v[static_cast<std::size_t>(2 * width + 1)] = M1;
    return out;
}

BellLpResult solve_chsh_m1(const ChshM1Program &program) {
    auto solution = solve(program.lp);
    BellLpResult result;
    result.status = solution.status;
    result.iterations = solution.iterations;
    if (solution.status == LpStatus::optimal) {
        result.S = -4.0 - 8.0 * solution.objective;
        result.weights = clamped_weights(solution.z, static_cast<std::size_t>(program.N + 1));
    }
    return result;
}

StrategyProfile profile_from_result(const ChshM1Program &program, const BellLpResult &result) {
    if (result.status != LpStatus::optimal) {
        throw std::invalid_argument("profile_from_result: program was not solved to optimality");
    }
    return StrategyProfile::from_weights(GameSpec::chsh(), PairCounts{3, 1, 0}, program.N, result.weights);
}

namespace {

template <typename Solve>
std::vector<LpCurvePoint> solve_grid(const std::string &game, int N, const std::vector<double> &grid, Solve &&solve_point) {
    std::vector<LpCurvePoint> points(grid.size());
    parallel_for(static_cast<int>(grid.size()), [&](int i) {
        const double budget = grid[static_cast<std::size_t>(i)];
        BellLpResult result = solve_point(budget);
        if (result.status != LpStatus::optimal) {
            throw LpError(game + " N=" + std::to_string(N) + " M1=" + std::to_string(budget) + ": " +
                          to_string(result.status));
        }
        points[static_cast<std::size_t>(i)] = {game, N, budget, result.S, to_string(result.status)};
    });
    return points;
}

}  // namespace

std::vector<LpCurvePoint> solve_chsh_m1_curve(int N, const std::vector<double> &grid) {
    return solve_grid("chsh", N, grid, [N](double budget) { return solve_chsh_m1(build_chsh_m1(N, budget)); });
}

Imm22Program build_imm22(int m, int N, double M1) {
    if (m < 2 || m > 3) {
        throw std::out_of_range("build_imm22: only m = 2 and m = 3 are supported, got " + std::to_string(m));
    }
    if (N < 1 || N > kMaxImm22Runs) {
        throw std::out_of_range("build_imm22: N must be in [1, 100], got " + std::to_string(N));
    }
    check_budget(M1);
    GameSpec game(m);
    OutcomeTable table = [&]() {
        try {
            return balanced_row_subset(derive_outcome_table(game));
        } catch (const std::logic_error &e) {
            throw ReductionError(
                "build_imm22: no optimal rows for " + game.name() +
                " answer every used pair equally often; the (k, l) reduction is invalid");
        }
    }();
    const int homogeneity = table.homogeneity_constant();
    PairCounts counts;
    try {
        counts = table.pair_counts();
    } catch (const std::logic_error &e) {
        throw ReductionError(std::string("build_imm22: ") + e.what());
    }
    Imm22Program program{
        .game = game,
        .N = N,
        .M1 = M1,
        .above_max = M1 > imm22_m1_max(counts, m, N) + 1e-12,
        .table = table,
        .counts = counts,
        .homogeneity = homogeneity,
        .labels = StrategyProfile::class_labels(counts, N),
        .lp = {},
    };

    const int width = static_cast<int>(program.labels.size());
    const double log_uniform = -N * std::log(static_cast<double>(game.pair_count()));
    // Fraction of rows answering any given used pair correctly.
    const double rho = static_cast<double>(homogeneity) / table.row_count();

    std::vector<int> bayes_levels;
    for (const auto &label : program.labels) {
        if (std::find(bayes_levels.begin(), bayes_levels.end(), label.l) == bayes_levels.end()) {
            bayes_levels.push_back(label.l);
        }
    }
    const int bayes_row0 = 1;
    const int a_row0 = bayes_row0 + static_cast<int>(bayes_levels.size());
    const int b_row0 = a_row0 + width;
    const int m_row = b_row0 + width;

    LinearProgram &lp = program.lp;
    lp.c.assign(static_cast<std::size_t>(4 * width), 0.0);
    lp.B = DenseMatrix(m_row + 1, 4 * width);
    lp.v.assign(static_cast<std::size_t>(m_row + 1), 0.0);
    lp.v[0] = 1.0;
    lp.v[static_cast<std::size_t>(m_row)] = M1;

    // p(y) for a settings string with l unused runs is
    //   sum_k C(N-l, k) rho^k (1-rho)^(N-l-k) p_{k,l},
    // which must equal the uniform value. Each row is rescaled by its largest
    // coefficient.
    for (std::size_t level = 0; level < bayes_levels.size(); level++) {
        const int l = bayes_levels[level];
        const int row = bayes_row0 + static_cast<int>(level);
        std::vector<std::pair<int, double>> log_coefs;
        double largest = -INFINITY;
        for (int c = 0; c < width; c++) {
            const auto &label = program.labels[static_cast<std::size_t>(c)];
            if (label.l != l) {
                continue;
            }
            const int k = label.k;
            double log_coef = log_binomial(N - l, k) + n_log(k, rho) + n_log(N - l - k, 1.0 - rho) -
                              log_class_count(counts, N, k, l);
            log_coefs.emplace_back(c, log_coef);
            largest = std::max(largest, log_coef);
        }
        for (auto [c, log_coef] : log_coefs) {
            lp.B(row, c) = std::exp(log_coef - largest);
        }
        lp.v[static_cast<std::size_t>(row)] = std::exp(log_uniform - largest);
    }

    for (int c = 0; c < width; c++) {
        const auto &label = program.labels[static_cast<std::size_t>(c)];
        const double uniform_total = std::exp(log_class_count(counts, N, label.k, label.l) + log_uniform);
        lp.c[static_cast<std::size_t>(c)] = -game.weight() * (2 * label.k + label.l - N) / N;
        lp.B(0, c) = 1.0;

        lp.B(a_row0 + c, c) = 1.0;
        lp.B(a_row0 + c, width + c) = -1.0;
        lp.B(a_row0 + c, 2 * width + c) = 1.0;
        lp.v[static_cast<std::size_t>(a_row0 + c)] = uniform_total;

        lp.B(b_row0 + c, c) = -1.0;
        lp.B(b_row0 + c, width + c) = -1.0;
        lp.B(b_row0 + c, 3 * width + c) = 1.0;
        lp.v[static_cast<std::size_t>(b_row0 + c)] = -uniform_total;

        lp.B(m_row, width + c) = 1.0;
    }
    return program;
}

BellLpResult solve_imm22(const Imm22Program &program) {
    auto solution = solve(program.lp);
    BellLpResult result;
    result.status = solution.status;
    result.iterations = solution.iterations;
    if (solution.status == LpStatus::optimal) {
        result.S = -solution.objective;
        result.weights = clamped_weights(solution.z, program.labels.size());
    }
    return result;
}

StrategyProfile profile_from_result(const Imm22Program &program, const BellLpResult &result) {
    if (result.status != LpStatus::optimal) {
        throw std::invalid_argument("profile_from_result: program was not solved to optimality");
    }
    return StrategyProfile::from_weights(program.game, program.counts, program.N, result.weights);
}

std::vector<LpCurvePoint> solve_imm22_curve(int m, int N, const std::vector<double> &grid) {
    return solve_grid(GameSpec(m).name(), N, grid, [m, N](double budget) {
        return solve_imm22(build_imm22(m, N, budget));
    });
}

StrategyProfile repeated_profile(const StrategyProfile &one_shot, int N) {
    if (one_shot.N() != 1) {
        throw std::invalid_argument("repeated_profile: expected a one-run profile");
    }
    auto log_member = [&](int k, int l) -> double {
        int index = one_shot.index_of(k, l);
        if (index < 0) {
            return -INFINITY;
        }
        const auto &c = one_shot.classes()[static_cast<std::size_t>(index)];
        return c.weight > 0.0 ? std::log(c.weight) - c.log_count : -INFINITY;
    };
    const double log_correct = log_member(1, 0);
    const double log_wrong = log_member(0, 0);
    const double log_unused = log_member(0, 1);
    auto term = [](int n, double log_mass) { return n == 0 ? 0.0 : n * log_mass; };

    const auto &counts = one_shot.counts();
    auto labels = StrategyProfile::class_labels(counts, N);
    std::vector<double> weights;
    weights.reserve(labels.size());
    for (auto label : labels) {
        const double log_mass =
            term(label.k, log_correct) + term(N - label.l - label.k, log_wrong) + term(label.l, log_unused);
        weights.push_back(std::exp(log_class_count(counts, N, label.k, label.l) + log_mass));
    }
    return StrategyProfile::from_weights(one_shot.game(), counts, N, weights);
}

std::vector<LpCurvePoint> repeated_one_shot_curve(int m, int N, const std::vector<double> &one_shot_grid) {
    const std::string game = GameSpec(m).name();
    std::vector<LpCurvePoint> points(one_shot_grid.size());
    parallel_for(static_cast<int>(one_shot_grid.size()), [&](int i) {
        const double budget = one_shot_grid[static_cast<std::size_t>(i)];
        StrategyProfile one_shot = [&]() {
            if (m == 2) {
                auto program = build_chsh_m1(1, budget);
                return profile_from_result(program, solve_chsh_m1(program));
            }
            auto program = build_imm22(m, 1, budget);
            return profile_from_result(program, solve_imm22(program));
        }();
        auto repeated = repeated_profile(one_shot, N);
        points[static_cast<std::size_t>(i)] = {
            game, N, md_from_profile(repeated, MdKind::L1).value, score_from_profile(repeated), "oneshot_repeated"};
    });
    return points;
}

OracleResult brute_force_oracle(const GameSpec &game, int N, MdMeasure measure) {
    OutcomeTable table = balanced_row_subset(derive_outcome_table(game));
    std::vector<double> weights(static_cast<std::size_t>(table.row_count()), 1.0 / table.row_count());
    return brute_force_oracle(table, weights, N, measure);
}

OracleResult brute_force_oracle(
    const OutcomeTable &table, const std::vector<double> &row_weights, int N, MdMeasure measure) {
    if (N < 1) {
        throw std::out_of_range("brute_force_oracle: N must be positive");
    }
    if (static_cast<int>(row_weights.size()) != table.row_count()) {
        throw std::invalid_argument("brute_force_oracle: need one weight per row");
    }
    const GameSpec &game = table.game();
    std::int64_t x_count = 1;
    std::int64_t y_count = 1;
    for (int n = 0; n < N; n++) {
        x_count *= table.row_count();
        y_count *= game.pair_count();
        if (x_count * y_count > kOracleLimit) {
            throw std::length_error("brute_force_oracle: (m^2)^N T^N exceeds 1e6");
        }
    }
    const int X = static_cast<int>(x_count);
    const int Y = static_cast<int>(y_count);
    const double uniform = std::pow(1.0 / game.pair_count(), N);
    const int m = game.m();
    std::vector<double> p_hidden(static_cast<std::size_t>(X), 1.0);
    for (int x = 0; x < X; x++) {
        for (int row : decode_string(x, table.row_count(), N)) {
            p_hidden[static_cast<std::size_t>(x)] *= row_weights[static_cast<std::size_t>(row)];
        }
    }

    LpBuilder builder;
    // p(y|x) at index x * Y + y; the objective is minus the score.
    for (int x = 0; x < X; x++) {
        auto xs = decode_string(x, table.row_count(), N);
        for (int y = 0; y < Y; y++) {
            auto ys = decode_string(y, game.pair_count(), N);
            int sum = 0;
            for (int n = 0; n < N; n++) {
                const auto &row = table.row(xs[static_cast<std::size_t>(n)]);
                const int j = ys[static_cast<std::size_t>(n)] / m;
                const int k = ys[static_cast<std::size_t>(n)] % m;
                sum += game.alpha(j, k) * row.a[static_cast<std::size_t>(j)] * row.b[static_cast<std::size_t>(k)];
            }
            builder.add_variable(-game.weight() * sum * p_hidden[static_cast<std::size_t>(x)] / N);
        }
    }
    auto p_index = [Y](int x, int y) { return x * Y + y; };
    for (int x = 0; x < X; x++) {
        std::vector<LpBuilder::Term> terms;
        for (int y = 0; y < Y; y++) {
            terms.push_back({p_index(x, y), 1.0});
        }
        builder.add_constraint(terms, Sense::equal, 1.0);
    }
    for (int y = 0; y < Y; y++) {
        std::vector<LpBuilder::Term> terms;
        for (int x = 0; x < X; x++) {
            terms.push_back({p_index(x, y), p_hidden[static_cast<std::size_t>(x)] / uniform});
        }
        builder.add_constraint(terms, Sense::equal, 1.0);
    }
    if (measure.kind == MdKind::MaxProb) {
        const double cap = std::pow(measure.value, N);
        for (int i = 0; i < X * Y; i++) {
            builder.add_constraint({{i, 1.0}}, Sense::less_equal, cap);
        }
    } else {
        // p - u = a - b, and sum over y of (a + b) bounds the deviation.
        std::vector<int> above(static_cast<std::size_t>(X * Y));
        std::vector<int> below(static_cast<std::size_t>(X * Y));
        for (int i = 0; i < X * Y; i++) {
            above[static_cast<std::size_t>(i)] = builder.add_variable(0.0);
            below[static_cast<std::size_t>(i)] = builder.add_variable(0.0);
            builder.add_constraint(
                {{i, 1.0}, {above[static_cast<std::size_t>(i)], -1.0}, {below[static_cast<std::size_t>(i)], 1.0}},
                Sense::equal, uniform);
        }
        for (int x = 0; x < X; x++) {
            std::vector<LpBuilder::Term> terms;
            for (int y = 0; y < Y; y++) {
                terms.push_back({above[static_cast<std::size_t>(p_index(x, y))], 1.0});
                terms.push_back({below[static_cast<std::size_t>(p_index(x, y))], 1.0});
            }
            builder.add_constraint(terms, Sense::less_equal, measure.value);
        }
    }

    auto solution = solve(builder.build());
    OracleResult result;
    result.status = solution.status;
    if (solution.status != LpStatus::optimal) {
        return result;
    }
    result.S = -solution.objective;
    result.conditional.N = N;
    result.conditional.x_count = X;
    result.conditional.y_count = Y;
    result.conditional.values.assign(solution.z.begin(), solution.z.begin() + static_cast<std::ptrdiff_t>(X) * Y);
    if (measure.kind == MdKind::MaxProb) {
        double largest = 0.0;
        for (double p : result.conditional.values) {
            largest = std::max(largest, p);
        }
        result.measure_value = std::pow(largest, 1.0 / N);
    } else {
        double worst = 0.0;
        for (int x = 0; x < X; x++) {
            double deviation = 0.0;
            for (int y = 0; y < Y; y++) {
                deviation += std::abs(result.conditional.at(x, y) - uniform);
            }
            worst = std::max(worst, deviation);
        }
        result.measure_value = worst;
    }
    return result;
}

void write_oracle_audit(std::ostream &out, const GameSpec &game, MdMeasure measure, const OracleResult &result) {
    nlohmann::json audit;
    audit["game"] = game.name();
    audit["N"] = result.conditional.N;
    audit["measure"] = {{"kind", to_string(measure.kind)}, {"budget", measure.value}};
    audit["status"] = to_string(result.status);
    audit["score"] = result.S;
    audit["measure_value"] = result.measure_value;
    auto rows = nlohmann::json::array();
    for (int x = 0; x < result.conditional.x_count; x++) {
        std::vector<double> row(
            result.conditional.values.begin() + static_cast<std::ptrdiff_t>(x) * result.conditional.y_count,
            result.conditional.values.begin() + static_cast<std::ptrdiff_t>(x + 1) * result.conditional.y_count);
        rows.push_back(row);
    }
    audit["conditional"] = std::move(rows);
    out << audit.dump(2) << '\n';
}

}  // namespace bellmd
