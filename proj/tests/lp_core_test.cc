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

#include "bellmd/lp_core.h"

#include <bit>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

namespace bellmd {
namespace {

LinearProgram make_lp(const std::vector<double> &c, const std::vector<std::vector<double>> &rows, const std::vector<double> &v) {
    LinearProgram lp;
    lp.c = c;
    lp.B = DenseMatrix(static_cast<int>(rows.size()), static_cast<int>(c.size()));
    for (std::size_t i = 0; i < rows.size(); i++) {
        for (std::size_t j = 0; j < c.size(); j++) {
            lp.B(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
        }
    }
    lp.v = v;
    return lp;
}

Eigen::MatrixXd to_eigen(const DenseMatrix &m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); i++) {
        for (int j = 0; j < m.cols(); j++) {
            out(i, j) = m(i, j);
        }
    }
    return out;
}

// Best objective over every basic feasible solution, or NaN if none exists.
double vertex_enumeration(const LinearProgram &lp) {
    const int r = lp.B.rows();
    const int n = lp.B.cols();
    Eigen::MatrixXd B = to_eigen(lp.B);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(lp.v.data(), r);
    double best = NAN;
    std::vector<int> pick(static_cast<std::size_t>(r));
    for (int mask = 0; mask < (1 << n); mask++) {
        if (std::popcount(static_cast<unsigned>(mask)) != r) {
            continue;
        }
        Eigen::MatrixXd sub(r, r);
        int col = 0;
        for (int j = 0; j < n; j++) {
            if (mask >> j & 1) {
                sub.col(col) = B.col(j);
                pick[static_cast<std::size_t>(col++)] = j;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (lu.rank() < r) {
            continue;
        }
        Eigen::VectorXd zb = lu.solve(v);
        if (zb.minCoeff() < -1e-9) {
            continue;
        }
        double objective = 0.0;
        for (int i = 0; i < r; i++) {
            objective += lp.c[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])] * zb(i);
        }
        if (std::isnan(best) || objective < best) {
            best = objective;
        }
    }
    return best;
}

// Bounded feasible program: row 0 has strictly positive entries and v comes
// from a non-negative point.
LinearProgram random_bounded_lp(int r, int n, std::mt19937_64 &gen) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> positive(0.1, 1.0);
    std::vector<double> c(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<double> z0(static_cast<std::size_t>(n));
    for (int j = 0; j < n; j++) {
        c[static_cast<std::size_t>(j)] = coef(gen);
        z0[static_cast<std::size_t>(j)] = positive(gen);
        rows[0][static_cast<std::size_t>(j)] = positive(gen);
        for (int i = 1; i < r; i++) {
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = coef(gen);
        }
    }
    std::vector<double> v(static_cast<std::size_t>(r), 0.0);
    for (int i = 0; i < r; i++) {
        for (int j = 0; j < n; j++) {
            v[static_cast<std::size_t>(i)] += rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * z0[static_cast<std::size_t>(j)];
        }
    }
    return make_lp(c, rows, v);
}

TEST(Simplex, SmallExample) {
    // min -x - y, x + 2y + s1 = 4, 3x + y + s2 = 6: optimum at (8/5, 6/5).
    auto lp = make_lp({-1, -1, 0, 0}, {{1, 2, 1, 0}, {3, 1, 0, 1}}, {4, 6});
    auto solution = solve(lp);
    ASSERT_EQ(solution.status, LpStatus::optimal);
    EXPECT_NEAR(solution.objective, -14.0 / 5.0, 1e-12);
    EXPECT_NEAR(solution.z[0], 8.0 / 5.0, 1e-12);
    EXPECT_NEAR(solution.z[1], 6.0 / 5.0, 1e-12);
    EXPECT_LE(residual_inf_norm(lp, solution.z), 1e-12);
}

TEST(Simplex, Infeasible) {
    auto lp = make_lp({1, 1}, {{1, 1}}, {-1});
    EXPECT_EQ(solve(lp).status, LpStatus::infeasible);
    auto lp2 = make_lp({0, 0}, {{1, 1}, {1, 1}}, {1, 2});
    EXPECT_EQ(solve(lp2).status, LpStatus::infeasible);
}

TEST(Simplex, Unbounded) {
    auto lp = make_lp({-1, 0}, {{1, -1}}, {0});
    EXPECT_EQ(solve(lp).status, LpStatus::unbounded);
}

TEST(Simplex, RedundantRows) {
    auto lp = make_lp({1, 2, 3}, {{1, 1, 1}, {2, 2, 2}, {1, 0, 1}}, {1, 2, 0.5});
    auto solution = solve(lp);
    ASSERT_EQ(solution.status, LpStatus::optimal);
    EXPECT_NEAR(solution.objective, 0.5 * 1 + 0.5 * 2, 1e-12);
}

TEST(Simplex, DegenerateCycleCandidate) {
    // Beale's example, which cycles under the textbook largest-coefficient rule.
    auto lp = make_lp({-0.75, 150, -0.02, 6, 0, 0, 0},
                      {{0.25, -60, -0.04, 9, 1, 0, 0}, {0.5, -90, -0.02, 3, 0, 1, 0}, {0, 0, 1, 0, 0, 0, 1}},
                      {0, 0, 1});
    auto solution = solve(lp);
    ASSERT_EQ(solution.status, LpStatus::optimal);
    EXPECT_NEAR(solution.objective, -0.05, 1e-12);
}

TEST(Simplex, RandomProgramsMatchVertexEnumeration) {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 300; trial++) {
        const int r = 1 + static_cast<int>(gen() % 6);
        const int n = r + 1 + static_cast<int>(gen() % (12 - r));
        auto lp = random_bounded_lp(r, n, gen);
        auto solution = solve(lp);
        ASSERT_EQ(solution.status, LpStatus::optimal) << trial;
        const double best = vertex_enumeration(lp);
        EXPECT_NEAR(solution.objective, best, 1e-8) << trial << " r=" << r << " n=" << n;
        EXPECT_LE(residual_inf_norm(lp, solution.z), kFeasibilityTolerance);
        for (double z : solution.z) {
            EXPECT_GE(z, -kFeasibilityTolerance);
        }
    }
}

TEST(Simplex, StrongDualityAtNondegenerateOptima) {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> noise(0.0, 1e-3);
    auto base = random_bounded_lp(4, 9, gen);
    int checked = 0;
    for (int trial = 0; trial < 100; trial++) {
        LinearProgram lp = base;
        for (auto &c : lp.c) {
            c += noise(gen);
        }
        for (auto &v : lp.v) {
            v *= 1.0 + noise(gen);
        }
        auto solution = solve(lp);
        ASSERT_EQ(solution.status, LpStatus::optimal);
        std::vector<int> support;
        for (int j = 0; j < lp.B.cols(); j++) {
            if (solution.z[static_cast<std::size_t>(j)] > 1e-9) {
                support.push_back(j);
            }
        }
        if (static_cast<int>(support.size()) != lp.B.rows()) {
            continue;
        }
        Eigen::MatrixXd B = to_eigen(lp.B);
        Eigen::MatrixXd basis(B.rows(), B.rows());
        Eigen::VectorXd cb(B.rows());
        for (std::size_t i = 0; i < support.size(); i++) {
            basis.col(static_cast<int>(i)) = B.col(support[i]);
            cb(static_cast<int>(i)) = lp.c[static_cast<std::size_t>(support[i])];
        }
        Eigen::VectorXd y = basis.transpose().fullPivLu().solve(cb);
        Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(lp.c.data(), B.cols());
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(lp.v.data(), B.rows());
        Eigen::VectorXd reduced = c - B.transpose() * y;
        EXPECT_GE(reduced.minCoeff(), -1e-8) << trial;
        EXPECT_NEAR(v.dot(y), solution.objective, 1e-8) << trial;
        checked++;
    }
    EXPECT_GE(checked, 90);
}

TEST(Simplex, Deterministic) {
    std::mt19937_64 gen(99);
    auto lp = random_bounded_lp(5, 11, gen);
    auto first = solve(lp);
    auto second = solve(lp);
    EXPECT_EQ(first.z, second.z);
    EXPECT_EQ(first.objective, second.objective);
    EXPECT_EQ(first.iterations, second.iterations);
}

TEST(Simplex, RejectsBadDimensions) {
    LinearProgram lp = make_lp({1, 2}, {{1, 1}}, {1});
    lp.c.push_back(3);
    EXPECT_THROW(solve(lp), LpError);
    LinearProgram lp2 = make_lp({1, 2}, {{1, 1}}, {1});
    lp2.v.push_back(1);
    EXPECT_THROW(solve(lp2), LpError);
    LinearProgram lp3 = make_lp({1, NAN}, {{1, 1}}, {1});
    EXPECT_THROW(solve(lp3), LpError);
    LinearProgram huge;
    huge.B = DenseMatrix(1001, 1000);
    huge.c.assign(1000, 0.0);
    huge.v.assign(1001, 0.0);
    EXPECT_THROW(solve(huge), LpError);
}

TEST(Dump, RoundTrip) {
    std::mt19937_64 gen(1);
    auto lp = random_bounded_lp(3, 7, gen);
    std::stringstream buffer;
    write_dump(buffer, lp);
    std::string header;
    std::getline(buffer, header);
    EXPECT_EQ(header, "4 8");
    buffer.seekg(0);
    EXPECT_EQ(read_dump(buffer), lp);
}

TEST(Dump, RejectsTruncatedInput) {
    std::stringstream buffer("2 3\n1 2 0\n");
    EXPECT_THROW(read_dump(buffer), LpError);
}

TEST(Builder, InequalitiesGetSlacks) {
    LpBuilder builder;
    int x = builder.add_variable(-1.0);
    int y = builder.add_variable(-1.0);
    builder.add_constraint({{x, 1.0}, {y, 2.0}}, Sense::less_equal, 4.0);
    builder.add_constraint({{x, 3.0}, {y, 1.0}}, Sense::less_equal, 6.0);
    builder.add_constraint({{x, 1.0}}, Sense::greater_equal, 0.5);
    auto lp = builder.build();
    EXPECT_EQ(lp.B.cols(), 5);
    EXPECT_EQ(lp.B.rows(), 3);
    auto solution = solve(lp);
    ASSERT_EQ(solution.status, LpStatus::optimal);
    EXPECT_NEAR(solution.objective, -14.0 / 5.0, 1e-12);
}

TEST(Status, Names) {
    EXPECT_EQ(to_string(LpStatus::optimal), "optimal");
    EXPECT_EQ(to_string(LpStatus::infeasible), "infeasible");
    EXPECT_EQ(to_string(LpStatus::unbounded), "unbounded");
}

}  // namespace
}  // namespace bellmd
