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

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace bellmd {

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal:
            return "optimal";
        case LpStatus::infeasible:
            return "infeasible";
        case LpStatus::unbounded:
            return "unbounded";
    }
    return "unknown";
}

void LinearProgram::validate() const {
    if (static_cast<int>(c.size()) != B.cols()) {
        throw LpError(
            "LinearProgram: objective has " + std::to_string(c.size()) + " entries but B has " +
            std::to_string(B.cols()) + " columns");
    }
    if (static_cast<int>(v.size()) != B.rows()) {
        throw LpError(
            "LinearProgram: right-hand side has " + std::to_string(v.size()) + " entries but B has " +
            std::to_string(B.rows()) + " rows");
    }
    auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(c.begin(), c.end(), finite) || !std::all_of(v.begin(), v.end(), finite) ||
        !std::all_of(B.data().begin(), B.data().end(), finite)) {
        throw LpError("LinearProgram: non-finite entry");
    }
}

double residual_inf_norm(const LinearProgram &lp, const std::vector<double> &z) {
    double worst = 0.0;
    for (int i = 0; i < lp.B.rows(); i++) {
        double row = -lp.v[static_cast<std::size_t>(i)];
        for (int j = 0; j < lp.B.cols(); j++) {
            row += lp.B(i, j) * z[static_cast<std::size_t>(j)];
        }
        worst = std::max(worst, std::abs(row));
    }
    return worst;
}

namespace {

class Tableau {
   public:
    // Columns: structural [0, n), artificial [n, n + r), rhs last.
    Tableau(const LinearProgram &lp)
        : rows_(lp.B.rows()), structural_(lp.B.cols()), width_(structural_ + rows_ + 1),
          cells_(static_cast<std::size_t>(rows_ + 1) * static_cast<std::size_t>(width_), 0.0),
          basis_(static_cast<std::size_t>(rows_), -1) {
        for (int i = 0; i < rows_; i++) {
            double sign = lp.v[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
            for (int j = 0; j < structural_; j++) {
                at(i, j) = sign * lp.B(i, j);
            }
            at(i, structural_ + i) = 1.0;
            at(i, rhs()) = sign * lp.v[static_cast<std::size_t>(i)];
        }
        // A structural unit column can start in the basis instead of an
        // artificial.
        for (int j = 0; j < structural_; j++) {
            int hit = -1;
            bool unit = true;
            for (int i = 0; i < rows_ && unit; i++) {
                double value = at(i, j);
                if (value == 0.0) {
                    continue;
                }
                if (value == 1.0 && hit == -1) {
                    hit = i;
                } else {
                    unit = false;
                }
            }
            if (unit && hit != -1 && basis_[static_cast<std::size_t>(hit)] == -1) {
                basis_[static_cast<std::size_t>(hit)] = j;
            }
        }
        for (int i = 0; i < rows_; i++) {
            if (basis_[static_cast<std::size_t>(i)] == -1) {
                basis_[static_cast<std::size_t>(i)] = structural_ + i;
            }
        }
    }

    int rows() const { return rows_; }
    int structural() const { return structural_; }
    int rhs() const { return width_ - 1; }
    int objective_row() const { return rows_; }
    double &at(int i, int j) {
        return cells_[static_cast<std::size_t>(i) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(j)];
    }
    int basis(int i) const { return basis_[static_cast<std::size_t>(i)]; }
    bool is_artificial(int j) const { return j >= structural_ && j < structural_ + rows_; }

    // Objective row holds reduced costs d_j and -objective in the rhs cell.
    void load_objective(const std::vector<double> &costs) {
        const int obj = objective_row();
        for (int j = 0; j < width_; j++) {
            at(obj, j) = j < rhs() ? costs[static_cast<std::size_t>(j)] : 0.0;
        }
        for (int i = 0; i < rows_; i++) {
            double cb = costs[static_cast<std::size_t>(basis(i))];
            if (cb == 0.0) {
                continue;
            }
            for (int j = 0; j < width_; j++) {
                at(obj, j) -= cb * at(i, j);
            }
        }
    }

    void pivot(int row, int col) {
        const double inv = 1.0 / at(row, col);
        for (int j = 0; j < width_; j++) {
            at(row, j) *= inv;
        }
        at(row, col) = 1.0;
        for (int i = 0; i <= rows_; i++) {
            if (i == row) {
                continue;
            }
            const double factor = at(i, col);
            if (factor == 0.0) {
                continue;
            }
            double *target = &at(i, 0);
            const double *source = &at(row, 0);
            for (int j = 0; j < width_; j++) {
                target[j] -= factor * source[j];
            }
            at(i, col) = 0.0;
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    // Runs Bland's rule until optimal. Returns false if unbounded.
    bool optimize(bool allow_artificial, int &iterations, int iteration_limit) {
        const int obj = objective_row();
        while (true) {
            int entering = -1;
            for (int j = 0; j < rhs(); j++) {
                if (!allow_artificial && is_artificial(j)) {
                    continue;
                }
                if (at(obj, j) < -kPivotTolerance) {
                    entering = j;
                    break;
                }
            }
            if (entering == -1) {
                return true;
            }
            int leaving = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rows_; i++) {
                double a = at(i, entering);
                if (a <= kPivotTolerance) {
                    continue;
                }
                double ratio = std::max(0.0, at(i, rhs())) / a;
                const double tie = 1e-12 * (1.0 + std::abs(best_ratio));
                if (leaving == -1 || ratio < best_ratio - tie) {
                    leaving = i;
                    best_ratio = ratio;
                } else if (ratio <= best_ratio + tie && basis(i) < basis(leaving)) {
                    leaving = i;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
            if (leaving == -1) {
                return false;
            }
            pivot(leaving, entering);
            if (++iterations > iteration_limit) {
                throw LpError("simplex: iteration limit exceeded");
            }
        }
    }

    // Pivots zero-level artificials out of the basis where possible. Rows
    // with no usable structural entry are linearly redundant and stay put.
    void expel_artificials() {
        for (int i = 0; i < rows_; i++) {
            if (!is_artificial(basis(i))) {
                continue;
            }
            for (int j = 0; j < structural_; j++) {
                if (std::abs(at(i, j)) > kPivotTolerance) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    std::vector<double> structural_solution() {
        std::vector<double> z(static_cast<std::size_t>(structural_), 0.0);
        for (int i = 0; i < rows_; i++) {
            if (basis(i) < structural_) {
                z[static_cast<std::size_t>(basis(i))] = at(i, rhs());
            }
        }
        return z;
    }

   private:
    int rows_;
    int structural_;
    int width_;
    std::vector<double> cells_;
    std::vector<int> basis_;
};

double inf_norm(const std::vector<double> &values) {
    double out = 0.0;
    for (double x : values) {
        out = std::max(out, std::abs(x));
    }
    return out;
}

}  // namespace

LpSolution solve(const LinearProgram &lp) {
    lp.validate();
    const std::size_t entries = static_cast<std::size_t>(lp.B.rows()) * static_cast<std::size_t>(lp.B.cols());
    if (entries > kMaxLpEntries) {
        throw LpError("simplex: problem has " + std::to_string(entries) + " entries, limit is " +
                      std::to_string(kMaxLpEntries));
    }
    const int r = lp.B.rows();
    const int n = lp.B.cols();
    const double scale = 1.0 + inf_norm(lp.v);
    const int iteration_limit = 200 * (r + n) + 10'000;

    Tableau tableau(lp);
    LpSolution solution;

    std::vector<double> phase_one(static_cast<std::size_t>(n + r), 0.0);
    for (int i = 0; i < r; i++) {
        phase_one[static_cast<std::size_t>(n + i)] = 1.0;
    }
    tableau.load_objective(phase_one);
    tableau.optimize(true, solution.iterations, iteration_limit);
    const double infeasibility = -tableau.at(tableau.objective_row(), tableau.rhs());
    if (infeasibility > kFeasibilityTolerance * scale) {
        solution.status = LpStatus::infeasible;
        return solution;
    }
    tableau.expel_artificials();

    std::vector<double> phase_two(static_cast<std::size_t>(n + r), 0.0);
    std::copy(lp.c.begin(), lp.c.end(), phase_two.begin());
    tableau.load_objective(phase_two);
    if (!tableau.optimize(false, solution.iterations, iteration_limit)) {
        solution.status = LpStatus::unbounded;
        return solution;
    }

    solution.z = tableau.structural_solution();
    const double residual = residual_inf_norm(lp, solution.z);
    const double lowest = solution.z.empty() ? 0.0 : *std::min_element(solution.z.begin(), solution.z.end());
    if (residual > kFeasibilityTolerance * scale || lowest < -kFeasibilityTolerance) {
        std::ostringstream message;
        message << "simplex: numerically singular basis (residual " << residual << ", min z " << lowest << ")";
        throw LpError(message.str());
    }
    solution.status = LpStatus::optimal;
    solution.objective = 0.0;
    for (int j = 0; j < n; j++) {
        solution.objective += lp.c[static_cast<std::size_t>(j)] * solution.z[static_cast<std::size_t>(j)];
    }
    return solution;
}

void write_dump(std::ostream &out, const LinearProgram &lp) {
    lp.validate();
    const int rows = lp.B.rows() + 1;
    const int cols = lp.B.cols() + 1;
    auto old_precision = out.precision(17);
    out << rows << ' ' << cols << '\n';
    for (int j = 0; j < lp.B.cols(); j++) {
        out << lp.c[static_cast<std::size_t>(j)] << ' ';
    }
    out << 0 << '\n';
    for (int i = 0; i < lp.B.rows(); i++) {
        for (int j = 0; j < lp.B.cols(); j++) {
            out << lp.B(i, j) << ' ';
        }
        out << lp.v[static_cast<std::size_t>(i)] << '\n';
    }
    out.precision(old_precision);
}

LinearProgram read_dump(std::istream &in) {
    int rows = 0;
    int cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
        throw LpError("read_dump: bad header");
    }
    LinearProgram lp;
    lp.c.resize(static_cast<std::size_t>(cols - 1));
    lp.B = DenseMatrix(rows - 1, cols - 1);
    lp.v.resize(static_cast<std::size_t>(rows - 1));
    auto next = [&]() {
        double value = 0.0;
        if (!(in >> value)) {
            throw LpError("read_dump: truncated matrix");
        }
        return value;
    };
    for (int j = 0; j < cols - 1; j++) {
        lp.c[static_cast<std::size_t>(j)] = next();
    }
    next();
    for (int i = 0; i < rows - 1; i++) {
        for (int j = 0; j < cols - 1; j++) {
            lp.B(i, j) = next();
        }
        lp.v[static_cast<std::size_t>(i)] = next();
    }
    lp.validate();
    return lp;
}

int LpBuilder::add_variable(double cost) {
    costs_.push_back(cost);
    return static_cast<int>(costs_.size()) - 1;
}

void LpBuilder::add_constraint(const std::vector<Term> &terms, Sense sense, double rhs) {
    for (const auto &term : terms) {
        if (term.var < 0 || term.var >= variable_count()) {
            throw LpError("LpBuilder: constraint references unknown variable");
        }
    }
    rows_.push_back({terms, sense, rhs});
}

LinearProgram LpBuilder::build() const {
    int slacks = 0;
    for (const auto &row : rows_) {
        slacks += row.sense != Sense::equal;
    }
    const int n = variable_count();
    LinearProgram lp;
    lp.c = costs_;
    lp.c.resize(static_cast<std::size_t>(n + slacks), 0.0);
    lp.B = DenseMatrix(static_cast<int>(rows_.size()), n + slacks);
    lp.v.resize(rows_.size());
    int slack = n;
    for (std::size_t i = 0; i < rows_.size(); i++) {
        const auto &row = rows_[i];
        for (const auto &term : row.terms) {
            lp.B(static_cast<int>(i), term.var) += term.coef;
        }
        if (row.sense == Sense::less_equal) {
            lp.B(static_cast<int>(i), slack++) = 1.0;
        } else if (row.sense == Sense::greater_equal) {
            lp.B(static_cast<int>(i), slack++) = -1.0;
        }
        lp.v[i] = row.rhs;
    }
    return lp;
}

}  // namespace bellmd
