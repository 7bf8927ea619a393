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

#ifndef BELLMD_LP_CORE_H
#define BELLMD_LP_CORE_H

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellmd {

/// Row-major dense matrix.
class DenseMatrix {
   public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double &operator()(int i, int j) { return data_[index(i, j)]; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }
    const std::vector<double> &data() const { return data_; }

    bool operator==(const DenseMatrix &) const = default;

   private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// minimize c.z subject to B z = v, z >= 0.
struct LinearProgram {
    std::vector<double> c;
    DenseMatrix B;
    std::vector<double> v;

    /// Throws LpError on inconsistent dimensions or non-finite entries.
    void validate() const;

    bool operator==(const LinearProgram &) const = default;
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> z;
    double objective = 0.0;
    int iterations = 0;
};

class LpError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPivotTolerance = 1e-10;
inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr std::size_t kMaxLpEntries = 1'000'000;

/// Two-phase tableau simplex with Bland's rule. Deterministic: the same
/// program always yields bit-identical output. Throws LpError on bad
/// dimensions, oversize problems, or a final residual that fails the
/// feasibility tolerance (a numerically singular basis).
LpSolution solve(const LinearProgram &lp);

/// max |B z - v|.
double residual_inf_norm(const LinearProgram &lp, const std::vector<double> &z);

/// Plain-text dump: a line "rows cols" followed by `rows` lines of
/// `cols` entries. The first line holds c then 0; each later line holds a row
/// of B then its entry of v.
void write_dump(std::ostream &out, const LinearProgram &lp);
LinearProgram read_dump(std::istream &in);

enum class Sense { less_equal, equal, greater_equal };

/// Convenience front end accepting inequality rows; slack columns are
/// appended after the structural variables when building.
class LpBuilder {
   public:
    struct Term {
        int var;
        double coef;
    };

    int add_variable(double cost);
    void add_constraint(const std::vector<Term> &terms, Sense sense, double rhs);

    int variable_count() const { return static_cast<int>(costs_.size()); }
    LinearProgram build() const;

   private:
    struct Row {
        std::vector<Term> terms;
        Sense sense;
        double rhs;
    };
    std::vector<double> costs_;
    std::vector<Row> rows_;
};

}  // namespace bellmd

#endif
