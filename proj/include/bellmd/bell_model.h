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

#ifndef BELLMD_BELL_MODEL_H
#define BELLMD_BELL_MODEL_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bellmd {

using BigInt = boost::multiprecision::cpp_int;

/// An I_mm22 Bell test: two parties, m settings each, outcomes +/-1.
///
/// The coefficient of settings pair (j, k) is +1 if j + k < m, -1 if
/// j + k == m and 0 otherwise. m == 2 is CHSH. Settings pairs are indexed
/// y = j * m + k, which for CHSH is the familiar y = 2j + k.
class GameSpec {
   public:
    explicit GameSpec(int m);

    static GameSpec chsh() { return GameSpec(2); }
    static GameSpec i3322() { return GameSpec(3); }

    int m() const { return m_; }
    int pair_count() const { return m_ * m_; }
    int alpha(int j, int k) const;
    int alpha(int y) const { return alpha(y / m_, y % m_); }
    bool is_used(int y) const { return alpha(y) != 0; }
    int used_pair_count() const;
    /// Score prefactor m^2.
    double weight() const { return static_cast<double>(m_ * m_); }
    /// "chsh", "i3322", or "i<m><m>22".
    std::string name() const;

    bool operator==(const GameSpec &) const = default;

   private:
    int m_;
};

/// Parses "chsh" or "i3322" (also "immNN22" style names).
GameSpec game_from_name(const std::string &name);

/// Per-row tallies of settings pairs by type. Identical for every row of a
/// valid OutcomeTable.
struct PairCounts {
    int good = 0;
    int bad = 0;
    int unused = 0;

    int total() const { return good + bad + unused; }
    bool operator==(const PairCounts &) const = default;
};

struct OutcomeRow {
    std::vector<int> a;  // a[j] in {+1, -1}
    std::vector<int> b;  // b[k] in {+1, -1}
    /// Bit y set when settings pair y is used and answered correctly.
    std::uint32_t correct_mask = 0;

    bool operator==(const OutcomeRow &) const = default;
};

/// Deterministic outcome assignments indexed by the hidden variable.
/// Conjugate (globally negated) rows are not stored.
class OutcomeTable {
   public:
    OutcomeTable(GameSpec game, std::vector<OutcomeRow> rows);

    const GameSpec &game() const { return game_; }
    const std::vector<OutcomeRow> &rows() const { return rows_; }
    int row_count() const { return static_cast<int>(rows_.size()); }
    const OutcomeRow &row(int x) const { return rows_.at(static_cast<std::size_t>(x)); }

    bool is_correct(int x, int y) const { return (row(x).correct_mask >> y) & 1U; }

    /// Counts of (correct used, wrong used, unused) pairs for one row; throws
    /// if rows disagree.
    PairCounts pair_counts() const;

    /// Number of rows answering used pair y correctly, if this number is the
    /// same for every used pair; -1 otherwise.
    int homogeneity_constant() const;

    bool operator==(const OutcomeTable &) const = default;

   private:
    GameSpec game_;
    std::vector<OutcomeRow> rows_;
};

/// Bitmask of used pairs answered correctly by the given outputs.
std::uint32_t correct_mask_of(const GameSpec &game, std::span<const int> a, std::span<const int> b);

/// The four CHSH rows x = 0..3 in their conventional order; row x answers
/// every pair correctly except y = 3 - x.
OutcomeTable chsh_outcome_table();

/// Brute-force search for every row (with a_0 = +1) maximizing the number of
/// correctly answered used pairs. Rows are ordered by descending wrong-pair
/// mask so that m = 2 reproduces chsh_outcome_table(). Throws
/// std::length_error for m > 4.
OutcomeTable derive_outcome_table(const GameSpec &game);

/// The rows of `table` over which a uniform hidden-variable distribution
/// answers every used pair correctly equally often. Returns the whole table
/// when it already has this property, otherwise the smallest such subset
/// (first in lexicographic order of row indices). Throws std::logic_error if
/// no subset qualifies.
OutcomeTable balanced_row_subset(const OutcomeTable &table);

struct CorrectCount {
    int k = 0;  // used pairs answered correctly
    int l = 0;  // unused pairs
    bool operator==(const CorrectCount &) const = default;
};

CorrectCount correct_count(
    std::span<const int> x, std::span<const int> y, const OutcomeTable &table);

/// C(N, k) * 3^k, the number of CHSH settings strings with exactly k correct
/// answers for any fixed hidden string.
BigInt class_size(int N, int k);

/// C(N, l) C(N-l, k) good^k bad^(N-l-k) unused^l.
BigInt class_count(const PairCounts &counts, int N, int k, int l);
/// Natural log of class_count; -inf for empty classes.
double log_class_count(const PairCounts &counts, int N, int k, int l);

double log_binomial(int n, int k);
/// log C(N, k) for k = 0..N, accumulated by the multiplicative recurrence.
std::vector<double> log_binomial_row(int N);

/// Converts an exact integer to double (may overflow to inf).
double to_double(const BigInt &value);

enum class MdKind { MaxProb, L1 };

struct MdMeasure {
    MdKind kind = MdKind::MaxProb;
    /// MaxProb: per-run P. L1: the M_1 value.
    double value = 0.0;
};

std::string to_string(MdKind kind);
MdKind md_kind_from_string(const std::string &text);

struct ProfileClass {
    int k = 0;
    int l = 0;
    double log_count = 0.0;
    /// Total probability mass of the class, count * member mass.
    double weight = 0.0;

    double member_mass() const;
};

/// Symmetry-reduced conditional settings distribution p(y|x) for a block of
/// N runs: every settings string in class (k, l) gets the same member mass.
///
/// Stores class totals rather than member masses. Member masses of large-N
/// profiles underflow a double while class totals never exceed 1.
class StrategyProfile {
   public:
    /// Builds from class totals. `weights` is indexed like classes(): l outer,
    /// k inner over every non-empty class.
    static StrategyProfile from_weights(
        const GameSpec &game, const PairCounts &counts, int N, std::span<const double> weights);
    static StrategyProfile from_member_masses(
        const GameSpec &game, const PairCounts &counts, int N, std::span<const double> masses);

    /// CHSH profile with member masses p_k, k = 0..N.
    static StrategyProfile chsh(int N, std::span<const double> member_masses);
    /// Every settings string equally likely.
    static StrategyProfile uniform(const GameSpec &game, const PairCounts &counts, int N);

    /// Non-empty classes (k, l) in canonical order.
    static std::vector<CorrectCount> class_labels(const PairCounts &counts, int N);

    const GameSpec &game() const { return game_; }
    const PairCounts &counts() const { return counts_; }
    int N() const { return N_; }
    const std::vector<ProfileClass> &classes() const { return classes_; }
    /// Index into classes() of label (k, l), or -1.
    int index_of(int k, int l) const;
    double member_mass(int k, int l) const;

    double total_weight() const;
    bool is_normalized(double tol = 1e-9) const;

    std::string to_json() const;
    static StrategyProfile from_json(const std::string &text);

   private:
    StrategyProfile(GameSpec game, PairCounts counts, int N, std::vector<ProfileClass> classes);

    GameSpec game_;
    PairCounts counts_;
    int N_;
    std::vector<ProfileClass> classes_;
};

/// Average Bell score per run, m^2 / N * sum over classes of
/// weight * (correct - wrong). Throws if the profile is not normalized.
double score_from_profile(const StrategyProfile &profile);

struct MdValue {
    MdKind kind = MdKind::MaxProb;
    /// MaxProb: per-run P = P_(N)^(1/N). L1: M_1.
    double value = 0.0;
    /// MaxProb only: log of the raw block maximum P_(N).
    double log_raw = 0.0;
    double raw() const;
};

/// MaxProb ignores classes whose total is subnormal: at that size the stored
/// total no longer determines the member mass.
MdValue md_from_profile(const StrategyProfile &profile, MdKind kind);

/// Dense p(y|x) over all hidden strings x (base row_count) and settings
/// strings y (base m^2). Run 0 is the most significant digit.
struct ConditionalTable {
    int N = 0;
    int x_count = 0;
    int y_count = 0;
    std::vector<double> values;  // row-major, x outer

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(x) * static_cast<std::size_t>(y_count) +
                      static_cast<std::size_t>(y)];
    }
};

/// Decodes string index `index` into N digits of the given base.
std::vector<int> decode_string(std::int64_t index, int base, int N);

inline constexpr std::int64_t kExpandLimit = 10'000'000;

ConditionalTable expand_profile(const StrategyProfile &profile, const OutcomeTable &table);

/// Score of a dense conditional table with uniform p(x), evaluated run by run.
double score_from_table(const ConditionalTable &cond, const OutcomeTable &table);

}  // namespace bellmd

#endif
