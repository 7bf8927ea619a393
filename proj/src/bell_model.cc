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

#include "bellmd/bell_model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace bellmd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// n * log(base) with 0 * log(0) = 0.
double n_log(int n, int base) {
    if (n == 0) {
        return 0.0;
    }
    if (base == 0) {
        return kNegInf;
    }
    return n * std::log(static_cast<double>(base));
}

BigInt big_pow(int base, int exponent) {
    BigInt result = 1;
    for (int i = 0; i < exponent; i++) {
        result *= base;
    }
    return result;
}

BigInt big_binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt result = 1;
    for (int i = 1; i <= k; i++) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

}  // namespace

GameSpec::GameSpec(int m) : m_(m) {
    if (m < 2) {
        throw std::invalid_argument("GameSpec: m must be at least 2, got " + std::to_string(m));
    }
}

int GameSpec::alpha(int j, int k) const {
    if (j < 0 || k < 0 || j >= m_ || k >= m_) {
        throw std::out_of_range("GameSpec::alpha: setting index out of range");
    }
    if (j + k < m_) {
        return 1;
    }
    if (j + k == m_) {
        return -1;
    }
    return 0;
}

int GameSpec::used_pair_count() const {
    int used = 0;
    for (int y = 0; y < pair_count(); y++) {
        used += is_used(y);
    }
    return used;
}

std::string GameSpec::name() const {
    if (m_ == 2) {
        return "chsh";
    }
    return "i" + std::to_string(m_) + std::to_string(m_) + "22";
}

GameSpec game_from_name(const std::string &name) {
    if (name == "chsh") {
        return GameSpec::chsh();
    }
    if (name.size() == 5 && name[0] == 'i' && name[1] == name[2] && name.substr(3) == "22" &&
        name[1] >= '2' && name[1] <= '9') {
        return GameSpec(name[1] - '0');
    }
    throw std::invalid_argument("unknown game '" + name + "' (expected chsh or i3322)");
}

std::uint32_t correct_mask_of(const GameSpec &game, std::span<const int> a, std::span<const int> b) {
    std::uint32_t mask = 0;
    for (int j = 0; j < game.m(); j++) {
        for (int k = 0; k < game.m(); k++) {
            int coefficient = game.alpha(j, k);
            if (coefficient != 0 && a[j] * b[k] == coefficient) {
                mask |= 1U << (j * game.m() + k);
            }
        }
    }
    return mask;
}

OutcomeTable::OutcomeTable(GameSpec game, std::vector<OutcomeRow> rows)
    : game_(game), rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw std::invalid_argument("OutcomeTable: no rows");
    }
    for (auto &row : rows_) {
        if (static_cast<int>(row.a.size()) != game_.m() || static_cast<int>(row.b.size()) != game_.m()) {
            throw std::invalid_argument("OutcomeTable: row has wrong number of outputs");
        }
        for (int v : row.a) {
            if (v != 1 && v != -1) {
                throw std::invalid_argument("OutcomeTable: outputs must be +1 or -1");
            }
        }
        for (int v : row.b) {
            if (v != 1 && v != -1) {
                throw std::invalid_argument("OutcomeTable: outputs must be +1 or -1");
            }
        }
        row.correct_mask = correct_mask_of(game_, row.a, row.b);
    }
}

PairCounts OutcomeTable::pair_counts() const {
    PairCounts counts;
    for (std::size_t x = 0; x < rows_.size(); x++) {
        PairCounts row_counts;
        for (int y = 0; y < game_.pair_count(); y++) {
            if (!game_.is_used(y)) {
                row_counts.unused++;
            } else if ((rows_[x].correct_mask >> y) & 1U) {
                row_counts.good++;
            } else {
                row_counts.bad++;
            }
        }
        if (x == 0) {
            counts = row_counts;
        } else if (!(row_counts == counts)) {
            throw std::logic_error("OutcomeTable: rows answer different numbers of pairs correctly");
        }
    }
    return counts;
}

int OutcomeTable::homogeneity_constant() const {
    int constant = -1;
    for (int y = 0; y < game_.pair_count(); y++) {
        if (!game_.is_used(y)) {
            continue;
        }
        int hits = 0;
        for (const auto &row : rows_) {
            hits += static_cast<int>((row.correct_mask >> y) & 1U);
        }
        if (constant == -1) {
            constant = hits;
        } else if (hits != constant) {
            return -1;
        }
    }
    return constant;
}

OutcomeTable chsh_outcome_table() {
    std::vector<OutcomeRow> rows{
        {{1, 1}, {1, 1}, 0},
        {{1, -1}, {1, 1}, 0},
        {{1, 1}, {1, -1}, 0},
        {{1, -1}, {-1, 1}, 0},
    };
    return OutcomeTable(GameSpec::chsh(), std::move(rows));
}

OutcomeTable derive_outcome_table(const GameSpec &game) {
    const int m = game.m();
    if (m > 4) {
        throw std::length_error(
            "derive_outcome_table: enumeration refused for m = " + std::to_string(m) + " (limit 4)");
    }
    const int free_bits = 2 * m - 1;
    std::vector<OutcomeRow> best;
    int best_count = -1;
    for (std::uint32_t bits = 0; bits < (1U << free_bits); bits++) {
        OutcomeRow row;
        row.a.assign(static_cast<std::size_t>(m), 1);
        row.b.assign(static_cast<std::size_t>(m), 1);
        // a_0 stays +1; remaining outputs come from the bits.
        for (int i = 0; i < free_bits; i++) {
            int value = ((bits >> i) & 1U) ? -1 : 1;
            if (i < m - 1) {
                row.a[static_cast<std::size_t>(i + 1)] = value;
            } else {
                row.b[static_cast<std::size_t>(i - (m - 1))] = value;
            }
        }
        row.correct_mask = correct_mask_of(game, row.a, row.b);
        int count = std::popcount(row.correct_mask);
        if (count > best_count) {
            best_count = count;
            best.clear();
        }
        if (count == best_count) {
            best.push_back(std::move(row));
        }
    }
    std::uint32_t used_mask = 0;
    for (int y = 0; y < game.pair_count(); y++) {
        if (game.is_used(y)) {
            used_mask |= 1U << y;
        }
    }
    std::stable_sort(best.begin(), best.end(), [&](const OutcomeRow &lhs, const OutcomeRow &rhs) {
        return (used_mask & ~lhs.correct_mask) > (used_mask & ~rhs.correct_mask);
    });
    return OutcomeTable(game, std::move(best));
}

OutcomeTable balanced_row_subset(const OutcomeTable &table) {
    if (table.homogeneity_constant() > 0) {
        return table;
    }
    const int rows = table.row_count();
    if (rows > 20) {
        throw std::length_error("balanced_row_subset: too many rows to search");
    }
    for (int size = 1; size < rows; size++) {
        // Subsets of this size in lexicographic order of their index lists.
        std::vector<int> pick(static_cast<std::size_t>(size));
        for (int i = 0; i < size; i++) {
            pick[static_cast<std::size_t>(i)] = i;
        }
        while (true) {
            std::vector<OutcomeRow> subset;
            for (int x : pick) {
                subset.push_back(table.row(x));
            }
            OutcomeTable candidate(table.game(), std::move(subset));
            if (candidate.homogeneity_constant() > 0) {
                return candidate;
            }
            int i = size - 1;
            while (i >= 0 && pick[static_cast<std::size_t>(i)] == rows - size + i) {
                i--;
            }
            if (i < 0) {
                break;
            }
            pick[static_cast<std::size_t>(i)]++;
            for (int j = i + 1; j < size; j++) {
                pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
    }
    throw std::logic_error("balanced_row_subset: no row subset answers all used pairs equally often");
}

CorrectCount correct_count(std::span<const int> x, std::span<const int> y, const OutcomeTable &table) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("correct_count: hidden and settings strings differ in length");
    }
    const GameSpec &game = table.game();
    CorrectCount result;
    for (std::size_t n = 0; n < x.size(); n++) {
        if (x[n] < 0 || x[n] >= table.row_count() || y[n] < 0 || y[n] >= game.pair_count()) {
            throw std::out_of_range("correct_count: string entry out of range");
        }
        if (!game.is_used(y[n])) {
            result.l++;
        } else if (table.is_correct(x[n], y[n])) {
            result.k++;
        }
    }
    return result;
}

BigInt class_size(int N, int k) {
    if (N < 1 || k < 0 || k > N) {
        throw std::out_of_range("class_size: need 0 <= k <= N and N >= 1");
    }
    return big_binomial(N, k) * big_pow(3, k);
}

BigInt class_count(const PairCounts &counts, int N, int k, int l) {
    if (N < 1 || k < 0 || l < 0 || k + l > N) {
        throw std::out_of_range("class_count: need k, l >= 0 and k + l <= N");
    }
    return big_binomial(N, l) * big_binomial(N - l, k) * big_pow(counts.good, k) *
           big_pow(counts.bad, N - l - k) * big_pow(counts.unused, l);
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n) {
        return kNegInf;
    }
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::vector<double> log_binomial_row(int N) {
    std::vector<double> row(static_cast<std::size_t>(N + 1));
    long double acc = 0.0L;
    for (int k = 0; k <= N; k++) {
        row[static_cast<std::size_t>(k)] = static_cast<double>(acc);
        if (k < N) {
            acc += std::log(static_cast<long double>(N - k)) - std::log(static_cast<long double>(k + 1));
        }
    }
    return row;
}

double log_class_count(const PairCounts &counts, int N, int k, int l) {
    if (k < 0 || l < 0 || k + l > N) {
        return kNegInf;
    }
    return log_binomial(N, l) + log_binomial(N - l, k) + n_log(k, counts.good) +
           n_log(N - l - k, counts.bad) + n_log(l, counts.unused);
}

double to_double(const BigInt &value) { return value.convert_to<double>(); }

std::string to_string(MdKind kind) { return kind == MdKind::MaxProb ? "P" : "M1"; }

MdKind md_kind_from_string(const std::string &text) {
    if (text == "P" || text == "maxprob") {
        return MdKind::MaxProb;
    }
    if (text == "M1" || text == "l1") {
        return MdKind::L1;
    }
    throw std::invalid_argument("unknown measure '" + text + "' (expected P or M1)");
}

double ProfileClass::member_mass() const {
    if (weight <= 0.0) {
        return 0.0;
    }
    return std::exp(std::log(weight) - log_count);
}

double MdValue::raw() const {
    if (kind == MdKind::L1) {
        return value;
    }
    return std::exp(log_raw);
}

StrategyProfile::StrategyProfile(GameSpec game, PairCounts counts, int N, std::vector<ProfileClass> classes)
    : game_(game), counts_(counts), N_(N), classes_(std::move(classes)) {}

std::vector<CorrectCount> StrategyProfile::class_labels(const PairCounts &counts, int N) {
    // Zero pair counts empty whole rows of the (k, l) triangle; skip them
    // rather than test O(N^2) labels.
    std::vector<CorrectCount> labels;
    const int l_max = counts.unused > 0 ? N : 0;
    for (int l = 0; l <= l_max; l++) {
        const int k_lo = counts.bad > 0 ? 0 : N - l;
        const int k_hi = counts.good > 0 ? N - l : 0;
        for (int k = k_lo; k <= k_hi; k++) {
            labels.push_back({k, l});
        }
    }
    return labels;
}

StrategyProfile StrategyProfile::from_weights(
    const GameSpec &game, const PairCounts &counts, int N, std::span<const double> weights) {
    if (N < 1) {
        throw std::invalid_argument("StrategyProfile: N must be at least 1");
    }
    auto labels = class_labels(counts, N);
    if (labels.size() != weights.size()) {
        throw std::invalid_argument(
            "StrategyProfile: expected " + std::to_string(labels.size()) + " class weights, got " +
            std::to_string(weights.size()));
    }
    std::vector<ProfileClass> classes;
    classes.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); i++) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            throw std::invalid_argument("StrategyProfile: class masses must be finite and non-negative");
        }
        classes.push_back(
            {labels[i].k, labels[i].l, log_class_count(counts, N, labels[i].k, labels[i].l), weights[i]});
    }
    return StrategyProfile(game, counts, N, std::move(classes));
}

StrategyProfile StrategyProfile::from_member_masses(
    const GameSpec &game, const PairCounts &counts, int N, std::span<const double> masses) {
    auto labels = class_labels(counts, N);
    if (labels.size() != masses.size()) {
        throw std::invalid_argument(
            "StrategyProfile: expected " + std::to_string(labels.size()) + " member masses, got " +
            std::to_string(masses.size()));
    }
    std::vector<double> weights(masses.size());
    for (std::size_t i = 0; i < masses.size(); i++) {
        if (!(masses[i] >= 0.0)) {
            throw std::invalid_argument("StrategyProfile: class masses must be non-negative");
        }
        weights[i] = masses[i] == 0.0
                         ? 0.0
                         : std::exp(std::log(masses[i]) + log_class_count(counts, N, labels[i].k, labels[i].l));
    }
    return from_weights(game, counts, N, weights);
}

StrategyProfile StrategyProfile::chsh(int N, std::span<const double> member_masses) {
    return from_member_masses(GameSpec::chsh(), PairCounts{3, 1, 0}, N, member_masses);
}

StrategyProfile StrategyProfile::uniform(const GameSpec &game, const PairCounts &counts, int N) {
    auto labels = class_labels(counts, N);
    const double log_uniform = -N * std::log(static_cast<double>(game.pair_count()));
    std::vector<double> weights;
    weights.reserve(labels.size());
    for (auto label : labels) {
        weights.push_back(std::exp(log_class_count(counts, N, label.k, label.l) + log_uniform));
    }
    return from_weights(game, counts, N, weights);
}

int StrategyProfile::index_of(int k, int l) const {
    for (std::size_t i = 0; i < classes_.size(); i++) {
        if (classes_[i].k == k && classes_[i].l == l) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

double StrategyProfile::member_mass(int k, int l) const {
    int index = index_of(k, l);
    if (index < 0) {
        throw std::out_of_range("StrategyProfile: no class (" + std::to_string(k) + ", " + std::to_string(l) + ")");
    }
    return classes_[static_cast<std::size_t>(index)].member_mass();
}

double StrategyProfile::total_weight() const {
    double total = 0.0;
    for (const auto &c : classes_) {
        total += c.weight;
    }
    return total;
}

bool StrategyProfile::is_normalized(double tol) const { return std::abs(total_weight() - 1.0) <= tol; }

std::string StrategyProfile::to_json() const {
    nlohmann::json out;
    out["game"] = game_.name();
    out["N"] = N_;
    auto classes = nlohmann::json::array();
    for (const auto &c : classes_) {
        classes.push_back({{"k", c.k}, {"l", c.l}, {"mass", c.member_mass()}});
    }
    out["classes"] = std::move(classes);
    return out.dump(2);
}

StrategyProfile StrategyProfile::from_json(const std::string &text) {
    auto in = nlohmann::json::parse(text);
    GameSpec game = game_from_name(in.at("game").get<std::string>());
    int N = in.at("N").get<int>();
    PairCounts counts = game.m() == 2 ? PairCounts{3, 1, 0} : derive_outcome_table(game).pair_counts();
    auto labels = class_labels(counts, N);
    std::vector<double> masses(labels.size(), 0.0);
    for (const auto &entry : in.at("classes")) {
        CorrectCount label{entry.at("k").get<int>(), entry.value("l", 0)};
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) {
            throw std::invalid_argument("StrategyProfile::from_json: class label out of range");
        }
        masses[static_cast<std::size_t>(it - labels.begin())] = entry.at("mass").get<double>();
    }
    return from_member_masses(game, counts, N, masses);
}

double score_from_profile(const StrategyProfile &profile) {
    if (!profile.is_normalized()) {
        throw std::invalid_argument(
            "score_from_profile: profile is not normalized (total " + std::to_string(profile.total_weight()) + ")");
    }
    const int N = profile.N();
    double sum = 0.0;
    for (const auto &c : profile.classes()) {
        const int wrong = N - c.l - c.k;
        sum += c.weight * (c.k - wrong);
    }
    return profile.game().weight() * sum / N;
}

MdValue md_from_profile(const StrategyProfile &profile, MdKind kind) {
    MdValue result;
    result.kind = kind;
    const int N = profile.N();
    if (kind == MdKind::MaxProb) {
        double best = kNegInf;
        for (const auto &c : profile.classes()) {
            // A subnormal total has lost most of its digits, so its log is
            // unreliable; such classes carry no measurable mass.
            if (c.weight >= std::numeric_limits<double>::min()) {
                best = std::max(best, std::log(c.weight) - c.log_count);
            }
        }
        result.log_raw = best;
        result.value = std::exp(best / N);
        return result;
    }
    const double log_uniform = -N * std::log(static_cast<double>(profile.game().pair_count()));
    double total = 0.0;
    for (const auto &c : profile.classes()) {
        total += std::abs(c.weight - std::exp(c.log_count + log_uniform));
    }
    result.value = total;
    return result;
}

std::vector<int> decode_string(std::int64_t index, int base, int N) {
    std::vector<int> digits(static_cast<std::size_t>(N));
    for (int n = N - 1; n >= 0; n--) {
        digits[static_cast<std::size_t>(n)] = static_cast<int>(index % base);
        index /= base;
    }
    return digits;
}

namespace {

std::int64_t checked_power(int base, int N) {
    std::int64_t result = 1;
    for (int i = 0; i < N; i++) {
        result *= base;
        if (result > kExpandLimit) {
            return kExpandLimit + 1;
        }
    }
    return result;
}

}  // namespace

ConditionalTable expand_profile(const StrategyProfile &profile, const OutcomeTable &table) {
    if (!(profile.game() == table.game())) {
        throw std::invalid_argument("expand_profile: profile and table describe different games");
    }
    const int N = profile.N();
    const std::int64_t x_count = checked_power(table.row_count(), N);
    const std::int64_t y_count = checked_power(table.game().pair_count(), N);
    if (x_count > kExpandLimit || y_count > kExpandLimit || x_count * y_count > kExpandLimit) {
        throw std::length_error("expand_profile: conditional table exceeds 1e7 entries");
    }
    // Member mass lookup by (k, l).
    std::vector<double> mass(static_cast<std::size_t>((N + 1) * (N + 1)), 0.0);
    for (const auto &c : profile.classes()) {
        mass[static_cast<std::size_t>(c.l * (N + 1) + c.k)] = c.member_mass();
    }
    ConditionalTable out;
    out.N = N;
    out.x_count = static_cast<int>(x_count);
    out.y_count = static_cast<int>(y_count);
    out.values.resize(static_cast<std::size_t>(x_count * y_count));
    for (std::int64_t x = 0; x < x_count; x++) {
        auto xs = decode_string(x, table.row_count(), N);
        for (std::int64_t y = 0; y < y_count; y++) {
            auto ys = decode_string(y, table.game().pair_count(), N);
            auto kl = correct_count(xs, ys, table);
            out.values[static_cast<std::size_t>(x * y_count + y)] =
                mass[static_cast<std::size_t>(kl.l * (N + 1) + kl.k)];
        }
    }
    return out;
}

double score_from_table(const ConditionalTable &cond, const OutcomeTable &table) {
    const GameSpec &game = table.game();
    const int m = game.m();
    double total = 0.0;
    for (int x = 0; x < cond.x_count; x++) {
        auto xs = decode_string(x, table.row_count(), cond.N);
        for (int y = 0; y < cond.y_count; y++) {
            double p = cond.at(x, y);
            if (p == 0.0) {
                continue;
            }
            auto ys = decode_string(y, game.pair_count(), cond.N);
            int sum = 0;
            for (int n = 0; n < cond.N; n++) {
                const auto &row = table.row(xs[static_cast<std::size_t>(n)]);
                int j = ys[static_cast<std::size_t>(n)] / m;
                int k = ys[static_cast<std::size_t>(n)] % m;
                sum += game.alpha(j, k) * row.a[static_cast<std::size_t>(j)] * row.b[static_cast<std::size_t>(k)];
            }
            total += p * sum;
        }
    }
    return game.weight() * total / (cond.N * static_cast<double>(cond.x_count));
}

}  // namespace bellmd
