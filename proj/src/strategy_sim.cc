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

#include "bellmd/strategy_sim.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bellmd/parallel.h"
#include "json.hpp"

namespace bellmd {

namespace {

constexpr std::int64_t kChunk = 1 << 14;

// Pairs of each kind per row, and the cumulative class distribution.
class Sampler {
   public:
    Sampler(const StrategyProfile &profile, const OutcomeTable &table) : profile_(profile), table_(table) {
        if (!(profile.game() == table.game())) {
            throw std::invalid_argument("sample_block: profile and table describe different games");
        }
        if (!profile.is_normalized()) {
            throw std::invalid_argument("sample_block: profile is not normalized");
        }
        const GameSpec &game = table.game();
        for (int x = 0; x < table.row_count(); x++) {
            PairLists lists;
            for (int y = 0; y < game.pair_count(); y++) {
                if (!game.is_used(y)) {
                    lists.unused.push_back(y);
                } else if (table.is_correct(x, y)) {
                    lists.good.push_back(y);
                } else {
                    lists.bad.push_back(y);
                }
            }
            rows_.push_back(std::move(lists));
        }
        double running = 0.0;
        for (const auto &c : profile.classes()) {
            running += c.weight;
            cumulative_.push_back(running);
        }
        last_positive_ = 0;
        for (std::size_t i = 0; i < profile.classes().size(); i++) {
            if (profile.classes()[i].weight > 0.0) {
                last_positive_ = i;
            }
        }
    }

    void sample(RngState &rng, SampledBlock &block) {
        const int N = profile_.N();
        block.x.resize(static_cast<std::size_t>(N));
        block.y.resize(static_cast<std::size_t>(N));
        block.a.resize(static_cast<std::size_t>(N));
        block.b.resize(static_cast<std::size_t>(N));
        order_.resize(static_cast<std::size_t>(N));
        for (int n = 0; n < N; n++) {
            block.x[static_cast<std::size_t>(n)] = static_cast<int>(rng.below(static_cast<std::uint32_t>(table_.row_count())));
        }
        const double u = rng.uniform() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        std::size_t index = std::min(static_cast<std::size_t>(it - cumulative_.begin()), last_positive_);
        while (profile_.classes()[index].weight == 0.0 && index < last_positive_) {
            index++;
        }
        const auto &chosen = profile_.classes()[index];
        block.label = {chosen.k, chosen.l};

        // Uniform random arrangement: first l positions unused, next k correct.
        std::iota(order_.begin(), order_.end(), 0);
        for (int n = N - 1; n > 0; n--) {
            int swap_with = static_cast<int>(rng.below(static_cast<std::uint32_t>(n + 1)));
            std::swap(order_[static_cast<std::size_t>(n)], order_[static_cast<std::size_t>(swap_with)]);
        }
        for (int slot = 0; slot < N; slot++) {
            const int n = order_[static_cast<std::size_t>(slot)];
            const auto &lists = rows_[static_cast<std::size_t>(block.x[static_cast<std::size_t>(n)])];
            const std::vector<int> &pool = slot < chosen.l ? lists.unused : slot < chosen.l + chosen.k ? lists.good : lists.bad;
            block.y[static_cast<std::size_t>(n)] = pool[rng.below(static_cast<std::uint32_t>(pool.size()))];
        }
        block.sign = rng.below(2) == 0 ? 1 : -1;
        const int m = table_.game().m();
        for (int n = 0; n < N; n++) {
            const auto &row = table_.row(block.x[static_cast<std::size_t>(n)]);
            const int y = block.y[static_cast<std::size_t>(n)];
            block.a[static_cast<std::size_t>(n)] = block.sign * row.a[static_cast<std::size_t>(y / m)];
            block.b[static_cast<std::size_t>(n)] = block.sign * row.b[static_cast<std::size_t>(y % m)];
        }
    }

   private:
    struct PairLists {
        std::vector<int> good;
        std::vector<int> bad;
        std::vector<int> unused;
    };

    const StrategyProfile &profile_;
    const OutcomeTable &table_;
    std::vector<PairLists> rows_;
    std::vector<double> cumulative_;
    std::size_t last_positive_ = 0;
    std::vector<int> order_;
};

struct Partial {
    double score_sum = 0.0;
    double score_sq = 0.0;
    double alice_sum = 0.0;
    double alice_sq = 0.0;
    double bob_sum = 0.0;
    double bob_sq = 0.0;
    std::vector<std::int64_t> settings;  // N * m^2
    std::vector<std::int64_t> classes;

    void merge(const Partial &other) {
        score_sum += other.score_sum;
        score_sq += other.score_sq;
        alice_sum += other.alice_sum;
        alice_sq += other.alice_sq;
        bob_sum += other.bob_sum;
        bob_sq += other.bob_sq;
        for (std::size_t i = 0; i < settings.size(); i++) {
            settings[i] += other.settings[i];
        }
        for (std::size_t i = 0; i < classes.size(); i++) {
            classes[i] += other.classes[i];
        }
    }
};

// Sample standard error of a mean from its sum and sum of squares.
double std_error_of(double sum, double sq, std::int64_t count) {
    const double n = static_cast<double>(count);
    const double mean = sum / n;
    const double variance = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
    return std::sqrt(variance / n);
}

}  // namespace

SampledBlock sample_block(const StrategyProfile &profile, const OutcomeTable &table, RngState &rng) {
    Sampler sampler(profile, table);
    SampledBlock block;
    sampler.sample(rng, block);
    return block;
}

SimReport estimate(
    const StrategyProfile &profile, const OutcomeTable &table, std::int64_t trials, std::uint64_t seed, int threads) {
    if (trials < kMinTrials) {
        throw std::invalid_argument("estimate: need at least 1000 trials");
    }
    const GameSpec &game = table.game();
    const int N = profile.N();
    const int pairs = game.pair_count();
    const std::int64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<Partial> partials(static_cast<std::size_t>(chunks));
    // Validates the profile once up front.
    Sampler(profile, table);

    parallel_for(
        static_cast<int>(chunks),
        [&](int chunk) {
            Sampler sampler(profile, table);
            Partial &partial = partials[static_cast<std::size_t>(chunk)];
            partial.settings.assign(static_cast<std::size_t>(N * pairs), 0);
            partial.classes.assign(profile.classes().size(), 0);
            SampledBlock block;
            const std::int64_t begin = chunk * kChunk;
            const std::int64_t end = std::min(trials, begin + kChunk);
            for (std::int64_t i = begin; i < end; i++) {
                RngState rng(seed, static_cast<std::uint64_t>(i));
                sampler.sample(rng, block);
                int correlator_sum = 0;
                int alice = 0;
                int bob = 0;
                for (int n = 0; n < N; n++) {
                    const int y = block.y[static_cast<std::size_t>(n)];
                    correlator_sum += game.alpha(y) * block.a[static_cast<std::size_t>(n)] * block.b[static_cast<std::size_t>(n)];
                    alice += block.a[static_cast<std::size_t>(n)];
                    bob += block.b[static_cast<std::size_t>(n)];
                    partial.settings[static_cast<std::size_t>(n * pairs + y)]++;
                }
                const double score = game.weight() * correlator_sum / N;
                partial.score_sum += score;
                partial.score_sq += score * score;
                const double alice_mean = static_cast<double>(alice) / N;
                const double bob_mean = static_cast<double>(bob) / N;
                partial.alice_sum += alice_mean;
                partial.alice_sq += alice_mean * alice_mean;
                partial.bob_sum += bob_mean;
                partial.bob_sq += bob_mean * bob_mean;
                partial.classes[static_cast<std::size_t>(profile.index_of(block.label.k, block.label.l))]++;
            }
        },
        threads > 0 ? threads : thread_budget());

    Partial total = partials.front();
    for (std::size_t i = 1; i < partials.size(); i++) {
        total.merge(partials[i]);
    }

    SimReport report;
    report.trials = trials;
    report.seed = seed;
    report.N = N;
    report.pair_count = pairs;
    report.analytic_S = score_from_profile(profile);
    const double count = static_cast<double>(trials);
    report.empirical_S = total.score_sum / count;
    report.std_error = std_error_of(total.score_sum, total.score_sq, trials);
    report.alice_mean = total.alice_sum / count;
    report.alice_std_error = std_error_of(total.alice_sum, total.alice_sq, trials);
    report.bob_mean = total.bob_sum / count;
    report.bob_std_error = std_error_of(total.bob_sum, total.bob_sq, trials);
    const double target = 1.0 / pairs;
    report.marginal_sigma = std::sqrt(target * (1.0 - target) / count);
    report.marginals.assign(static_cast<std::size_t>(N), std::vector<double>(static_cast<std::size_t>(pairs)));
    for (int n = 0; n < N; n++) {
        for (int y = 0; y < pairs; y++) {
            report.marginals[static_cast<std::size_t>(n)][static_cast<std::size_t>(y)] =
                static_cast<double>(total.settings[static_cast<std::size_t>(n * pairs + y)]) / count;
        }
    }
    report.empirical_md = md_from_profile(profile, MdKind::MaxProb).value;
    for (auto hits : total.classes) {
        report.class_frequencies.push_back(static_cast<double>(hits) / count);
    }
    return report;
}

std::vector<std::string> failed_checks(const SimReport &report, double sigmas) {
    // Absolute slack for statistics that are exactly constant (zero spread).
    constexpr double kRounding = 1e-12;
    std::vector<std::string> failed;
    if (std::abs(report.empirical_S - report.analytic_S) > sigmas * report.std_error + kRounding) {
        failed.push_back("score");
    }
    const double target = 1.0 / report.pair_count;
    for (int n = 0; n < report.N; n++) {
        for (int y = 0; y < report.pair_count; y++) {
            const double f = report.marginals[static_cast<std::size_t>(n)][static_cast<std::size_t>(y)];
            if (std::abs(f - target) > sigmas * report.marginal_sigma) {
                failed.push_back("marginal[run=" + std::to_string(n) + ",y=" + std::to_string(y) + "]");
            }
        }
    }
    if (std::abs(report.alice_mean) > sigmas * report.alice_std_error + kRounding) {
        failed.push_back("alice_output_mean");
    }
    if (std::abs(report.bob_mean) > sigmas * report.bob_std_error + kRounding) {
        failed.push_back("bob_output_mean");
    }
    return failed;
}

std::string SimReport::to_json() const {
    nlohmann::json out;
    out["trials"] = trials;
    out["seed"] = seed;
    out["N"] = N;
    out["analytic_S"] = analytic_S;
    out["empirical_S"] = empirical_S;
    out["std_error"] = std_error;
    out["marginals"] = marginals;
    out["marginal_sigma"] = marginal_sigma;
    out["alice_mean"] = alice_mean;
    out["alice_std_error"] = alice_std_error;
    out["bob_mean"] = bob_mean;
    out["bob_std_error"] = bob_std_error;
    out["empirical_md"] = empirical_md;
    out["class_frequencies"] = class_frequencies;
    return out.dump(2);
}

std::string SimReport::summary() const {
    std::ostringstream out;
    out << std::setprecision(12);
    out << "trials        " << trials << "\n";
    out << "seed          " << seed << "\n";
    out << "N             " << N << "\n";
    out << "P (per run)   " << empirical_md << "\n";
    out << "S analytic    " << analytic_S << "\n";
    out << "S empirical   " << empirical_S << " +/- " << std_error << "\n";
    out << "alice mean    " << alice_mean << " +/- " << alice_std_error << "\n";
    out << "bob mean      " << bob_mean << " +/- " << bob_std_error << "\n";
    out << "marginals (sigma " << marginal_sigma << ")\n";
    for (int n = 0; n < N; n++) {
        out << "  run " << n << ":";
        for (double f : marginals[static_cast<std::size_t>(n)]) {
            out << ' ' << f;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace bellmd
