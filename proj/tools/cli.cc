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

#include "cli.h"

#include <CLI11.hpp>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellmd/bell_lp.h"
#include "bellmd/bell_model.h"
#include "bellmd/chsh_analytic.h"
#include "bellmd/lp_core.h"
#include "bellmd/quantum_adversary.h"
#include "bellmd/strategy_sim.h"

namespace bellmd::cli {

namespace {

// Thrown for bad flag combinations found after parsing.
class UsageError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

double parse_double(const std::string &text, const std::string &what) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception &) {
        throw UsageError("bad " + what + " '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(value)) {
        throw UsageError("bad " + what + " '" + text + "'");
    }
    return value;
}

void emit(const std::string &content, const std::string &path, std::ostream &out) {
    if (path.empty()) {
        out << content;
    } else {
        write_atomic(path, content);
    }
}

const double kThird = 1.0 / 3.0;

// ---- curve ----

struct CurveOptions {
    std::string game = "chsh";
    std::vector<int> runs = {1};
    std::string measure = "P";
    std::string grid = "0.25:0.333333333333333333:200";
    bool quantum = false;
    bool asymptote = false;
    bool breakpoints = false;
    bool landmarks = false;
    std::string out;
};

// P at which the N-run curve reaches 2 sqrt 2, by bisection on the
// non-decreasing max_score.
double p_at_tsirelson(int N) {
    const double target = 2.0 * std::sqrt(2.0);
    double lo = 0.25;
    double hi = kThird;
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        (max_score(N, mid) < target ? lo : hi) = mid;
    }
    return hi;
}

// Saturation index of the optimal profile at P: the first breakpoint at or
// beyond P.
int lprime_at(const BreakpointCurve &curve, double P) {
    for (const auto &point : curve.points) {
        if (P <= point.P * (1.0 + 1e-12)) {
            return point.lprime;
        }
    }
    return curve.points.back().lprime;
}

std::string curve_csv(const CurveOptions &options) {
    if (options.game != "chsh") {
        throw UsageError("curve: only --game chsh has a MaxProb curve; use the lp command for i3322");
    }
    if (options.measure != "P") {
        throw UsageError("curve: --measure must be P; M1 curves come from the lp command");
    }
    const GridSpec grid = GridSpec::parse(options.grid, kThird);
    const bool tagged = options.quantum || options.asymptote;
    std::ostringstream csv;
    csv << (tagged ? "kind,N,P,S,lprime\n" : "N,P,S,lprime\n");
    auto row = [&](const std::string &kind, const std::string &N, double P, double S, int lprime) {
        if (tagged) {
            csv << kind << ',';
        }
        csv << N << ',' << format_number(P) << ',' << format_number(S) << ',' << lprime << '\n';
    };
    for (int N : options.runs) {
        const BreakpointCurve curve = breakpoints(N);
        std::vector<double> Ps;
        if (options.breakpoints) {
            for (const auto &point : curve.points) {
                Ps.push_back(point.P);
            }
        } else {
            Ps = grid.values();
            if (options.landmarks) {
                for (const auto &point : curve.points) {
                    Ps.push_back(point.P);
                }
                Ps.push_back(p_at_tsirelson(N));
                std::sort(Ps.begin(), Ps.end());
                // Drop points that print identically.
                auto same = [](double a, double b) { return format_number(a) == format_number(b); };
                Ps.erase(std::unique(Ps.begin(), Ps.end(), same), Ps.end());
            }
        }
        std::vector<double> scores;
        for (double P : Ps) {
            scores.push_back(max_score(N, P));
            row("classical", std::to_string(N), P, scores.back(), lprime_at(curve, P));
        }
        if (options.quantum) {
            for (std::size_t i = 0; i < Ps.size(); i++) {
                row("quantum", std::to_string(N), Ps[i], sq_from_sc(scores[i]), lprime_at(curve, Ps[i]));
            }
        }
    }
    if (options.asymptote) {
        // Sweep the fraction of correct answers and add the 2 sqrt 2 landmark.
        std::vector<double> ls;
        const double landmark = (2.0 * std::sqrt(2.0) + 4.0) / 8.0;
        for (int i = 0; i < grid.count; i++) {
            ls.push_back(i + 1 == grid.count ? 1.0 : 0.75 + 0.25 * i / (grid.count - 1));
        }
        ls.insert(std::upper_bound(ls.begin(), ls.end(), landmark), landmark);
        std::vector<CurvePoint> points;
        for (double l : ls) {
            points.push_back(asymptotic_parametric(l));
            row("asymptote", "inf", points.back().P, points.back().S, -1);
        }
        if (options.quantum) {
            for (const auto &point : points) {
                row("asymptote_quantum", "inf", point.P, sq_from_sc(point.S), -1);
            }
        }
    }
    return csv.str();
}

// ---- lp ----

struct LpOptions {
    std::string game = "chsh";
    int runs = 1;
    std::string m1;
    std::string grid;
    std::string dump;
    bool no_compare = false;
    std::string out;
};

double m1_max_for(const GameSpec &game, int N) {
    if (game.m() == 2) {
        return chsh_m1_max(N);
    }
    return imm22_m1_max(derive_outcome_table(game).pair_counts(), game.m(), N);
}

std::string lp_csv(const LpOptions &options) {
    const GameSpec game = game_from_name(options.game);
    if (game.m() > 3) {
        throw UsageError("lp: game must be chsh or i3322");
    }
    if (options.m1.empty() == options.grid.empty()) {
        throw UsageError("lp: give exactly one of --m1 and --grid");
    }
    const int N = options.runs;
    const double top = m1_max_for(game, N);
    std::vector<double> budgets;
    int count = 1;
    if (!options.m1.empty()) {
        budgets.push_back(options.m1 == "max" ? top : parse_double(options.m1, "--m1"));
    } else {
        const GridSpec grid = GridSpec::parse(options.grid, top);
        budgets = grid.values();
        count = grid.count;
    }
    if (!options.dump.empty()) {
        std::ostringstream dump;
        if (game.m() == 2) {
            write_dump(dump, build_chsh_m1(N, budgets.front()).lp);
        } else {
            write_dump(dump, build_imm22(game.m(), N, budgets.front()).lp);
        }
        write_atomic(options.dump, dump.str());
    }
    std::vector<LpCurvePoint> points =
        game.m() == 2 ? solve_chsh_m1_curve(N, budgets) : solve_imm22_curve(game.m(), N, budgets);
    if (options.m1.empty() && !options.no_compare) {
        const GridSpec one_shot{0.0, m1_max_for(game, 1), count};
        auto repeated = repeated_one_shot_curve(game.m(), N, one_shot.values());
        points.insert(points.end(), repeated.begin(), repeated.end());
    }
    std::ostringstream csv;
    csv << "game,N,M1,S,status\n";
    for (const auto &point : points) {
        csv << point.game << ',' << point.N << ',' << format_number(point.M1) << ',' << format_number(point.S) << ','
            << point.status << '\n';
    }
    return csv.str();
}

// ---- simulate ----

struct SimOptions {
    std::string game = "chsh";
    int runs = 1;
    double P = 0.0;
    std::int64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
};

int run_simulate(const SimOptions &options, std::ostream &out, std::ostream &err) {
    if (options.game != "chsh") {
        throw UsageError("simulate: only --game chsh is supported");
    }
    const StrategyProfile profile = optimal_profile(options.runs, options.P);
    const SimReport report = estimate(profile, chsh_outcome_table(), options.trials, options.seed, options.threads);
    out << report.summary();
    if (!options.out.empty()) {
        write_atomic(options.out, report.to_json());
    }
    const auto failed = failed_checks(report);
    if (!failed.empty()) {
        std::string names;
        for (const auto &name : failed) {
            names += (names.empty() ? "" : ", ") + name;
        }
        err << "verification failed: " << names << '\n';
        return kExitVerification;
    }
    return kExitOk;
}

// ---- bound ----

std::string bound_csv(const std::string &score_text, const std::string &pwin_text) {
    if (score_text.empty() == pwin_text.empty()) {
        throw UsageError("bound: give exactly one of --S and --pwin");
    }
    const double S = score_text.empty() ? score_from_pwin(parse_double(pwin_text, "--pwin"))
                                        : parse_double(score_text, "--S");
    std::ostringstream csv;
    csv << "S,pwin,P_bound,P_single\n";
    csv << format_number(S) << ',' << format_number(pwin_from_score(S)) << ','
        << format_number(asymptotic_bound_P(S)) << ',' << format_number((S + 4.0) / 24.0) << '\n';
    return csv.str();
}

// ---- oracle ----

struct OracleOptions {
    std::string game = "chsh";
    int runs = 1;
    std::string measure = "M1";
    std::string value;
    std::string out;
};

int run_oracle(const OracleOptions &options, std::ostream &out, std::ostream &err) {
    const GameSpec game = game_from_name(options.game);
    const MdKind kind = md_kind_from_string(options.measure);
    if (options.value.empty()) {
        throw UsageError("oracle: --value is required");
    }
    double value = 0.0;
    if (options.value == "max") {
        if (kind != MdKind::L1) {
            throw UsageError("oracle: --value max only applies to M1");
        }
        value = m1_max_for(game, options.runs);
    } else {
        value = parse_double(options.value, "--value");
    }
    const MdMeasure measure{kind, value};
    const OracleResult result = brute_force_oracle(game, options.runs, measure);
    std::ostringstream audit;
    write_oracle_audit(audit, game, measure, result);
    emit(audit.str(), options.out, out);
    if (result.status != LpStatus::optimal) {
        err << "oracle: program is " << to_string(result.status) << '\n';
        return kExitSolver;
    }
    return kExitOk;
}

// ---- figure ----

int run_figure(const std::string &which, const std::string &dir, std::ostream &out) {
    std::vector<std::string> names;
    if (which == "all") {
        names = {"fig1", "fig2", "fig3"};
    } else if (which == "fig1" || which == "fig2" || which == "fig3") {
        names = {which};
    } else {
        throw UsageError("figure: --which must be fig1, fig2, fig3 or all");
    }
    std::filesystem::create_directories(dir);
    for (const auto &name : names) {
        std::string csv;
        if (name == "fig1") {
            CurveOptions options;
            options.runs = {1, 2, 5, 20};
            options.quantum = true;
            options.asymptote = true;
            options.landmarks = true;
            csv = curve_csv(options);
        } else {
            LpOptions options;
            options.game = name == "fig2" ? "chsh" : "i3322";
            options.runs = name == "fig2" ? 100 : 10;
            options.grid = "0:max:101";
            csv = lp_csv(options);
        }
        const auto path = std::filesystem::path(dir) / (name + ".csv");
        write_atomic(path, csv);
        out << path.string() << '\n';
    }
    return kExitOk;
}

// Flag groups from a config object, in key order.
std::vector<std::vector<std::string>> config_groups(const nlohmann::json &config) {
    std::vector<std::vector<std::string>> groups;
    for (const auto &[key, value] : config.items()) {
        if (key == "command" || value.is_null()) {
            continue;
        }
        if (key == "config") {
            throw UsageError("config files cannot nest --config");
        }
        std::vector<std::string> group = {"--" + key};
        auto text = [](const nlohmann::json &item) {
            return item.is_string() ? item.get<std::string>() : item.dump();
        };
        if (value.is_boolean()) {
            if (!value.get<bool>()) {
                continue;
            }
        } else if (value.is_array()) {
            for (const auto &item : value) {
                group.push_back(text(item));
            }
        } else if (value.is_object()) {
            throw UsageError("config value for '" + key + "' must be a scalar or a list");
        } else {
            group.push_back(text(value));
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

nlohmann::json parse_config(const std::string &json_text) {
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception &e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!config.is_object()) {
        throw UsageError("config: expected a JSON object");
    }
    return config;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

// Splices config flags in front of the command-line flags; flags given on
// the command line win.
std::vector<std::string> merge_config(const std::vector<std::string> &args) {
    std::vector<std::string> rest;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); i++) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                throw UsageError("--config needs a path");
            }
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) {
        return rest;
    }
    const nlohmann::json config = parse_config(read_file(config_path));
    std::vector<std::string> merged;
    std::size_t flags_from = 0;
    if (!rest.empty() && rest.front().rfind("-", 0) != 0) {
        merged.push_back(rest.front());
        flags_from = 1;
    } else if (config.contains("command")) {
        merged.push_back(config["command"].get<std::string>());
    }
    std::set<std::string> given;
    for (std::size_t i = flags_from; i < rest.size(); i++) {
        if (rest[i].rfind("--", 0) == 0) {
            given.insert(rest[i].substr(0, rest[i].find('=')));
        }
    }
    for (const auto &group : config_groups(config)) {
        if (!given.contains(group.front())) {
            merged.insert(merged.end(), group.begin(), group.end());
        }
    }
    merged.insert(merged.end(), rest.begin() + static_cast<std::ptrdiff_t>(flags_from), rest.end());
    return merged;
}

CLI::Option *scalar(CLI::Option *option) { return option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); }

}  // namespace

GridSpec GridSpec::parse(const std::string &text, double max_value) {
    std::vector<std::string> parts;
    std::stringstream stream(text);
    std::string part;
    while (std::getline(stream, part, ':')) {
        parts.push_back(part);
    }
    if (parts.size() != 3) {
        throw UsageError("grid '" + text + "' is not start:stop:count");
    }
    GridSpec grid;
    grid.start = parse_double(parts[0], "grid start");
    grid.stop = parts[1] == "max" ? max_value : parse_double(parts[1], "grid stop");
    std::size_t used = 0;
    try {
        grid.count = std::stoi(parts[2], &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != parts[2].size()) {
        throw UsageError("grid count '" + parts[2] + "' is not an integer");
    }
    if (grid.count < 2) {
        throw UsageError("grid count must be at least 2");
    }
    if (!(grid.start < grid.stop)) {
        throw UsageError("grid start must be below grid stop");
    }
    return grid;
}

std::vector<double> GridSpec::values() const {
    std::vector<double> out;
    for (int i = 0; i < count; i++) {
        out.push_back(i + 1 == count ? stop : start + (stop - start) * i / (count - 1));
    }
    return out;
}

std::string format_number(double value) {
    if (value == 0.0) {
        value = 0.0;  // drop the sign of -0
    }
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

void write_atomic(const std::filesystem::path &path, const std::string &content) {
    auto temp = path;
    temp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + temp.string() + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("failed writing '" + temp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        std::filesystem::remove(temp);
        throw std::runtime_error("cannot move output into '" + path.string() + "': " + ec.message());
    }
}

std::vector<std::string> config_to_args(const std::string &json_text) {
    const nlohmann::json config = parse_config(json_text);
    std::vector<std::string> args;
    if (config.contains("command")) {
        args.push_back(config["command"].get<std::string>());
    }
    for (const auto &group : config_groups(config)) {
        args.insert(args.end(), group.begin(), group.end());
    }
    return args;
}

int run(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Measurement-dependence attacks on CHSH and I3322 Bell tests", "bellmd"};
    app.require_subcommand(1);

    CurveOptions curve;
    auto *curve_cmd = app.add_subcommand("curve", "Optimal score against the per-run MaxProb measure P");
    scalar(curve_cmd->add_option("--game", curve.game, "Bell test (chsh)"));
    curve_cmd->add_option("--N", curve.runs, "Block lengths")->delimiter(',');
    scalar(curve_cmd->add_option("--measure", curve.measure, "Measure (P)"));
    scalar(curve_cmd->add_option("--grid", curve.grid, "P grid start:stop:count"));
    curve_cmd->add_flag("--quantum", curve.quantum, "Add the quantum-assisted series");
    curve_cmd->add_flag("--asymptote", curve.asymptote, "Add the N -> infinity curve");
    curve_cmd->add_flag("--breakpoints", curve.breakpoints, "Emit the curve vertices instead of the grid");
    curve_cmd->add_flag("--landmarks", curve.landmarks, "Merge the vertices and the 2 sqrt 2 crossing into the grid");
    scalar(curve_cmd->add_option("--out", curve.out, "Output CSV (default stdout)"));

    LpOptions lp;
    auto *lp_cmd = app.add_subcommand("lp", "Optimal score against the M1 measure by linear programming");
    scalar(lp_cmd->add_option("--game", lp.game, "chsh or i3322"));
    scalar(lp_cmd->add_option("--N", lp.runs, "Block length"))->required();
    scalar(lp_cmd->add_option("--m1", lp.m1, "Single budget, or 'max'"));
    scalar(lp_cmd->add_option("--grid", lp.grid, "Budget grid start:stop:count; stop may be 'max'"));
    scalar(lp_cmd->add_option("--dump", lp.dump, "Write the first program in dump format"));
    lp_cmd->add_flag("--no-compare", lp.no_compare, "Skip the repeated one-run comparison series");
    scalar(lp_cmd->add_option("--out", lp.out, "Output CSV (default stdout)"));

    SimOptions sim;
    auto *sim_cmd = app.add_subcommand("simulate", "Monte-Carlo check of the optimal MaxProb attack");
    scalar(sim_cmd->add_option("--game", sim.game, "Bell test (chsh)"));
    scalar(sim_cmd->add_option("--N", sim.runs, "Block length"));
    scalar(sim_cmd->add_option("--P", sim.P, "Per-run MaxProb measure"))->required();
    scalar(sim_cmd->add_option("--trials", sim.trials, "Blocks to simulate"));
    scalar(sim_cmd->add_option("--seed", sim.seed, "Generator seed"));
    scalar(sim_cmd->add_option("--threads", sim.threads, "Worker threads (default BELLMD_THREADS or all cores)"));
    scalar(sim_cmd->add_option("--out", sim.out, "JSON report path"));

    std::string which;
    std::string out_dir = ".";
    auto *fig_cmd = app.add_subcommand("figure", "Data behind the published figures");
    scalar(fig_cmd->add_option("--which", which, "fig1, fig2, fig3 or all"))->required();
    scalar(fig_cmd->add_option("--out-dir", out_dir, "Directory for <which>.csv"));

    std::string score_text;
    std::string pwin_text;
    std::string bound_out;
    auto *bound_cmd = app.add_subcommand("bound", "Asymptotic MaxProb bound for a target score");
    scalar(bound_cmd->add_option("--S", score_text, "Target CHSH score"));
    scalar(bound_cmd->add_option("--pwin", pwin_text, "Target winning probability"));
    scalar(bound_cmd->add_option("--out", bound_out, "Output CSV (default stdout)"));

    OracleOptions oracle;
    auto *oracle_cmd = app.add_subcommand("oracle", "Solve the full program over every p(y|x) and write an audit");
    scalar(oracle_cmd->add_option("--game", oracle.game, "chsh or i3322"));
    scalar(oracle_cmd->add_option("--N", oracle.runs, "Block length"));
    scalar(oracle_cmd->add_option("--measure", oracle.measure, "P or M1"));
    scalar(oracle_cmd->add_option("--value", oracle.value, "Measure value, or 'max' for M1"));
    scalar(oracle_cmd->add_option("--out", oracle.out, "Audit JSON path (default stdout)"));

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::vector<char *> argv;
        std::string program = "bellmd";
        argv.push_back(program.data());
        for (auto &arg : args) {
            argv.push_back(arg.data());
        }
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (curve_cmd->parsed()) {
            emit(curve_csv(curve), curve.out, out);
        } else if (lp_cmd->parsed()) {
            emit(lp_csv(lp), lp.out, out);
        } else if (sim_cmd->parsed()) {
            return run_simulate(sim, out, err);
        } else if (fig_cmd->parsed()) {
            return run_figure(which, out_dir, out);
        } else if (bound_cmd->parsed()) {
            emit(bound_csv(score_text, pwin_text), bound_out, out);
        } else if (oracle_cmd->parsed()) {
            return run_oracle(oracle, out, err);
        }
    } catch (const LpError &e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const ReductionError &e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::invalid_argument &e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range &e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::length_error &e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}

}  // namespace bellmd::cli
