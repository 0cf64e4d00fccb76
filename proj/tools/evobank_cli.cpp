// Command-line front end for building and inspecting an evolving data bank.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "evobank/affinity.hpp"
#include "evobank/analytics.hpp"
#include "evobank/baselines.hpp"
#include "evobank/evolution.hpp"
#include "evobank/geometry.hpp"
#include "evobank/io.hpp"
#include "evobank/scoring.hpp"

using namespace evobank;
using nlohmann::json;

namespace {

struct Output {
    bool quiet = false;
    bool as_json = false;

    // Human text unless --json; nothing at all under --quiet.
    void report(const std::string& text, const json& data) const {
        if (quiet) return;
        if (as_json) {
            std::cout << data.dump() << '\n';
        } else {
            std::cout << text;
        }
    }
};

// Exit codes: 0 ok, 2 usage, 10 + ErrorKind for library errors.
int exit_code(ErrorKind kind) { return 10 + static_cast<int>(kind); }

struct ConfigFlags {
    EvolutionConfig config;
    std::string combination = "mul";
    std::string nonlinear_base = "mul";

    void attach(CLI::App* cmd) {
        cmd->add_option("--bank-size", config.bank_size, "bank capacity m")->check(CLI::PositiveNumber);
        cmd->add_option("--gamma", config.gamma, "quality weight");
        cmd->add_option("--combination", combination, "add|mul|nonlinear");
        cmd->add_option("--nonlinear-base", nonlinear_base, "combiner used with the nonlinear map (add|mul)");
        cmd->add_option("--alpha", config.alpha0, "initial momentum weight");
        cmd->add_option("--lambda", config.lambda, "momentum decay per iteration");
        cmd->add_option("--beta", config.beta, "message damping");
        cmd->add_option("--batch-size", config.batch_size, "candidates per evolution batch");
        cmd->add_option("--r-l", config.r_l, "lower percentile of the quality map");
        cmd->add_option("--r-h", config.r_h, "upper percentile of the quality map");
        cmd->add_option("--preference", config.preference, "diagonal similarity");
        cmd->add_option("--max-iters", config.max_iters, "message-passing iteration cap");
        cmd->add_option("--stable-iters", config.stable_iters, "iterations with an unchanged exemplar set");
        cmd->add_option("--seed", config.seed, "seed recorded with the bank");
    }

    EvolutionConfig resolve() {
        config.combination = parse_combination(combination);
        config.nonlinear_base = parse_combination(nonlinear_base);
        config.validate();
        return config;
    }
};

std::string resolve_bank_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("EVOBANK_DIR"); env && *env) return env;
    throw Error(ErrorKind::InvalidConfig, "no bank directory: pass --bank-dir or set EVOBANK_DIR");
}

json stats_json(const SubsetStats& s) {
    return {{"size", s.size}, {"mean_quality", s.mean_quality}, {"mean_diversity", s.mean_diversity}};
}

std::string stats_text(const SubsetStats& s) {
    std::ostringstream out;
    out << std::setprecision(6) << "size " << s.size << "\nmean quality " << s.mean_quality
        << "\nmean diversity " << s.mean_diversity << '\n';
    return out.str();
}

std::vector<CandidatePoint> bank_points(const BankState& bank) {
    std::vector<CandidatePoint> pts;
    pts.reserve(bank.size());
    for (const auto& e : bank.entries) pts.push_back(e.point);
    return pts;
}

std::string summary_line(const std::string& verb, const BankState& bank) {
    return verb + " bank: " + std::to_string(bank.size()) + " entries, round " + std::to_string(bank.round) + '\n';
}

json bank_summary(const BankState& bank) {
    return {{"round", bank.round}, {"entries", bank.size()}, {"dimension", bank.dimension}};
}

// Representativeness of every pool point from one plain message-passing run.
std::vector<double> pool_representativeness(const Pool& pool, double preference) {
    auto state = run_ap(negative_euclidean(pool, preference), ApParams{});
    return representativeness(state);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Build, evolve and inspect a ranked fixed-size data bank"};
    app.require_subcommand(1);
    Output out;
    app.add_flag("--quiet", out.quiet, "suppress informational output and warnings");
    app.add_flag("--json", out.as_json, "machine-readable output");

    std::string bank_dir;
    std::string candidates_file;

    // init
    auto* init = app.add_subcommand("init", "select the initial bank from a candidate file");
    ConfigFlags init_flags;
    init->add_option("--candidates", candidates_file, "line-delimited candidate records")->required();
    init->add_option("--bank-dir", bank_dir, "bank directory (default $EVOBANK_DIR)");
    init_flags.attach(init);

    // evolve
    auto* evolve = app.add_subcommand("evolve", "run one evolution round with new candidates");
    std::string new_file;
    evolve->add_option("--bank-dir", bank_dir, "bank directory (default $EVOBANK_DIR)");
    evolve->add_option("--new", new_file, "new candidate records")->required();

    // rank
    auto* rank = app.add_subcommand("rank", "print the ranked bank");
    std::string format = "text";
    rank->add_option("--bank-dir", bank_dir, "bank directory (default $EVOBANK_DIR)");
    rank->add_option("--format", format, "csv|text")->check(CLI::IsMember({"csv", "text"}));

    // extract
    auto* extract = app.add_subcommand("extract", "write the top-k bank entries");
    std::size_t budget = 0;
    std::string out_file;
    extract->add_option("--bank-dir", bank_dir, "bank directory (default $EVOBANK_DIR)");
    extract->add_option("--budget", budget, "number of entries")->required();
    extract->add_option("--out", out_file, "output candidate file")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "mean quality and diversity of a subset");
    std::string subset_file;
    std::string measure = "pairwise";
    auto* subset_opt = stats->add_option("--subset", subset_file, "candidate file");
    auto* stats_dir_opt = stats->add_option("--bank-dir", bank_dir, "bank directory");
    subset_opt->excludes(stats_dir_opt);
    stats->add_option("--measure", measure, "pairwise|nearest")->check(CLI::IsMember({"pairwise", "nearest"}));

    // select-baseline
    auto* baseline = app.add_subcommand("select-baseline", "select a subset with a reference strategy");
    std::string method;
    std::size_t size = 0;
    double gamma = 1.0;
    double threshold = 0.9;
    double preference = 0.0;
    std::uint64_t seed = 0;
    std::string start_id;
    baseline->add_option("--method", method, "random|knn1|kcenter|deita|dg|qg")
        ->required()
        ->check(CLI::IsMember({"random", "knn1", "kcenter", "deita", "dg", "qg"}));
    baseline->add_option("--candidates", candidates_file, "candidate file")->required();
    baseline->add_option("--size", size, "subset size")->required();
    baseline->add_option("--gamma", gamma, "quality weight (knn1, kcenter)");
    baseline->add_option("--threshold", threshold, "cosine threshold (deita)");
    baseline->add_option("--seed", seed, "seed (random)");
    baseline->add_option("--start", start_id, "start id (kcenter)");
    baseline->add_option("--preference", preference, "diagonal similarity (dg)");
    baseline->add_option("--out", out_file, "output candidate file")->required();

    // compare
    auto* compare = app.add_subcommand("compare", "overlap between two subsets");
    std::string file_a, file_b;
    compare->add_option("--a", file_a, "first candidate file")->required();
    compare->add_option("--b", file_b, "second candidate file")->required();

    // correlate
    auto* correlate = app.add_subcommand("correlate", "rank correlation of quality and diversity with membership");
    std::size_t top_n = 0;
    correlate->add_option("--bank-dir", bank_dir, "bank directory (default $EVOBANK_DIR)");
    correlate->add_option("--top", top_n, "candidates considered (default 2 * bank size)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    set_warning_sink([&out](std::string_view msg) {
        if (!out.quiet) std::cerr << "warning: " << msg << '\n';
    });

    try {
        if (*init) {
            const auto config = init_flags.resolve();
            const std::string dir = resolve_bank_dir(bank_dir);
            io::DirectoryLock lock(dir);
            const Pool pool = io::ingest_candidates(candidates_file);
            const BankState bank = init_bank(pool, config);
            io::save_bank(bank, dir);
            out.report(summary_line("initialized", bank), bank_summary(bank));
        } else if (*evolve) {
            const std::string dir = resolve_bank_dir(bank_dir);
            io::DirectoryLock lock(dir);
            const BankState bank = io::load_bank(dir);
            const Pool fresh = io::ingest_candidates(new_file, bank.dimension);
            const BankState next = evolve_round(bank, fresh);
            io::save_bank(next, dir);
            out.report(summary_line("evolved", next), bank_summary(next));
        } else if (*rank) {
            const BankState bank = io::load_bank(resolve_bank_dir(bank_dir));
            std::ostringstream text;
            json rows = json::array();
            if (format == "csv") text << "rank,id,overall,s_rep_norm,s_q_norm,quality,round_added\n";
            for (const auto& e : bank.entries) {
                rows.push_back({{"rank", e.rank},
                                {"id", e.point.id},
                                {"overall", e.overall},
                                {"s_rep_norm", e.s_rep_norm},
                                {"s_q_norm", e.s_q_norm},
                                {"quality", e.point.quality},
                                {"round_added", e.round_added}});
                if (format == "csv") {
                    text << e.rank << ',' << e.point.id << ',' << e.overall << ',' << e.s_rep_norm << ','
                         << e.s_q_norm << ',' << e.point.quality << ',' << e.round_added << '\n';
                } else {
                    text << std::setw(6) << e.rank << "  " << std::left << std::setw(24) << e.point.id
                         << std::right << std::fixed << std::setprecision(6) << std::setw(12) << e.overall
                         << std::setw(12) << e.s_rep_norm << std::setw(12) << e.s_q_norm << '\n';
                    text.unsetf(std::ios::fixed);
                }
            }
            out.report(text.str(), rows);
        } else if (*extract) {
            const BankState bank = io::load_bank(resolve_bank_dir(bank_dir));
            const auto top = extract_budget(bank, budget);
            io::write_candidates(out_file, top);
            out.report("wrote " + std::to_string(top.size()) + " entries to " + out_file + '\n',
                       {{"written", top.size()}, {"out", out_file}});
        } else if (*stats) {
            const auto how = measure == "pairwise" ? DiversityMeasure::mean_pairwise
                                                   : DiversityMeasure::mean_nearest_neighbor;
            SubsetStats s;
            if (!subset_file.empty()) {
                const Pool pool = io::ingest_candidates(subset_file);
                s = subset_stats(pool.points(), how);
            } else {
                const BankState bank = io::load_bank(resolve_bank_dir(bank_dir));
                const auto pts = bank_points(bank);
                s = subset_stats(pts, how);
            }
            out.report(stats_text(s), stats_json(s));
        } else if (*baseline) {
            const Pool pool = io::ingest_candidates(candidates_file);
            SelectionResult result;
            std::optional<std::string> start;
            if (!start_id.empty()) start = start_id;
            if (method == "random") {
                result = random_select(pool, size, seed);
            } else if (method == "knn1") {
                result = knn1_select(pool, size, gamma);
            } else if (method == "kcenter") {
                result = kcenter_select(pool, size, gamma, start);
            } else if (method == "deita") {
                result = deita_select(pool, size, threshold);
            } else if (method == "dg") {
                result = diversity_greedy(pool, pool_representativeness(pool, preference), size);
            } else {
                result = quality_greedy(pool, size);
            }
            std::vector<CandidatePoint> chosen;
            for (const auto& id : result.ids) chosen.push_back(pool[*pool.find(id)]);
            io::write_candidates(out_file, chosen);
            if (result.shortfall) warn("threshold filtering left fewer points than requested");
            out.report(result.strategy + ": wrote " + std::to_string(chosen.size()) + " points to " + out_file + '\n',
                       {{"strategy", result.strategy},
                        {"written", chosen.size()},
                        {"shortfall", result.shortfall},
                        {"out", out_file}});
        } else if (*compare) {
            const Pool a = io::ingest_candidates(file_a);
            const Pool b = io::ingest_candidates(file_b);
            std::vector<std::string> ids_a, ids_b;
            for (const auto& p : a) ids_a.push_back(p.id);
            for (const auto& p : b) ids_b.push_back(p.id);
            const auto overlap = overlap_count(ids_a, ids_b);
            out.report("overlap " + std::to_string(overlap) + " (" + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")\n",
                       {{"overlap", overlap}, {"size_a", a.size()}, {"size_b", b.size()}});
        } else if (*correlate) {
            const BankState bank = io::load_bank(resolve_bank_dir(bank_dir));
            std::vector<std::string> ids;
            for (const auto& e : bank.entries) ids.push_back(e.point.id);
            const std::size_t n = top_n ? top_n : 2 * bank.size();
            const auto c = selection_correlation(bank.last_scores, ids, n);
            std::ostringstream text;
            text << std::setprecision(4) << "considered " << c.considered << "\nsp_quality " << c.sp_quality
                 << "\nsp_diversity " << c.sp_diversity << "\ndiff " << c.diff << '\n';
            out.report(text.str(), {{"considered", c.considered},
                                    {"sp_quality", c.sp_quality},
                                    {"sp_diversity", c.sp_diversity},
                                    {"diff", c.diff}});
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: IoError: " << e.what() << '\n';
        return exit_code(ErrorKind::IoError);
    }
    return 0;
}
