#include "cli.hpp"

#include "teamflow/corpus.hpp"
#include "teamflow/dynamics.hpp"
#include "teamflow/error.hpp"
#include "teamflow/eval.hpp"
#include "teamflow/geo.hpp"
#include "teamflow/ideaflow.hpp"
#include "teamflow/lingfeat.hpp"
#include "teamflow/model.hpp"
#include "teamflow/synth.hpp"
#include "teamflow/text.hpp"
#include "teamflow/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace teamflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using util::fmt_double;

namespace {

struct RunConfig {
    std::string corpus;
    std::string lexicons;
    std::string out;
    std::string mode = "full";
    std::string objective = "p";
    uint64_t seed = 1;
    int jobs = 1;
    double train_frac = 0.8;
    int n_iter = 20;
    int n_perm = 200;
    int bootstrap = 0;
    std::string early_coverage = "all"; // what the 75% rule counts: all|messages
    bool strict_cheat = false;
    // filter knobs
    int min_chatters = 2;
    int min_games_per_puzzle = 5;
    double cheat_radius_km = 10.0;
    std::vector<std::string> dev_players;

    json echo() const {
        json j;
        j["corpus"] = corpus;
        j["lexicons"] = lexicons;
        j["out"] = out;
        j["mode"] = mode;
        j["objective"] = objective;
        j["seed"] = seed;
        j["jobs"] = jobs;
        j["train_frac"] = train_frac;
        j["n_iter"] = n_iter;
        j["n_perm"] = n_perm;
        j["bootstrap_splits"] = bootstrap;
        j["early_coverage"] = early_coverage;
        j["strict_cheat"] = strict_cheat;
        j["min_chatters"] = min_chatters;
        j["min_games_per_puzzle"] = min_games_per_puzzle;
        j["cheat_radius_km"] = cheat_radius_km;
        j["dev_players"] = dev_players;
        return j;
    }

    // Output location is provenance, not configuration: two runs with the
    // same analysis settings hash identically wherever they write.
    std::string hash() const {
        json j = echo();
        j.erase("out");
        return util::to_hex(util::fnv1a64(j.dump()));
    }

    lingfeat::EarlyCoverage coverage_mode() const {
        return early_coverage == "messages" ? lingfeat::EarlyCoverage::messages_only
                                            : lingfeat::EarlyCoverage::all_events;
    }

    corpus::FilterConfig filter_config() const {
        corpus::FilterConfig fc;
        fc.min_chatters = min_chatters;
        fc.min_games_per_puzzle = min_games_per_puzzle;
        fc.cheat_radius_km = cheat_radius_km;
        fc.dev_player_ids = dev_players;
        fc.strict_cheat = strict_cheat;
        return fc;
    }
};

std::string lexicons_hash_hex(const text::LexiconSet& lex) {
    return util::to_hex(lex.combined_checksum);
}

std::string provenance_line(const RunConfig& cfg, const text::LexiconSet* lex) {
    std::string line = "# teamflow config=" + cfg.hash();
    if (lex) line += " lexicons=" + lexicons_hash_hex(*lex);
    return line + "\n";
}

json provenance_json(const RunConfig& cfg, const text::LexiconSet* lex) {
    json j;
    j["config"] = cfg.echo();
    j["config_hash"] = cfg.hash();
    if (lex) {
        j["lexicons_checksum"] = lexicons_hash_hex(*lex);
        json files;
        for (const auto& [file, sum] : lex->checksums) files[file] = sum;
        j["lexicon_files"] = files;
    }
    return j;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(Errc::malformed_document, "cannot write " + (dir / name).string());
    return out;
}

void write_run_config(const RunConfig& cfg, const text::LexiconSet* lex) {
    if (cfg.out.empty()) return;
    auto out = open_out(cfg.out, "run_config.json");
    out << provenance_json(cfg, lex).dump(2) << "\n";
}

std::vector<corpus::GameRecord> load_corpus_file(const std::string& path,
                                                 std::vector<corpus::LineError>& errors) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::malformed_document, "cannot open corpus: " + path);
    return corpus::load_corpus(in, errors);
}

text::LexiconSet load_lexicons_or_die(const RunConfig& cfg) {
    if (cfg.lexicons.empty())
        throw Error(Errc::malformed_document, "--lexicons DIR is required for this subcommand");
    return text::load_lexicon_dir(cfg.lexicons);
}

// ---------------------------------------------------------------- validate --

int cmd_validate(const RunConfig& cfg) {
    std::vector<corpus::LineError> errors;
    auto games = load_corpus_file(cfg.corpus, errors);
    for (const auto& e : errors)
        std::cerr << "line " << e.line << ": " << e.message << "\n";

    auto [kept, report] = corpus::filter_corpus(games, cfg.filter_config());
    std::map<std::string, int> by_reason;
    for (const auto& [id, reason] : report.rejected)
        by_reason[corpus::reject_reason_name(reason)] += 1;

    std::cerr << "parsed " << games.size() << " game(s), " << errors.size()
              << " invalid line(s); filter kept " << report.kept << ", rejected "
              << report.rejected.size() << "\n";
    for (const auto& [reason, count] : by_reason)
        std::cerr << "  " << reason << ": " << count << "\n";

    if (!cfg.out.empty()) {
        json j = provenance_json(cfg, nullptr);
        j["parsed"] = games.size();
        j["invalid_lines"] = json::array();
        for (const auto& e : errors)
            j["invalid_lines"].push_back({{"line", e.line}, {"message", e.message}});
        j["filter"] = {{"kept", report.kept}, {"rejected", json::array()}};
        for (const auto& [id, reason] : report.rejected)
            j["filter"]["rejected"].push_back({{"game_id", id},
                                               {"reason", corpus::reject_reason_name(reason)}});
        auto out = open_out(cfg.out, "validation_report.json");
        out << j.dump(2) << "\n";
        write_run_config(cfg, nullptr);
    }
    return errors.empty() ? 0 : 1;
}

// ------------------------------------------------------------------- score --

int cmd_score(const RunConfig& cfg) {
    std::vector<corpus::LineError> errors;
    auto games = load_corpus_file(cfg.corpus, errors);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "line " << e.line << ": " << e.message << "\n";
        return 1;
    }
    auto out = open_out(cfg.out, "scores.csv");
    out << provenance_line(cfg, nullptr);
    out << "game_id,team_score,mean_solo,best_solo,worst_solo,c_avg,c_best,c_worst,"
           "obj_pp,obj_p,obj_mm\n";
    size_t skipped = 0;
    for (const auto& g : games) {
        if (!g.final_guess || g.solo_guesses.empty()) {
            ++skipped;
            continue;
        }
        double team = geo::score_km(*g.final_guess, g.true_location);
        std::vector<double> solos;
        for (const auto& sg : g.solo_guesses)
            solos.push_back(geo::score_km(sg.location, g.true_location));
        double best = *std::max_element(solos.begin(), solos.end());
        double worst = *std::min_element(solos.begin(), solos.end());
        double mean = util::mean(solos);
        auto label = geo::constructiveness_from_scores(team, solos);
        out << g.game_id << ',' << fmt_double(team) << ',' << fmt_double(mean) << ','
            << fmt_double(best) << ',' << fmt_double(worst) << ',' << fmt_double(label.c_avg)
            << ',' << fmt_double(label.c_best) << ',' << fmt_double(label.c_worst) << ','
            << (label.obj_best ? 1 : 0) << ',' << (label.obj_constructive ? 1 : 0) << ','
            << (label.obj_worst ? 1 : 0) << "\n";
    }
    if (skipped > 0) std::cerr << "skipped " << skipped << " game(s) without guesses\n";
    write_run_config(cfg, nullptr);
    return 0;
}

// ----------------------------------------------------------------- analyze --

void write_histogram_svg(const fs::path& path, const std::vector<std::pair<double, size_t>>& bins,
                         double bin_width) {
    std::ofstream out(path, std::ios::binary);
    size_t max_count = 1;
    for (const auto& [lo, c] : bins) max_count = std::max(max_count, c);
    const double w = 800.0, h = 300.0, pad = 40.0;
    double bar_w = (w - 2 * pad) / static_cast<double>(bins.size());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (size_t i = 0; i < bins.size(); ++i) {
        double bh = (h - 2 * pad) * static_cast<double>(bins[i].second) /
                    static_cast<double>(max_count);
        double x = pad + static_cast<double>(i) * bar_w;
        out << "<rect x=\"" << x << "\" y=\"" << (h - pad - bh) << "\" width=\"" << bar_w * 0.9
            << "\" height=\"" << bh << "\" fill=\"#4a8\"/>\n";
    }
    out << "<line x1=\"" << pad << "\" y1=\"" << (h - pad) << "\" x2=\"" << (w - pad) << "\" y2=\""
        << (h - pad) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << pad << "\" y=\"" << (h - 8) << "\" font-size=\"12\">c_avg from "
        << bins.front().first << " km, bin width " << bin_width << " km</text>\n</svg>\n";
}

int cmd_analyze(const RunConfig& cfg, bool do_ideas, bool do_profiles, bool do_hist, bool svg) {
    bool all = !do_ideas && !do_profiles && !do_hist;
    auto lex = load_lexicons_or_die(cfg);
    std::vector<corpus::LineError> errors;
    auto games_raw = load_corpus_file(cfg.corpus, errors);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "line " << e.line << ": " << e.message << "\n";
        return 1;
    }
    auto [games, report] = corpus::filter_corpus(games_raw, cfg.filter_config());
    std::cerr << "filter kept " << report.kept << " of " << games_raw.size() << " game(s)\n";

    if (all || do_ideas) {
        auto out = open_out(cfg.out, "ideas.jsonl");
        for (const auto& g : games) {
            auto tagged = text::tag_conversation(g.messages, lex);
            auto ideas = ideaflow::extract_ideas(tagged, lex);
            json j;
            j["game_id"] = g.game_id;
            j["config"] = cfg.hash();
            j["lexicons"] = lexicons_hash_hex(lex);
            j["ideas"] = json::array();
            for (const auto& idea : ideas) {
                json ij = {{"term", idea.term},
                           {"introducer", idea.introducer},
                           {"intro_msg_index", idea.intro_msg_index},
                           {"intro_hedged", idea.intro_hedged},
                           {"adoptions", json::array()}};
                for (const auto& a : idea.adoptions)
                    ij["adoptions"].push_back(
                        {{"player", a.player}, {"msg_index", a.msg_index}, {"hedged", a.hedged}});
                j["ideas"].push_back(std::move(ij));
            }
            out << j.dump() << "\n";
        }
    }

    if (all || do_profiles) {
        auto conv = open_out(cfg.out, "convergence.csv");
        conv << provenance_line(cfg, &lex);
        conv << "game_id,dist_minus3,dist_minus2,dist_minus1\n";
        auto prof = open_out(cfg.out, "score_profile.csv");
        prof << provenance_line(cfg, &lex);
        prof << "game_id,score_1,score_2,score_3,mean_solo,final\n";
        for (const auto& g : games) {
            if (g.marker_moves.size() < 3 || !g.final_guess) continue;
            auto dists = geo::convergence_profile(g, 3);
            conv << g.game_id << ',' << fmt_double(dists[0]) << ',' << fmt_double(dists[1]) << ','
                 << fmt_double(dists[2]) << "\n";
            auto sp = geo::score_profile(g, 3);
            prof << g.game_id << ',' << fmt_double(sp.move_scores[0]) << ','
                 << fmt_double(sp.move_scores[1]) << ',' << fmt_double(sp.move_scores[2]) << ','
                 << fmt_double(sp.mean_solo_score) << ',' << fmt_double(sp.final_score) << "\n";
        }
    }

    if (all || do_hist) {
        std::vector<double> cavgs;
        size_t n_pp = 0, n_p = 0, n_mm = 0, labeled = 0;
        for (const auto& g : games) {
            auto label = geo::label_game(g);
            if (!label) continue;
            ++labeled;
            cavgs.push_back(label->c_avg);
            if (label->obj_best) ++n_pp;
            if (label->obj_constructive) ++n_p;
            if (label->obj_worst) ++n_mm;
        }
        const double lo = -5000.0, hi = 5000.0, width = 250.0;
        size_t n_bins = static_cast<size_t>((hi - lo) / width);
        std::vector<std::pair<double, size_t>> bins;
        for (size_t b = 0; b < n_bins; ++b) bins.emplace_back(lo + width * static_cast<double>(b), 0);
        for (double v : cavgs) {
            double clamped = std::clamp(v, lo, hi - 1e-9);
            size_t b = static_cast<size_t>((clamped - lo) / width);
            bins[b].second += 1;
        }
        auto hist = open_out(cfg.out, "constructiveness_hist.csv");
        hist << provenance_line(cfg, &lex);
        hist << "bin_low_km,bin_high_km,count\n";
        for (const auto& [blo, c] : bins)
            hist << fmt_double(blo) << ',' << fmt_double(blo + width) << ',' << c << "\n";

        auto cls = open_out(cfg.out, "class_summary.csv");
        cls << provenance_line(cfg, &lex);
        cls << "objective,count,fraction\n";
        double n = std::max<size_t>(labeled, 1);
        cls << "non_constructive,"  << (labeled - n_p) << ',' << fmt_double((labeled - n_p) / n) << "\n";
        cls << "constructive_plus," << n_p << ',' << fmt_double(n_p / n) << "\n";
        cls << "best_plus_plus,"    << n_pp << ',' << fmt_double(n_pp / n) << "\n";
        cls << "worst_minus_minus," << n_mm << ',' << fmt_double(n_mm / n) << "\n";

        if (svg) write_histogram_svg(fs::path(cfg.out) / "constructiveness_hist.svg", bins, width);
    }

    write_run_config(cfg, &lex);
    return 0;
}

// --------------------------------------------------------------- featurize --

int cmd_featurize(const RunConfig& cfg, int pos_n, int pos_min_df) {
    auto lex = load_lexicons_or_die(cfg);
    std::vector<corpus::LineError> errors;
    auto games_raw = load_corpus_file(cfg.corpus, errors);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "line " << e.line << ": " << e.message << "\n";
        return 1;
    }
    auto [games, report] = corpus::filter_corpus(games_raw, cfg.filter_config());

    std::vector<corpus::GameRecord> rows_games;
    std::vector<std::string> excluded;
    if (cfg.mode == "early20") {
        for (const auto& g : games) {
            if (g.messages.empty() && g.marker_moves.empty()) {
                excluded.push_back(g.game_id);
                continue;
            }
            auto ew = lingfeat::early_window(g, 20.0, 0.75, cfg.coverage_mode());
            if (!ew.eligible) {
                excluded.push_back(g.game_id);
                continue;
            }
            rows_games.push_back(std::move(ew.game));
        }
    } else {
        rows_games = games;
    }

    std::vector<lingfeat::TaggedGame> tagged(rows_games.size());
    util::parallel_for(rows_games.size(), cfg.jobs,
                       [&](size_t i) { tagged[i] = lingfeat::tag_game(rows_games[i], lex); });

    auto vocab = lingfeat::fit_pos_vocab(tagged, {pos_n, pos_min_df});
    auto registry = lingfeat::build_registry(vocab);

    std::vector<lingfeat::FeatureVector> rows(tagged.size());
    util::parallel_for(tagged.size(), cfg.jobs, [&](size_t i) {
        rows[i] = lingfeat::featurize_game(tagged[i], lex, vocab, registry);
    });

    auto out = open_out(cfg.out, "features.csv");
    out << provenance_line(cfg, &lex);
    out << "game_id";
    for (const auto& e : registry) out << ',' << e.name;
    out << "\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        out << rows_games[i].game_id;
        for (const auto& v : rows[i].values) {
            out << ',';
            if (v) out << fmt_double(*v);
        }
        out << "\n";
    }

    json meta = provenance_json(cfg, &lex);
    meta["registry_hash"] = util::to_hex(lingfeat::registry_hash(registry));
    meta["registry"] = json::array();
    for (const auto& e : registry)
        meta["registry"].push_back({{"name", e.name}, {"group", lingfeat::feature_group_name(e.group)}});
    meta["pos_vocab"] = {{"max_n", vocab.params.max_n},
                         {"min_df", vocab.params.min_df},
                         {"grams", vocab.grams}};
    meta["excluded_early_window"] = excluded;
    meta["n_games"] = rows.size();
    auto meta_out = open_out(cfg.out, "features_meta.json");
    meta_out << meta.dump(2) << "\n";
    write_run_config(cfg, &lex);
    std::cerr << "featurized " << rows.size() << " game(s), " << registry.size() << " feature(s)\n";
    return 0;
}

// ------------------------------------------------------------ train / eval --

struct PreparedDataset {
    model::EvalDataset ds;
    model::ProtocolConfig protocol;
};

PreparedDataset prepare_dataset(const RunConfig& cfg, const text::LexiconSet& lex) {
    std::vector<corpus::LineError> errors;
    auto games_raw = load_corpus_file(cfg.corpus, errors);
    if (!errors.empty()) {
        std::string msg = "corpus has " + std::to_string(errors.size()) + " invalid line(s)";
        throw Error(Errc::malformed_document, msg);
    }
    auto [games, report] = corpus::filter_corpus(games_raw, cfg.filter_config());

    PreparedDataset out;
    auto objective = model::objective_from_name(cfg.objective);
    auto mode = model::mode_from_name(cfg.mode);
    if (!objective || !mode)
        throw Error(Errc::malformed_document, "bad --objective or --mode value");
    out.ds = model::build_dataset(games, *objective, *mode, lex, cfg.coverage_mode());
    out.protocol.n_iter = cfg.n_iter;
    out.protocol.train_frac = cfg.train_frac;
    out.protocol.n_perm = cfg.n_perm;
    out.protocol.bootstrap_splits = cfg.bootstrap;
    out.protocol.seed = cfg.seed;
    out.protocol.jobs = cfg.jobs;
    return out;
}

json group_eval_json(const model::GroupEval& ge) {
    json j;
    j["name"] = ge.name;
    j["C"] = ge.C;
    if (ge.pos_n > 0) {
        j["pos_n"] = ge.pos_n;
        j["pos_min_df"] = ge.pos_min_df;
    }
    j["mean_auc"] = ge.mean_auc;
    j["iter_auc"] = ge.iter_auc;
    if (ge.p_value >= 0.0) j["p_value"] = ge.p_value;
    return j;
}

int cmd_evaluate(const RunConfig& cfg) {
    auto lex = load_lexicons_or_die(cfg);
    auto prep = prepare_dataset(cfg, lex);
    if (prep.ds.y.size() < 4) {
        std::cerr << "not enough labeled games (" << prep.ds.y.size() << ")\n";
        return 1;
    }
    auto outcome = model::run_protocol(prep.ds, prep.protocol);

    json j = provenance_json(cfg, &lex);
    j["objective"] = cfg.objective;
    j["mode"] = cfg.mode;
    j["n_games"] = prep.ds.y.size();
    j["rows"] = json::object();
    for (const auto& ge : outcome.groups) j["rows"][ge.name] = group_eval_json(ge);
    j["rows"]["all"] = group_eval_json(outcome.all);
    j["ensemble_weights"] = {{"baseline", outcome.weights[0]},
                             {"interaction", outcome.weights[1]},
                             {"linguistic", outcome.weights[2]},
                             {"pos", outcome.weights[3]}};
    if (prep.protocol.bootstrap_splits > 0) {
        auto rows = model::bootstrap_splits(prep.ds, outcome, prep.protocol);
        j["bootstrap"] = {{"n_splits", prep.protocol.bootstrap_splits}, {"rows", json::object()}};
        for (const auto& r : rows)
            j["bootstrap"]["rows"][r.name] = {{"mean_auc", r.mean_auc},
                                              {"sd_auc", r.sd_auc},
                                              {"n_valid", r.n_splits}};
    }
    auto out = open_out(cfg.out, "eval_report.json");
    out << j.dump(2) << "\n";

    auto csv = open_out(cfg.out, "aucs.csv");
    csv << provenance_line(cfg, &lex);
    csv << "row,iteration,auc\n";
    auto dump_row = [&](const model::GroupEval& ge) {
        for (size_t i = 0; i < ge.iter_auc.size(); ++i)
            csv << ge.name << ',' << i << ',' << fmt_double(ge.iter_auc[i]) << "\n";
    };
    for (const auto& ge : outcome.groups) dump_row(ge);
    dump_row(outcome.all);
    write_run_config(cfg, &lex);

    std::cerr << "objective " << cfg.objective << " mode " << cfg.mode << "\n";
    for (const auto& ge : outcome.groups)
        std::cerr << "  " << ge.name << ": mean AUC " << ge.mean_auc
                  << (ge.p_value >= 0 ? " (p=" + fmt_double(ge.p_value) + ")" : "") << "\n";
    std::cerr << "  all: mean AUC " << outcome.all.mean_auc
              << (outcome.all.p_value >= 0 ? " (p=" + fmt_double(outcome.all.p_value) + ")" : "")
              << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    auto lex = load_lexicons_or_die(cfg);
    auto prep = prepare_dataset(cfg, lex);
    if (prep.ds.y.size() < 4) {
        std::cerr << "not enough labeled games (" << prep.ds.y.size() << ")\n";
        return 1;
    }
    model::ProtocolConfig protocol = prep.protocol;
    protocol.n_perm = 0; // selection only; significance lives in `evaluate`
    auto outcome = model::run_protocol(prep.ds, protocol);
    auto artifact = model::train_final(prep.ds, outcome, protocol);

    json j = provenance_json(cfg, &lex);
    j["objective"] = cfg.objective;
    j["mode"] = cfg.mode;
    j["registry_hash"] = util::to_hex(artifact.registry_hash);
    j["seed"] = artifact.seed;
    j["ensemble_weights"] = {{"baseline", artifact.weights[0]},
                             {"interaction", artifact.weights[1]},
                             {"linguistic", artifact.weights[2]},
                             {"pos", artifact.weights[3]}};
    j["pos_vocab"] = {{"max_n", artifact.pos_vocab.params.max_n},
                      {"min_df", artifact.pos_vocab.params.min_df},
                      {"grams", artifact.pos_vocab.grams}};
    j["groups"] = json::object();
    for (const auto& g : artifact.groups) {
        json gj;
        gj["C"] = g.model.C;
        gj["converged"] = g.model.converged;
        gj["iterations"] = g.model.iterations;
        gj["bias"] = g.model.bias;
        gj["weights"] = g.model.weights;
        gj["features"] = g.feature_names;
        gj["standardizer"] = {{"mean", g.standardizer.mean}, {"sd", g.standardizer.sd}};
        if (g.pos_n > 0) {
            gj["pos_n"] = g.pos_n;
            gj["pos_min_df"] = g.pos_min_df;
        }
        j["groups"][g.name] = std::move(gj);
    }
    auto out = open_out(cfg.out, "model.json");
    out << j.dump(2) << "\n";
    write_run_config(cfg, &lex);
    std::cerr << "trained 4 group models; ensemble weights ["
              << artifact.weights[0] << ", " << artifact.weights[1] << ", " << artifact.weights[2]
              << ", " << artifact.weights[3] << "]\n";
    return 0;
}

// ------------------------------------------------------------------ report --

int cmd_report(const RunConfig& cfg, const std::vector<std::string>& report_files) {
    static const std::vector<std::string> row_order = {"baseline", "linguistic", "interaction",
                                                       "pos", "all"};
    struct Cell {
        double auc = -1.0;
        double p = -1.0;
    };
    // key: row -> objective/mode column
    std::map<std::string, std::map<std::string, Cell>> table;
    std::vector<std::string> columns;
    for (const auto& file : report_files) {
        std::ifstream in(file);
        if (!in) {
            std::cerr << "cannot open " << file << "\n";
            return 1;
        }
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("rows")) {
            std::cerr << file << ": not an eval report\n";
            return 1;
        }
        std::string col = j.value("objective", "?") + "_" + j.value("mode", "?");
        if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
        for (const auto& row : row_order) {
            if (!j["rows"].contains(row)) continue;
            Cell c;
            c.auc = j["rows"][row].value("mean_auc", -1.0);
            c.p = j["rows"][row].value("p_value", -1.0);
            table[row][col] = c;
        }
    }
    std::sort(columns.begin(), columns.end());

    auto out = open_out(cfg.out, "report.csv");
    out << provenance_line(cfg, nullptr);
    out << "feature_set";
    for (const auto& c : columns) out << ',' << c;
    out << "\n";
    for (const auto& row : row_order) {
        out << row;
        for (const auto& c : columns) {
            out << ',';
            auto it = table[row].find(c);
            if (it != table[row].end() && it->second.auc >= 0) out << fmt_double(it->second.auc);
        }
        out << "\n";
    }
    auto pout = open_out(cfg.out, "report_p.csv");
    pout << provenance_line(cfg, nullptr);
    pout << "feature_set";
    for (const auto& c : columns) pout << ',' << c;
    pout << "\n";
    for (const auto& row : row_order) {
        pout << row;
        for (const auto& c : columns) {
            pout << ',';
            auto it = table[row].find(c);
            if (it != table[row].end() && it->second.p >= 0) pout << fmt_double(it->second.p);
        }
        pout << "\n";
    }

    std::cerr << "feature_set";
    for (const auto& c : columns) std::cerr << "\t" << c;
    std::cerr << "\n";
    for (const auto& row : row_order) {
        std::cerr << row;
        for (const auto& c : columns) {
            auto it = table[row].find(c);
            std::cerr << "\t"
                      << (it != table[row].end() && it->second.auc >= 0
                              ? fmt_double(it->second.auc)
                              : "-");
        }
        std::cerr << "\n";
    }
    write_run_config(cfg, nullptr);
    return 0;
}

// ------------------------------------------------------------------- synth --

int cmd_synth(const RunConfig& cfg, int n_games, int n_puzzles, double quick_frac,
              const std::string& mix_spec) {
    std::vector<std::pair<synth::ArchetypeConfig, double>> mix;
    for (const auto& part : util::split(mix_spec, ',')) {
        auto kv = util::split(part, '=');
        if (kv.size() != 2) throw Error(Errc::invalid_mix, "bad --mix entry: " + part);
        synth::ArchetypeConfig a;
        if (kv[0] == "constructive")
            a = synth::constructive_archetype();
        else if (kv[0] == "obstructive")
            a = synth::obstructive_archetype();
        else
            throw Error(Errc::invalid_mix, "unknown archetype: " + kv[0]);
        a.quick_finish_frac = quick_frac;
        mix.emplace_back(a, std::stod(kv[1]));
    }
    std::vector<synth::ManifestEntry> manifest;
    auto games = synth::generate_corpus(n_games, mix, n_puzzles, cfg.seed, &manifest);

    auto out = open_out(cfg.out, "corpus.jsonl");
    for (const auto& g : games) out << corpus::to_json_line(g) << "\n";

    json mj = provenance_json(cfg, nullptr);
    mj["games"] = json::array();
    for (const auto& m : manifest)
        mj["games"].push_back({{"game_id", m.game_id},
                               {"archetype", m.archetype},
                               {"quick_finish", m.quick_finish}});
    auto mout = open_out(cfg.out, "synth_manifest.json");
    mout << mj.dump(2) << "\n";
    write_run_config(cfg, nullptr);
    std::cerr << "wrote " << games.size() << " synthetic game(s)\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"teamflow: constructiveness analytics for team-game transcripts"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub, bool needs_corpus, bool needs_out) {
        auto* c = sub->add_option("--corpus", cfg.corpus, "corpus JSONL path");
        if (needs_corpus) c->required();
        sub->add_option("--lexicons", cfg.lexicons, "lexicon resource directory");
        auto* o = sub->add_option("--out", cfg.out, "output directory");
        if (needs_out) o->required();
        sub->add_option("--mode", cfg.mode, "full|early20")->check(CLI::IsMember({"full", "early20"}));
        sub->add_option("--objective", cfg.objective, "pp|p|mm")->check(CLI::IsMember({"pp", "p", "mm"}));
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--jobs", cfg.jobs, "worker pool cap");
        sub->add_option("--train-frac", cfg.train_frac, "train fraction per split");
        sub->add_option("--n-iter", cfg.n_iter, "number of train/validation splits");
        sub->add_option("--n-perm", cfg.n_perm, "label permutations (0 disables)");
        sub->add_option("--bootstrap-splits", cfg.bootstrap,
                        "extra split redraws on the chosen models, for variance");
        sub->add_option("--early-coverage", cfg.early_coverage,
                        "events the 20s/75% rule counts: all|messages")
            ->check(CLI::IsMember({"all", "messages"}));
        sub->add_flag("--strict-cheat", cfg.strict_cheat,
                      "apply the proximity flag without window telemetry");
        sub->add_option("--min-chatters", cfg.min_chatters, "minimum distinct chatters");
        sub->add_option("--min-games-per-puzzle", cfg.min_games_per_puzzle,
                        "sparse-puzzle threshold");
        sub->add_option("--cheat-radius-km", cfg.cheat_radius_km, "proximity flag radius");
        sub->add_option("--dev-player", cfg.dev_players, "developer player id (repeatable)");
    };

    auto* validate = app.add_subcommand("validate", "schema and filter checks");
    add_common(validate, true, false);

    auto* score = app.add_subcommand("score", "per-game constructiveness CSV");
    add_common(score, true, true);

    auto* analyze = app.add_subcommand("analyze", "idea graphs, profiles, distribution");
    add_common(analyze, true, true);
    bool f_ideas = false, f_profiles = false, f_hist = false, f_svg = false;
    analyze->add_flag("--ideas", f_ideas, "emit per-game idea events only");
    analyze->add_flag("--profiles", f_profiles, "emit convergence/score profiles only");
    analyze->add_flag("--hist", f_hist, "emit constructiveness distribution only");
    analyze->add_flag("--svg", f_svg, "also write an SVG histogram");

    auto* featurize = app.add_subcommand("featurize", "corpus -> feature CSV");
    add_common(featurize, true, true);
    int pos_n = 2, pos_min_df = 2;
    featurize->add_option("--pos-n", pos_n, "POS n-gram max order");
    featurize->add_option("--pos-min-df", pos_min_df, "POS vocabulary min document frequency");

    auto* train = app.add_subcommand("train", "grid search + final model artifact");
    add_common(train, true, true);

    auto* evaluate = app.add_subcommand("evaluate", "cross-validated evaluation report");
    add_common(evaluate, true, true);

    auto* report = app.add_subcommand("report", "aggregate eval reports into a matrix");
    add_common(report, false, true);
    std::vector<std::string> report_files;
    report->add_option("reports", report_files, "eval_report.json files")->required();

    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus");
    add_common(synth_cmd, false, true);
    int n_games = 100, n_puzzles = 10;
    double quick_frac = 0.0;
    std::string mix_spec = "constructive=0.5,obstructive=0.5";
    synth_cmd->add_option("--n-games", n_games, "number of games");
    synth_cmd->add_option("--n-puzzles", n_puzzles, "number of puzzles");
    synth_cmd->add_option("--quick-frac", quick_frac, "fraction of games finishing inside 20 s");
    synth_cmd->add_option("--mix", mix_spec, "archetype mix, e.g. constructive=0.5,obstructive=0.5");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(cfg);
        if (app.got_subcommand(score)) return cmd_score(cfg);
        if (app.got_subcommand(analyze)) return cmd_analyze(cfg, f_ideas, f_profiles, f_hist, f_svg);
        if (app.got_subcommand(featurize)) return cmd_featurize(cfg, pos_n, pos_min_df);
        if (app.got_subcommand(train)) return cmd_train(cfg);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(cfg);
        if (app.got_subcommand(report)) return cmd_report(cfg, report_files);
        if (app.got_subcommand(synth_cmd))
            return cmd_synth(cfg, n_games, n_puzzles, quick_frac, mix_spec);
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace teamflow::cli
