#include "teamflow/eval.hpp"
#include "teamflow/error.hpp"
#include "teamflow/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace teamflow::model {

const char* objective_name(Objective o) {
    switch (o) {
        case Objective::pp: return "pp";
        case Objective::p: return "p";
        case Objective::mm: return "mm";
    }
    return "?";
}

const char* mode_name(Mode m) { return m == Mode::full ? "full" : "early20"; }

std::optional<Objective> objective_from_name(std::string_view s) {
    if (s == "pp") return Objective::pp;
    if (s == "p") return Objective::p;
    if (s == "mm") return Objective::mm;
    return std::nullopt;
}

std::optional<Mode> mode_from_name(std::string_view s) {
    if (s == "full") return Mode::full;
    if (s == "early20") return Mode::early20;
    return std::nullopt;
}

int objective_label(const geo::ConstructivenessLabel& c, Objective o) {
    switch (o) {
        case Objective::pp: return c.obj_best ? 1 : 0;
        case Objective::p: return c.obj_constructive ? 1 : 0;
        case Objective::mm: return c.obj_worst ? 1 : 0;
    }
    return 0;
}

EvalDataset build_dataset(const std::vector<corpus::GameRecord>& filtered, Objective objective,
                          Mode mode, const text::LexiconSet& lex,
                          lingfeat::EarlyCoverage coverage) {
    EvalDataset ds;
    for (const auto& game : filtered) {
        auto label = geo::label_game(game);
        if (!label) continue; // no final guess or no solo guesses: unlabeled
        if (mode == Mode::early20) {
            if (game.messages.empty() && game.marker_moves.empty()) continue;
            auto ew = lingfeat::early_window(game, 20.0, 0.75, coverage);
            if (!ew.eligible) continue;
            ds.games.push_back(std::move(ew.game));
        } else {
            ds.games.push_back(game);
        }
        ds.game_ids.push_back(game.game_id);
        ds.puzzle_ids.push_back(game.puzzle_id);
        ds.y.push_back(objective_label(*label, objective));
    }
    ds.tagged.reserve(ds.games.size());
    ds.scalar_features.reserve(ds.games.size());
    for (const auto& g : ds.games) {
        ds.tagged.push_back(lingfeat::tag_game(g, lex));
        ds.scalar_features.push_back(lingfeat::scalar_features(ds.tagged.back(), lex));
    }
    return ds;
}

namespace {

using lingfeat::FeatureGroup;

std::vector<std::string> group_scalar_names(FeatureGroup g) {
    std::vector<std::string> names;
    for (const auto& e : lingfeat::scalar_registry())
        if (e.group == g) names.push_back(e.name);
    return names;
}

Matrix scalar_matrix(const EvalDataset& ds, const std::vector<std::string>& names) {
    Matrix m = Matrix::zeros(ds.scalar_features.size(), names.size());
    m.mask.assign(m.rows * m.cols, 0);
    for (size_t r = 0; r < m.rows; ++r) {
        const auto& feats = ds.scalar_features[r];
        for (size_t c = 0; c < names.size(); ++c) {
            auto it = feats.find(names[c]);
            if (it != feats.end()) {
                m.at(r, c) = it->second;
                m.mask[r * m.cols + c] = 1;
            }
        }
    }
    return m;
}

Matrix pos_matrix(const EvalDataset& ds, const lingfeat::PosVocab& vocab) {
    Matrix m = Matrix::zeros(ds.tagged.size(), vocab.grams.size());
    m.mask.assign(m.rows * m.cols, 0);
    for (size_t r = 0; r < m.rows; ++r) {
        auto freqs = lingfeat::pos_gram_frequencies(ds.tagged[r], vocab);
        if (freqs.empty()) continue; // no messages: whole block missing
        for (size_t c = 0; c < vocab.grams.size(); ++c) {
            m.at(r, c) = freqs[vocab.grams[c]];
            m.mask[r * m.cols + c] = 1;
        }
    }
    return m;
}

std::vector<int> select_labels(std::span<const int> y, const std::vector<size_t>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(y[i]);
    return out;
}

bool two_classes(std::span<const int> y) {
    bool pos = false, neg = false;
    for (int v : y) (v == 1 ? pos : neg) = true;
    return pos && neg;
}

struct SplitOutcome {
    bool ok = false;
    double auc_value = 0.5;
    std::vector<double> val_probs;
};

SplitOutcome eval_on_split(const Matrix& X, std::span<const int> y, const Split& split, double C) {
    SplitOutcome out;
    auto y_train = select_labels(y, split.train);
    auto y_val = select_labels(y, split.validation);
    if (!two_classes(y_train) || !two_classes(y_val)) return out;
    Matrix x_train = X.select_rows(split.train);
    Matrix x_val = X.select_rows(split.validation);
    Standardizer std_fit = Standardizer::fit(x_train);
    x_train = std_fit.apply(x_train);
    x_val = std_fit.apply(x_val);
    LogRegModel m = train_logreg(x_train, y_train, C);
    out.val_probs = predict_proba(m, x_val);
    out.auc_value = auc(out.val_probs, y_val);
    out.ok = true;
    return out;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Candidate {
    double C = 1.0;
    int pos_n = 0;
    int pos_min_df = 0;
    double mean_auc = 0.0;
    std::vector<double> iter_auc;
    std::vector<std::vector<double>> val_probs; // per split
};

// ties: smaller C, then smaller n, then larger min_df
bool better_candidate(const Candidate& a, const Candidate& b) {
    if (a.mean_auc != b.mean_auc) return a.mean_auc > b.mean_auc;
    if (a.C != b.C) return a.C < b.C;
    if (a.pos_n != b.pos_n) return a.pos_n < b.pos_n;
    return a.pos_min_df > b.pos_min_df;
}

} // namespace

EvalOutcome run_protocol(const EvalDataset& ds, const ProtocolConfig& cfg) {
    EvalOutcome out;
    out.splits = puzzle_aware_splits(ds.puzzle_ids, ds.y, cfg.n_iter, cfg.train_frac, cfg.seed);
    const auto& splits = out.splits;
    size_t n_splits = splits.size();

    std::array<Candidate, 4> best{};
    std::array<Matrix, 4> full_matrix; // scalar groups only; POS rebuilt per split

    for (size_t gi = 0; gi < kGroups.size(); ++gi) {
        FeatureGroup group = kGroups[gi];
        std::vector<Candidate> candidates;

        if (group != FeatureGroup::pos) {
            full_matrix[gi] = scalar_matrix(ds, group_scalar_names(group));
            for (double C : cfg.c_grid) {
                Candidate cand;
                cand.C = C;
                cand.iter_auc.assign(n_splits, 0.5);
                cand.val_probs.assign(n_splits, {});
                util::parallel_for(n_splits, cfg.jobs, [&](size_t si) {
                    auto r = eval_on_split(full_matrix[gi], ds.y, splits[si], C);
                    cand.iter_auc[si] = r.auc_value;
                    cand.val_probs[si] = std::move(r.val_probs);
                });
                cand.mean_auc = mean_of(cand.iter_auc);
                candidates.push_back(std::move(cand));
            }
        } else {
            for (int n : cfg.pos_n_grid) {
                for (int df : cfg.pos_min_df_grid) {
                    // one vocabulary fit per (params, split), shared by all C
                    std::vector<std::vector<SplitOutcome>> results(
                        cfg.c_grid.size(), std::vector<SplitOutcome>(n_splits));
                    util::parallel_for(n_splits, cfg.jobs, [&](size_t si) {
                        std::vector<lingfeat::TaggedGame> train_tagged;
                        train_tagged.reserve(splits[si].train.size());
                        for (size_t i : splits[si].train) train_tagged.push_back(ds.tagged[i]);
                        auto vocab = lingfeat::fit_pos_vocab(train_tagged, {n, df});
                        Matrix X = pos_matrix(ds, vocab);
                        for (size_t ci = 0; ci < cfg.c_grid.size(); ++ci)
                            results[ci][si] = eval_on_split(X, ds.y, splits[si], cfg.c_grid[ci]);
                    });
                    for (size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
                        Candidate cand;
                        cand.C = cfg.c_grid[ci];
                        cand.pos_n = n;
                        cand.pos_min_df = df;
                        cand.iter_auc.assign(n_splits, 0.5);
                        cand.val_probs.assign(n_splits, {});
                        for (size_t si = 0; si < n_splits; ++si) {
                            cand.iter_auc[si] = results[ci][si].auc_value;
                            cand.val_probs[si] = std::move(results[ci][si].val_probs);
                        }
                        cand.mean_auc = mean_of(cand.iter_auc);
                        candidates.push_back(std::move(cand));
                    }
                }
            }
        }

        size_t best_i = 0;
        for (size_t i = 1; i < candidates.size(); ++i)
            if (better_candidate(candidates[i], candidates[best_i])) best_i = i;
        best[gi] = std::move(candidates[best_i]);

        GroupEval ge;
        ge.name = lingfeat::feature_group_name(group);
        ge.C = best[gi].C;
        ge.pos_n = best[gi].pos_n;
        ge.pos_min_df = best[gi].pos_min_df;
        ge.mean_auc = best[gi].mean_auc;
        ge.iter_auc = best[gi].iter_auc;
        out.groups.push_back(std::move(ge));
    }

    // Ensemble probability = sum_g w_g p_g; weights on a 0.1-step simplex,
    // scored by mean validation AUC; ties prefer more uniform weights.
    int steps = static_cast<int>(std::lround(1.0 / cfg.weight_step));
    std::array<double, 4> best_w{1.0, 0.0, 0.0, 0.0};
    double best_auc = -1.0;
    int best_sumsq = std::numeric_limits<int>::max();
    std::vector<double> best_iter_auc(n_splits, 0.5);

    std::vector<std::vector<int>> val_labels(n_splits);
    for (size_t si = 0; si < n_splits; ++si) val_labels[si] = select_labels(ds.y, splits[si].validation);

    std::vector<double> combined;
    for (int a = 0; a <= steps; ++a)
        for (int b = 0; b <= steps - a; ++b)
            for (int c = 0; c <= steps - a - b; ++c) {
                int d = steps - a - b - c;
                std::array<int, 4> ticks{a, b, c, d};
                std::array<double, 4> w;
                for (size_t k = 0; k < 4; ++k) w[k] = static_cast<double>(ticks[k]) / steps;
                std::vector<double> iter_auc(n_splits, 0.5);
                for (size_t si = 0; si < n_splits; ++si) {
                    size_t nv = val_labels[si].size();
                    if (nv == 0) continue;
                    combined.assign(nv, 0.0);
                    bool usable = true;
                    for (size_t k = 0; k < 4; ++k) {
                        if (w[k] == 0.0) continue;
                        if (best[k].val_probs[si].size() != nv) { usable = false; break; }
                        for (size_t r = 0; r < nv; ++r) combined[r] += w[k] * best[k].val_probs[si][r];
                    }
                    if (!usable || !two_classes(val_labels[si])) continue;
                    iter_auc[si] = auc(combined, val_labels[si]);
                }
                double mean_auc = mean_of(iter_auc);
                int sumsq = a * a + b * b + c * c + d * d;
                if (mean_auc > best_auc || (mean_auc == best_auc && sumsq < best_sumsq)) {
                    best_auc = mean_auc;
                    best_sumsq = sumsq;
                    best_w = w;
                    best_iter_auc = iter_auc;
                }
            }

    out.weights = best_w;
    out.all.name = "all";
    out.all.mean_auc = best_auc;
    out.all.iter_auc = best_iter_auc;
    out.all.C = 0.0;

    if (cfg.n_perm > 0) {
        // Rerun split evaluation with fixed hyperparameters under permuted
        // labels; splits that lose a class are skipped.
        auto group_statistic = [&](size_t gi, std::span<const int> labels) {
            FeatureGroup group = kGroups[gi];
            std::vector<double> aucs(n_splits, -1.0);
            util::parallel_for(n_splits, 1, [&](size_t si) {
                if (group != FeatureGroup::pos) {
                    auto r = eval_on_split(full_matrix[gi], labels, splits[si], best[gi].C);
                    if (r.ok) aucs[si] = r.auc_value;
                } else {
                    std::vector<lingfeat::TaggedGame> train_tagged;
                    for (size_t i : splits[si].train) train_tagged.push_back(ds.tagged[i]);
                    auto vocab = lingfeat::fit_pos_vocab(train_tagged,
                                                         {best[gi].pos_n, best[gi].pos_min_df});
                    Matrix X = pos_matrix(ds, vocab);
                    auto r = eval_on_split(X, labels, splits[si], best[gi].C);
                    if (r.ok) aucs[si] = r.auc_value;
                }
            });
            double sum = 0.0;
            size_t n_ok = 0;
            for (double v : aucs)
                if (v >= 0.0) { sum += v; ++n_ok; }
            return n_ok == 0 ? 0.5 : sum / static_cast<double>(n_ok);
        };

        for (size_t gi = 0; gi < kGroups.size(); ++gi) {
            std::vector<double> perm_values(static_cast<size_t>(cfg.n_perm), 0.0);
            util::parallel_for(static_cast<size_t>(cfg.n_perm), cfg.jobs, [&](size_t p) {
                std::vector<int> perm(ds.y.begin(), ds.y.end());
                util::Rng rng(util::mix_seed(cfg.seed ^ 0x7065726dull, p));
                rng.shuffle(perm);
                perm_values[p] = group_statistic(gi, perm);
            });
            int at_least = 0;
            for (double v : perm_values)
                if (v >= out.groups[gi].mean_auc) ++at_least;
            out.groups[gi].p_value = (1.0 + at_least) / (1.0 + cfg.n_perm);
        }

        auto all_statistic = [&](std::span<const int> labels) {
            std::vector<double> aucs(n_splits, -1.0);
            for (size_t si = 0; si < n_splits; ++si) {
                auto y_val = select_labels(labels, splits[si].validation);
                if (!two_classes(select_labels(labels, splits[si].train)) || !two_classes(y_val))
                    continue;
                std::vector<double> comb(y_val.size(), 0.0);
                bool usable = true;
                for (size_t gi = 0; gi < 4 && usable; ++gi) {
                    if (out.weights[gi] == 0.0) continue;
                    SplitOutcome r;
                    if (kGroups[gi] != FeatureGroup::pos) {
                        r = eval_on_split(full_matrix[gi], labels, splits[si], best[gi].C);
                    } else {
                        std::vector<lingfeat::TaggedGame> train_tagged;
                        for (size_t i : splits[si].train) train_tagged.push_back(ds.tagged[i]);
                        auto vocab = lingfeat::fit_pos_vocab(train_tagged,
                                                             {best[gi].pos_n, best[gi].pos_min_df});
                        Matrix X = pos_matrix(ds, vocab);
                        r = eval_on_split(X, labels, splits[si], best[gi].C);
                    }
                    if (!r.ok) { usable = false; break; }
                    for (size_t k = 0; k < comb.size(); ++k) comb[k] += out.weights[gi] * r.val_probs[k];
                }
                if (usable) aucs[si] = auc(comb, y_val);
            }
            double sum = 0.0;
            size_t n_ok = 0;
            for (double v : aucs)
                if (v >= 0.0) { sum += v; ++n_ok; }
            return n_ok == 0 ? 0.5 : sum / static_cast<double>(n_ok);
        };
        std::vector<double> perm_values(static_cast<size_t>(cfg.n_perm), 0.0);
        util::parallel_for(static_cast<size_t>(cfg.n_perm), cfg.jobs, [&](size_t p) {
            std::vector<int> perm(ds.y.begin(), ds.y.end());
            util::Rng rng(util::mix_seed(cfg.seed ^ 0x7065726dull, p));
            rng.shuffle(perm);
            perm_values[p] = all_statistic(perm);
        });
        int at_least = 0;
        for (double v : perm_values)
            if (v >= out.all.mean_auc) ++at_least;
        out.all.p_value = (1.0 + at_least) / (1.0 + cfg.n_perm);
    }

    return out;
}

std::vector<BootstrapRow> bootstrap_splits(const EvalDataset& ds, const EvalOutcome& outcome,
                                           const ProtocolConfig& cfg) {
    auto splits = puzzle_aware_splits(ds.puzzle_ids, ds.y, cfg.bootstrap_splits, cfg.train_frac,
                                      util::mix_seed(cfg.seed, 0xb005ull));
    size_t n_splits = splits.size();

    // per split: recompute each chosen group model, then the weighted average
    std::array<std::vector<std::vector<double>>, 4> probs; // [group][split] -> val probs
    std::array<std::vector<double>, 4> group_auc;
    for (auto& g : probs) g.assign(n_splits, {});
    for (auto& g : group_auc) g.assign(n_splits, -1.0);

    std::array<Matrix, 4> scalar_cache;
    for (size_t gi = 0; gi < kGroups.size(); ++gi)
        if (kGroups[gi] != FeatureGroup::pos)
            scalar_cache[gi] = scalar_matrix(ds, group_scalar_names(kGroups[gi]));

    util::parallel_for(n_splits, cfg.jobs, [&](size_t si) {
        for (size_t gi = 0; gi < kGroups.size(); ++gi) {
            const GroupEval& ge = outcome.groups[gi];
            SplitOutcome r;
            if (kGroups[gi] != FeatureGroup::pos) {
                r = eval_on_split(scalar_cache[gi], ds.y, splits[si], ge.C);
            } else {
                std::vector<lingfeat::TaggedGame> train_tagged;
                for (size_t i : splits[si].train) train_tagged.push_back(ds.tagged[i]);
                auto vocab = lingfeat::fit_pos_vocab(train_tagged, {ge.pos_n, ge.pos_min_df});
                Matrix X = pos_matrix(ds, vocab);
                r = eval_on_split(X, ds.y, splits[si], ge.C);
            }
            if (r.ok) {
                group_auc[gi][si] = r.auc_value;
                probs[gi][si] = std::move(r.val_probs);
            }
        }
    });

    std::vector<BootstrapRow> rows;
    for (size_t gi = 0; gi < kGroups.size(); ++gi) {
        BootstrapRow row;
        row.name = outcome.groups[gi].name;
        std::vector<double> vals;
        for (double v : group_auc[gi])
            if (v >= 0.0) vals.push_back(v);
        row.n_splits = static_cast<int>(vals.size());
        if (!vals.empty()) {
            row.mean_auc = mean_of(vals);
            double var = 0.0;
            for (double v : vals) var += (v - row.mean_auc) * (v - row.mean_auc);
            row.sd_auc = std::sqrt(var / static_cast<double>(vals.size()));
        }
        rows.push_back(std::move(row));
    }

    BootstrapRow all;
    all.name = "all";
    std::vector<double> vals;
    for (size_t si = 0; si < n_splits; ++si) {
        auto y_val = select_labels(ds.y, splits[si].validation);
        if (!two_classes(y_val)) continue;
        std::vector<double> comb(y_val.size(), 0.0);
        bool usable = true;
        for (size_t gi = 0; gi < 4; ++gi) {
            if (outcome.weights[gi] == 0.0) continue;
            if (probs[gi][si].size() != y_val.size()) { usable = false; break; }
            for (size_t k = 0; k < comb.size(); ++k) comb[k] += outcome.weights[gi] * probs[gi][si][k];
        }
        if (usable) vals.push_back(auc(comb, y_val));
    }
    all.n_splits = static_cast<int>(vals.size());
    if (!vals.empty()) {
        all.mean_auc = mean_of(vals);
        double var = 0.0;
        for (double v : vals) var += (v - all.mean_auc) * (v - all.mean_auc);
        all.sd_auc = std::sqrt(var / static_cast<double>(vals.size()));
    }
    rows.push_back(std::move(all));
    return rows;
}

TrainedArtifact train_final(const EvalDataset& ds, const EvalOutcome& outcome,
                            const ProtocolConfig& cfg) {
    TrainedArtifact art;
    art.weights = outcome.weights;
    art.seed = cfg.seed;

    const GroupEval* pos_eval = nullptr;
    for (const auto& g : outcome.groups)
        if (g.name == "pos") pos_eval = &g;
    lingfeat::PosParams pos_params{pos_eval ? pos_eval->pos_n : 2,
                                   pos_eval ? pos_eval->pos_min_df : 2};
    art.pos_vocab = lingfeat::fit_pos_vocab(ds.tagged, pos_params);
    art.registry_hash = lingfeat::registry_hash(lingfeat::build_registry(art.pos_vocab));

    for (size_t gi = 0; gi < kGroups.size(); ++gi) {
        const GroupEval& ge = outcome.groups[gi];
        TrainedGroup tg;
        tg.name = ge.name;
        tg.pos_n = ge.pos_n;
        tg.pos_min_df = ge.pos_min_df;
        Matrix X;
        if (kGroups[gi] != FeatureGroup::pos) {
            auto names = group_scalar_names(kGroups[gi]);
            tg.feature_names = names;
            X = scalar_matrix(ds, names);
        } else {
            for (const auto& gram : art.pos_vocab.grams)
                tg.feature_names.push_back(lingfeat::PosVocab::feature_name(gram));
            X = pos_matrix(ds, art.pos_vocab);
        }
        tg.standardizer = Standardizer::fit(X);
        Matrix Xs = tg.standardizer.apply(X);
        tg.model = train_logreg(Xs, ds.y, ge.C > 0 ? ge.C : 1.0, cfg.seed);
        art.groups.push_back(std::move(tg));
    }
    return art;
}

} // namespace teamflow::model
