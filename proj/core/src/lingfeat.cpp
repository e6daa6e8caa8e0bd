#include "teamflow/lingfeat.hpp"
#include "teamflow/error.hpp"
#include "teamflow/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace teamflow::lingfeat {

const char* feature_group_name(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::baseline: return "baseline";
        case FeatureGroup::interaction: return "interaction";
        case FeatureGroup::linguistic: return "linguistic";
        case FeatureGroup::pos: return "pos";
    }
    return "unknown";
}

const std::vector<RegistryEntry>& scalar_registry() {
    static const std::vector<RegistryEntry> reg = [] {
        std::vector<RegistryEntry> r;
        auto add = [&](const char* name, FeatureGroup g) { r.push_back({name, g}); };
        add("base.team_size", FeatureGroup::baseline);
        add("base.msgs_per_player", FeatureGroup::baseline);
        add("base.duration_s", FeatureGroup::baseline);
        add("ideas.count", FeatureGroup::interaction);
        add("ideas.unanimous_count", FeatureGroup::interaction);
        add("ideas.max_introduced", FeatureGroup::interaction);
        add("ideas.intro_entropy", FeatureGroup::interaction);
        add("ideas.intro_hedged_frac", FeatureGroup::interaction);
        add("ideas.adopt_hedged_frac", FeatureGroup::interaction);
        add("dyn.all_chat", FeatureGroup::interaction);
        add("dyn.all_move", FeatureGroup::interaction);
        add("dyn.two_plus_move", FeatureGroup::interaction);
        add("dyn.entropy_msgs", FeatureGroup::interaction);
        add("dyn.entropy_words_per_msg", FeatureGroup::interaction);
        add("dyn.entropy_moves", FeatureGroup::interaction);
        add("dyn.match_stop", FeatureGroup::interaction);
        add("dyn.match_content", FeatureGroup::interaction);
        add("dyn.match_posbi", FeatureGroup::interaction);
        add("dyn.match_stop_maxpair", FeatureGroup::interaction);
        add("dyn.match_content_maxpair", FeatureGroup::interaction);
        add("dyn.match_posbi_maxpair", FeatureGroup::interaction);
        add("dyn.agree_count", FeatureGroup::interaction);
        add("dyn.disagree_count", FeatureGroup::interaction);
        add("dyn.median_jump", FeatureGroup::interaction);
        add("dyn.median_cross_jump", FeatureGroup::interaction);
        add("dyn.mean_confidence", FeatureGroup::interaction);
        add("lng.words_per_msg", FeatureGroup::linguistic);
        add("lng.solo_reason_words", FeatureGroup::linguistic);
        add("lng.ttr", FeatureGroup::linguistic);
        add("lng.mean_turn_gap_s", FeatureGroup::linguistic);
        add("lng.num_turns", FeatureGroup::linguistic);
        add("lng.certainty_frac", FeatureGroup::linguistic);
        add("lng.hedge_frac", FeatureGroup::linguistic);
        add("lng.pron_1sg_frac", FeatureGroup::linguistic);
        add("lng.pron_1pl_frac", FeatureGroup::linguistic);
        add("lng.pron_2_frac", FeatureGroup::linguistic);
        add("lng.concreteness", FeatureGroup::linguistic);
        add("lng.geo_frac", FeatureGroup::linguistic);
        add("lng.interface_frac", FeatureGroup::linguistic);
        return r;
    }();
    return reg;
}

TaggedGame tag_game(const corpus::GameRecord& game, const text::LexiconSet& lex) {
    TaggedGame tg;
    tg.game = &game;
    tg.messages = text::tag_conversation(game.messages, lex);
    tg.utterances = text::tag_utterances(corpus::derive_utterances(game.messages), tg.messages);
    return tg;
}

namespace {

size_t word_count(const std::vector<text::Token>& tokens) {
    size_t n = 0;
    for (const auto& t : tokens)
        if (t.tag != text::Tag::punct) ++n;
    return n;
}

} // namespace

FeatureMap length_features(const TaggedGame& tg) {
    FeatureMap out;
    const auto& msgs = tg.messages;
    if (!msgs.empty()) {
        double words = 0.0, tokens = 0.0;
        std::unordered_set<std::string> norms;
        for (const auto& m : msgs) {
            words += static_cast<double>(word_count(m.tokens));
            tokens += static_cast<double>(m.tokens.size());
            for (const auto& t : m.tokens) norms.insert(t.norm);
        }
        out["lng.words_per_msg"] = words / static_cast<double>(msgs.size());
        if (tokens > 0) out["lng.ttr"] = static_cast<double>(norms.size()) / tokens;
        out["lng.num_turns"] = static_cast<double>(tg.utterances.size()) - 1.0;
        if (tg.utterances.size() >= 2) {
            double gap = 0.0;
            for (size_t i = 0; i + 1 < tg.utterances.size(); ++i)
                gap += tg.utterances[i + 1].start_ts - tg.utterances[i].end_ts;
            out["lng.mean_turn_gap_s"] = gap / static_cast<double>(tg.utterances.size() - 1);
        }
    }
    double reason_words = 0.0;
    for (const auto& sg : tg.game->solo_guesses)
        reason_words += static_cast<double>(word_count(text::tokenize(sg.reason)));
    out["lng.solo_reason_words"] = reason_words;
    return out;
}

FeatureMap lexicon_features(const TaggedGame& tg, const text::LexiconSet& lex) {
    FeatureMap out;
    std::vector<text::Token> all;
    for (const auto& m : tg.messages)
        all.insert(all.end(), m.tokens.begin(), m.tokens.end());
    if (all.empty()) return out;
    double total = static_cast<double>(all.size());

    auto frac = [&](const text::Lexicon& lx) {
        return static_cast<double>(text::lexicon_hits(all, lx).count) / total;
    };
    out["lng.certainty_frac"] = frac(lex.certainty);
    out["lng.hedge_frac"] = frac(lex.hedges);
    out["lng.pron_1sg_frac"] = frac(lex.pron_1sg);
    out["lng.pron_1pl_frac"] = frac(lex.pron_1pl);
    out["lng.pron_2_frac"] = frac(lex.pron_2);
    out["lng.geo_frac"] = frac(lex.geography);
    out["lng.interface_frac"] = frac(lex.interface_words);
    if (auto c = text::mean_concreteness(all, lex.concreteness)) out["lng.concreteness"] = *c;
    return out;
}

namespace {

// Anchor of the team phase: earliest message or marker-move timestamp.
std::optional<double> interaction_anchor(const corpus::GameRecord& game) {
    std::optional<double> anchor;
    if (!game.messages.empty()) anchor = game.messages.front().ts;
    if (!game.marker_moves.empty()) {
        double t = game.marker_moves.front().ts;
        anchor = anchor ? std::min(*anchor, t) : t;
    }
    return anchor;
}

} // namespace

FeatureMap baseline_features(const corpus::GameRecord& game) {
    FeatureMap out;
    out["base.team_size"] = static_cast<double>(game.players.size());
    if (!game.players.empty())
        out["base.msgs_per_player"] =
            static_cast<double>(game.messages.size()) / static_cast<double>(game.players.size());
    if (auto anchor = interaction_anchor(game)) out["base.duration_s"] = game.submitted_at - *anchor;
    return out;
}

std::string PosVocab::feature_name(const std::string& gram) {
    std::string safe;
    for (char c : gram) safe += (c == ',') ? 'c' : c;
    return "pos." + std::to_string(gram.size()) + ":" + safe;
}

namespace {

// Every n-gram (orders 1..max_n) of the game's padded message tag sequences.
void for_each_gram(const TaggedGame& tg, int max_n, const std::function<void(const std::string&)>& fn) {
    for (const auto& m : tg.messages) {
        std::string tags;
        tags.reserve(m.tokens.size() + 2);
        tags += kPosBoundary;
        for (const auto& t : m.tokens) tags += text::tag_char(t.tag);
        tags += kPosBoundary;
        for (int n = 1; n <= max_n; ++n) {
            if (tags.size() < static_cast<size_t>(n)) continue;
            for (size_t i = 0; i + static_cast<size_t>(n) <= tags.size(); ++i)
                fn(tags.substr(i, static_cast<size_t>(n)));
        }
    }
}

} // namespace

PosVocab fit_pos_vocab(std::span<const TaggedGame> training_games, const PosParams& params) {
    std::map<std::string, int> doc_freq;
    for (const auto& tg : training_games) {
        std::set<std::string> seen;
        for_each_gram(tg, params.max_n, [&](const std::string& g) { seen.insert(g); });
        for (const auto& g : seen) doc_freq[g] += 1;
    }
    PosVocab vocab;
    vocab.params = params;
    for (const auto& [gram, df] : doc_freq)
        if (df >= params.min_df) vocab.grams.push_back(gram);
    std::sort(vocab.grams.begin(), vocab.grams.end(), [](const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    for (size_t i = 0; i < vocab.grams.size(); ++i) vocab.index[vocab.grams[i]] = i;
    return vocab;
}

std::map<std::string, double> pos_gram_frequencies(const TaggedGame& tg, const PosVocab& vocab) {
    std::map<std::string, double> out;
    if (tg.messages.empty() || vocab.grams.empty()) return out;
    std::unordered_map<std::string, double> counts;
    std::vector<double> order_totals(static_cast<size_t>(vocab.params.max_n) + 1, 0.0);
    for_each_gram(tg, vocab.params.max_n, [&](const std::string& g) {
        order_totals[g.size()] += 1.0;
        if (vocab.index.count(g)) counts[g] += 1.0;
    });
    for (const auto& gram : vocab.grams) {
        double total = order_totals[gram.size()];
        auto it = counts.find(gram);
        double c = it == counts.end() ? 0.0 : it->second;
        out[gram] = total > 0.0 ? c / total : 0.0;
    }
    return out;
}

EarlyWindow early_window(const corpus::GameRecord& game, double horizon_s, double max_coverage,
                         EarlyCoverage coverage) {
    auto anchor = interaction_anchor(game);
    if (!anchor) throw Error(Errc::no_events, "early_window: game has no messages or moves");
    double cutoff = *anchor + horizon_s;

    EarlyWindow out;
    out.game = game;
    out.game.messages.clear();
    out.game.marker_moves.clear();
    for (const auto& m : game.messages)
        if (m.ts < cutoff) out.game.messages.push_back(m);
    for (const auto& mv : game.marker_moves)
        if (mv.ts < cutoff) out.game.marker_moves.push_back(mv);
    if (game.window_leave) {
        std::vector<corpus::WindowLeave> wl;
        for (const auto& w : *game.window_leave)
            if (w.ts < cutoff) wl.push_back(w);
        out.game.window_leave = std::move(wl);
    }
    out.game.submitted_at = std::min(game.submitted_at, cutoff);
    size_t total = game.messages.size();
    size_t retained = out.game.messages.size();
    if (coverage == EarlyCoverage::all_events) {
        total += game.marker_moves.size();
        retained += out.game.marker_moves.size();
    }
    out.coverage = total == 0 ? 0.0 : static_cast<double>(retained) / static_cast<double>(total);
    out.eligible = out.coverage <= max_coverage;
    return out;
}

FeatureMap scalar_features(const TaggedGame& tg, const text::LexiconSet& lex) {
    FeatureMap out = baseline_features(*tg.game);

    auto ideas = ideaflow::extract_ideas(tg.messages, lex);
    for (auto& [k, v] : ideaflow::idea_features(ideas, tg.game->players)) out[k] = v;

    for (auto& [k, v] : dynamics::participation_indicators(*tg.game, tg.messages)) out[k] = v;

    auto put_match = [&](dynamics::MatchClass cls, const char* overall, const char* maxpair) {
        if (auto m = dynamics::matching(tg.utterances, cls, lex)) {
            out[overall] = m->overall;
            out[maxpair] = m->max_pair;
        }
    };
    put_match(dynamics::MatchClass::stopword, "dyn.match_stop", "dyn.match_stop_maxpair");
    put_match(dynamics::MatchClass::content, "dyn.match_content", "dyn.match_content_maxpair");
    put_match(dynamics::MatchClass::pos_bigram, "dyn.match_posbi", "dyn.match_posbi_maxpair");

    auto stance = dynamics::stance_features(tg.messages, lex);
    out["dyn.agree_count"] = stance["dyn.agree_count"];
    out["dyn.disagree_count"] = stance["dyn.disagree_count"];

    for (auto& [k, v] : dynamics::guess_dynamics(tg.game->marker_moves)) out[k] = v;
    if (auto c = dynamics::confidence_feature(tg.game->solo_guesses)) out["dyn.mean_confidence"] = *c;

    for (auto& [k, v] : length_features(tg)) out[k] = v;
    for (auto& [k, v] : lexicon_features(tg, lex)) out[k] = v;
    return out;
}

std::vector<RegistryEntry> build_registry(const PosVocab& vocab) {
    std::vector<RegistryEntry> reg = scalar_registry();
    for (const auto& gram : vocab.grams)
        reg.push_back({PosVocab::feature_name(gram), FeatureGroup::pos});
    return reg;
}

FeatureVector featurize_game(const TaggedGame& tg, const text::LexiconSet& lex,
                             const PosVocab& vocab, const std::vector<RegistryEntry>& registry) {
    FeatureMap scalars = scalar_features(tg, lex);
    auto pos = pos_gram_frequencies(tg, vocab);
    std::map<std::string, double> pos_by_name;
    for (auto& [gram, v] : pos) pos_by_name[PosVocab::feature_name(gram)] = v;

    FeatureVector fv;
    fv.values.resize(registry.size());
    for (size_t i = 0; i < registry.size(); ++i) {
        const auto& entry = registry[i];
        if (entry.group == FeatureGroup::pos) {
            auto it = pos_by_name.find(entry.name);
            if (it != pos_by_name.end()) fv.values[i] = it->second;
        } else {
            auto it = scalars.find(entry.name);
            if (it != scalars.end()) fv.values[i] = it->second;
        }
    }
    return fv;
}

uint64_t registry_hash(const std::vector<RegistryEntry>& registry) {
    std::string joined;
    for (const auto& e : registry) {
        joined += e.name;
        joined += '|';
        joined += feature_group_name(e.group);
        joined += '\n';
    }
    return util::fnv1a64(joined);
}

} // namespace teamflow::lingfeat
