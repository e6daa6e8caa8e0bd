#include "teamflow/dynamics.hpp"
#include "teamflow/error.hpp"
#include "teamflow/geo.hpp"
#include "teamflow/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace teamflow::dynamics {

double balance_entropy(std::span<const double> values) {
    if (values.size() < 2)
        throw Error(Errc::size_under_two, "balance_entropy needs at least two values");
    double total = 0.0;
    bool uniform = true;
    for (double v : values) {
        if (v < 0.0) throw Error(Errc::size_under_two, "balance_entropy values must be >= 0");
        total += v;
        if (v != values[0]) uniform = false;
    }
    if (total <= 0.0) return 0.0;
    if (uniform) return 1.0; // exact by algebra; avoids log round-off
    double log_base = std::log(static_cast<double>(values.size()));
    double h = 0.0;
    for (double v : values) {
        if (v <= 0.0) continue; // 0 log 0 := 0
        double s = v / total;
        h -= s * (std::log(s) / log_base);
    }
    return h;
}

namespace {

size_t word_count(const std::vector<text::Token>& tokens) {
    size_t n = 0;
    for (const auto& t : tokens)
        if (t.tag != text::Tag::punct) ++n;
    return n;
}

} // namespace

FeatureMap participation_indicators(const corpus::GameRecord& game,
                                    const std::vector<text::TaggedMessage>& tagged) {
    FeatureMap out;
    size_t n = game.players.size();
    std::unordered_map<std::string, size_t> index;
    for (size_t i = 0; i < n; ++i) index[game.players[i]] = i;

    std::vector<double> msg_counts(n, 0.0), word_sums(n, 0.0), move_counts(n, 0.0);
    for (const auto& m : tagged) {
        auto it = index.find(m.player);
        if (it == index.end()) continue;
        msg_counts[it->second] += 1.0;
        word_sums[it->second] += static_cast<double>(word_count(m.tokens));
    }
    for (const auto& mv : game.marker_moves) {
        auto it = index.find(mv.player);
        if (it != index.end()) move_counts[it->second] += 1.0;
    }

    size_t chatters = 0, movers = 0;
    for (size_t i = 0; i < n; ++i) {
        if (msg_counts[i] > 0) ++chatters;
        if (move_counts[i] > 0) ++movers;
    }
    out["dyn.all_chat"] = chatters == n ? 1.0 : 0.0;
    out["dyn.all_move"] = movers == n ? 1.0 : 0.0;
    out["dyn.two_plus_move"] = movers >= 2 ? 1.0 : 0.0;

    if (n >= 2) {
        out["dyn.entropy_msgs"] = balance_entropy(msg_counts);
        std::vector<double> mean_words(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            if (msg_counts[i] > 0) mean_words[i] = word_sums[i] / msg_counts[i];
        out["dyn.entropy_words_per_msg"] = balance_entropy(mean_words);
        out["dyn.entropy_moves"] = balance_entropy(move_counts);
    }
    return out;
}

namespace {

using ItemSet = std::set<std::string>;

ItemSet item_set(const text::TaggedUtterance& u, MatchClass cls, const text::LexiconSet& lex) {
    ItemSet items;
    switch (cls) {
        case MatchClass::stopword:
            for (const auto& t : u.tokens)
                if (lex.is_stopword(t.norm)) items.insert(t.norm);
            break;
        case MatchClass::content:
            for (const auto& t : u.tokens) {
                bool content = t.tag == text::Tag::noun || t.tag == text::Tag::proper ||
                               t.tag == text::Tag::adj || t.tag == text::Tag::verb ||
                               t.tag == text::Tag::adv;
                if (content && !lex.is_stopword(t.norm)) items.insert(t.norm);
            }
            break;
        case MatchClass::pos_bigram:
            for (size_t i = 0; i + 1 < u.tokens.size(); ++i) {
                std::string bg{text::tag_char(u.tokens[i].tag), text::tag_char(u.tokens[i + 1].tag)};
                items.insert(std::move(bg));
            }
            break;
    }
    return items;
}

} // namespace

std::optional<MatchResult> matching(std::span<const text::TaggedUtterance> utterances,
                                    MatchClass vocab_class, const text::LexiconSet& lex) {
    if (utterances.size() < 2) return std::nullopt;

    std::vector<ItemSet> sets;
    sets.reserve(utterances.size());
    for (const auto& u : utterances) sets.push_back(item_set(u, vocab_class, lex));

    double num = 0.0, den = 0.0;
    struct PairAcc {
        double num = 0.0, den = 0.0;
    };
    std::map<std::pair<std::string, std::string>, PairAcc> pairs;
    bool any_turn = false;

    for (size_t i = 0; i + 1 < utterances.size(); ++i) {
        const ItemSet& msg = sets[i];
        const ItemSet& reply = sets[i + 1];
        if (msg.empty()) continue; // skipped in both numerator and denominator
        any_turn = true;
        double inter = 0.0;
        for (const auto& item : msg)
            if (reply.count(item)) inter += 1.0;
        num += inter;
        den += static_cast<double>(msg.size());
        auto key = std::minmax(utterances[i].player, utterances[i + 1].player);
        auto& acc = pairs[{key.first, key.second}];
        acc.num += inter;
        acc.den += static_cast<double>(msg.size());
    }
    if (!any_turn || den <= 0.0) return std::nullopt;

    MatchResult out;
    out.overall = num / den;
    double best = 0.0;
    for (const auto& [key, acc] : pairs) {
        if (acc.den <= 0.0) continue;
        double v = acc.num / acc.den;
        out.pair_values[key] = v;
        best = std::max(best, v);
    }
    out.max_pair = best;
    return out;
}

FeatureMap stance_features(const std::vector<text::TaggedMessage>& tagged,
                           const text::LexiconSet& lex) {
    FeatureMap out;
    double agree = 0.0, disagree = 0.0;
    for (const auto& m : tagged) {
        switch (text::detect_stance(m.tokens, lex.agreement, lex.disagreement)) {
            case text::Stance::agree: agree += 1.0; break;
            case text::Stance::disagree: disagree += 1.0; break;
            case text::Stance::none: break;
        }
    }
    out["dyn.agree_count"] = agree;
    out["dyn.disagree_count"] = disagree;
    if (!tagged.empty()) {
        out["dyn.agree_frac"] = agree / static_cast<double>(tagged.size());
        out["dyn.disagree_frac"] = disagree / static_cast<double>(tagged.size());
    }
    return out;
}

FeatureMap guess_dynamics(const std::vector<corpus::MarkerMove>& moves) {
    FeatureMap out;
    std::vector<double> jumps, cross_jumps;
    for (size_t i = 0; i + 1 < moves.size(); ++i) {
        double d = geo::arc_distance_km(moves[i].location, moves[i + 1].location);
        jumps.push_back(d);
        if (moves[i].player != moves[i + 1].player) cross_jumps.push_back(d);
    }
    if (!jumps.empty()) out["dyn.median_jump"] = util::median(jumps);
    if (!cross_jumps.empty()) out["dyn.median_cross_jump"] = util::median(cross_jumps);
    return out;
}

std::optional<double> confidence_feature(const std::vector<corpus::SoloGuess>& solo_guesses) {
    if (solo_guesses.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& g : solo_guesses) sum += g.confidence;
    return sum / static_cast<double>(solo_guesses.size());
}

} // namespace teamflow::dynamics
