#include "teamflow/ideaflow.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace teamflow::ideaflow {

namespace {

bool candidate_tag(text::Tag t) {
    return t == text::Tag::noun || t == text::Tag::proper || t == text::Tag::adj ||
           t == text::Tag::verb;
}

} // namespace

std::vector<IdeaEvent> extract_ideas(const std::vector<text::TaggedMessage>& messages,
                                     const text::LexiconSet& lex) {
    std::vector<bool> hedged(messages.size(), false);
    for (size_t i = 0; i < messages.size(); ++i)
        hedged[i] = text::lexicon_hits(messages[i].tokens, lex.hedges).count > 0;

    struct Track {
        std::string introducer;
        size_t intro_index = 0;
        size_t order = 0; // position of first occurrence, for stable output
        std::vector<Adoption> adoptions;
        std::set<std::string> users; // players seen so far (incl. introducer)
    };
    std::unordered_map<std::string, Track> tracks;
    size_t order_counter = 0;

    for (size_t mi = 0; mi < messages.size(); ++mi) {
        const auto& msg = messages[mi];
        std::set<std::string> seen_in_msg; // first use within the message counts
        for (const auto& tok : msg.tokens) {
            if (!candidate_tag(tok.tag)) continue;
            if (tok.norm.size() < 2) continue;
            if (lex.is_stopword(tok.norm)) continue;
            if (!seen_in_msg.insert(tok.norm).second) continue;

            auto it = tracks.find(tok.norm);
            if (it == tracks.end()) {
                Track t;
                t.introducer = msg.player;
                t.intro_index = mi;
                t.order = order_counter++;
                t.users.insert(msg.player);
                tracks.emplace(tok.norm, std::move(t));
            } else {
                Track& t = it->second;
                if (t.users.insert(msg.player).second)
                    t.adoptions.push_back({msg.player, mi, hedged[mi]});
            }
        }
    }

    std::vector<std::pair<std::string, const Track*>> adopted;
    for (const auto& [term, track] : tracks)
        if (!track.adoptions.empty()) adopted.emplace_back(term, &track);
    std::sort(adopted.begin(), adopted.end(), [](const auto& a, const auto& b) {
        return a.second->order < b.second->order;
    });

    std::vector<IdeaEvent> out;
    out.reserve(adopted.size());
    for (const auto& [term, track] : adopted) {
        IdeaEvent e;
        e.term = term;
        e.introducer = track->introducer;
        e.intro_msg_index = track->intro_index;
        e.intro_hedged = hedged[track->intro_index];
        e.adoptions = track->adoptions;
        out.push_back(std::move(e));
    }
    return out;
}

dynamics::FeatureMap idea_features(const std::vector<IdeaEvent>& ideas,
                                   const std::vector<std::string>& players) {
    dynamics::FeatureMap out;
    std::map<std::string, double> intro_counts;
    for (const auto& p : players) intro_counts[p] = 0.0;

    double unanimous = 0.0, hedged_intros = 0.0, adoptions = 0.0, hedged_adoptions = 0.0;
    for (const auto& idea : ideas) {
        intro_counts[idea.introducer] += 1.0;
        if (idea.intro_hedged) hedged_intros += 1.0;
        for (const auto& a : idea.adoptions) {
            adoptions += 1.0;
            if (a.hedged) hedged_adoptions += 1.0;
        }
        if (!players.empty() && idea.adoptions.size() >= players.size() - 1) unanimous += 1.0;
    }

    out["ideas.count"] = static_cast<double>(ideas.size());
    out["ideas.unanimous_count"] = unanimous;
    double max_intro = 0.0;
    std::vector<double> counts;
    counts.reserve(intro_counts.size());
    for (const auto& [p, c] : intro_counts) {
        max_intro = std::max(max_intro, c);
        counts.push_back(c);
    }
    out["ideas.max_introduced"] = max_intro;
    out["ideas.intro_entropy"] = counts.size() >= 2 ? dynamics::balance_entropy(counts) : 0.0;
    out["ideas.intro_hedged_frac"] = ideas.empty() ? 0.0 : hedged_intros / static_cast<double>(ideas.size());
    out["ideas.adopt_hedged_frac"] = adoptions == 0.0 ? 0.0 : hedged_adoptions / adoptions;
    return out;
}

} // namespace teamflow::ideaflow
