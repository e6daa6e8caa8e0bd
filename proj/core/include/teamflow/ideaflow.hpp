#pragma once
// Idea introduction/adoption structure of a conversation.
//
// A candidate idea is a content token (N ^ A V, not a stopword, length >= 2);
// it becomes an idea once a player other than its introducer uses it. Hedging
// is attributed at message level via the hedge lexicon.

#include "teamflow/dynamics.hpp"
#include "teamflow/text.hpp"

#include <string>
#include <vector>

namespace teamflow::ideaflow {

struct Adoption {
    std::string player;
    size_t msg_index = 0;
    bool hedged = false;
};

struct IdeaEvent {
    std::string term; // normalized form
    std::string introducer;
    size_t intro_msg_index = 0;
    bool intro_hedged = false;
    std::vector<Adoption> adoptions; // non-empty by construction
};

// Single pass over the tagged conversation; ideas ordered by introduction.
std::vector<IdeaEvent> extract_ideas(const std::vector<text::TaggedMessage>& messages,
                                     const text::LexiconSet& lex);

// ideas.count, ideas.unanimous_count, ideas.max_introduced,
// ideas.intro_entropy, ideas.intro_hedged_frac, ideas.adopt_hedged_frac.
// Unanimous = adopted by every team member other than the introducer.
dynamics::FeatureMap idea_features(const std::vector<IdeaEvent>& ideas,
                                   const std::vector<std::string>& players);

} // namespace teamflow::ideaflow
