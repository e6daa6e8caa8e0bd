#pragma once
// Interaction-dynamics features: balance entropy, participation indicators,
// language matching, stance counts, guess dynamics and solo confidence.

#include "teamflow/corpus.hpp"
#include "teamflow/text.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>

namespace teamflow::dynamics {

// Normalized Shannon entropy with log base |values|:
//   balance(S) = -sum s log_|S| s   over values normalized to sum 1.
// 1 iff uniform, falls toward 0 as one member dominates; all-zero input -> 0.
// Throws Error(SIZE_UNDER_TWO) for fewer than two values.
double balance_entropy(std::span<const double> values);

// Feature maps use absence of a key as the missing-value marker.
using FeatureMap = std::map<std::string, double>;

// dyn.all_chat, dyn.all_move, dyn.two_plus_move plus the three balance
// entropies over messages, words per message, and marker moves.
FeatureMap participation_indicators(const corpus::GameRecord& game,
                                    const std::vector<text::TaggedMessage>& tagged);

enum class MatchClass { stopword, content, pos_bigram };

struct MatchResult {
    double overall = 0.0;  // micro-average over all turns
    double max_pair = 0.0; // best unordered speaker pair's micro-average
    // per unordered speaker pair, for pairs with at least one usable turn
    std::map<std::pair<std::string, std::string>, double> pair_values;
};

// Turn = adjacent utterance pair. The earlier utterance's distinct item set
// is the denominator; turns with an empty item set are skipped entirely.
// nullopt when no usable turn exists.
std::optional<MatchResult> matching(std::span<const text::TaggedUtterance> utterances,
                                    MatchClass vocab_class, const text::LexiconSet& lex);

FeatureMap stance_features(const std::vector<text::TaggedMessage>& tagged,
                           const text::LexiconSet& lex);

// dyn.median_jump over consecutive moves, dyn.median_cross_jump over
// consecutive moves by different players; absent keys when undefined.
FeatureMap guess_dynamics(const std::vector<corpus::MarkerMove>& moves);

std::optional<double> confidence_feature(const std::vector<corpus::SoloGuess>& solo_guesses);

} // namespace teamflow::dynamics
