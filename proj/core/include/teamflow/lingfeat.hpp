#pragma once
// Linguistic features, POS n-grams, early-window truncation and full
// feature-vector assembly.

#include "teamflow/corpus.hpp"
#include "teamflow/dynamics.hpp"
#include "teamflow/ideaflow.hpp"
#include "teamflow/text.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace teamflow::lingfeat {

enum class FeatureGroup { baseline, interaction, linguistic, pos };

const char* feature_group_name(FeatureGroup g);

struct RegistryEntry {
    std::string name;
    FeatureGroup group;
};

// The canonical scalar features in emission order (base.*, ideas.*, dyn.*,
// lng.*). The pos.* block is appended from a fitted vocabulary.
const std::vector<RegistryEntry>& scalar_registry();

// Tokenized + tagged view of one game, shared by all feature extractors.
struct TaggedGame {
    const corpus::GameRecord* game = nullptr;
    std::vector<text::TaggedMessage> messages;
    std::vector<text::TaggedUtterance> utterances;
};

TaggedGame tag_game(const corpus::GameRecord& game, const text::LexiconSet& lex);

using dynamics::FeatureMap;

FeatureMap length_features(const TaggedGame& tg);
FeatureMap lexicon_features(const TaggedGame& tg, const text::LexiconSet& lex);
FeatureMap baseline_features(const corpus::GameRecord& game);

// --- POS n-grams ------------------------------------------------------------

struct PosParams {
    int max_n = 2;    // orders 1..max_n
    int min_df = 2;   // document (game) frequency threshold
};

// Message tag sequences are padded with a boundary symbol '#' on both sides.
inline constexpr char kPosBoundary = '#';

struct PosVocab {
    PosParams params;
    std::vector<std::string> grams; // sorted by (length, lexicographic)
    std::map<std::string, size_t> index;

    // CSV-safe feature name; the punctuation tag ',' is rendered as 'c'.
    static std::string feature_name(const std::string& gram);
};

PosVocab fit_pos_vocab(std::span<const TaggedGame> training_games, const PosParams& params);

// Relative frequency of each vocabulary gram among the game's grams of the
// same order; empty map when the game has no messages.
std::map<std::string, double> pos_gram_frequencies(const TaggedGame& tg, const PosVocab& vocab);

// --- Early window -----------------------------------------------------------

struct EarlyWindow {
    corpus::GameRecord game; // truncated record; submitted_at clamped to the horizon
    bool eligible = false;   // coverage <= max_coverage
    double coverage = 0.0;   // retained events / total events
};

// What the coverage ratio counts as an "event". Truncation always applies to
// both messages and marker moves.
enum class EarlyCoverage { all_events, messages_only };

// Anchor = earliest of first chat message / first marker move. Events with
// ts < anchor + horizon_s are retained; solo-phase data always survives.
// Throws Error(NO_EVENTS) when the game has no messages and no moves.
EarlyWindow early_window(const corpus::GameRecord& game, double horizon_s = 20.0,
                         double max_coverage = 0.75,
                         EarlyCoverage coverage = EarlyCoverage::all_events);

// --- Assembly ---------------------------------------------------------------

struct FeatureVector {
    // parallel to registry order; nullopt = missing
    std::vector<std::optional<double>> values;
};

struct FeatureFrame {
    std::vector<RegistryEntry> registry;
    std::vector<std::string> game_ids;
    std::vector<FeatureVector> rows;
};

// Scalar (non-POS) features of one game, keyed by canonical name.
FeatureMap scalar_features(const TaggedGame& tg, const text::LexiconSet& lex);

std::vector<RegistryEntry> build_registry(const PosVocab& vocab);

FeatureVector featurize_game(const TaggedGame& tg, const text::LexiconSet& lex,
                             const PosVocab& vocab, const std::vector<RegistryEntry>& registry);

uint64_t registry_hash(const std::vector<RegistryEntry>& registry);

} // namespace teamflow::lingfeat
