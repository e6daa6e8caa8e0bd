#pragma once
// Linguistic substrate: tokenization, coarse POS tagging, lexicon resources,
// concreteness scoring and stance detection.

#include "teamflow/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace teamflow::text {

// Coarse tag set (Twitter-style):
// N noun, ^ proper noun, V verb, A adjective, R adverb, O pronoun,
// P preposition, D determiner, & conjunction, $ numeral, ! interjection,
// E emoticon, U url, , punctuation, G other.
enum class Tag : char {
    noun = 'N',
    proper = '^',
    verb = 'V',
    adj = 'A',
    adv = 'R',
    pron = 'O',
    prep = 'P',
    det = 'D',
    conj = '&',
    numeral = '$',
    intj = '!',
    emoticon = 'E',
    url = 'U',
    punct = ',',
    other = 'G',
};

inline char tag_char(Tag t) { return static_cast<char>(t); }
std::optional<Tag> tag_from_char(char c);

struct Token {
    std::string surface;
    std::string norm; // casefolded surface
    Tag tag = Tag::other;
};

bool is_emoticon(std::string_view s);
bool is_url_token(std::string_view s);
// True when any whitespace chunk of the text links to a website.
bool contains_url(std::string_view s);

// Whitespace split, leading/trailing punctuation runs detached as single
// tokens; URLs, emoticons and apostrophe contractions survive intact.
std::vector<Token> tokenize(std::string_view s);

struct Lexicon {
    enum class Pos { any, initial };
    struct Entry {
        std::vector<std::string> tokens; // normalized; multi-word entries allowed
        double weight = 1.0;
        Pos pos = Pos::any;
    };
    std::string name;
    std::vector<Entry> entries;

    bool contains_unigram(std::string_view norm) const;
    // Longest entry starting with `first`, for greedy matching.
    const std::vector<const Entry*>* entries_for(std::string_view first) const;
    void build_index();

private:
    std::unordered_map<std::string, std::vector<const Entry*>> index_;
};

// One entry per line: term[TAB]weight?[TAB]position?; '#' comments.
// The second field is a weight when numeric, a position constraint otherwise.
Lexicon load_lexicon(const std::filesystem::path& file, std::string name);
Lexicon make_lexicon(std::string name, const std::vector<std::string>& terms);

struct LexiconHits {
    int count = 0;
    std::vector<std::pair<size_t, size_t>> spans; // [begin, end) token ranges
};

// Greedy longest-match over the normalized token sequence; non-overlapping.
LexiconHits lexicon_hits(std::span<const Token> tokens, const Lexicon& lex);

// Ratings scaled to [0, 1] via (raw - 1) / 4 at load time.
struct ConcretenessTable {
    std::unordered_map<std::string, double> unigrams;
    std::unordered_map<std::string, double> bigrams; // key: "w1 w2"
};

// TSV: term[TAB]raw_rating_1_to_5.
ConcretenessTable load_concreteness(const std::filesystem::path& file);

// Mean rating over content tokens (N ^ A R V) covered by the table; bigrams
// matched before unigrams. nullopt when nothing is covered.
std::optional<double> mean_concreteness(std::span<const Token>, const ConcretenessTable&);

enum class Stance { agree, disagree, none };

// Positional stance lexicons; agreement wins when both fire.
Stance detect_stance(std::span<const Token> tokens, const Lexicon& agreement,
                     const Lexicon& disagreement);

// All shipped resources, loaded once and shared.
struct LexiconSet {
    Lexicon hedges;
    Lexicon certainty;
    Lexicon agreement;
    Lexicon disagreement;
    Lexicon pron_1sg;
    Lexicon pron_1pl;
    Lexicon pron_2;
    Lexicon geography;
    Lexicon interface_words;
    Lexicon stopwords;
    ConcretenessTable concreteness;

    std::unordered_set<std::string> stopword_set;
    std::unordered_set<std::string> gazetteer; // single-word geography entries
    std::map<std::string, std::string> checksums; // file -> fnv1a64 hex
    uint64_t combined_checksum = 0;

    bool is_stopword(std::string_view norm) const {
        return stopword_set.count(std::string(norm)) > 0;
    }
};

LexiconSet load_lexicon_dir(const std::filesystem::path& dir);

// Rule tagger. Priority: URL/emoticon/punct/numeral shapes, closed-class
// lists (modals tag V), gazetteer, capitalized non-initial token, suffix
// heuristics, default N.
void pos_tag(std::vector<Token>& tokens, const LexiconSet& lex);

struct TaggedMessage {
    std::string player;
    double ts = 0.0;
    std::vector<Token> tokens;
};

// Tokenizes and tags one message; aligned gold tags override the tagger.
TaggedMessage tag_message(const corpus::ChatMessage& msg, const LexiconSet& lex);
std::vector<TaggedMessage> tag_conversation(const std::vector<corpus::ChatMessage>& msgs,
                                            const LexiconSet& lex);

struct TaggedUtterance {
    std::string player;
    double start_ts = 0.0;
    double end_ts = 0.0;
    std::vector<Token> tokens;            // concatenated message tokens
    std::vector<size_t> message_indices;
};

std::vector<TaggedUtterance> tag_utterances(const std::vector<corpus::Utterance>& utts,
                                            const std::vector<TaggedMessage>& msgs);

} // namespace teamflow::text
