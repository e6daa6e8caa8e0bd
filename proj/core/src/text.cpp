#include "teamflow/text.hpp"
#include "teamflow/error.hpp"
#include "teamflow/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

namespace teamflow::text {

namespace {

bool is_punct_char(char c) {
    static const std::string punct = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
    return punct.find(c) != std::string::npos;
}

bool all_punct(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return is_punct_char(c); });
}

const std::unordered_set<std::string>& emoticon_set() {
    static const std::unordered_set<std::string> set = {
        ":)", ":(", ":D", ":P", ":p", ":/", ":|", ":o", ":O", ":s", ":S",
        ":-)", ":-(", ":-D", ":-P", ":-p", ":-/", ":-|", ";)", ";-)", ";p",
        ":'(", ":'D", "D:", "<3", "</3", "xD", "XD", "xd", "=)", "=(", "=D",
        "=/", "^^", "^_^", "o_O", "O_o", "o.O", "-_-", ":3", ">:(", ":]", ":[",
    };
    return set;
}

bool has_scheme_or_www(std::string_view s) {
    return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0 || s.rfind("www.", 0) == 0;
}

// word.tld with a known TLD; keeps "e.g." and version numbers out.
bool is_bare_domain(std::string_view s) {
    static const std::array<std::string_view, 8> tlds = {"com", "org", "net", "edu",
                                                         "gov", "io", "us", "info"};
    size_t dot = s.rfind('.');
    if (dot == std::string_view::npos || dot == 0) return false;
    std::string_view tail = s.substr(dot + 1);
    size_t slash = tail.find('/');
    if (slash != std::string_view::npos) tail = tail.substr(0, slash);
    for (auto t : tlds) {
        if (tail == t) {
            // require an alphanumeric label of length >= 2 before the dot
            size_t prev = s.substr(0, dot).rfind('.');
            std::string_view label = s.substr(prev == std::string_view::npos ? 0 : prev + 1,
                                              dot - (prev == std::string_view::npos ? 0 : prev + 1));
            return label.size() >= 2;
        }
    }
    return false;
}

bool is_numeral(std::string_view s) {
    if (s.empty()) return false;
    size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (start == s.size()) return false;
    std::string_view body = s.substr(start);
    bool digit_seen = false;
    for (char c : body) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digit_seen = true;
        } else if (c != '.' && c != ',') {
            // ordinals: 1st 2nd 3rd 4th...
            static const std::array<std::string_view, 4> ord = {"st", "nd", "rd", "th"};
            size_t i = 0;
            while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
            if (i == 0) return false;
            std::string_view tail = body.substr(i);
            for (auto o : ord)
                if (tail == o) return true;
            return false;
        }
    }
    return digit_seen;
}

struct ClosedClasses {
    std::unordered_set<std::string> pronouns;
    std::unordered_set<std::string> determiners;
    std::unordered_set<std::string> prepositions;
    std::unordered_set<std::string> conjunctions;
    std::unordered_set<std::string> verbs; // modals and auxiliaries
    std::unordered_set<std::string> interjections;
    std::unordered_set<std::string> adverbs;
};

const ClosedClasses& closed_classes() {
    static const ClosedClasses cc = {
        // pronouns
        {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves",
         "you", "your", "yours", "yourself", "yourselves", "u", "ya", "he", "him",
         "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself",
         "they", "them", "their", "theirs", "themselves", "who", "whom", "whose",
         "what", "which", "someone", "something", "anyone", "anything", "everyone",
         "everything", "nothing", "nobody", "somebody", "anybody", "everybody",
         "i'm", "i'll", "i've", "i'd", "you're", "you'll", "you've", "you'd",
         "we're", "we'll", "we've", "we'd", "they're", "they'll", "they've",
         "he's", "she's", "it's", "that's", "there's", "let's"},
        // determiners
        {"the", "a", "an", "this", "that", "these", "those", "some", "any",
         "every", "each", "all", "both", "another", "either", "neither", "such"},
        // prepositions
        {"in", "on", "at", "of", "to", "from", "with", "by", "for", "about",
         "into", "over", "under", "near", "between", "through", "after", "before",
         "around", "off", "out", "above", "below", "across", "behind", "along",
         "toward", "towards", "within", "without", "during", "against", "like",
         "as", "up", "down"},
        // conjunctions
        {"and", "or", "but", "nor", "so", "because", "cuz", "if", "while",
         "although", "though", "unless", "whereas"},
        // modals and auxiliaries -> V
        {"can", "could", "will", "would", "shall", "should", "may", "might",
         "must", "is", "are", "am", "was", "were", "be", "been", "being", "do",
         "does", "did", "done", "have", "has", "had", "can't", "cant", "won't",
         "wont", "don't", "dont", "doesn't", "doesnt", "didn't", "didnt",
         "wouldn't", "wouldnt", "couldn't", "couldnt", "shouldn't", "shouldnt",
         "isn't", "isnt", "aren't", "arent", "wasn't", "wasnt", "weren't",
         "werent", "ain't", "aint", "gonna", "wanna", "gotta"},
        // interjections
        {"yes", "yeah", "yep", "yup", "no", "nope", "nah", "ok", "okay", "oh",
         "ooh", "ah", "ahh", "hmm", "hm", "hmmm", "hey", "hi", "hello", "wow",
         "woah", "whoa", "lol", "haha", "hahaha", "lmao", "omg", "yay", "ugh",
         "huh", "eh", "um", "uh", "umm", "oops", "damn", "dang", "bye", "thanks",
         "thx", "please", "pls"},
        // adverbs
        {"very", "really", "quite", "too", "also", "just", "still", "already",
         "always", "never", "often", "sometimes", "usually", "probably", "maybe",
         "perhaps", "definitely", "clearly", "here", "there", "now", "then",
         "soon", "again", "far", "away", "almost", "only", "even", "actually",
         "somewhere", "anywhere", "everywhere", "not", "n't", "pretty", "rather",
         "else", "instead", "together", "apart", "back"},
    };
    return cc;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

std::optional<Tag> tag_from_char(char c) {
    switch (c) {
        case 'N': case '^': case 'V': case 'A': case 'R': case 'O': case 'P':
        case 'D': case '&': case '$': case '!': case 'E': case 'U': case ',':
        case 'G':
            return static_cast<Tag>(c);
        default:
            return std::nullopt;
    }
}

bool is_emoticon(std::string_view s) { return emoticon_set().count(std::string(s)) > 0; }

bool is_url_token(std::string_view s) { return has_scheme_or_www(s) || is_bare_domain(s); }

bool contains_url(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) {
            std::string_view chunk = s.substr(i, j - i);
            while (!chunk.empty() && is_punct_char(chunk.front()) && !has_scheme_or_www(chunk))
                chunk.remove_prefix(1);
            if (is_url_token(chunk)) return true;
        }
        i = j;
    }
    return false;
}

namespace {

void push_token(std::vector<Token>& out, std::string_view surface) {
    Token t;
    t.surface = std::string(surface);
    t.norm = util::lower_ascii(surface);
    out.push_back(std::move(t));
}

void tokenize_chunk(std::vector<Token>& out, std::string_view chunk) {
    if (chunk.empty()) return;
    if (is_emoticon(chunk) || is_url_token(chunk)) {
        push_token(out, chunk);
        return;
    }
    // detach leading punctuation run
    size_t lead = 0;
    while (lead < chunk.size() && is_punct_char(chunk[lead])) ++lead;
    if (lead == chunk.size()) { // all punctuation
        push_token(out, chunk);
        return;
    }
    if (lead > 0) {
        push_token(out, chunk.substr(0, lead));
        chunk.remove_prefix(lead);
        if (is_emoticon(chunk) || is_url_token(chunk)) {
            push_token(out, chunk);
            return;
        }
    }
    if (is_url_token(chunk)) { // URLs keep trailing slashes etc.
        push_token(out, chunk);
        return;
    }
    size_t trail = 0;
    while (trail < chunk.size() && is_punct_char(chunk[chunk.size() - 1 - trail])) ++trail;
    std::string_view core = chunk.substr(0, chunk.size() - trail);
    push_token(out, core);
    if (trail > 0) push_token(out, chunk.substr(chunk.size() - trail));
}

} // namespace

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) tokenize_chunk(out, s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool Lexicon::contains_unigram(std::string_view norm) const {
    auto it = index_.find(std::string(norm));
    if (it == index_.end()) return false;
    for (const Entry* e : it->second)
        if (e->tokens.size() == 1) return true;
    return false;
}

const std::vector<const Lexicon::Entry*>* Lexicon::entries_for(std::string_view first) const {
    auto it = index_.find(std::string(first));
    return it == index_.end() ? nullptr : &it->second;
}

void Lexicon::build_index() {
    index_.clear();
    for (const Entry& e : entries) {
        if (e.tokens.empty()) continue;
        index_[e.tokens[0]].push_back(&e);
    }
    for (auto& [first, list] : index_) {
        std::stable_sort(list.begin(), list.end(), [](const Entry* a, const Entry* b) {
            return a->tokens.size() > b->tokens.size();
        });
    }
}

Lexicon load_lexicon(const std::filesystem::path& file, std::string name) {
    std::ifstream in(file);
    if (!in) throw Error(Errc::malformed_document, "cannot open lexicon file: " + file.string());
    Lexicon lex;
    lex.name = std::move(name);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = util::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = util::split(t, '\t');
        Lexicon::Entry e;
        std::string term = util::trim(fields[0]);
        for (auto& w : util::split(term, ' '))
            if (!w.empty()) e.tokens.push_back(util::lower_ascii(w));
        if (e.tokens.empty()) continue;
        for (size_t i = 1; i < fields.size(); ++i) {
            std::string f = util::trim(fields[i]);
            if (f.empty()) continue;
            if (f == "ANY" || f == "any") {
                e.pos = Lexicon::Pos::any;
            } else if (f == "INITIAL" || f == "initial") {
                e.pos = Lexicon::Pos::initial;
            } else {
                try {
                    e.weight = std::stod(f);
                } catch (...) {
                    throw Error(Errc::malformed_document,
                                "bad lexicon field '" + f + "' in " + file.string());
                }
            }
        }
        lex.entries.push_back(std::move(e));
    }
    lex.build_index();
    return lex;
}

Lexicon make_lexicon(std::string name, const std::vector<std::string>& terms) {
    Lexicon lex;
    lex.name = std::move(name);
    for (const auto& term : terms) {
        Lexicon::Entry e;
        for (auto& w : util::split(term, ' '))
            if (!w.empty()) e.tokens.push_back(util::lower_ascii(w));
        if (!e.tokens.empty()) lex.entries.push_back(std::move(e));
    }
    lex.build_index();
    return lex;
}

LexiconHits lexicon_hits(std::span<const Token> tokens, const Lexicon& lex) {
    LexiconHits hits;
    size_t i = 0;
    while (i < tokens.size()) {
        const auto* candidates = lex.entries_for(tokens[i].norm);
        size_t matched = 0;
        if (candidates) {
            for (const Lexicon::Entry* e : *candidates) { // longest first
                if (e->pos == Lexicon::Pos::initial && i != 0) continue;
                if (i + e->tokens.size() > tokens.size()) continue;
                bool ok = true;
                for (size_t k = 1; k < e->tokens.size(); ++k) {
                    if (tokens[i + k].norm != e->tokens[k]) { ok = false; break; }
                }
                if (ok) { matched = e->tokens.size(); break; }
            }
        }
        if (matched > 0) {
            hits.count += 1;
            hits.spans.emplace_back(i, i + matched);
            i += matched;
        } else {
            ++i;
        }
    }
    return hits;
}

ConcretenessTable load_concreteness(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(Errc::malformed_document, "cannot open concreteness table: " + file.string());
    ConcretenessTable table;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = util::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = util::split(t, '\t');
        if (fields.size() < 2) continue;
        std::string term = util::lower_ascii(util::trim(fields[0]));
        double raw = std::stod(util::trim(fields[1]));
        double scaled = (raw - 1.0) / 4.0;
        if (term.find(' ') != std::string::npos)
            table.bigrams[term] = scaled;
        else
            table.unigrams[term] = scaled;
    }
    return table;
}

namespace {
bool content_tag(Tag t) {
    return t == Tag::noun || t == Tag::proper || t == Tag::adj || t == Tag::adv || t == Tag::verb;
}
} // namespace

std::optional<double> mean_concreteness(std::span<const Token> tokens,
                                        const ConcretenessTable& table) {
    double sum = 0.0;
    size_t n = 0;
    size_t i = 0;
    while (i < tokens.size()) {
        if (!content_tag(tokens[i].tag)) { ++i; continue; }
        if (i + 1 < tokens.size() && content_tag(tokens[i + 1].tag)) {
            auto bg = table.bigrams.find(tokens[i].norm + " " + tokens[i + 1].norm);
            if (bg != table.bigrams.end()) {
                sum += bg->second;
                ++n;
                i += 2;
                continue;
            }
        }
        auto ug = table.unigrams.find(tokens[i].norm);
        if (ug != table.unigrams.end()) {
            sum += ug->second;
            ++n;
        }
        ++i;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

Stance detect_stance(std::span<const Token> tokens, const Lexicon& agreement,
                     const Lexicon& disagreement) {
    if (lexicon_hits(tokens, agreement).count > 0) return Stance::agree;
    if (lexicon_hits(tokens, disagreement).count > 0) return Stance::disagree;
    return Stance::none;
}

void pos_tag(std::vector<Token>& tokens, const LexiconSet& lex) {
    const auto& cc = closed_classes();
    for (size_t i = 0; i < tokens.size(); ++i) {
        Token& t = tokens[i];
        const std::string& norm = t.norm;
        if (is_url_token(t.surface)) { t.tag = Tag::url; continue; }
        if (is_emoticon(t.surface)) { t.tag = Tag::emoticon; continue; }
        if (all_punct(t.surface)) { t.tag = Tag::punct; continue; }
        if (is_numeral(t.surface)) { t.tag = Tag::numeral; continue; }
        if (cc.pronouns.count(norm)) { t.tag = Tag::pron; continue; }
        if (cc.determiners.count(norm)) { t.tag = Tag::det; continue; }
        if (cc.prepositions.count(norm)) { t.tag = Tag::prep; continue; }
        if (cc.conjunctions.count(norm)) { t.tag = Tag::conj; continue; }
        if (cc.verbs.count(norm)) { t.tag = Tag::verb; continue; }
        if (cc.interjections.count(norm)) { t.tag = Tag::intj; continue; }
        if (cc.adverbs.count(norm)) { t.tag = Tag::adv; continue; }
        if (lex.gazetteer.count(norm)) { t.tag = Tag::proper; continue; }
        if (i > 0 && !t.surface.empty() && std::isupper(static_cast<unsigned char>(t.surface[0]))) {
            t.tag = Tag::proper;
            continue;
        }
        if (ends_with(norm, "ly") && norm.size() >= 4) { t.tag = Tag::adv; continue; }
        if (ends_with(norm, "ing") && norm.size() >= 5) { t.tag = Tag::verb; continue; }
        if (ends_with(norm, "ed") && norm.size() >= 4) { t.tag = Tag::verb; continue; }
        if ((ends_with(norm, "ous") || ends_with(norm, "ful") || ends_with(norm, "ish")) &&
            norm.size() >= 5) {
            t.tag = Tag::adj;
            continue;
        }
        t.tag = Tag::noun;
    }
}

TaggedMessage tag_message(const corpus::ChatMessage& msg, const LexiconSet& lex) {
    TaggedMessage out;
    out.player = msg.player;
    out.ts = msg.ts;
    out.tokens = tokenize(msg.text);
    bool gold = msg.gold_tags.size() == out.tokens.size() && !out.tokens.empty();
    if (gold) {
        for (size_t i = 0; i < out.tokens.size(); ++i) {
            auto t = msg.gold_tags[i].size() == 1 ? tag_from_char(msg.gold_tags[i][0]) : std::nullopt;
            if (!t) { gold = false; break; }
            out.tokens[i].tag = *t;
        }
    }
    if (!gold) pos_tag(out.tokens, lex);
    return out;
}

std::vector<TaggedMessage> tag_conversation(const std::vector<corpus::ChatMessage>& msgs,
                                            const LexiconSet& lex) {
    std::vector<TaggedMessage> out;
    out.reserve(msgs.size());
    for (const auto& m : msgs) out.push_back(tag_message(m, lex));
    return out;
}

std::vector<TaggedUtterance> tag_utterances(const std::vector<corpus::Utterance>& utts,
                                            const std::vector<TaggedMessage>& msgs) {
    std::vector<TaggedUtterance> out;
    out.reserve(utts.size());
    for (const auto& u : utts) {
        TaggedUtterance tu;
        tu.player = u.player;
        tu.start_ts = u.start_ts;
        tu.end_ts = u.end_ts;
        tu.message_indices = u.message_indices;
        for (size_t mi : u.message_indices)
            tu.tokens.insert(tu.tokens.end(), msgs[mi].tokens.begin(), msgs[mi].tokens.end());
        out.push_back(std::move(tu));
    }
    return out;
}

namespace {

std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::malformed_document, "cannot open resource file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

LexiconSet load_lexicon_dir(const std::filesystem::path& dir) {
    LexiconSet set;
    struct Item {
        const char* file;
        Lexicon* target;
    };
    const Item items[] = {
        {"hedges.txt", &set.hedges},
        {"certainty.txt", &set.certainty},
        {"agreement.txt", &set.agreement},
        {"disagreement.txt", &set.disagreement},
        {"pronouns_1sg.txt", &set.pron_1sg},
        {"pronouns_1pl.txt", &set.pron_1pl},
        {"pronouns_2.txt", &set.pron_2},
        {"geography.txt", &set.geography},
        {"interface.txt", &set.interface_words},
        {"stopwords.txt", &set.stopwords},
    };
    std::string all_bytes;
    for (const auto& item : items) {
        auto path = dir / item.file;
        *item.target = load_lexicon(path, std::filesystem::path(item.file).stem().string());
        std::string bytes = file_bytes(path);
        set.checksums[item.file] = util::to_hex(util::fnv1a64(bytes));
        all_bytes += bytes;
    }
    auto conc_path = dir / "concreteness.tsv";
    set.concreteness = load_concreteness(conc_path);
    std::string conc_bytes = file_bytes(conc_path);
    set.checksums["concreteness.tsv"] = util::to_hex(util::fnv1a64(conc_bytes));
    all_bytes += conc_bytes;
    set.combined_checksum = util::fnv1a64(all_bytes);

    for (const auto& e : set.stopwords.entries)
        if (e.tokens.size() == 1) set.stopword_set.insert(e.tokens[0]);
    for (const auto& e : set.geography.entries)
        if (e.tokens.size() == 1) set.gazetteer.insert(e.tokens[0]);
    return set;
}

} // namespace teamflow::text
