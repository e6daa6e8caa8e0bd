#pragma once
// Data model, JSONL ingestion, validation, filtering and utterance derivation
// for team-game transcripts.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace teamflow::corpus {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

bool valid_latlon(const LatLon& p);

struct SoloGuess {
    std::string player;
    LatLon location;
    double confidence = 0.0; // normalized to [0, 1] at ingestion
    std::string reason;
};

struct ChatMessage {
    std::string player;
    double ts = 0.0; // epoch seconds, fractional allowed
    std::string text;
    std::vector<std::string> gold_tags; // optional; overrides the rule tagger when aligned
};

struct MarkerMove {
    std::string player;
    double ts = 0.0;
    LatLon location;
};

struct WindowLeave {
    std::string player;
    double ts = 0.0;
};

struct GameRecord {
    std::string game_id;
    std::string puzzle_id;
    LatLon true_location;
    std::vector<std::string> players;
    std::vector<SoloGuess> solo_guesses;
    std::vector<ChatMessage> messages;
    std::vector<MarkerMove> marker_moves;
    std::optional<LatLon> final_guess;
    double started_at = 0.0;
    double submitted_at = 0.0;
    // Present (possibly empty) iff window-focus telemetry exists for this game.
    std::optional<std::vector<WindowLeave>> window_leave;
};

// Maximal run of consecutive messages by one player, merged into a turn unit.
struct Utterance {
    std::string player;
    double start_ts = 0.0;
    double end_ts = 0.0;
    std::string text; // message texts joined with a single space
    std::vector<size_t> message_indices;
};

enum class RejectReason {
    no_team_guess,
    dev_player,
    under_two_chatters,
    cheat_url,
    cheat_proximity_flag,
    sparse_puzzle,
};

const char* reject_reason_name(RejectReason r);

struct FilterReport {
    size_t kept = 0;
    std::vector<std::pair<std::string, RejectReason>> rejected; // (game_id, first failing reason)
};

struct FilterConfig {
    int min_chatters = 2;
    int min_games_per_puzzle = 5;
    double cheat_radius_km = 10.0;
    std::vector<std::string> dev_player_ids;
    // Without window-leave telemetry a proximity hit alone rejects only when true.
    bool strict_cheat = false;
};

// Parses one JSON object into a GameRecord and validates every invariant.
// Throws Error(MALFORMED_DOCUMENT) for unparseable/non-object input and
// ValidationError(INVALID_FIELD) listing every violated field path otherwise.
GameRecord parse_game_record(std::string_view json_text);

struct LineError {
    size_t line = 0; // 1-based
    std::string message;
};

// Reads a JSONL corpus; bad lines are reported, good lines are kept.
std::vector<GameRecord> load_corpus(std::istream& in, std::vector<LineError>& errors);

std::pair<std::vector<GameRecord>, FilterReport>
filter_corpus(const std::vector<GameRecord>& games, const FilterConfig& cfg);

std::vector<Utterance> derive_utterances(const std::vector<ChatMessage>& messages);

// Serializes a record back to one JSONL line (canonical field order).
std::string to_json_line(const GameRecord& g);

} // namespace teamflow::corpus
