#pragma once
// Shared fixture builders for the test suites.

#include "teamflow/corpus.hpp"
#include "teamflow/text.hpp"

#include <string>
#include <vector>

namespace tfx {

using teamflow::corpus::ChatMessage;
using teamflow::corpus::GameRecord;
using teamflow::corpus::LatLon;
using teamflow::corpus::MarkerMove;
using teamflow::corpus::SoloGuess;

inline ChatMessage msg(std::string player, double ts, std::string text) {
    ChatMessage m;
    m.player = std::move(player);
    m.ts = ts;
    m.text = std::move(text);
    return m;
}

inline SoloGuess solo(std::string player, double lat, double lon, double conf,
                      std::string reason = "saw a sign") {
    SoloGuess s;
    s.player = std::move(player);
    s.location = {lat, lon};
    s.confidence = conf;
    s.reason = std::move(reason);
    return s;
}

inline MarkerMove move(std::string player, double ts, double lat, double lon) {
    MarkerMove m;
    m.player = std::move(player);
    m.ts = ts;
    m.location = {lat, lon};
    return m;
}

// Two-player game skeleton with consistent timestamps.
inline GameRecord basic_game(std::vector<ChatMessage> messages = {},
                             std::vector<MarkerMove> moves = {}) {
    GameRecord g;
    g.game_id = "t1";
    g.puzzle_id = "pz1";
    g.true_location = {40.0, -75.0};
    g.players = {"alice", "bob"};
    g.solo_guesses = {solo("alice", 41.0, -75.0, 0.7), solo("bob", 39.0, -74.0, 0.4)};
    g.started_at = 1000.0;
    g.submitted_at = 2000.0;
    g.messages = std::move(messages);
    g.marker_moves = std::move(moves);
    g.final_guess = LatLon{40.5, -75.2};
    return g;
}

// The shipped resources, loaded once per process.
const teamflow::text::LexiconSet& lexicons();

} // namespace tfx
