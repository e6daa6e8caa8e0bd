#include "teamflow/corpus.hpp"
#include "teamflow/error.hpp"
#include "teamflow/geo.hpp"
#include "teamflow/text.hpp"
#include "teamflow/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

using nlohmann::json;

namespace teamflow::corpus {

bool valid_latlon(const LatLon& p) {
    return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

const char* reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::no_team_guess: return "NO_TEAM_GUESS";
        case RejectReason::dev_player: return "DEV_PLAYER";
        case RejectReason::under_two_chatters: return "UNDER_TWO_CHATTERS";
        case RejectReason::cheat_url: return "CHEAT_URL";
        case RejectReason::cheat_proximity_flag: return "CHEAT_PROXIMITY_FLAG";
        case RejectReason::sparse_puzzle: return "SPARSE_PUZZLE";
    }
    return "UNKNOWN";
}

namespace {

class FieldErrors {
public:
    void add(std::string path, std::string reason) {
        errors_.push_back(std::move(path) + ": " + std::move(reason));
    }
    bool empty() const { return errors_.empty(); }
    std::vector<std::string> take() { return std::move(errors_); }

private:
    std::vector<std::string> errors_;
};

double require_number(const json& obj, const char* key, const std::string& path, FieldErrors& errs) {
    if (!obj.contains(key)) {
        errs.add(path + "." + key, "missing");
        return 0.0;
    }
    if (!obj[key].is_number()) {
        errs.add(path + "." + key, "expected a number");
        return 0.0;
    }
    return obj[key].get<double>();
}

std::string require_string(const json& obj, const char* key, const std::string& path,
                           FieldErrors& errs) {
    if (!obj.contains(key)) {
        errs.add(path + "." + key, "missing");
        return {};
    }
    if (!obj[key].is_string()) {
        errs.add(path + "." + key, "expected a string");
        return {};
    }
    return obj[key].get<std::string>();
}

LatLon parse_latlon(const json& obj, const std::string& path, FieldErrors& errs) {
    LatLon p;
    p.lat = require_number(obj, "lat", path, errs);
    p.lon = require_number(obj, "lon", path, errs);
    if (p.lat < -90.0 || p.lat > 90.0) errs.add(path + ".lat", "latitude out of [-90, 90]");
    if (p.lon < -180.0 || p.lon > 180.0) errs.add(path + ".lon", "longitude out of [-180, 180]");
    return p;
}

// Accepts [0,1] reals as-is; JSON integers 1..5 are Likert ratings mapped
// (v - 1) / 4. Written as "1.0", full confidence stays 1.0.
double parse_confidence(const json& v, const std::string& path, FieldErrors& errs) {
    if (!v.is_number()) {
        errs.add(path, "expected a number");
        return 0.0;
    }
    if (v.is_number_integer()) {
        long long iv = v.get<long long>();
        if (iv >= 1 && iv <= 5) return (static_cast<double>(iv) - 1.0) / 4.0;
        if (iv == 0) return 0.0;
        errs.add(path, "integer confidence must be a 1-5 rating");
        return 0.0;
    }
    double d = v.get<double>();
    if (d < 0.0 || d > 1.0) {
        errs.add(path, "confidence out of [0, 1]");
        return 0.0;
    }
    return d;
}

} // namespace

GameRecord parse_game_record(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(Errc::malformed_document, std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(Errc::malformed_document, "document is not a JSON object");

    FieldErrors errs;
    GameRecord g;
    g.game_id = require_string(doc, "game_id", "", errs);
    g.puzzle_id = require_string(doc, "puzzle_id", "", errs);

    if (doc.contains("true_location") && doc["true_location"].is_object())
        g.true_location = parse_latlon(doc["true_location"], ".true_location", errs);
    else
        errs.add(".true_location", "missing or not an object");

    std::unordered_set<std::string> player_set;
    if (doc.contains("players") && doc["players"].is_array()) {
        for (const auto& p : doc["players"]) {
            if (!p.is_string()) {
                errs.add(".players", "player ids must be strings");
                continue;
            }
            g.players.push_back(p.get<std::string>());
            player_set.insert(g.players.back());
        }
    } else {
        errs.add(".players", "missing or not an array");
    }
    if (player_set.size() < 2) errs.add(".players", "needs at least 2 distinct player ids");

    auto check_player = [&](const std::string& id, const std::string& path) {
        if (!id.empty() && !player_set.empty() && !player_set.count(id))
            errs.add(path, "player '" + id + "' not in players");
    };

    g.started_at = require_number(doc, "started_at", "", errs);
    g.submitted_at = require_number(doc, "submitted_at", "", errs);
    if (g.submitted_at < g.started_at) errs.add(".submitted_at", "before started_at");

    auto check_ts = [&](double ts, const std::string& path) {
        if (ts < g.started_at || ts > g.submitted_at)
            errs.add(path, "timestamp outside [started_at, submitted_at]");
    };

    if (doc.contains("solo_guesses") && doc["solo_guesses"].is_array()) {
        std::set<std::string> seen;
        size_t i = 0;
        for (const auto& sg : doc["solo_guesses"]) {
            std::string path = ".solo_guesses[" + std::to_string(i) + "]";
            SoloGuess s;
            if (!sg.is_object()) {
                errs.add(path, "expected an object");
                ++i;
                continue;
            }
            s.player = require_string(sg, "player", path, errs);
            s.location.lat = require_number(sg, "lat", path, errs);
            s.location.lon = require_number(sg, "lon", path, errs);
            if (!valid_latlon(s.location)) errs.add(path, "coordinates out of range");
            if (sg.contains("confidence"))
                s.confidence = parse_confidence(sg["confidence"], path + ".confidence", errs);
            else
                errs.add(path + ".confidence", "missing");
            if (sg.contains("reason") && sg["reason"].is_string())
                s.reason = sg["reason"].get<std::string>();
            check_player(s.player, path + ".player");
            if (!seen.insert(s.player).second) errs.add(path, "duplicate solo guess for player");
            g.solo_guesses.push_back(std::move(s));
            ++i;
        }
    } else {
        errs.add(".solo_guesses", "missing or not an array");
    }

    if (doc.contains("messages") && doc["messages"].is_array()) {
        double prev = -std::numeric_limits<double>::infinity();
        size_t i = 0;
        for (const auto& mj : doc["messages"]) {
            std::string path = ".messages[" + std::to_string(i) + "]";
            ChatMessage m;
            if (!mj.is_object()) {
                errs.add(path, "expected an object");
                ++i;
                continue;
            }
            m.player = require_string(mj, "player", path, errs);
            m.ts = require_number(mj, "ts", path, errs);
            m.text = require_string(mj, "text", path, errs);
            if (util::trim(m.text).empty()) errs.add(path + ".text", "empty after trimming");
            if (m.ts < prev) errs.add(path + ".ts", "timestamps must be non-decreasing");
            check_ts(m.ts, path + ".ts");
            check_player(m.player, path + ".player");
            if (mj.contains("tags")) {
                if (!mj["tags"].is_array()) {
                    errs.add(path + ".tags", "expected an array of tag strings");
                } else {
                    for (const auto& t : mj["tags"]) {
                        if (!t.is_string()) {
                            errs.add(path + ".tags", "expected an array of tag strings");
                            break;
                        }
                        m.gold_tags.push_back(t.get<std::string>());
                    }
                }
            }
            prev = std::max(prev, m.ts);
            g.messages.push_back(std::move(m));
            ++i;
        }
    } else {
        errs.add(".messages", "missing or not an array");
    }

    if (doc.contains("marker_moves") && doc["marker_moves"].is_array()) {
        double prev = -std::numeric_limits<double>::infinity();
        size_t i = 0;
        for (const auto& mv : doc["marker_moves"]) {
            std::string path = ".marker_moves[" + std::to_string(i) + "]";
            MarkerMove m;
            if (!mv.is_object()) {
                errs.add(path, "expected an object");
                ++i;
                continue;
            }
            m.player = require_string(mv, "player", path, errs);
            m.ts = require_number(mv, "ts", path, errs);
            m.location.lat = require_number(mv, "lat", path, errs);
            m.location.lon = require_number(mv, "lon", path, errs);
            if (!valid_latlon(m.location)) errs.add(path, "coordinates out of range");
            if (m.ts < prev) errs.add(path + ".ts", "timestamps must be non-decreasing");
            check_ts(m.ts, path + ".ts");
            check_player(m.player, path + ".player");
            prev = std::max(prev, m.ts);
            g.marker_moves.push_back(std::move(m));
            ++i;
        }
    } else {
        errs.add(".marker_moves", "missing or not an array");
    }

    if (doc.contains("final_guess") && !doc["final_guess"].is_null()) {
        if (doc["final_guess"].is_object())
            g.final_guess = parse_latlon(doc["final_guess"], ".final_guess", errs);
        else
            errs.add(".final_guess", "expected an object or null");
    }

    if (doc.contains("window_leave")) {
        if (!doc["window_leave"].is_array()) {
            errs.add(".window_leave", "expected an array");
        } else {
            std::vector<WindowLeave> leaves;
            size_t i = 0;
            for (const auto& wl : doc["window_leave"]) {
                std::string path = ".window_leave[" + std::to_string(i) + "]";
                if (!wl.is_object()) {
                    errs.add(path, "expected an object");
                    ++i;
                    continue;
                }
                WindowLeave w;
                w.player = require_string(wl, "player", path, errs);
                w.ts = require_number(wl, "ts", path, errs);
                leaves.push_back(std::move(w));
                ++i;
            }
            g.window_leave = std::move(leaves);
        }
    }

    if (!errs.empty()) {
        auto fields = errs.take();
        std::string msg = "invalid game record";
        if (!g.game_id.empty()) msg += " '" + g.game_id + "'";
        msg += " (" + std::to_string(fields.size()) + " field error(s)); first: " + fields.front();
        throw ValidationError(Errc::invalid_field, msg, std::move(fields));
    }
    return g;
}

std::vector<GameRecord> load_corpus(std::istream& in, std::vector<LineError>& errors) {
    std::vector<GameRecord> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        try {
            out.push_back(parse_game_record(line));
        } catch (const ValidationError& e) {
            std::string msg = e.what();
            for (const auto& f : e.field_errors()) msg += "\n    " + f;
            errors.push_back({lineno, msg});
        } catch (const Error& e) {
            errors.push_back({lineno, e.what()});
        }
    }
    return out;
}

namespace {

size_t distinct_chatters(const GameRecord& g) {
    std::unordered_set<std::string> s;
    for (const auto& m : g.messages) s.insert(m.player);
    return s.size();
}

bool has_cheat_url(const GameRecord& g) {
    for (const auto& m : g.messages)
        if (text::contains_url(m.text)) return true;
    return false;
}

bool proximity_flagged(const GameRecord& g, const FilterConfig& cfg) {
    auto within = [&](const LatLon& p) {
        return geo::arc_distance_km(p, g.true_location) <= cfg.cheat_radius_km;
    };
    if (g.window_leave.has_value()) {
        // telemetry present: pair proximity with the leaver
        std::unordered_set<std::string> leavers;
        for (const auto& w : *g.window_leave) leavers.insert(w.player);
        if (leavers.empty()) return false;
        if (g.final_guess && within(*g.final_guess)) return true;
        for (const auto& sg : g.solo_guesses)
            if (leavers.count(sg.player) && within(sg.location)) return true;
        return false;
    }
    // no telemetry: proximity alone rejects only in strict mode
    if (!cfg.strict_cheat) return false;
    if (g.final_guess && within(*g.final_guess)) return true;
    for (const auto& sg : g.solo_guesses)
        if (within(sg.location)) return true;
    return false;
}

} // namespace

std::pair<std::vector<GameRecord>, FilterReport>
filter_corpus(const std::vector<GameRecord>& games, const FilterConfig& cfg) {
    FilterReport report;
    std::vector<const GameRecord*> survivors;
    std::unordered_set<std::string> dev_ids(cfg.dev_player_ids.begin(), cfg.dev_player_ids.end());

    for (const auto& g : games) {
        std::optional<RejectReason> reason;
        if (!g.final_guess) {
            reason = RejectReason::no_team_guess;
        } else if (!dev_ids.empty() &&
                   std::any_of(g.players.begin(), g.players.end(),
                               [&](const std::string& p) { return dev_ids.count(p) > 0; })) {
            reason = RejectReason::dev_player;
        } else if (distinct_chatters(g) < static_cast<size_t>(cfg.min_chatters)) {
            reason = RejectReason::under_two_chatters;
        } else if (has_cheat_url(g)) {
            reason = RejectReason::cheat_url;
        } else if (proximity_flagged(g, cfg)) {
            reason = RejectReason::cheat_proximity_flag;
        }
        if (reason)
            report.rejected.emplace_back(g.game_id, *reason);
        else
            survivors.push_back(&g);
    }

    // puzzle sparsity, counted over games that passed the per-game filters
    std::map<std::string, int> per_puzzle;
    for (const auto* g : survivors) per_puzzle[g->puzzle_id] += 1;

    std::vector<GameRecord> kept;
    for (const auto* g : survivors) {
        if (per_puzzle[g->puzzle_id] < cfg.min_games_per_puzzle)
            report.rejected.emplace_back(g->game_id, RejectReason::sparse_puzzle);
        else
            kept.push_back(*g);
    }
    report.kept = kept.size();
    return {std::move(kept), std::move(report)};
}

std::vector<Utterance> derive_utterances(const std::vector<ChatMessage>& messages) {
    std::vector<Utterance> out;
    for (size_t i = 0; i < messages.size(); ++i) {
        const auto& m = messages[i];
        if (!out.empty() && out.back().player == m.player) {
            Utterance& u = out.back();
            u.end_ts = m.ts;
            u.text += " " + m.text;
            u.message_indices.push_back(i);
        } else {
            Utterance u;
            u.player = m.player;
            u.start_ts = m.ts;
            u.end_ts = m.ts;
            u.text = m.text;
            u.message_indices.push_back(i);
            out.push_back(std::move(u));
        }
    }
    return out;
}

std::string to_json_line(const GameRecord& g) {
    json doc;
    doc["game_id"] = g.game_id;
    doc["puzzle_id"] = g.puzzle_id;
    doc["true_location"] = {{"lat", g.true_location.lat}, {"lon", g.true_location.lon}};
    doc["players"] = g.players;
    json sg = json::array();
    for (const auto& s : g.solo_guesses)
        sg.push_back({{"player", s.player},
                      {"lat", s.location.lat},
                      {"lon", s.location.lon},
                      {"confidence", s.confidence},
                      {"reason", s.reason}});
    doc["solo_guesses"] = std::move(sg);
    json msgs = json::array();
    for (const auto& m : g.messages) {
        json mj = {{"player", m.player}, {"ts", m.ts}, {"text", m.text}};
        if (!m.gold_tags.empty()) mj["tags"] = m.gold_tags;
        msgs.push_back(std::move(mj));
    }
    doc["messages"] = std::move(msgs);
    json moves = json::array();
    for (const auto& m : g.marker_moves)
        moves.push_back(
            {{"player", m.player}, {"ts", m.ts}, {"lat", m.location.lat}, {"lon", m.location.lon}});
    doc["marker_moves"] = std::move(moves);
    if (g.final_guess)
        doc["final_guess"] = {{"lat", g.final_guess->lat}, {"lon", g.final_guess->lon}};
    else
        doc["final_guess"] = nullptr;
    doc["started_at"] = g.started_at;
    doc["submitted_at"] = g.submitted_at;
    if (g.window_leave) {
        json wl = json::array();
        for (const auto& w : *g.window_leave) wl.push_back({{"player", w.player}, {"ts", w.ts}});
        doc["window_leave"] = std::move(wl);
    }
    return doc.dump();
}

} // namespace teamflow::corpus
