#include "teamflow/synth.hpp"
#include "teamflow/error.hpp"
#include "teamflow/geo.hpp"
#include "teamflow/util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

namespace teamflow::synth {

using corpus::GameRecord;
using corpus::LatLon;

namespace {

constexpr double kKmPerDegLat = 111.32;

double km_per_deg_lon(double lat) {
    return kKmPerDegLat * std::max(0.2, std::cos(lat * std::numbers::pi / 180.0));
}

LatLon clamp_point(LatLon p) {
    p.lat = std::clamp(p.lat, -84.0, 84.0);
    p.lon = std::clamp(p.lon, -179.0, 179.0);
    return p;
}

LatLon displace(LatLon p, double bearing_rad, double dist_km) {
    LatLon out = p;
    out.lat += dist_km * std::cos(bearing_rad) / kKmPerDegLat;
    out.lon += dist_km * std::sin(bearing_rad) / km_per_deg_lon(p.lat);
    return clamp_point(out);
}

// Step toward (positive km) or away from (negative km) the target.
LatLon step_toward(LatLon p, LatLon target, double step_km) {
    double dy = (target.lat - p.lat) * kKmPerDegLat;
    double dx = (target.lon - p.lon) * km_per_deg_lon(p.lat);
    double dist = std::hypot(dx, dy);
    if (dist < 1e-6) return p;
    if (step_km > 0 && dist < 30.0) step_km = dist * 0.5; // do not overshoot the answer
    double ux = dx / dist, uy = dy / dist;
    LatLon out = p;
    out.lat += step_km * uy / kKmPerDegLat;
    out.lon += step_km * ux / km_per_deg_lon(p.lat);
    return clamp_point(out);
}

const std::array<const char*, 16> kClueWords = {
    "china", "shanghai", "russia", "brazil", "tokyo", "france", "mexico", "norway",
    "buildings", "mountains", "desert", "beach", "flag", "signs", "road", "trees",
};

const std::array<const char*, 4> kHedgePrefixes = {"maybe", "i think", "probably", "looks like"};
const std::array<const char*, 3> kCertaintyPrefixes = {"definitely", "clearly", "must be"};
const std::array<const char*, 4> kAgreeTemplates = {
    "yeah the % fits", "sure, % then", "ok lets take %", "yes % is right"};
const std::array<const char*, 3> kDisagreeTemplates = {
    "no way", "i don't think so", "nah not that"};
const std::array<const char*, 4> kFillerConstructive = {
    "check the map again", "move the marker east", "the coast is on this side",
    "look at the river there"};
const std::array<const char*, 5> kFillerObstructive = {
    "hmm could be anywhere", "i guess somewhere cold", "not sure about this",
    "maybe near the water or something", "hard to tell honestly"};

std::string fill_template(std::string_view tpl, const std::string& word) {
    std::string out;
    for (char c : tpl) {
        if (c == '%')
            out += word;
        else
            out += c;
    }
    return out;
}

struct ScriptLine {
    size_t speaker = 0;
    std::string text;
};

std::vector<ScriptLine> build_script(const ArchetypeConfig& cfg, util::Rng& rng,
                                     const std::vector<std::string>& clues) {
    std::vector<ScriptLine> script;
    size_t team = static_cast<size_t>(cfg.team_size);
    bool balanced = cfg.participation_balance >= 0.5;

    auto weighted_speaker = [&]() -> size_t {
        if (balanced) return rng.below(team);
        // dominated: geometric-ish weights, player 0 heaviest
        double r = rng.uniform01();
        double p = cfg.participation_balance;
        double acc = 0.0, total = 0.0, w = 1.0;
        for (size_t i = 0; i < team; ++i) { total += w; w *= std::max(p, 0.05); }
        w = 1.0;
        for (size_t i = 0; i < team; ++i) {
            acc += w / total;
            if (r < acc) return i;
            w *= std::max(p, 0.05);
        }
        return 0;
    };

    size_t rotor = 0;
    for (size_t k = 0; k < clues.size(); ++k) {
        const std::string& clue = clues[k];
        size_t introducer = balanced ? (rotor++ % team) : weighted_speaker();
        std::string intro;
        if (rng.uniform01() < cfg.hedge_rate)
            intro = std::string(kHedgePrefixes[rng.below(kHedgePrefixes.size())]) + " " + clue;
        else if (balanced && rng.uniform01() < 0.5)
            intro = std::string(kCertaintyPrefixes[rng.below(kCertaintyPrefixes.size())]) + " " + clue;
        else
            intro = "i can see " + clue + " here";
        script.push_back({introducer, intro});

        if (rng.uniform01() < cfg.agreement_rate) {
            size_t adopter = (introducer + 1 + rng.below(team - 1)) % team;
            std::string reply = fill_template(kAgreeTemplates[rng.below(kAgreeTemplates.size())], clue);
            if (rng.uniform01() < cfg.hedge_rate) reply = "maybe, " + reply;
            script.push_back({adopter, reply});
        } else if (!balanced && rng.uniform01() < 0.4) {
            size_t other = (introducer + 1) % team;
            script.push_back({other, kDisagreeTemplates[rng.below(kDisagreeTemplates.size())]});
        }
    }

    // pad with filler so both archetypes land in the same message-count range
    size_t target = 12 + rng.below(5);
    while (script.size() < target) {
        size_t speaker = weighted_speaker();
        std::string line;
        if (balanced)
            line = kFillerConstructive[rng.below(kFillerConstructive.size())];
        else
            line = kFillerObstructive[rng.below(kFillerObstructive.size())];
        if (rng.uniform01() < cfg.hedge_rate) line += " i guess";
        script.push_back({speaker, line});
    }

    // the default filter needs at least two distinct chatters
    std::set<size_t> speakers;
    for (const auto& l : script) speakers.insert(l.speaker);
    if (speakers.size() < 2 && !script.empty())
        script.back().speaker = (script.back().speaker + 1) % team;
    return script;
}

GameRecord generate_game(size_t index, const ArchetypeConfig& cfg, const std::string& puzzle_id,
                         LatLon truth, uint64_t seed, bool quick) {
    util::Rng rng(util::mix_seed(seed, index));
    GameRecord g;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "g%05zu", index);
    g.game_id = idbuf;
    g.puzzle_id = puzzle_id;
    g.true_location = truth;
    g.started_at = 1.6e9 + static_cast<double>(index) * 10000.0;

    size_t team = static_cast<size_t>(std::max(2, cfg.team_size));
    for (size_t k = 0; k < team; ++k)
        g.players.push_back(g.game_id + "p" + std::to_string(k));

    // solo phase
    for (size_t k = 0; k < team; ++k) {
        corpus::SoloGuess sg;
        sg.player = g.players[k];
        double err = std::abs(rng.normal(0.0, cfg.solo_error_km)) + 20.0;
        sg.location = displace(truth, rng.uniform(0.0, 2.0 * std::numbers::pi), err);
        sg.confidence = std::clamp(rng.normal(cfg.confidence_mean, 0.12), 0.0, 1.0);
        if (cfg.participation_balance >= 0.5)
            sg.reason = "saw " + std::string(kClueWords[rng.below(kClueWords.size())]) +
                        " and a sign along the road";
        else
            sg.reason = "no idea really";
        g.solo_guesses.push_back(std::move(sg));
    }

    // clue pool for this game
    std::vector<std::string> clues;
    std::vector<size_t> order(kClueWords.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (int k = 0; k < cfg.idea_budget && k < static_cast<int>(order.size()); ++k)
        clues.emplace_back(kClueWords[order[static_cast<size_t>(k)]]);

    auto script = build_script(cfg, rng, clues);

    // marker moves: start at the solo centroid, drift toward/away from truth
    LatLon cur{0.0, 0.0};
    for (const auto& sg : g.solo_guesses) {
        cur.lat += sg.location.lat / static_cast<double>(team);
        cur.lon += sg.location.lon / static_cast<double>(team);
    }
    size_t n_moves = 4 + rng.below(3);
    bool balanced = cfg.participation_balance >= 0.5;
    std::vector<std::pair<size_t, LatLon>> moves;
    for (size_t k = 0; k < n_moves; ++k) {
        double step = cfg.drift_km_per_step * rng.uniform(0.7, 1.3);
        cur = step_toward(cur, truth, step);
        cur = displace(cur, rng.uniform(0.0, 2.0 * std::numbers::pi), std::abs(rng.normal(0.0, 15.0)));
        size_t mover = balanced ? (k % team) : 0;
        moves.emplace_back(mover, cur);
    }

    // schedule: evenly spaced events with bounded jitter, stretched until the
    // first 20 seconds hold at most 70% of them (quick games stay inside 15 s)
    size_t n_events = script.size() + moves.size();
    double dur = quick ? 8.0 + rng.uniform01() * 3.0 : 60.0 + rng.uniform01() * 40.0;
    std::vector<double> times;
    for (int attempt = 0; attempt < 6; ++attempt) {
        times.clear();
        double gap = n_events > 1 ? dur / static_cast<double>(n_events - 1) : 0.0;
        for (size_t k = 0; k < n_events; ++k) {
            double jitter = n_events > 1 ? rng.uniform(-0.2, 0.2) * gap : 0.0;
            double t = g.started_at + 2.0 + gap * static_cast<double>(k) + jitter;
            if (!times.empty()) t = std::max(t, times.back());
            times.push_back(t);
        }
        if (quick) break;
        double cutoff = times.front() + 20.0;
        size_t within = 0;
        for (double t : times)
            if (t < cutoff) ++within;
        double coverage = static_cast<double>(within) / static_cast<double>(n_events);
        if (coverage <= 0.70) break;
        dur *= 1.5;
    }

    // interleave: moves take roughly every (n_events / n_moves)-th slot
    std::vector<bool> is_move(n_events, false);
    if (!moves.empty()) {
        double stride = static_cast<double>(n_events) / static_cast<double>(moves.size());
        for (size_t k = 0; k < moves.size(); ++k) {
            size_t slot = std::min(n_events - 1, static_cast<size_t>((static_cast<double>(k) + 0.7) * stride));
            while (slot < n_events && is_move[slot]) ++slot;
            if (slot >= n_events) {
                for (slot = 0; slot < n_events && is_move[slot];) ++slot;
            }
            is_move[slot] = true;
        }
    }
    size_t msg_i = 0, move_i = 0;
    for (size_t k = 0; k < n_events; ++k) {
        if (is_move[k] && move_i < moves.size()) {
            corpus::MarkerMove mv;
            mv.player = g.players[moves[move_i].first];
            mv.ts = times[k];
            mv.location = moves[move_i].second;
            g.marker_moves.push_back(std::move(mv));
            ++move_i;
        } else if (msg_i < script.size()) {
            corpus::ChatMessage m;
            m.player = g.players[script[msg_i].speaker];
            m.ts = times[k];
            m.text = script[msg_i].text;
            g.messages.push_back(std::move(m));
            ++msg_i;
        }
    }
    g.final_guess = g.marker_moves.empty() ? g.true_location : g.marker_moves.back().location;
    g.submitted_at = (times.empty() ? g.started_at : times.back()) + 5.0;
    return g;
}

} // namespace

ArchetypeConfig constructive_archetype() {
    ArchetypeConfig a;
    a.name = "constructive";
    a.team_size = 2;
    a.participation_balance = 1.0;
    a.hedge_rate = 0.08;
    a.idea_budget = 4;
    a.agreement_rate = 0.85;
    a.drift_km_per_step = 320.0;
    a.solo_error_km = 1100.0;
    a.confidence_mean = 0.78;
    return a;
}

ArchetypeConfig obstructive_archetype() {
    ArchetypeConfig a;
    a.name = "obstructive";
    a.team_size = 2;
    a.participation_balance = 0.18;
    a.hedge_rate = 0.75;
    a.idea_budget = 2;
    a.agreement_rate = 0.15;
    a.drift_km_per_step = -350.0;
    a.solo_error_km = 1100.0;
    a.confidence_mean = 0.32;
    return a;
}

std::vector<GameRecord>
generate_corpus(int n_games, const std::vector<std::pair<ArchetypeConfig, double>>& mix,
                int n_puzzles, uint64_t seed, std::vector<ManifestEntry>* manifest) {
    if (mix.empty()) throw Error(Errc::invalid_mix, "generate_corpus: empty archetype mix");
    double total = 0.0;
    for (const auto& [cfg, w] : mix) {
        if (w < 0.0) throw Error(Errc::invalid_mix, "generate_corpus: negative mix weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw Error(Errc::invalid_mix, "generate_corpus: mix weights must sum to 1");
    if (n_puzzles < 1) n_puzzles = 1;

    // fixed truth per puzzle
    util::Rng prng(util::mix_seed(seed, 0xc0ffee));
    std::vector<LatLon> truths;
    std::vector<std::string> puzzle_ids;
    for (int p = 0; p < n_puzzles; ++p) {
        truths.push_back({prng.uniform(-55.0, 60.0), prng.uniform(-150.0, 150.0)});
        char buf[16];
        std::snprintf(buf, sizeof(buf), "pz%03d", p);
        puzzle_ids.emplace_back(buf);
    }

    std::vector<GameRecord> games;
    games.reserve(static_cast<size_t>(n_games));
    for (int i = 0; i < n_games; ++i) {
        util::Rng pick(util::mix_seed(seed, 0xa11ce000ull + static_cast<uint64_t>(i)));
        double r = pick.uniform01();
        double acc = 0.0;
        const ArchetypeConfig* cfg = &mix.back().first;
        for (const auto& [c, w] : mix) {
            acc += w;
            if (r < acc) { cfg = &c; break; }
        }
        bool quick = cfg->quick_finish_frac > 0.0 && pick.uniform01() < cfg->quick_finish_frac;
        size_t puzzle = static_cast<size_t>(i) % static_cast<size_t>(n_puzzles);
        games.push_back(generate_game(static_cast<size_t>(i), *cfg, puzzle_ids[puzzle],
                                      truths[puzzle], seed, quick));
        if (manifest) manifest->push_back({games.back().game_id, cfg->name, quick});
    }
    return games;
}

} // namespace teamflow::synth
