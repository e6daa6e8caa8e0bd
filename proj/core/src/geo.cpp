#include "teamflow/geo.hpp"
#include "teamflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace teamflow::geo {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double arc_distance_km(const LatLon& a, const LatLon& b) {
    // acos is ill-conditioned near 1; an exact hit must score exactly 0
    if (a.lat == b.lat && a.lon == b.lon) return 0.0;
    double phi1 = a.lat * kDegToRad;
    double phi2 = b.lat * kDegToRad;
    double dlam = (b.lon - a.lon) * kDegToRad;
    double c = std::sin(phi1) * std::sin(phi2) + std::cos(phi1) * std::cos(phi2) * std::cos(dlam);
    c = std::clamp(c, -1.0, 1.0);
    return kEarthRadiusKm * std::acos(c);
}

double score_km(const LatLon& guess, const LatLon& truth) {
    return -arc_distance_km(guess, truth);
}

ConstructivenessLabel constructiveness_from_scores(double team_score,
                                                   std::span<const double> solo_scores) {
    if (solo_scores.empty())
        throw Error(Errc::no_solo_guesses, "constructiveness requires at least one solo score");
    double sum = 0.0;
    double best = solo_scores[0];
    double worst = solo_scores[0];
    for (double s : solo_scores) {
        sum += s;
        best = std::max(best, s);
        worst = std::min(worst, s);
    }
    double avg = sum / static_cast<double>(solo_scores.size());
    ConstructivenessLabel out;
    out.c_avg = team_score - avg;
    out.c_best = team_score - best;
    out.c_worst = team_score - worst;
    out.obj_best = out.c_best > 0.0;
    out.obj_constructive = out.c_avg > 0.0;
    out.obj_worst = out.c_worst < 0.0;
    return out;
}

ConstructivenessLabel constructiveness(const LatLon& team_guess,
                                       const std::vector<corpus::SoloGuess>& solo_guesses,
                                       const LatLon& truth) {
    std::vector<double> scores;
    scores.reserve(solo_guesses.size());
    for (const auto& g : solo_guesses) scores.push_back(score_km(g.location, truth));
    return constructiveness_from_scores(score_km(team_guess, truth), scores);
}

std::optional<ConstructivenessLabel> label_game(const GameRecord& game) {
    if (!game.final_guess || game.solo_guesses.empty()) return std::nullopt;
    return constructiveness(*game.final_guess, game.solo_guesses, game.true_location);
}

std::vector<double> convergence_profile(const GameRecord& game, int k) {
    if (k < 0 || !game.final_guess || game.marker_moves.size() < static_cast<size_t>(k))
        throw Error(Errc::too_few_guesses, "convergence_profile: fewer than k marker moves or no final guess");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(k));
    size_t start = game.marker_moves.size() - static_cast<size_t>(k);
    for (size_t i = start; i < game.marker_moves.size(); ++i)
        out.push_back(arc_distance_km(game.marker_moves[i].location, *game.final_guess));
    return out;
}

ScoreProfile score_profile(const GameRecord& game, int k) {
    if (k < 0 || !game.final_guess || game.marker_moves.size() < static_cast<size_t>(k))
        throw Error(Errc::too_few_guesses, "score_profile: fewer than k marker moves or no final guess");
    ScoreProfile out;
    out.move_scores.reserve(static_cast<size_t>(k));
    for (size_t i = 0; i < static_cast<size_t>(k); ++i)
        out.move_scores.push_back(score_km(game.marker_moves[i].location, game.true_location));
    double sum = 0.0;
    for (const auto& g : game.solo_guesses) sum += score_km(g.location, game.true_location);
    out.mean_solo_score = game.solo_guesses.empty() ? 0.0 : sum / static_cast<double>(game.solo_guesses.size());
    out.final_score = score_km(*game.final_guess, game.true_location);
    return out;
}

} // namespace teamflow::geo
