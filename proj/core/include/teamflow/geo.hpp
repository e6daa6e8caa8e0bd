#pragma once
// Geodesic scoring and constructiveness measures.
//
// Guesses are scored by negative great-circle distance to the true location,
// so higher is better and an exact hit scores 0. Constructiveness compares
// the team's post-discussion score with aggregates of the members'
// pre-discussion scores:
//   c_avg   = team - mean(solo scores)
//   c_best  = team - max(solo scores)
//   c_worst = team - min(solo scores)

#include "teamflow/corpus.hpp"

#include <span>
#include <vector>

namespace teamflow::geo {

using corpus::GameRecord;
using corpus::LatLon;

// Mean earth radius, km; the sphere radius used throughout.
inline constexpr double kEarthRadiusKm = 6371.0;

// Spherical law of cosines, arccos argument clamped to [-1, 1].
// Symmetric, in [0, pi*R].
double arc_distance_km(const LatLon& a, const LatLon& b);

// score = -arc_distance; 0 only for an exact hit.
double score_km(const LatLon& guess, const LatLon& truth);

struct ConstructivenessLabel {
    double c_avg = 0.0;
    double c_best = 0.0;
    double c_worst = 0.0;
    bool obj_best = false;         // (++) c_best > 0
    bool obj_constructive = false; // (+)  c_avg > 0
    bool obj_worst = false;        // (--) c_worst < 0
};

// Arithmetic core over raw scores. Throws Error(NO_SOLO_GUESSES) when
// solo_scores is empty.
ConstructivenessLabel constructiveness_from_scores(double team_score,
                                                   std::span<const double> solo_scores);

// Geometry wrapper: scores the team guess and each solo guess against truth.
// Players without a solo guess simply contribute no score.
ConstructivenessLabel constructiveness(const LatLon& team_guess,
                                       const std::vector<corpus::SoloGuess>& solo_guesses,
                                       const LatLon& truth);

// Labels a full game; nullopt when the game has no final guess or no solo guesses.
std::optional<ConstructivenessLabel> label_game(const GameRecord& game);

// Distances of the last k marker moves to the final guess, oldest first.
// Throws Error(TOO_FEW_GUESSES) when the game has fewer than k moves or no
// final guess.
std::vector<double> convergence_profile(const GameRecord& game, int k);

struct ScoreProfile {
    std::vector<double> move_scores; // first k moves scored against truth, oldest first
    double mean_solo_score = 0.0;
    double final_score = 0.0;
};

ScoreProfile score_profile(const GameRecord& game, int k);

} // namespace teamflow::geo
