#pragma once
// Deterministic synthetic-corpus generator. Archetypes plant contrasts in
// conversation style and in marker-drift geometry; labels are never asserted
// directly, they fall out of the scoring path afterwards.

#include "teamflow/corpus.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace teamflow::synth {

struct ArchetypeConfig {
    std::string name = "archetype";
    int team_size = 2;
    double participation_balance = 1.0; // 1 = everyone equal, toward 0 = dominated
    double hedge_rate = 0.3;            // chance a message carries a hedge
    int idea_budget = 3;                // distinct clue words per game
    double agreement_rate = 0.3;        // chance of an agreement message per exchange
    double drift_km_per_step = 300.0;   // marker step toward (+) or away from (-) truth
    double solo_error_km = 1000.0;      // solo guess noise scale
    double confidence_mean = 0.5;       // reported solo confidence around this
    double quick_finish_frac = 0.0;     // fraction of games squeezed into < 20 s
};

// The built-in contrast pair: balanced/confident/converging vs
// dominated/hedging/diverging.
ArchetypeConfig constructive_archetype();
ArchetypeConfig obstructive_archetype();

struct ManifestEntry {
    std::string game_id;
    std::string archetype;
    bool quick_finish = false;
};

// Deterministic given seed; per-game streams are derived from (seed, index).
// Mix weights must be positive and sum to 1 (tolerance 1e-9), otherwise
// Error(INVALID_MIX).
std::vector<corpus::GameRecord>
generate_corpus(int n_games, const std::vector<std::pair<ArchetypeConfig, double>>& mix,
                int n_puzzles, uint64_t seed, std::vector<ManifestEntry>* manifest = nullptr);

} // namespace teamflow::synth
