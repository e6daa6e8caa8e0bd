#pragma once
// Evaluation protocol: per-group grid search over the puzzle-aware splits,
// simplex search for ensemble weights, and permutation significance.

#include "teamflow/geo.hpp"
#include "teamflow/lingfeat.hpp"
#include "teamflow/model.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace teamflow::model {

enum class Objective { pp, p, mm }; // (++) c_best>0, (+) c_avg>0, (--) c_worst<0
enum class Mode { full, early20 };

const char* objective_name(Objective o);
const char* mode_name(Mode m);
std::optional<Objective> objective_from_name(std::string_view s);
std::optional<Mode> mode_from_name(std::string_view s);

int objective_label(const geo::ConstructivenessLabel& c, Objective o);

// Everything the protocol needs, extracted once per (corpus, mode, objective).
struct EvalDataset {
    std::vector<std::string> game_ids;
    std::vector<std::string> puzzle_ids;
    std::vector<int> y;
    std::vector<lingfeat::TaggedGame> tagged;            // owns nothing; see games
    std::vector<corpus::GameRecord> games;               // possibly truncated records
    std::vector<lingfeat::FeatureMap> scalar_features;   // non-POS features per game
};

// Filters nothing; the caller passes already-filtered full records. In
// early20 mode ineligible games are dropped and features come from the
// truncated records while labels come from the full ones.
EvalDataset build_dataset(const std::vector<corpus::GameRecord>& filtered, Objective objective,
                          Mode mode, const text::LexiconSet& lex,
                          lingfeat::EarlyCoverage coverage = lingfeat::EarlyCoverage::all_events);

struct ProtocolConfig {
    int n_iter = 20;
    double train_frac = 0.8;
    int n_perm = 0;           // 0 disables the permutation test
    int bootstrap_splits = 0; // extra split redraws on the chosen models
    uint64_t seed = 1;
    int jobs = 1;
    std::vector<double> c_grid{0.01, 0.1, 1.0, 10.0, 100.0};
    std::vector<int> pos_n_grid{1, 2, 3};        // orders 1..n
    std::vector<int> pos_min_df_grid{2, 5, 10};
    double weight_step = 0.1;
};

inline constexpr std::array<lingfeat::FeatureGroup, 4> kGroups = {
    lingfeat::FeatureGroup::baseline, lingfeat::FeatureGroup::interaction,
    lingfeat::FeatureGroup::linguistic, lingfeat::FeatureGroup::pos};

struct GroupEval {
    std::string name;          // baseline/interaction/linguistic/pos/all
    double C = 1.0;
    int pos_n = 0;             // 0 when the group has no POS block
    int pos_min_df = 0;
    double mean_auc = 0.0;
    std::vector<double> iter_auc;
    double p_value = -1.0;     // < 0 when the permutation test was skipped
};

struct EvalOutcome {
    std::vector<GroupEval> groups;      // one per feature group, in kGroups order
    GroupEval all;                      // weighted model averaging
    std::array<double, 4> weights{};    // simplex weights, kGroups order
    std::vector<Split> splits;
};

// Grid search by mean validation AUC; ties prefer smaller C, smaller n,
// larger min_df, then more uniform weights.
EvalOutcome run_protocol(const EvalDataset& ds, const ProtocolConfig& cfg);

// Variance estimate: redraws n_splits fresh puzzle-aware splits and re-runs
// the chosen models (fixed hyperparameters and ensemble weights) on each.
struct BootstrapRow {
    std::string name;
    double mean_auc = 0.0;
    double sd_auc = 0.0;
    int n_splits = 0;
};
std::vector<BootstrapRow> bootstrap_splits(const EvalDataset& ds, const EvalOutcome& outcome,
                                           const ProtocolConfig& cfg);

// Final artifact: models refit on the full dataset with the chosen
// hyperparameters.
struct TrainedGroup {
    std::string name;
    std::vector<std::string> feature_names;
    Standardizer standardizer;
    LogRegModel model;
    int pos_n = 0;
    int pos_min_df = 0;
};

struct TrainedArtifact {
    std::vector<TrainedGroup> groups;
    std::array<double, 4> weights{};
    lingfeat::PosVocab pos_vocab;        // fitted on the full dataset
    uint64_t registry_hash = 0;
    uint64_t seed = 0;
};

TrainedArtifact train_final(const EvalDataset& ds, const EvalOutcome& outcome,
                            const ProtocolConfig& cfg);

} // namespace teamflow::model
