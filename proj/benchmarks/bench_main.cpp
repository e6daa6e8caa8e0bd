#include <benchmark/benchmark.h>

#include "teamflow/dynamics.hpp"
#include "teamflow/geo.hpp"
#include "teamflow/lingfeat.hpp"
#include "teamflow/model.hpp"
#include "teamflow/synth.hpp"
#include "teamflow/text.hpp"
#include "teamflow/util.hpp"

using namespace teamflow;

namespace {

const text::LexiconSet& lexicons() {
    static const text::LexiconSet set = text::load_lexicon_dir(TEAMFLOW_LEXICON_DIR);
    return set;
}

std::vector<corpus::GameRecord> sample_games(int n) {
    return synth::generate_corpus(
        n, {{synth::constructive_archetype(), 0.5}, {synth::obstructive_archetype(), 0.5}}, 5, 7,
        nullptr);
}

} // namespace

static void ArcDistance(benchmark::State& state) {
    util::Rng rng(1);
    std::vector<corpus::LatLon> pts;
    for (int i = 0; i < 1024; ++i) pts.push_back({rng.uniform(-90, 90), rng.uniform(-180, 180)});
    size_t i = 0;
    for (auto _ : state) {
        double d = geo::arc_distance_km(pts[i & 1023], pts[(i + 7) & 1023]);
        benchmark::DoNotOptimize(d);
        ++i;
    }
}
BENCHMARK(ArcDistance);

static void TokenizeAndTag(benchmark::State& state) {
    const std::string line = "sure, the buildings look chinese... maybe Shanghai? check http://m.ap :)";
    for (auto _ : state) {
        auto toks = text::tokenize(line);
        text::pos_tag(toks, lexicons());
        benchmark::DoNotOptimize(toks);
    }
}
BENCHMARK(TokenizeAndTag);

static void BalanceEntropy(benchmark::State& state) {
    std::vector<double> v(static_cast<size_t>(state.range(0)));
    util::Rng rng(2);
    for (auto& x : v) x = rng.uniform(0.0, 5.0);
    for (auto _ : state) {
        double h = dynamics::balance_entropy(v);
        benchmark::DoNotOptimize(h);
    }
}
BENCHMARK(BalanceEntropy)->Arg(4)->Arg(64);

static void RankAuc(benchmark::State& state) {
    util::Rng rng(3);
    size_t n = static_cast<size_t>(state.range(0));
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
        s[i] = rng.uniform01();
        y[i] = rng.below(2) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    for (auto _ : state) {
        double a = model::auc(s, y);
        benchmark::DoNotOptimize(a);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(RankAuc)->Range(64, 4096)->Complexity();

static void TrainLogReg(benchmark::State& state) {
    util::Rng rng(4);
    size_t n = 256, d = static_cast<size_t>(state.range(0));
    model::Matrix X = model::Matrix::zeros(n, d);
    std::vector<int> y(n);
    for (size_t r = 0; r < n; ++r) {
        double signal = rng.normal(0.0, 1.0);
        y[r] = signal > 0 ? 1 : 0;
        for (size_t c = 0; c < d; ++c) X.at(r, c) = 0.4 * signal + rng.normal(0.0, 1.0);
    }
    for (auto _ : state) {
        auto m = model::train_logreg(X, y, 1.0);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(TrainLogReg)->Arg(8)->Arg(64);

static void FeaturizeGame(benchmark::State& state) {
    auto games = sample_games(8);
    std::vector<lingfeat::TaggedGame> tagged;
    for (const auto& g : games) tagged.push_back(lingfeat::tag_game(g, lexicons()));
    auto vocab = lingfeat::fit_pos_vocab(tagged, {2, 2});
    auto registry = lingfeat::build_registry(vocab);
    size_t i = 0;
    for (auto _ : state) {
        auto fv = lingfeat::featurize_game(tagged[i % tagged.size()], lexicons(), vocab, registry);
        benchmark::DoNotOptimize(fv);
        ++i;
    }
}
BENCHMARK(FeaturizeGame);

BENCHMARK_MAIN();
