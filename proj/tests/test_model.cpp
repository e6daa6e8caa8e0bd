#include <doctest.h>

#include "teamflow/error.hpp"
#include "teamflow/model.hpp"
#include "teamflow/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace teamflow;
using model::Matrix;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m = Matrix::zeros(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
    return m;
}

// Brute-force pairwise AUC: P(s+ > s-) + 0.5 P(tie).
double auc_brute(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0, ties = 0.0, pairs = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (size_t j = 0; j < s.size(); ++j) {
            if (y[j] != 0) continue;
            pairs += 1.0;
            if (s[i] > s[j]) wins += 1.0;
            else if (s[i] == s[j]) ties += 1.0;
        }
    }
    return (wins + 0.5 * ties) / pairs;
}

std::vector<int> complement(const std::vector<int>& y) {
    std::vector<int> out;
    for (int v : y) out.push_back(1 - v);
    return out;
}

} // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("standardizer") {
    SUBCASE("column (1,3) centers to (-1,1) with population sd") {
        auto X = from_rows({{1.0}, {3.0}});
        auto s = model::Standardizer::fit(X);
        CHECK(s.mean[0] == 2.0);
        CHECK(s.sd[0] == 1.0);
        auto Z = s.apply(X);
        CHECK(Z.at(0, 0) == -1.0);
        CHECK(Z.at(1, 0) == 1.0);
    }
    SUBCASE("constant column maps to zeros") {
        auto X = from_rows({{5.0}, {5.0}, {5.0}});
        auto s = model::Standardizer::fit(X);
        CHECK(s.sd[0] == 1.0); // guarded
        auto Z = s.apply(X);
        for (size_t r = 0; r < 3; ++r) CHECK(Z.at(r, 0) == 0.0);
    }
    SUBCASE("masked cells impute to the training mean") {
        auto X = from_rows({{1.0}, {3.0}, {0.0}});
        X.mask = {1, 1, 0}; // third cell missing
        auto s = model::Standardizer::fit(X);
        CHECK(s.mean[0] == 2.0);
        auto Z = s.apply(X);
        CHECK(Z.at(2, 0) == 0.0); // imputed then centered
    }
    SUBCASE("fully missing column becomes zeros") {
        auto X = from_rows({{9.0}, {9.0}});
        X.mask = {0, 0};
        auto s = model::Standardizer::fit(X);
        auto Z = s.apply(X);
        CHECK(Z.at(0, 0) == 0.0);
        CHECK(Z.at(1, 0) == 0.0);
    }
}

TEST_CASE("logistic regression on a separable toy set") {
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    util::Rng rng(3);
    for (int i = 0; i < 8; ++i) {
        rows.push_back({rng.uniform(1.0, 2.0), rng.uniform(1.0, 2.0)});
        y.push_back(1);
        rows.push_back({rng.uniform(-2.0, -1.0), rng.uniform(-2.0, -1.0)});
        y.push_back(0);
    }
    auto X = from_rows(rows);
    auto std_fit = model::Standardizer::fit(X);
    auto Z = std_fit.apply(X);
    auto m = model::train_logreg(Z, y, 1.0);
    auto p = model::predict_proba(m, Z);
    CHECK(model::auc(p, y) >= 0.99);
    // loss never increases along the accepted steps
    for (size_t i = 1; i < m.loss_trace.size(); ++i)
        CHECK(m.loss_trace[i] <= m.loss_trace[i - 1]);
}

TEST_CASE("analytic gradient matches central finite differences") {
    util::Rng rng(1234);
    for (int rep = 0; rep < 10; ++rep) {
        size_t n = 6 + rng.below(10), d = 1 + rng.below(4);
        Matrix X = Matrix::zeros(n, d);
        std::vector<int> y;
        for (size_t r = 0; r < n; ++r) {
            for (size_t c = 0; c < d; ++c) X.at(r, c) = rng.normal(0.0, 1.5);
            y.push_back(rng.below(2) == 0 ? 0 : 1);
        }
        if (std::set<int>(y.begin(), y.end()).size() < 2) y[0] = 1 - y[0];
        std::vector<double> w(d);
        for (auto& wi : w) wi = rng.normal(0.0, 0.8);
        double b = rng.normal(0.0, 0.5);
        double C = 1.0;

        std::vector<double> grad(d);
        double grad_b = 0.0;
        model::logreg_gradient(X, y, w, b, C, grad, grad_b);

        const double h = 1e-6;
        for (size_t c = 0; c < d; ++c) {
            auto wp = w, wm = w;
            wp[c] += h;
            wm[c] -= h;
            double fd = (model::logreg_loss(X, y, wp, b, C) - model::logreg_loss(X, y, wm, b, C)) /
                        (2 * h);
            double denom = std::max(std::abs(fd), 1e-8);
            CHECK(std::abs(grad[c] - fd) / denom < 1e-5);
        }
        double fd_b =
            (model::logreg_loss(X, y, w, b + h, C) - model::logreg_loss(X, y, w, b - h, C)) / (2 * h);
        CHECK(std::abs(grad_b - fd_b) / std::max(std::abs(fd_b), 1e-8) < 1e-5);
    }
}

TEST_CASE("single-class labels are rejected") {
    auto X = from_rows({{1.0}, {2.0}});
    std::vector<int> y{1, 1};
    CHECK_THROWS_AS((void)model::train_logreg(X, y, 1.0), Error);
    std::vector<double> s{0.5, 0.6};
    CHECK_THROWS_AS((void)model::auc(s, y), Error);
}

TEST_CASE("auc reference values") {
    CHECK(model::auc(std::vector<double>{0.9, 0.8, 0.3}, std::vector<int>{1, 1, 0}) == 1.0);
    CHECK(model::auc(std::vector<double>{0.4, 0.4}, std::vector<int>{1, 0}) == 0.5);
    CHECK(model::auc(std::vector<double>{0.2, 0.7, 0.6, 0.4}, std::vector<int>{0, 1, 0, 1}) == 0.75);
}

TEST_CASE("auc equals brute force and is complement-symmetric") {
    util::Rng rng(77);
    for (int rep = 0; rep < 500; ++rep) {
        size_t n = 2 + rng.below(49);
        std::vector<double> s;
        std::vector<int> y;
        for (size_t i = 0; i < n; ++i) {
            // quantized scores so ties actually happen
            s.push_back(rng.below(2) ? rng.uniform01() : static_cast<double>(rng.below(5)) * 0.25);
            y.push_back(rng.below(2) ? 1 : 0);
        }
        bool pos = std::count(y.begin(), y.end(), 1) > 0;
        bool neg = std::count(y.begin(), y.end(), 0) > 0;
        if (!pos) y[0] = 1;
        if (!neg) y[y.size() - 1] = 0;

        double a = model::auc(s, y);
        CHECK(std::abs(a - auc_brute(s, y)) < 1e-9);
        CHECK(a == 1.0 - model::auc(s, complement(y))); // exact
    }
}

TEST_CASE("auc invariant under strictly increasing transforms") {
    util::Rng rng(91);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        s.push_back(rng.uniform(-3.0, 3.0));
        y.push_back(rng.below(2) ? 1 : 0);
    }
    y[0] = 1;
    y[1] = 0;
    auto transformed = s;
    for (double& v : transformed) v = std::exp(0.5 * v) + 7.0;
    CHECK(model::auc(s, y) == model::auc(transformed, y));
}

TEST_CASE("random labels give chance-level cross-validated auc") {
    // light version; the acceptance suite runs the full 50-seed oracle
    util::Rng rng(5);
    double total = 0.0;
    int runs = 10;
    for (int rep = 0; rep < runs; ++rep) {
        size_t n = 200, d = 4;
        Matrix X = Matrix::zeros(n, d);
        std::vector<int> y;
        for (size_t r = 0; r < n; ++r) {
            for (size_t c = 0; c < d; ++c) X.at(r, c) = rng.normal(0.0, 1.0);
            y.push_back(rng.below(2) ? 1 : 0);
        }
        y[0] = 1;
        y[1] = 0;
        std::vector<size_t> train_idx, val_idx;
        for (size_t i = 0; i < n; ++i) (i % 4 == 0 ? val_idx : train_idx).push_back(i);
        auto Xt = X.select_rows(train_idx);
        auto Xv = X.select_rows(val_idx);
        std::vector<int> yt, yv;
        for (size_t i : train_idx) yt.push_back(y[i]);
        for (size_t i : val_idx) yv.push_back(y[i]);
        auto st = model::Standardizer::fit(Xt);
        auto m = model::train_logreg(st.apply(Xt), yt, 1.0);
        total += model::auc(model::predict_proba(m, st.apply(Xv)), yv);
    }
    CHECK(std::abs(total / runs - 0.5) < 0.15);
}

TEST_CASE("puzzle-aware splits") {
    SUBCASE("two puzzles force one-vs-other") {
        std::vector<std::string> puzzles{"a", "a", "a", "b", "b", "b"};
        std::vector<int> y{1, 0, 1, 0, 1, 0};
        auto splits = model::puzzle_aware_splits(puzzles, y, 10, 0.8, 42);
        for (const auto& s : splits) {
            std::set<std::string> tp, vp;
            for (size_t i : s.train) tp.insert(puzzles[i]);
            for (size_t i : s.validation) vp.insert(puzzles[i]);
            CHECK(tp.size() == 1);
            CHECK(vp.size() == 1);
            CHECK(tp != vp);
        }
    }
    SUBCASE("train and validation puzzles never intersect; union covers all") {
        util::Rng rng(6);
        std::vector<std::string> puzzles;
        std::vector<int> y;
        for (int i = 0; i < 60; ++i) {
            puzzles.push_back("pz" + std::to_string(rng.below(9)));
            y.push_back(rng.below(2) ? 1 : 0);
        }
        auto splits = model::puzzle_aware_splits(puzzles, y, 20, 0.8, 7);
        CHECK(splits.size() == 20);
        for (const auto& s : splits) {
            std::set<std::string> tp, vp;
            for (size_t i : s.train) tp.insert(puzzles[i]);
            for (size_t i : s.validation) vp.insert(puzzles[i]);
            for (const auto& p : tp) CHECK(vp.count(p) == 0);
            CHECK(s.train.size() + s.validation.size() == puzzles.size());
            std::set<size_t> all(s.train.begin(), s.train.end());
            all.insert(s.validation.begin(), s.validation.end());
            CHECK(all.size() == puzzles.size());
        }
    }
    SUBCASE("fixed seed reproduces identical splits") {
        std::vector<std::string> puzzles;
        std::vector<int> y;
        util::Rng rng(8);
        for (int i = 0; i < 40; ++i) {
            puzzles.push_back("p" + std::to_string(i % 7));
            y.push_back(rng.below(2) ? 1 : 0);
        }
        auto a = model::puzzle_aware_splits(puzzles, y, 20, 0.8, 99);
        auto b = model::puzzle_aware_splits(puzzles, y, 20, 0.8, 99);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].train == b[i].train);
            CHECK(a[i].validation == b[i].validation);
        }
        auto c = model::puzzle_aware_splits(puzzles, y, 20, 0.8, 100);
        bool any_diff = false;
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i].train != c[i].train) any_diff = true;
        CHECK(any_diff);
    }
    SUBCASE("single puzzle is unsplittable") {
        std::vector<std::string> puzzles{"a", "a", "a"};
        std::vector<int> y{1, 0, 1};
        CHECK_THROWS_AS((void)model::puzzle_aware_splits(puzzles, y, 5, 0.8, 1), Error);
    }
}

TEST_CASE("permutation test") {
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i % 2);

    SUBCASE("p is bounded and minimal for a dominating statistic") {
        // statistic that is maximal for the observed labeling only
        std::vector<int> observed_labels = labels;
        auto stat = [&](std::span<const int> y) {
            for (size_t i = 0; i < y.size(); ++i)
                if (y[i] != observed_labels[i]) return 0.0;
            return 1.0;
        };
        double p = model::permutation_test(stat, labels, 1.0, 200, 5);
        CHECK(p == doctest::Approx(1.0 / 201.0).epsilon(1e-12));
    }
    SUBCASE("constant statistic gives p = 1") {
        auto stat = [](std::span<const int>) { return 0.5; };
        double p = model::permutation_test(stat, labels, 0.5, 100, 5);
        CHECK(p == 1.0);
    }
    SUBCASE("p never exceeds 1 and is positive") {
        auto stat = [](std::span<const int> y) {
            double s = 0.0;
            for (size_t i = 0; i < y.size(); ++i) s += y[i] * static_cast<double>(i);
            return s;
        };
        double obs = stat(labels);
        double p = model::permutation_test(stat, labels, obs, 99, 17);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_SUITE_END();
