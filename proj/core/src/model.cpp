#include "teamflow/model.hpp"
#include "teamflow/error.hpp"
#include "teamflow/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace teamflow::model {

Matrix Matrix::select_rows(std::span<const size_t> idx) const {
    Matrix out;
    out.rows = idx.size();
    out.cols = cols;
    out.a.resize(out.rows * cols);
    if (!mask.empty()) out.mask.resize(out.rows * cols);
    for (size_t r = 0; r < idx.size(); ++r) {
        std::copy_n(a.begin() + static_cast<long>(idx[r] * cols), cols,
                    out.a.begin() + static_cast<long>(r * cols));
        if (!mask.empty())
            std::copy_n(mask.begin() + static_cast<long>(idx[r] * cols), cols,
                        out.mask.begin() + static_cast<long>(r * cols));
    }
    return out;
}

Standardizer Standardizer::fit(const Matrix& X) {
    Standardizer s;
    s.mean.assign(X.cols, 0.0);
    s.sd.assign(X.cols, 1.0);
    for (size_t c = 0; c < X.cols; ++c) {
        double sum = 0.0;
        size_t n = 0;
        for (size_t r = 0; r < X.rows; ++r) {
            if (!X.present(r, c)) continue;
            sum += X.at(r, c);
            ++n;
        }
        double mu = n > 0 ? sum / static_cast<double>(n) : 0.0;
        double var = 0.0;
        for (size_t r = 0; r < X.rows; ++r) {
            if (!X.present(r, c)) continue;
            double d = X.at(r, c) - mu;
            var += d * d;
        }
        var = n > 0 ? var / static_cast<double>(n) : 0.0; // population variance
        s.mean[c] = mu;
        s.sd[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
    Matrix out = X;
    for (size_t r = 0; r < X.rows; ++r) {
        for (size_t c = 0; c < X.cols; ++c) {
            double v = X.present(r, c) ? X.at(r, c) : mean[c]; // mean imputation
            out.at(r, c) = (v - mean[c]) / sd[c];
        }
    }
    out.mask.clear(); // fully dense after imputation
    return out;
}

namespace {

// log(1 + exp(t)) without overflow
double log1pexp(double t) {
    if (t > 35.0) return t;
    if (t < -35.0) return std::exp(t);
    return std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0) {
        double e = std::exp(-t);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace

double logreg_loss(const Matrix& X, std::span<const int> y, std::span<const double> w,
                   double b, double C) {
    double m = static_cast<double>(X.rows);
    double loss = 0.0;
    for (size_t r = 0; r < X.rows; ++r) {
        double f = b;
        for (size_t c = 0; c < X.cols; ++c) f += w[c] * X.at(r, c);
        double z = y[r] == 1 ? 1.0 : -1.0;
        loss += log1pexp(-z * f);
    }
    loss /= m;
    double reg = 0.0;
    for (double wc : w) reg += wc * wc;
    return loss + reg / (2.0 * C * m);
}

void logreg_gradient(const Matrix& X, std::span<const int> y, std::span<const double> w,
                     double b, double C, std::span<double> grad_w, double& grad_b) {
    double m = static_cast<double>(X.rows);
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    for (size_t r = 0; r < X.rows; ++r) {
        double f = b;
        for (size_t c = 0; c < X.cols; ++c) f += w[c] * X.at(r, c);
        double z = y[r] == 1 ? 1.0 : -1.0;
        double g = -z * sigmoid(-z * f); // d/df log1pexp(-z f)
        grad_b += g;
        for (size_t c = 0; c < X.cols; ++c) grad_w[c] += g * X.at(r, c);
    }
    grad_b /= m;
    for (size_t c = 0; c < X.cols; ++c) grad_w[c] = grad_w[c] / m + w[c] / (C * m);
}

LogRegModel train_logreg(const Matrix& X, std::span<const int> y, double C, uint64_t /*seed*/) {
    bool has_pos = false, has_neg = false;
    for (int v : y) (v == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw Error(Errc::single_class_labels, "train_logreg: labels contain a single class");

    LogRegModel m;
    m.C = C;
    m.weights.assign(X.cols, 0.0);
    m.bias = 0.0;

    std::vector<double> grad(X.cols, 0.0);
    double grad_b = 0.0;
    std::vector<double> trial_w(X.cols, 0.0);

    double loss = logreg_loss(X, y, m.weights, m.bias, C);
    m.loss_trace.push_back(loss);
    constexpr int kMaxIters = 1000;
    constexpr double kGradTol = 1e-6;
    constexpr double kArmijo = 1e-4;

    for (int iter = 0; iter < kMaxIters; ++iter) {
        logreg_gradient(X, y, m.weights, m.bias, C, grad, grad_b);
        double inf_norm = std::abs(grad_b);
        double sq_norm = grad_b * grad_b;
        for (double g : grad) {
            inf_norm = std::max(inf_norm, std::abs(g));
            sq_norm += g * g;
        }
        m.iterations = iter;
        if (inf_norm < kGradTol) {
            m.converged = true;
            break;
        }
        // Backtracking line search along -grad; loss never increases.
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (size_t c = 0; c < X.cols; ++c) trial_w[c] = m.weights[c] - step * grad[c];
            double trial_b = m.bias - step * grad_b;
            double trial_loss = logreg_loss(X, y, trial_w, trial_b, C);
            if (trial_loss <= loss - kArmijo * step * sq_norm) {
                m.weights = trial_w;
                m.bias = trial_b;
                loss = trial_loss;
                m.loss_trace.push_back(loss);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // step underflow; treat as converged
    }
    return m;
}

std::vector<double> predict_proba(const LogRegModel& m, const Matrix& X) {
    std::vector<double> out(X.rows, 0.0);
    for (size_t r = 0; r < X.rows; ++r) {
        double f = m.bias;
        for (size_t c = 0; c < X.cols; ++c) f += m.weights[c] * X.at(r, c);
        out[r] = sigmoid(f);
    }
    return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    size_t n = scores.size();
    size_t n_pos = 0;
    for (int v : labels)
        if (v == 1) ++n_pos;
    size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw Error(Errc::single_class_labels, "auc: labels contain a single class");

    // sort by score; walk tie groups once
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    double u_pos = 0.0;      // wins + 0.5 * ties, for positives over negatives
    double neg_below = 0.0;  // negatives with strictly smaller score
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        double pos_tied = 0.0, neg_tied = 0.0;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? pos_tied : neg_tied) += 1.0;
            ++j;
        }
        u_pos += pos_tied * (neg_below + 0.5 * neg_tied);
        neg_below += neg_tied;
        i = j;
    }

    double pairs = static_cast<double>(n_pos) * static_cast<double>(n_neg);
    double u_neg = pairs - u_pos;
    // Returning the complement through exact subtraction keeps
    // auc(s, y) == 1 - auc(s, 1-y) bit-for-bit.
    if (u_pos >= u_neg) return u_pos / pairs;
    return 1.0 - u_neg / pairs;
}

std::vector<Split> puzzle_aware_splits(std::span<const std::string> puzzle_ids,
                                       std::span<const int> labels, int n_iter,
                                       double train_frac, uint64_t seed) {
    size_t n = puzzle_ids.size();
    std::vector<std::string> puzzles; // first-appearance order
    std::map<std::string, std::vector<size_t>> games_of;
    for (size_t i = 0; i < n; ++i) {
        auto [it, inserted] = games_of.try_emplace(std::string(puzzle_ids[i]));
        if (inserted) puzzles.push_back(puzzle_ids[i]);
        it->second.push_back(i);
    }

    auto both_classes = [&](const std::vector<size_t>& idx) {
        bool pos = false, neg = false;
        for (size_t i : idx) (labels[i] == 1 ? pos : neg) = true;
        return pos && neg;
    };

    std::vector<Split> out;
    out.reserve(static_cast<size_t>(n_iter));
    double threshold = train_frac * static_cast<double>(n);

    for (int iter = 0; iter < n_iter; ++iter) {
        util::Rng rng(util::mix_seed(seed, static_cast<uint64_t>(iter)));
        bool accepted = false;
        for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
            std::vector<std::string> order = puzzles;
            rng.shuffle(order);
            Split split;
            size_t assigned = 0;
            for (size_t pi = 0; pi < order.size(); ++pi) {
                const auto& games = games_of[order[pi]];
                // last puzzle always lands in validation so it is never empty
                bool to_train = static_cast<double>(assigned) < threshold && pi + 1 < order.size();
                auto& side = to_train ? split.train : split.validation;
                side.insert(side.end(), games.begin(), games.end());
                if (to_train) assigned += games.size();
            }
            std::sort(split.train.begin(), split.train.end());
            std::sort(split.validation.begin(), split.validation.end());
            if (!split.train.empty() && !split.validation.empty() &&
                both_classes(split.train) && both_classes(split.validation)) {
                out.push_back(std::move(split));
                accepted = true;
            }
        }
        if (!accepted)
            throw Error(Errc::unsplittable_corpus,
                        "puzzle_aware_splits: no class-balanced split after 100 redraws");
    }
    return out;
}

double permutation_test(const std::function<double(std::span<const int>)>& statistic,
                        std::span<const int> labels, double observed, int n_perm, uint64_t seed) {
    int at_least = 0;
    for (int p = 0; p < n_perm; ++p) {
        // independent draws so permutations can run in any order
        std::vector<int> perm(labels.begin(), labels.end());
        util::Rng rng(util::mix_seed(seed, static_cast<uint64_t>(p)));
        rng.shuffle(perm);
        if (statistic(perm) >= observed) ++at_least;
    }
    return (1.0 + static_cast<double>(at_least)) / (1.0 + static_cast<double>(n_perm));
}

} // namespace teamflow::model
