#pragma once
// Classification and evaluation protocol: standardization, logistic
// regression, AUC, puzzle-aware splits and label-permutation significance.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace teamflow::model {

// Row-major dense matrix with a parallel missingness mask.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> a;      // rows * cols
    std::vector<uint8_t> mask;  // 1 = present, 0 = missing; empty means all present

    double& at(size_t r, size_t c) { return a[r * cols + c]; }
    double at(size_t r, size_t c) const { return a[r * cols + c]; }
    bool present(size_t r, size_t c) const { return mask.empty() || mask[r * cols + c] != 0; }

    static Matrix zeros(size_t rows, size_t cols) {
        Matrix m;
        m.rows = rows;
        m.cols = cols;
        m.a.assign(rows * cols, 0.0);
        return m;
    }

    Matrix select_rows(std::span<const size_t> idx) const;
};

// Per-feature training mean/sd; missing cells are imputed with the training
// mean (so they standardize to 0). Zero-variance features get sd := 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd;

    static Standardizer fit(const Matrix& X);
    Matrix apply(const Matrix& X) const;
};

struct LogRegModel {
    std::vector<double> weights;
    double bias = 0.0;
    double C = 1.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> loss_trace; // objective after each accepted step
};

// Full-batch gradient descent with Armijo backtracking on
//   mean logistic loss + ||w||^2 / (2 C m)     (bias unpenalized).
// Stops when the gradient infinity-norm drops below 1e-6 or after 1000
// iterations. Deterministic; the seed is recorded for provenance only.
// Throws Error(SINGLE_CLASS_LABELS) when y is constant.
LogRegModel train_logreg(const Matrix& X, std::span<const int> y, double C, uint64_t seed = 0);

// Loss/gradient of the objective above, exposed for verification.
double logreg_loss(const Matrix& X, std::span<const int> y, std::span<const double> w,
                   double b, double C);
void logreg_gradient(const Matrix& X, std::span<const int> y, std::span<const double> w,
                     double b, double C, std::span<double> grad_w, double& grad_b);

std::vector<double> predict_proba(const LogRegModel& m, const Matrix& X);

// Rank-based AUC: P(score+ > score-) + 0.5 P(tie). Computed from exact pair
// counts so that auc(s, y) == 1 - auc(s, 1-y) holds bit-for-bit.
// Throws Error(SINGLE_CLASS_LABELS) when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

struct Split {
    std::vector<size_t> train;
    std::vector<size_t> validation;
};

// Whole puzzles are shuffled (seed mixed with the iteration index) and
// assigned to train until the train side first reaches train_frac of the
// games; the rest is validation. The last puzzle never moves to train, so
// validation is never empty. Splits without both classes on both sides are
// redrawn (up to 100 times, then Error(UNSPLITTABLE_CORPUS)).
std::vector<Split> puzzle_aware_splits(std::span<const std::string> puzzle_ids,
                                       std::span<const int> labels, int n_iter,
                                       double train_frac, uint64_t seed);

// Statistic under label permutation. Shuffles the labels corpus-wide n_perm
// times, recomputes `statistic`, and returns
//   p = (1 + #{perm >= observed}) / (1 + n_perm).
double permutation_test(const std::function<double(std::span<const int>)>& statistic,
                        std::span<const int> labels, double observed, int n_perm, uint64_t seed);

} // namespace teamflow::model
