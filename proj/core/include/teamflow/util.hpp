#pragma once
// Small shared helpers: deterministic RNG, hashing, number formatting.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace teamflow::util {

// FNV-1a 64-bit over raw bytes. Used for lexicon checksums and config hashes.
uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(uint64_t v);

// Shortest round-trip decimal representation (std::to_chars).
std::string fmt_double(double v);

std::string lower_ascii(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

double mean(std::span<const double> v);
// Median of an unsorted sample; averages the middle pair for even sizes.
double median(std::vector<double> v);

// SplitMix64 step; used to derive per-stream seeds so that parallel units
// never share generator state.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

// Runs fn(0..n-1) on up to `jobs` worker threads. Callers store results by
// index, so scheduling order never changes output. jobs <= 1 runs inline.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

// Deterministic RNG wrapper. All draw algorithms are written out explicitly
// (no std distributions) so that output is identical across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller without state caching; two draws per sample.
    double normal(double mu, double sigma);

    // Uniform index in [0, n); n must be > 0.
    size_t below(size_t n) { return static_cast<size_t>(engine_() % n); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace teamflow::util
