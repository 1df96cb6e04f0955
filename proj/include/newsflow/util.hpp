#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace newsflow {

// splitmix64 step; used to derive independent sub-seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Sub-seed for a named stream: seed -> stream tag -> index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(tag)) ^ index);
}

// Deterministic RNG with pinned uniform/normal generation (independent of
// stdlib distribution internals).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open0() { return 1.0 - uniform01(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection-free enough for our n << 2^64.
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

    // Polar Box-Muller with cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double exponential(double mean) { return -mean * std::log(uniform01_open0()); }

    std::int64_t binomial(std::int64_t n, double p) {
        if (n <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        std::binomial_distribution<std::int64_t> dist(n, p);
        return dist(engine_);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Number of workers for parallel sections: NEWSFLOW_WORKERS if set, else
// hardware concurrency, always >= 1.
unsigned worker_count();

// Runs fn(i) for i in [0, n) across workers. Tasks must be independent;
// callers collect results by index so the outcome does not depend on
// scheduling or the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned workers = 0);

// FNV-1a 64-bit content fingerprint (hex), used in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string fnv1a64_hex(const std::string& bytes);
std::string file_digest(const std::string& path);

// Shortest-round-trip-ish decimal formatting for doubles ("%.17g" collapsed
// when fewer digits reproduce the value). Deterministic across runs.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace newsflow
