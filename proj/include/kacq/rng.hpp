#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace kacq {

// splitmix64 finalizer, used to derive well-separated child seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded random source injected into every stochastic operation.
//
// mt19937_64 output is fixed by the standard, and bounded sampling is done
// by rejection, so identical seeds give identical experiments on any
// platform/toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // uniform in [0, bound)
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v > limit);
        return v % bound;
    }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

// Independent per-trial stream; trials can run in parallel in any order.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial_index) {
    return Rng(mix64(seed ^ mix64(trial_index)));
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.below(i)]);
    }
}

// k distinct values from [0, domain), uniform without replacement.
std::vector<std::uint32_t> sample_distinct(std::uint64_t domain, std::size_t k, Rng& rng);

}  // namespace kacq
