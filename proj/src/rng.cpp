#include "kacq/rng.hpp"

#include <unordered_set>

namespace kacq {

std::vector<std::uint32_t> sample_distinct(std::uint64_t domain, std::size_t k, Rng& rng) {
    if (k > domain) throw std::invalid_argument("sample_distinct: k exceeds domain size");
    // Rejection is fast while k is small relative to the domain; otherwise do
    // a partial Fisher-Yates over the full domain.
    if (k * 4 <= domain) {
        std::unordered_set<std::uint32_t> seen;
        std::vector<std::uint32_t> out;
        out.reserve(k);
        seen.reserve(k * 2);
        while (out.size() < k) {
            const auto v = static_cast<std::uint32_t>(rng.below(domain));
            if (seen.insert(v).second) out.push_back(v);
        }
        return out;
    }
    std::vector<std::uint32_t> pool(domain);
    for (std::uint64_t i = 0; i < domain; ++i) pool[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.below(domain - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace kacq
