#include "kacq/permutation.hpp"

#include <stdexcept>
#include <string>

namespace kacq {

namespace {

std::vector<Word> invert(int n, const std::vector<Word>& table) {
    const std::uint64_t size = std::uint64_t{1} << n;
    std::vector<Word> inv(size, size >= 1 ? static_cast<Word>(size) : 0);
    for (std::uint64_t x = 0; x < size; ++x) {
        const Word y = table[x];
        if (y >= size || inv[y] != static_cast<Word>(size)) {
            throw std::invalid_argument("Permutation: table is not a bijection on [0, 2^n)");
        }
        inv[y] = static_cast<Word>(x);
    }
    return inv;
}

}  // namespace

Permutation Permutation::identity(int n) {
    if (n < 1 || n > kMaxBlockBits) throw std::invalid_argument("Permutation: unsupported block size");
    const std::uint64_t size = std::uint64_t{1} << n;
    std::vector<Word> table(size);
    for (std::uint64_t x = 0; x < size; ++x) table[x] = static_cast<Word>(x);
    std::vector<Word> inv = table;
    return Permutation(n, std::move(table), std::move(inv));
}

Permutation Permutation::from_table(int n, std::vector<Word> table) {
    if (n < 1 || n > kMaxBlockBits) throw std::invalid_argument("Permutation: unsupported block size");
    if (table.size() != (std::uint64_t{1} << n)) {
        throw std::invalid_argument("Permutation: table size must be 2^n");
    }
    auto inv = invert(n, table);
    return Permutation(n, std::move(table), std::move(inv));
}

Permutation Permutation::random(int n, Rng& rng) {
    if (n < kMinRandomBlockBits || n > kMaxBlockBits) {
        throw std::invalid_argument("make_random_permutation: unsupported block size n=" + std::to_string(n) +
                                    " (need 3 <= n <= 24)");
    }
    const std::uint64_t size = std::uint64_t{1} << n;
    std::vector<Word> table(size);
    for (std::uint64_t x = 0; x < size; ++x) table[x] = static_cast<Word>(x);
    shuffle(table, rng);
    auto inv = invert(n, table);
    return Permutation(n, std::move(table), std::move(inv));
}

}  // namespace kacq
