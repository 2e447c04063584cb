#pragma once

#include <cstdint>
#include <vector>

#include "kacq/rng.hpp"

namespace kacq {

// An n-bit word, value < 2^n. Block sizes up to 24 bits are supported so a
// permutation and its inverse always fit in memory as dense tables.
using Word = std::uint32_t;

enum class Dir { Forward, Inverse };

constexpr int kMaxBlockBits = 24;
constexpr int kMinRandomBlockBits = 3;

// Explicit bijection on [0, 2^n) with a precomputed inverse, so forward and
// inverse queries are both O(1).
class Permutation {
public:
    Permutation() = default;

    static Permutation identity(int n);
    // Validates that `table` is a bijection on [0, 2^n).
    static Permutation from_table(int n, std::vector<Word> table);
    // Uniform random permutation (Fisher-Yates). Requires 3 <= n <= 24.
    static Permutation random(int n, Rng& rng);

    int n() const { return n_; }
    std::uint64_t domain_size() const { return std::uint64_t{1} << n_; }

    Word forward(Word x) const { return table_[x]; }
    Word inverse(Word y) const { return inverse_[y]; }
    Word apply(Dir d, Word x) const { return d == Dir::Forward ? table_[x] : inverse_[x]; }

    const std::vector<Word>& table() const { return table_; }

    bool operator==(const Permutation& o) const { return n_ == o.n_ && table_ == o.table_; }

private:
    Permutation(int n, std::vector<Word> table, std::vector<Word> inverse)
        : n_(n), table_(std::move(table)), inverse_(std::move(inverse)) {}

    int n_ = 0;
    std::vector<Word> table_;
    std::vector<Word> inverse_;
};

}  // namespace kacq
