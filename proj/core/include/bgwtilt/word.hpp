#pragma once

#include "bgwtilt/rational.hpp"

#include <algorithm>
#include <vector>

namespace bgwtilt {

/// Ordered word of child types; letters are 0-based type indices.
using Word = std::vector<int>;

/// Type-count vector (length K): entry j = number of j's.
using MultiIndex = std::vector<unsigned>;

inline MultiIndex project_word(const Word& w, int num_types) {
    MultiIndex k(static_cast<std::size_t>(num_types), 0u);
    for (int letter : w) ++k[static_cast<std::size_t>(letter)];
    return k;
}

inline unsigned long long weight_of(const MultiIndex& k) {
    unsigned long long n = 0;
    for (unsigned v : k) n += v;
    return n;
}

/// Number of distinct orderings of the multiset described by k:
/// (sum k)! / prod k_j!.
inline Integer ordering_count(const MultiIndex& k) {
    unsigned n = 0;
    for (unsigned v : k) n += v;
    Integer r = factorial(n);
    for (unsigned v : k) r /= factorial(v);
    return r;
}

/// All distinct words with projection k, in lexicographic order.
std::vector<Word> distinct_orderings(const MultiIndex& k);

/// Canonical order on words: by length, then lexicographic.
struct WordLess {
    bool operator()(const Word& a, const Word& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

} // namespace bgwtilt
