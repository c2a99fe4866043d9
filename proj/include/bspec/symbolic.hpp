#ifndef BSPEC_SYMBOLIC_HPP
#define BSPEC_SYMBOLIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bspec/errors.hpp"

namespace bspec {

// Primitive admissible cyclic word of obstacle indices (0-based internally;
// serialized 1-based as dash-joined tokens, e.g. "1-2-1-3").  Stored in
// canonical rotation: the lexicographically least rotation, so each oriented
// periodic ray has exactly one representative.  A word and its reversal are
// distinct entries when rotation-inequivalent (oriented counting).
struct Configuration {
    std::vector<int> word;

    int k() const { return static_cast<int>(word.size()); }
    std::string token() const;
    static Configuration from_token(const std::string& token);
    // True when the reversed word is a rotation of the word itself
    // (e.g. every 2-letter word, or 1-2-1-3); flagged for auditability.
    bool reversal_symmetric() const;

    bool operator==(const Configuration& o) const { return word == o.word; }
    bool operator<(const Configuration& o) const {
        if (word.size() != o.word.size()) return word.size() < o.word.size();
        return word < o.word;
    }
};

// Lexicographically least rotation (Booth-style scan; k is small, the
// quadratic fallback is fine).
std::vector<int> canonical_rotation(const std::vector<int>& word);

// Adjacent letters differ, cyclically.
bool is_cyclically_admissible(const std::vector<int>& word);

// No divisor period: the word is not a strict power of a shorter cyclic word.
bool is_primitive(const std::vector<int>& word);

// Parity (-1)^{n k} of the n-fold iterate of a k-reflection primitive ray.
int parity(const Configuration& config, long n);

// True when b is a rotation of a reversed (or equal to a): the two oriented
// words trace the same geometric ray through the scene.
bool reversal_equivalent(const Configuration& a, const Configuration& b);

// All primitive admissible cyclic words over alphabet {0..r-1} with length
// 2..k_max, canonical, ordered by (k, lexicographic).  Throws
// CapacityExceeded when the output would exceed `cap` entries.
std::vector<Configuration> enumerate_configurations(int r, int k_max,
                                                    std::size_t cap = 5'000'000);

}

#endif
