#include "bspec/symbolic.hpp"

#include <algorithm>

namespace bspec {

std::string Configuration::token() const {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(word[i] + 1);
    }
    return out;
}

Configuration Configuration::from_token(const std::string& token) {
    Configuration c;
    std::size_t pos = 0;
    while (pos < token.size()) {
        std::size_t dash = token.find('-', pos);
        if (dash == std::string::npos) dash = token.size();
        const std::string piece = token.substr(pos, dash - pos);
        if (piece.empty() || piece.size() > 9 ||
            piece.find_first_not_of("0123456789") != std::string::npos)
            throw PreconditionError("bad configuration token: " + token);
        const int label = std::stoi(piece);
        if (label < 1)
            throw PreconditionError("obstacle labels are 1-based: " + token);
        c.word.push_back(label - 1);
        pos = dash + 1;
    }
    if (c.word.size() < 2) throw PreconditionError("configuration token too short: " + token);
    return c;
}

bool Configuration::reversal_symmetric() const {
    std::vector<int> rev(word.rbegin(), word.rend());
    return canonical_rotation(rev) == word;
}

std::vector<int> canonical_rotation(const std::vector<int>& word) {
    const std::size_t k = word.size();
    std::size_t best = 0;
    for (std::size_t start = 1; start < k; ++start) {
        for (std::size_t i = 0; i < k; ++i) {
            const int a = word[(start + i) % k];
            const int b = word[(best + i) % k];
            if (a != b) {
                if (a < b) best = start;
                break;
            }
        }
    }
    std::vector<int> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = word[(best + i) % k];
    return out;
}

bool is_cyclically_admissible(const std::vector<int>& word) {
    const std::size_t k = word.size();
    if (k < 2) return false;
    for (std::size_t i = 0; i < k; ++i)
        if (word[i] == word[(i + 1) % k]) return false;
    return true;
}

bool is_primitive(const std::vector<int>& word) {
    const std::size_t k = word.size();
    for (std::size_t d = 1; d < k; ++d) {
        if (k % d) continue;
        bool periodic = true;
        for (std::size_t i = d; i < k && periodic; ++i) periodic = (word[i] == word[i - d]);
        if (periodic) return false;
    }
    return true;
}

int parity(const Configuration& config, long n) {
    return (static_cast<long>(config.k()) * n) % 2 == 0 ? +1 : -1;
}

bool reversal_equivalent(const Configuration& a, const Configuration& b) {
    if (a.word == b.word) return true;
    if (a.word.size() != b.word.size()) return false;
    std::vector<int> rev(a.word.rbegin(), a.word.rend());
    return canonical_rotation(rev) == b.word;
}

std::vector<Configuration> enumerate_configurations(int r, int k_max, std::size_t cap) {
    if (r < 3) throw PreconditionError("enumerate_configurations: need r >= 3");
    if (k_max < 2) throw PreconditionError("enumerate_configurations: need k_max >= 2");

    std::vector<Configuration> out;
    std::vector<int> w;
    // DFS in lexicographic order.  The canonical rotation starts with the
    // minimal letter, so every letter >= w[0] is a valid prune.
    auto dfs = [&](auto&& self, int k) -> void {
        if (static_cast<int>(w.size()) == k) {
            if (w.back() == w.front()) return;           // cyclic admissibility
            if (!is_primitive(w)) return;
            if (canonical_rotation(w) != w) return;      // exactly one representative
            if (out.size() >= cap)
                throw CapacityExceeded("enumerate_configurations beyond " + std::to_string(cap) +
                                       " words");
            out.push_back(Configuration{w});
            return;
        }
        for (int letter = w.empty() ? 0 : w.front(); letter < r; ++letter) {
            if (!w.empty() && letter == w.back()) continue;
            w.push_back(letter);
            self(self, k);
            w.pop_back();
        }
    };
    for (int k = 2; k <= k_max; ++k) {
        w.clear();
        dfs(dfs, k);
    }
    return out;
}

}
