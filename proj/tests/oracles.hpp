// Brute-force reference models shared by the unit and acceptance tests.
// Deliberately naive: linear scans over plain vectors, no hashing.

#ifndef PAGELAB_TESTS_ORACLES_HPP
#define PAGELAB_TESTS_ORACLES_HPP

#include "pagelab/page.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle
{

using Pages = std::vector<std::uint64_t>;

inline bool has(Pages const & v, std::uint64_t p)
{
    return std::find(v.begin(), v.end(), p) != v.end();
}

// Microset tracer, straight from the textual rule: a page outside the open
// microset faults; a fault with a full microset closes it first.
inline std::vector<Pages> trace(Pages const & stream, std::size_t microset_size)
{
    std::vector<Pages> out;
    Pages open;
    for (auto p : stream) {
        if (has(open, p))
            continue;
        if (open.size() == microset_size) {
            out.push_back(open);
            open.clear();
        }
        open.push_back(p);
    }
    if (!open.empty())
        out.push_back(open);
    return out;
}

inline Pages flatten(std::vector<Pages> const & microsets)
{
    Pages out;
    for (auto const & m : microsets)
        out.insert(out.end(), m.begin(), m.end());
    return out;
}

// LRU as an explicit recency stack: index 0 is most recent.
inline Pages lru_misses(Pages const & seq, std::size_t capacity)
{
    Pages stack;
    Pages misses;
    for (auto p : seq) {
        auto it = std::find(stack.begin(), stack.end(), p);
        if (it != stack.end()) {
            stack.erase(it);
        } else {
            misses.push_back(p);
            if (stack.size() == capacity)
                stack.pop_back();
        }
        stack.insert(stack.begin(), p);
    }
    return misses;
}

inline bool is_subsequence(Pages const & small, Pages const & big)
{
    std::size_t i = 0;
    for (auto p : big) {
        if (i < small.size() && small[i] == p)
            ++i;
    }
    return i == small.size();
}

// A stream with a tunable amount of reuse: mostly draws from a small hot set.
inline Pages random_stream(std::mt19937_64 & rng, std::size_t length, std::uint64_t universe)
{
    std::uniform_int_distribution<std::uint64_t> any(0, universe - 1);
    std::uniform_int_distribution<std::uint64_t> hot(0, std::max<std::uint64_t>(1, universe / 8) - 1);
    std::bernoulli_distribution pick_hot(0.5);
    Pages out(length);
    for (auto & p : out)
        p = pick_hot(rng) ? hot(rng) : any(rng);
    return out;
}

inline std::vector<pagelab::PageId> to_ids(Pages const & v)
{
    std::vector<pagelab::PageId> out;
    out.reserve(v.size());
    for (auto p : v)
        out.push_back(pagelab::PageId{p});
    return out;
}

inline Pages to_values(std::vector<pagelab::PageId> const & v)
{
    Pages out;
    out.reserve(v.size());
    for (auto p : v)
        out.push_back(p.value);
    return out;
}

} // namespace oracle

#endif
