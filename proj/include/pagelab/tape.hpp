#ifndef PAGELAB_TAPE_HPP
#define PAGELAB_TAPE_HPP

#include "pagelab/page.hpp"
#include "pagelab/tracer.hpp"

#include <cstdint>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

namespace pagelab
{

/// Per-thread pages to prefetch, in the order the application will need them.
struct Tape
{
    std::vector<std::vector<PageId>> per_thread;
    std::uint64_t target_pages = 0;
    // 0 when unknown (the tape file does not carry it).
    std::uint32_t microset_size = 0;

    std::size_t thread_count() const { return per_thread.size(); }
    std::uint64_t length() const;

    friend bool operator==(Tape const &, Tape const &) = default;
};

struct PostprocessConfig
{
    std::uint64_t target_pages = 1;
    std::uint32_t thread_count = 1;
};

/// Exact LRU set of fixed capacity; reports misses.
class LruFilter
{
public:
    explicit LruFilter(std::size_t capacity);

    /// Touches the page; returns true if it was absent (a miss).
    bool access(PageId page);

    std::size_t size() const { return order_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool contains(PageId page) const { return where_.contains(page); }

private:
    std::size_t capacity_;
    std::list<PageId> order_; // front is most recently used
    std::unordered_map<PageId, std::list<PageId>::iterator> where_;
};

/// LRU miss sequence of pages at the given capacity.
std::vector<PageId> lru_misses(std::span<PageId const> pages, std::uint64_t capacity);

/// Per-thread capacity when a tape is split across n threads: floor(C/n), at least 1.
std::uint64_t per_thread_capacity(std::uint64_t target_pages, std::uint32_t threads);

Tape make_tape(Trace const & trace, std::uint64_t target_pages);

/// Post-processes every thread with its share of the target; threads run in parallel.
Tape make_tapes_multithread(Trace const & trace, std::uint64_t target_pages, std::uint32_t threads);

} // namespace pagelab

#endif // PAGELAB_TAPE_HPP
