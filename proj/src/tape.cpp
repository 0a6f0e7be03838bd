#include "pagelab/tape.hpp"

#include <algorithm>

namespace pagelab
{

std::uint64_t Tape::length() const
{
    std::uint64_t n = 0;
    for (auto const & t : per_thread)
        n += t.size();
    return n;
}

LruFilter::LruFilter(std::size_t capacity)
    : capacity_(capacity)
{
    if (capacity == 0)
        throw InvalidParameter("LRU capacity must be at least 1 page");
    where_.reserve(capacity);
}

bool LruFilter::access(PageId page)
{
    if (auto it = where_.find(page); it != where_.end()) {
        order_.splice(order_.begin(), order_, it->second);
        return false;
    }
    if (order_.size() == capacity_) {
        where_.erase(order_.back());
        order_.pop_back();
    }
    order_.push_front(page);
    where_.emplace(page, order_.begin());
    return true;
}

std::vector<PageId> lru_misses(std::span<PageId const> pages, std::uint64_t capacity)
{
    LruFilter lru(capacity);
    std::vector<PageId> misses;
    for (auto page : pages) {
        if (lru.access(page))
            misses.push_back(page);
    }
    return misses;
}

std::uint64_t per_thread_capacity(std::uint64_t target_pages, std::uint32_t threads)
{
    if (threads == 0)
        throw InvalidParameter("thread count must be positive");
    return std::max<std::uint64_t>(1, target_pages / threads);
}

Tape make_tape(Trace const & trace, std::uint64_t target_pages)
{
    if (trace.thread_count() != 1)
        throw InvalidParameter("make_tape expects a single-thread trace");
    return make_tapes_multithread(trace, target_pages, 1);
}

Tape make_tapes_multithread(Trace const & trace, std::uint64_t target_pages, std::uint32_t threads)
{
    if (target_pages == 0)
        throw InvalidParameter("target memory must be at least 1 page");
    if (threads != trace.thread_count())
        throw InvalidParameter("thread count does not match the trace");

    auto capacity = per_thread_capacity(target_pages, threads);
    Tape tape;
    tape.target_pages = target_pages;
    tape.microset_size = trace.microset_size;
    tape.per_thread.resize(threads);

    auto const n = static_cast<std::int64_t>(threads);
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
    for (std::int64_t t = 0; t < n; ++t) {
        auto idx = static_cast<std::size_t>(t);
        LruFilter lru(capacity);
        auto & out = tape.per_thread[idx];
        for (auto const & ms : trace.per_thread[idx]) {
            for (auto page : ms) {
                if (lru.access(page))
                    out.push_back(page);
            }
        }
    }
    return tape;
}

} // namespace pagelab
