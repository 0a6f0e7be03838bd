#include "pagelab/runtime.hpp"

#include <algorithm>
#include <cmath>

namespace pagelab
{

SimTime us_to_ps(double us)
{
    return static_cast<SimTime>(std::llround(us * 1e6));
}

double ps_to_us(SimTime ps)
{
    return static_cast<double>(ps) / 1e6;
}

MemoryState::MemoryState(std::uint64_t capacity, SimTime writeback_time,
                         std::uint64_t reclaim_pool_pages)
    : capacity_(capacity)
    , writeback_time_(writeback_time)
    , reclaim_pool_pages_(reclaim_pool_pages)
{
    if (capacity == 0)
        throw InvalidParameter("local memory must hold at least 1 page");
    resident_.reserve(capacity);
}

bool MemoryState::mapped(PageId page) const
{
    auto it = resident_.find(page);
    return it != resident_.end() && it->second.mapped;
}

bool MemoryState::referenced(PageId page) const
{
    auto it = resident_.find(page);
    return it != resident_.end() && it->second.referenced;
}

std::optional<SimTime> MemoryState::arrival(PageId page) const
{
    if (auto it = in_flight_.find(page); it != in_flight_.end())
        return it->second;
    return std::nullopt;
}

std::optional<SimTime> MemoryState::earliest_arrival() const
{
    if (arrivals_.empty())
        return std::nullopt;
    return arrivals_.top().time;
}

std::optional<std::uint64_t> MemoryState::swap_slot(PageId page) const
{
    if (auto it = slot_of_.find(page); it != slot_of_.end())
        return it->second;
    return std::nullopt;
}

std::optional<PageId> MemoryState::page_in_slot(std::uint64_t slot) const
{
    if (auto it = page_in_slot_.find(slot); it != page_in_slot_.end())
        return it->second;
    return std::nullopt;
}

std::optional<PageId> MemoryState::lru_victim() const
{
    if (lru_.empty())
        return std::nullopt;
    return lru_.front();
}

void MemoryState::install(PageId page, bool mapped)
{
    if (present(page) || in_flight(page))
        throw InvalidParameter("page is already resident or in flight");
    if (!has_free_frame())
        throw InvalidParameter("no free frame");
    lru_.push_back(page);
    resident_.emplace(page, Resident{std::prev(lru_.end()), mapped, false});
    if (mapped)
        ++mapped_count_;
}

void MemoryState::begin_fetch(PageId page, SimTime completion)
{
    if (present(page) || in_flight(page))
        throw InvalidParameter("page is already resident or in flight");
    if (!has_free_frame())
        throw InvalidParameter("no free frame");
    in_flight_.emplace(page, completion);
    arrivals_.push(Arrival{completion, arrival_seq_++, page});
}

std::size_t MemoryState::retire(SimTime now)
{
    std::size_t landed = 0;
    while (!arrivals_.empty() && arrivals_.top().time <= now) {
        auto page = arrivals_.top().page;
        arrivals_.pop();
        in_flight_.erase(page);
        lru_.push_back(page);
        resident_.emplace(page, Resident{std::prev(lru_.end()), false, false});
        ++landed;
    }
    return landed;
}

SimTime MemoryState::evict_lru(SimTime now)
{
    if (lru_.empty())
        throw InvalidParameter("no resident page to evict");
    auto victim = lru_.front();
    lru_.pop_front();
    auto it = resident_.find(victim);
    if (it->second.mapped)
        --mapped_count_;
    resident_.erase(it);
    ++evictions_;

    if (auto old = slot_of_.find(victim); old != slot_of_.end())
        page_in_slot_.erase(old->second);
    slot_of_[victim] = next_slot_;
    page_in_slot_[next_slot_] = victim;
    ++next_slot_;

    while (!writeback_backlog_.empty() && writeback_backlog_.front() <= now)
        writeback_backlog_.pop_front();
    auto done = std::max(reclaimer_free_at_, now) + writeback_time_;
    reclaimer_free_at_ = done;
    writeback_backlog_.push_back(done);
    if (writeback_backlog_.size() <= reclaim_pool_pages_)
        return now;
    // wait until enough write-backs finish to leave room for this one
    auto excess = writeback_backlog_.size() - reclaim_pool_pages_;
    return std::max(now, writeback_backlog_[excess - 1]);
}

void MemoryState::map(PageId page)
{
    auto it = resident_.find(page);
    if (it == resident_.end())
        throw InvalidParameter("cannot map a page that is not resident");
    if (!it->second.mapped) {
        it->second.mapped = true;
        ++mapped_count_;
    }
}

void MemoryState::touch(PageId page)
{
    auto it = resident_.find(page);
    if (it == resident_.end())
        throw InvalidParameter("cannot touch a page that is not resident");
    lru_.splice(lru_.end(), lru_, it->second.lru);
    it->second.referenced = true;
}

void MemoryState::audit() const
{
    if (resident_.size() + in_flight_.size() > capacity_)
        throw AuditFailure("resident + in-flight pages exceed local memory");
    if (lru_.size() != resident_.size())
        throw AuditFailure("LRU order does not cover exactly the resident pages");
    if (mapped_count_ > resident_.size())
        throw AuditFailure("more mapped pages than resident pages");
    if (arrivals_.size() != in_flight_.size())
        throw AuditFailure("arrival queue out of sync with in-flight set");
}

} // namespace pagelab
