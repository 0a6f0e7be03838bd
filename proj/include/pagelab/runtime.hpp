#ifndef PAGELAB_RUNTIME_HPP
#define PAGELAB_RUNTIME_HPP

#include "pagelab/page.hpp"
#include "pagelab/tape.hpp"
#include "pagelab/workload.hpp"

#include <json.hpp>

#include <cstdint>
#include <deque>
#include <list>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace pagelab
{

/// Simulated time in picoseconds. Integer so that time sums are exact.
using SimTime = std::int64_t;

SimTime us_to_ps(double us);
double ps_to_us(SimTime ps);

/*
 * Machine and prefetcher parameters. Costs are in microseconds. A link or
 * reclaimer rate of 0 means unlimited.
 */
struct SimConfig
{
    std::uint64_t local_pages = 1;
    double fetch_latency_us = 5.0;
    double link_gbps = 25.0;
    double cpu_access_cost_us = 0.2;
    double minor_fault_cost_us = 1.0;
    double major_fault_overhead_us = 2.0;
    std::uint32_t batch_size = 100;
    std::uint32_t lookahead = 400;
    std::uint32_t readahead_window = 8;
    std::uint32_t stride_history = 4;
    std::uint64_t interleaving_quantum = 64;
    double reclaimer_pages_per_us = 0.0;
    // Write-back buffer of the reclaimer; evictions stall once it is full.
    std::uint64_t reclaim_pool_pages = 32;
    bool audit = false;

    void validate() const;

    /// Wire time of one page on the fetch link.
    SimTime page_service_time() const;
};

struct NoPrefetch
{
};

struct ReadaheadPolicy
{
    std::uint32_t window = 8;
};

/// Majority-stride detector over recent major faults.
struct StridePolicy
{
    std::uint32_t history_len = 4;
    std::uint32_t window = 8;
};

/// Tape-driven prefetching with key pages.
struct ThreePoPolicy
{
    Tape tape;
};

using PrefetchPolicy = std::variant<NoPrefetch, ReadaheadPolicy, StridePolicy, ThreePoPolicy>;

std::string_view policy_name(PrefetchPolicy const & policy);

/*
 * Local memory of one simulated machine: resident frames with an LRU order,
 * fetches still on the wire, and the swap slots assigned at eviction.
 * Resident pages may be unmapped (prefetched but not yet visible).
 */
class MemoryState
{
public:
    MemoryState(std::uint64_t capacity, SimTime writeback_time, std::uint64_t reclaim_pool_pages);

    std::uint64_t capacity() const { return capacity_; }
    std::uint64_t present_count() const { return resident_.size(); }
    std::uint64_t in_flight_count() const { return in_flight_.size(); }
    std::uint64_t mapped_count() const { return mapped_count_; }
    std::uint64_t evictions() const { return evictions_; }

    bool present(PageId page) const { return resident_.contains(page); }
    bool mapped(PageId page) const;
    bool referenced(PageId page) const;
    bool in_flight(PageId page) const { return in_flight_.contains(page); }
    std::optional<SimTime> arrival(PageId page) const;
    std::optional<SimTime> earliest_arrival() const;

    std::optional<std::uint64_t> swap_slot(PageId page) const;
    std::optional<PageId> page_in_slot(std::uint64_t slot) const;

    bool has_free_frame() const { return resident_.size() + in_flight_.size() < capacity_; }
    std::optional<PageId> lru_victim() const;

    /// Places a page directly into a free frame (no fetch).
    void install(PageId page, bool mapped);
    /// Occupies a free frame with a fetch that lands at `completion`.
    void begin_fetch(PageId page, SimTime completion);
    /// Lands every fetch with completion <= now; returns how many landed.
    std::size_t retire(SimTime now);

    /*
     * Hands the LRU victim to the reclaimer and assigns it the next swap
     * slot. Returns when its frame may be reused: now, unless the
     * write-back buffer is full.
     */
    SimTime evict_lru(SimTime now);

    void map(PageId page);
    /// Marks an access: most recently used and referenced.
    void touch(PageId page);

    /// Throws AuditFailure if a structural invariant is broken.
    void audit() const;

private:
    struct Resident
    {
        std::list<PageId>::iterator lru;
        bool mapped = false;
        bool referenced = false;
    };

    struct Arrival
    {
        SimTime time;
        std::uint64_t seq;
        PageId page;

        bool operator>(Arrival const & o) const
        {
            return time != o.time ? time > o.time : seq > o.seq;
        }
    };

    std::uint64_t capacity_;
    SimTime writeback_time_;
    std::uint64_t reclaim_pool_pages_;

    std::unordered_map<PageId, Resident> resident_;
    std::list<PageId> lru_; // front is least recently used
    std::unordered_map<PageId, SimTime> in_flight_;
    std::priority_queue<Arrival, std::vector<Arrival>, std::greater<>> arrivals_;
    std::uint64_t arrival_seq_ = 0;

    std::unordered_map<PageId, std::uint64_t> slot_of_;
    std::unordered_map<std::uint64_t, PageId> page_in_slot_;
    std::uint64_t next_slot_ = 0;

    std::deque<SimTime> writeback_backlog_;
    SimTime reclaimer_free_at_ = 0;

    std::uint64_t mapped_count_ = 0;
    std::uint64_t evictions_ = 0;
};

/// Per-thread key page bookkeeping of the tape prefetcher.
struct KeyPageState
{
    std::optional<PageId> key;
    std::size_t key_index = 0;
    // Tape entries before this index have been requested.
    std::size_t prefetch_end = 0;

    friend bool operator==(KeyPageState const &, KeyPageState const &) = default;
};

/// What the tape prefetcher does when a thread faults on its key page.
struct KeyFaultPlan
{
    KeyPageState next;
    std::size_t fetch_begin = 0; // tape index range to request, [begin, end)
    std::size_t fetch_end = 0;
    std::size_t map_begin = 0; // tape index range to map if resident
    std::size_t map_end = 0;
};

KeyPageState threepo_bootstrap(std::span<PageId const> tape, SimConfig const & config);

KeyFaultPlan threepo_on_key_fault(KeyPageState const & state, std::span<PageId const> tape,
                                  MemoryState const & memory, SimConfig const & config);

/// Threads other than `mapper` whose key page is `mapped_page`.
std::vector<std::size_t> threepo_on_map(PageId mapped_page, std::size_t mapper,
                                        std::span<KeyPageState const> key_states);

/*
 * Demand page first, then up to window - 1 neighbours. Neighbours follow
 * swap-slot order when the page has a slot, virtual addresses otherwise.
 * Resident and in-flight neighbours are skipped.
 */
std::vector<PageId> readahead_on_major(PageId faulted, MemoryState const & memory,
                                       std::uint32_t window, std::uint64_t address_space_pages);

/// Delta held by a strict majority of consecutive differences, if any.
std::optional<std::int64_t> majority_delta(std::span<PageId const> history);

/// Appends a faulted page to a stride history of at most `history_len` entries.
void record_fault(std::deque<PageId> & history, PageId page, std::uint32_t history_len);

/// Records the fault in `history`, then returns demand page + stride or readahead candidates.
std::vector<PageId> stride_on_major(PageId faulted, std::deque<PageId> & history,
                                    MemoryState const & memory, StridePolicy const & policy,
                                    std::uint64_t address_space_pages);

struct ThreadReport
{
    std::uint64_t accesses = 0;
    std::uint64_t hits = 0;
    std::uint64_t minors = 0;
    std::uint64_t delayed_hits = 0;
    std::uint64_t majors = 0;
    double cpu_us = 0;
    double handler_us = 0;
    double stall_io_us = 0;
    double evict_stall_us = 0;

    friend bool operator==(ThreadReport const &, ThreadReport const &) = default;
};

struct SimReport
{
    std::string policy;
    std::uint64_t local_pages = 0;
    std::uint64_t accesses = 0;
    std::uint64_t hits = 0;
    std::uint64_t minors = 0;
    std::uint64_t delayed_hits = 0;
    std::uint64_t majors = 0;
    double cpu_us = 0;
    double handler_us = 0;
    double stall_io_us = 0;
    double evict_stall_us = 0;
    double total_us = 0;
    // Wait for the initial tape window; part of stall_io_us, not of any thread.
    double startup_us = 0;
    std::uint64_t demand_fetches = 0;
    std::uint64_t prefetches = 0;
    std::uint64_t evictions = 0;
    std::uint64_t key_faults = 0;
    std::uint64_t premapped = 0;
    double peak_link_utilization = 0;
    std::optional<std::uint64_t> tape_target_pages;
    // Tape was post-processed for less memory than the run has.
    bool tape_capacity_mismatch = false;
    std::vector<ThreadReport> per_thread;

    friend bool operator==(SimReport const &, SimReport const &) = default;
};

SimReport run_sim(AccessStream const & streams, PrefetchPolicy const & policy, SimConfig const & config);

void to_json(nlohmann::json & j, SimConfig const & config);
void from_json(nlohmann::json const & j, SimConfig & config);
void to_json(nlohmann::json & j, ThreadReport const & report);
void from_json(nlohmann::json const & j, ThreadReport & report);
void to_json(nlohmann::json & j, SimReport const & report);
void from_json(nlohmann::json const & j, SimReport & report);

} // namespace pagelab

#endif // PAGELAB_RUNTIME_HPP
