#ifndef PAGELAB_TRACER_HPP
#define PAGELAB_TRACER_HPP

#include "pagelab/page.hpp"
#include "pagelab/workload.hpp"

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

namespace pagelab
{

/// Pages in the order they first faulted while the microset was open.
using Microset = std::vector<PageId>;

struct Trace
{
    std::vector<std::vector<Microset>> per_thread;
    std::uint32_t microset_size = 0;
    std::uint64_t fault_count = 0;

    std::size_t thread_count() const { return per_thread.size(); }

    /// Total number of recorded pages (the trace length).
    std::uint64_t length() const;

    /// Microsets of one thread concatenated in order.
    std::vector<PageId> flattened(std::size_t thread) const;

    friend bool operator==(Trace const &, Trace const &) = default;
};

/*
 * Fault-driven recorder for one thread. Only pages of the open microset are
 * "present"; touching any other page is a simulated fault that records it.
 * When a fault arrives with the microset full, the microset is flushed and
 * every one of its pages loses presence.
 */
class MicrosetTracer
{
public:
    explicit MicrosetTracer(std::uint32_t microset_size);

    void access(PageId page);

    /// Flushes the partial microset and hands over everything recorded.
    std::vector<Microset> finish();

    std::uint64_t faults() const { return faults_; }
    std::unordered_set<PageId> const & traced_pages() const { return traced_; }

private:
    void flush();

    std::uint32_t microset_size_;
    Microset microset_;
    std::unordered_set<PageId> present_;
    std::unordered_set<PageId> traced_;
    std::vector<Microset> recorded_;
    std::uint64_t faults_ = 0;
};

Trace trace_stream(std::span<PageId const> stream, std::uint32_t microset_size);

/*
 * Replays threads serially in round-robin quanta, as if all of them were
 * pinned to one core. Every thread keeps its own present set, so a page
 * another thread currently holds still faults and lands in this thread's
 * trace.
 */
Trace trace_multithread(AccessStream const & streams, std::uint32_t microset_size,
                        std::uint64_t interleaving_quantum);

} // namespace pagelab

#endif // PAGELAB_TRACER_HPP
