#include "pagelab/tracer.hpp"

#include <algorithm>

namespace pagelab
{

std::uint64_t Trace::length() const
{
    std::uint64_t n = 0;
    for (auto const & thread : per_thread) {
        for (auto const & ms : thread)
            n += ms.size();
    }
    return n;
}

std::vector<PageId> Trace::flattened(std::size_t thread) const
{
    std::vector<PageId> out;
    for (auto const & ms : per_thread.at(thread))
        out.insert(out.end(), ms.begin(), ms.end());
    return out;
}

MicrosetTracer::MicrosetTracer(std::uint32_t microset_size)
    : microset_size_(microset_size)
{
    if (microset_size == 0)
        throw InvalidParameter("microset size must be at least 1");
    microset_.reserve(std::min<std::uint32_t>(microset_size, 4096));
}

void MicrosetTracer::access(PageId page)
{
    if (present_.contains(page))
        return;
    ++faults_;
    if (microset_.size() == microset_size_)
        flush();
    microset_.push_back(page);
    present_.insert(page);
    traced_.insert(page);
}

void MicrosetTracer::flush()
{
    if (microset_.empty())
        return;
    recorded_.push_back(std::move(microset_));
    microset_.clear();
    present_.clear();
}

std::vector<Microset> MicrosetTracer::finish()
{
    flush();
    return std::move(recorded_);
}

Trace trace_stream(std::span<PageId const> stream, std::uint32_t microset_size)
{
    MicrosetTracer tracer(microset_size);
    for (auto page : stream)
        tracer.access(page);
    Trace trace;
    trace.microset_size = microset_size;
    trace.fault_count = tracer.faults();
    trace.per_thread.push_back(tracer.finish());
    return trace;
}

Trace trace_multithread(AccessStream const & streams, std::uint32_t microset_size,
                        std::uint64_t interleaving_quantum)
{
    if (streams.per_thread.empty())
        throw InvalidParameter("tracing needs at least one thread");
    if (interleaving_quantum == 0)
        throw InvalidParameter("interleaving quantum must be positive");

    auto const n = streams.thread_count();
    std::vector<MicrosetTracer> tracers;
    tracers.reserve(n);
    for (std::size_t t = 0; t < n; ++t)
        tracers.emplace_back(microset_size);

    std::vector<std::size_t> cursor(n, 0);
    bool pending = true;
    while (pending) {
        pending = false;
        for (std::size_t t = 0; t < n; ++t) {
            auto const & s = streams.per_thread[t];
            auto stop = std::min<std::size_t>(s.size(), cursor[t] + interleaving_quantum);
            for (; cursor[t] < stop; ++cursor[t])
                tracers[t].access(s[cursor[t]]);
            pending = pending || cursor[t] < s.size();
        }
    }

    Trace trace;
    trace.microset_size = microset_size;
    for (auto & tracer : tracers) {
        trace.fault_count += tracer.faults();
        trace.per_thread.push_back(tracer.finish());
    }
    return trace;
}

} // namespace pagelab
